//! Abstract interaction-free measurement of a system state.
//!
//! A probe with two orthogonal states `Phi1`, `Phi2` is prepared in
//! `chi = alpha Phi1 + beta Phi2`. If the system is in `Psi` and the probe is
//! in `Phi1`, the system is destroyed (explosion). Every other pairing leaves
//! both untouched. Reading the probe in the `{chi, chi_perp}` basis, with
//! `chi_perp = -conj(beta) Phi1 + alpha Phi2`, can only give `chi_perp` when
//! the system was `Psi`, and then leaves the system in `Psi`.
//!
//! The joint system-probe state is evolved explicitly as a four-mode
//! [`PhotonState`], with the explosion handled by an absorber on the
//! `Psi Phi1` component.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{check_open_unit_interval, IfmError, Result};
use crate::quantum::{Absorber, Amplitude, PhotonState, EXPLOSION};
use crate::PROB_TOLERANCE;

pub const CHI: &str = "chi";
pub const CHI_PERP: &str = "chi_perp";

const PSI_PHI1: &str = "psi_phi1";
const PSI_PHI2: &str = "psi_phi2";
const PERP_PHI1: &str = "perp_phi1";
const PERP_PHI2: &str = "perp_phi2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemState {
    /// The state whose detection destroys it.
    Psi,
    /// Orthogonal to `Psi`; never interacts.
    PsiPerp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedIfmConfig {
    pub alpha: Amplitude,
    pub beta: Amplitude,
    pub system: SystemState,
}

impl GeneralizedIfmConfig {
    pub fn new(alpha: Amplitude, beta: Amplitude, system: SystemState) -> Result<Self> {
        let cfg = Self { alpha, beta, system };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > PROB_TOLERANCE {
            return Err(IfmError::Domain {
                param: "alpha, beta",
                value: norm,
                reason: "|alpha|^2 + |beta|^2 must equal 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfmResult {
    /// Over `explosion`, `chi` and `chi_perp`.
    pub distribution: OutcomeDistribution,
    /// System state left behind by a `chi_perp` readout, if that readout is
    /// possible at all.
    pub post_system_state_on_chi_perp: Option<SystemState>,
}

pub fn run_generalized_ifm(cfg: &GeneralizedIfmConfig) -> Result<IfmResult> {
    cfg.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let (sys_psi, sys_perp) = match cfg.system {
        SystemState::Psi => (1.0, 0.0),
        SystemState::PsiPerp => (0.0, 1.0),
    };
    let joint = PhotonState::new(
        vec![
            (PSI_PHI1.to_owned(), cfg.alpha * sys_psi),
            (PSI_PHI2.to_owned(), cfg.beta * sys_psi),
            (PERP_PHI1.to_owned(), cfg.alpha * sys_perp),
            (PERP_PHI2.to_owned(), cfg.beta * sys_perp),
        ],
        BTreeMap::new(),
    )?;
    // Psi Phi1 -> explosion; every other component is left alone.
    let after = joint.apply(&Absorber::new(PSI_PHI1, true).into())?;
    let amp = |m: &str| after.amplitude(m).unwrap_or(zero);

    // <chi|Phi1> = conj(alpha), <chi|Phi2> = conj(beta)
    // <chi_perp|Phi1> = -beta,  <chi_perp|Phi2> = alpha
    let on_chi = |p1: Amplitude, p2: Amplitude| cfg.alpha.conj() * p1 + cfg.beta.conj() * p2;
    let on_perp = |p1: Amplitude, p2: Amplitude| -cfg.beta * p1 + cfg.alpha * p2;

    let perp_given_psi = on_perp(amp(PSI_PHI1), amp(PSI_PHI2)).norm_sqr();
    let perp_given_perp = on_perp(amp(PERP_PHI1), amp(PERP_PHI2)).norm_sqr();
    let chi = on_chi(amp(PSI_PHI1), amp(PSI_PHI2)).norm_sqr() + on_chi(amp(PERP_PHI1), amp(PERP_PHI2)).norm_sqr();

    let post_system_state_on_chi_perp = match (perp_given_psi > 0.0, perp_given_perp > 0.0) {
        (true, false) => Some(SystemState::Psi),
        (false, true) => Some(SystemState::PsiPerp),
        // A mixture cannot arise from the binary system selector.
        (true, true) => unreachable!("system input is a basis state"),
        (false, false) => None,
    };
    let distribution = OutcomeDistribution::from_pairs([
        (EXPLOSION, after.terminal_prob(EXPLOSION)),
        (CHI, chi),
        (CHI_PERP, perp_given_psi + perp_given_perp),
    ])?;
    Ok(IfmResult {
        distribution,
        post_system_state_on_chi_perp,
    })
}

/// Reads the Mach-Zehnder with first-splitter reflectivity `r` as a probe
/// preparation: the reflected (lower) arm is `Phi1`, the transmitted arm
/// `Phi2`. The splitter's `i` on reflection is absorbed into the phase of the
/// `Phi1` basis vector, so both coefficients are real.
pub fn mz_as_generalized_ifm(reflectivity: f64) -> Result<GeneralizedIfmConfig> {
    check_open_unit_interval("R", reflectivity)?;
    GeneralizedIfmConfig::new(
        Complex64::new(reflectivity.sqrt(), 0.0),
        Complex64::new((1.0 - reflectivity).sqrt(), 0.0),
        SystemState::Psi,
    )
}

/// Interferometer detector names for the probe readout: the bright port
/// `D1` sees `chi` and the dark port `D2` sees `chi_perp`.
pub const MZ_LABELS: [(&str, &str); 3] = [(CHI, "D1"), (CHI_PERP, "D2"), (EXPLOSION, EXPLOSION)];

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::protocols::ev_mine_test;

    fn c(re: f64, im: f64) -> Amplitude {
        Complex64::new(re, im)
    }

    #[test]
    fn balanced_probe() {
        let cfg = GeneralizedIfmConfig::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), SystemState::Psi).unwrap();
        let res = run_generalized_ifm(&cfg).unwrap();
        assert_abs_diff_eq!(res.distribution.prob(EXPLOSION), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(res.distribution.prob(CHI), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(res.distribution.prob(CHI_PERP), 0.25, epsilon = 1e-12);
        assert_eq!(res.post_system_state_on_chi_perp, Some(SystemState::Psi));
    }

    #[test]
    fn orthogonal_system_untouched() {
        for (a, b) in [
            (c(0.6, 0.0), c(0.8, 0.0)),
            (c(0.0, 1.0), c(0.0, 0.0)),
            (c(0.3, 0.4), c(0.0, -0.866_025_403_784_438_6)),
        ] {
            let cfg = GeneralizedIfmConfig::new(a, b, SystemState::PsiPerp).unwrap();
            let res = run_generalized_ifm(&cfg).unwrap();
            assert_abs_diff_eq!(res.distribution.prob(CHI), 1.0, epsilon = 1e-12);
            assert_eq!(res.distribution.prob(CHI_PERP), 0.0);
            assert_eq!(res.distribution.prob(EXPLOSION), 0.0);
            assert_eq!(res.post_system_state_on_chi_perp, None);
        }
    }

    #[test]
    fn point_six_point_eight() {
        let cfg = GeneralizedIfmConfig::new(c(0.6, 0.0), c(0.8, 0.0), SystemState::Psi).unwrap();
        let d = run_generalized_ifm(&cfg).unwrap().distribution;
        assert_abs_diff_eq!(d.prob(EXPLOSION), 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(d.prob(CHI), 0.4096, epsilon = 1e-12);
        assert_abs_diff_eq!(d.prob(CHI_PERP), 0.2304, epsilon = 1e-12);
    }

    #[test]
    fn rejects_unnormalized_probe() {
        assert!(GeneralizedIfmConfig::new(c(0.6, 0.0), c(0.6, 0.0), SystemState::Psi).is_err());
        let raw = GeneralizedIfmConfig {
            alpha: c(1.0, 0.0),
            beta: c(1.0, 0.0),
            system: SystemState::Psi,
        };
        assert!(run_generalized_ifm(&raw).is_err());
    }

    #[test]
    fn mz_mapping_matches_mine_test() {
        let cfg = mz_as_generalized_ifm(0.5).unwrap();
        assert_abs_diff_eq!(cfg.alpha.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.beta.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        for r in [0.5, 0.25, 0.9] {
            let probe = run_generalized_ifm(&mz_as_generalized_ifm(r).unwrap()).unwrap();
            let mz = ev_mine_test(r, true).unwrap().distribution;
            assert!(
                probe.distribution.relabel(&MZ_LABELS).max_abs_diff(&mz) <= 1e-12,
                "R = {r}"
            );
        }
        assert!(mz_as_generalized_ifm(0.0).is_err());
    }

    fn arb_probe() -> impl Strategy<Value = (Amplitude, Amplitude)> {
        (0.0..std::f64::consts::FRAC_PI_2, -3.2..3.2f64, -3.2..3.2f64)
            .prop_map(|(w, pa, pb)| (Complex64::from_polar(w.cos(), pa), Complex64::from_polar(w.sin(), pb)))
    }

    proptest! {
        #[test]
        fn matches_closed_form((alpha, beta) in arb_probe()) {
            let cfg = GeneralizedIfmConfig::new(alpha, beta, SystemState::Psi).unwrap();
            let res = run_generalized_ifm(&cfg).unwrap();
            let (a2, b2) = (alpha.norm_sqr(), beta.norm_sqr());
            prop_assert!((res.distribution.prob(EXPLOSION) - a2).abs() <= 1e-12);
            prop_assert!((res.distribution.prob(CHI) - b2 * b2).abs() <= 1e-12);
            prop_assert!((res.distribution.prob(CHI_PERP) - a2 * b2).abs() <= 1e-12);
            prop_assert!((a2 + b2 * b2 + a2 * b2 - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn perp_system_never_gives_chi_perp((alpha, beta) in arb_probe()) {
            let cfg = GeneralizedIfmConfig::new(alpha, beta, SystemState::PsiPerp).unwrap();
            let res = run_generalized_ifm(&cfg).unwrap();
            prop_assert_eq!(res.distribution.prob(CHI_PERP), 0.0);
        }
    }
}
