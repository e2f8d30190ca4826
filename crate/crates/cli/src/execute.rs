//! Evaluating validated requests with the core library.

use ifm_core::generalized::CHI_PERP;
use ifm_core::montecarlo::{frequency_violations, sample_parallel};
use ifm_core::network::dark_port_leak;
use ifm_core::protocols::{CAVITY_ABSORBED, CAVITY_LEFT, CAVITY_RIGHT, ZENO_OBJECT, ZENO_SAFE};
use ifm_core::quantum::EXPLOSION;
use ifm_core::{
    chi_square_check, efficiency, ev_mine_test, repeated_ev, run_generalized_ifm, tune_dark_port, xray_cavity,
    zeno_ifm, ChiSquare, OutcomeDistribution, SystemState, TrialLedger,
};

use crate::request::{Protocol, ProtocolParams};
use crate::CliError;

/// Exact result of one protocol evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub distribution: OutcomeDistribution,
    pub efficiency: Option<f64>,
    pub single_shot_efficiency: Option<f64>,
    pub rounds_expected: Option<f64>,
    /// Generalized protocol only.
    pub post_system_state_on_chi_perp: Option<Option<SystemState>>,
}

/// Outcome labels each protocol always reports, in output column order.
pub fn outcome_labels(protocol: Protocol) -> &'static [&'static str] {
    match protocol {
        Protocol::Penrose | Protocol::Ev | Protocol::RepeatedEv => &["D1", "D2", EXPLOSION],
        Protocol::Zeno => &[EXPLOSION, ZENO_OBJECT, ZENO_SAFE],
        Protocol::Xray => &[CAVITY_ABSORBED, CAVITY_LEFT, CAVITY_RIGHT],
        Protocol::Generalized => &["chi", CHI_PERP, EXPLOSION],
    }
}

/// Whether the protocol reports efficiency columns.
pub fn has_efficiency(protocol: Protocol) -> bool {
    protocol != Protocol::Xray
}

pub fn evaluate(params: &ProtocolParams) -> Result<Evaluation, CliError> {
    let from_outcome = |o: ifm_core::ProtocolOutcome| Evaluation {
        distribution: o.distribution,
        efficiency: Some(o.efficiency),
        single_shot_efficiency: Some(o.single_shot_efficiency),
        rounds_expected: Some(o.rounds_expected),
        post_system_state_on_chi_perp: None,
    };
    let eval = match params {
        ProtocolParams::Ev {
            reflectivity,
            object_present,
        } => from_outcome(ev_mine_test(*reflectivity, *object_present)?),
        ProtocolParams::RepeatedEv { reflectivity } => from_outcome(repeated_ev(*reflectivity)?),
        ProtocolParams::Zeno(cfg) => from_outcome(zeno_ifm(cfg)?),
        ProtocolParams::Xray(cfg) => Evaluation {
            distribution: xray_cavity(cfg)?,
            efficiency: None,
            single_shot_efficiency: None,
            rounds_expected: None,
            post_system_state_on_chi_perp: None,
        },
        ProtocolParams::Generalized(cfg) => {
            let res = run_generalized_ifm(cfg)?;
            Evaluation {
                efficiency: Some(efficiency(&res.distribution, CHI_PERP, EXPLOSION)),
                single_shot_efficiency: Some(res.distribution.prob(CHI_PERP)),
                rounds_expected: Some(1.0),
                post_system_state_on_chi_perp: Some(res.post_system_state_on_chi_perp),
                distribution: res.distribution,
            }
        }
    };
    Ok(eval)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub exact: Evaluation,
    pub ledger: TrialLedger,
    pub chi_square: ChiSquare,
    /// Labels outside the 4-sigma binomial band.
    pub four_sigma_violations: Vec<String>,
}

pub fn sample_protocol(params: &ProtocolParams, trials: u64, seed: u64, workers: usize) -> Result<Sampled, CliError> {
    let exact = evaluate(params)?;
    let ledger = sample_parallel(&exact.distribution, trials, seed, workers);
    let chi_square = chi_square_check(&ledger, &exact.distribution);
    let four_sigma_violations = if trials == 0 {
        Vec::new()
    } else {
        frequency_violations(&ledger, &exact.distribution, 4.0)
    };
    Ok(Sampled {
        exact,
        ledger,
        chi_square,
        four_sigma_violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuning {
    pub t1: f64,
    pub t2: f64,
    pub dark_port_leak: f64,
}

pub fn tune(t1: f64) -> Result<Tuning, CliError> {
    if !t1.is_finite() || t1 <= 0.0 || t1 >= 1.0 {
        return Err(CliError::invalid(
            "T1",
            format!("must lie strictly between 0 and 1, got {t1}"),
        ));
    }
    let t2 = tune_dark_port(t1)?;
    Ok(Tuning {
        t1,
        t2,
        dark_port_leak: dark_port_leak(t1, t2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ev_evaluation() {
        let p = ProtocolParams::Ev {
            reflectivity: 0.5,
            object_present: true,
        };
        let e = evaluate(&p).unwrap();
        assert!((e.distribution.prob("D2") - 0.25).abs() < 1e-12);
        assert_eq!(e.single_shot_efficiency, Some(e.distribution.prob("D2")));
        assert!((e.efficiency.unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tune_rejects_degenerate() {
        assert!(tune(0.0).is_err());
        assert!(tune(1.0).is_err());
        let t = tune(0.9).unwrap();
        assert!((t.t2 - 0.1).abs() < 1e-15);
        assert!(t.dark_port_leak <= 1e-12);
    }

    #[test]
    fn sampling_reports_fit() {
        let p = ProtocolParams::Ev {
            reflectivity: 0.5,
            object_present: true,
        };
        let s = sample_protocol(&p, 10_000, 3, 2).unwrap();
        assert_eq!(s.ledger.trials, 10_000);
        assert!(s.chi_square.pass);
        assert!(s.four_sigma_violations.is_empty());
    }
}
