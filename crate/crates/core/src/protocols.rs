//! Bomb and mine tests, the repeated asymmetric protocol, the Zeno chain and
//! the two-mode X-ray cavity.
//!
//! Efficiency is reported two ways. `single_shot_efficiency` is the chance a
//! single photon certifies the object without destroying it (25% for the
//! balanced interferometer). `efficiency` is that probability conditioned on
//! the run ending in either success or explosion, which is what an
//! experimenter who repeats on inconclusive clicks achieves in the long run.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{check_open_unit_interval, IfmError, Result};
use crate::network::{build_mz, run_network, tune_dark_port, Arm, NetworkSpec, D1, D2};
use crate::quantum::{Absorber, BeamSplitter, EXPLOSION};
use crate::PROB_TOLERANCE;

pub const ZENO_SAFE: &str = "safe";
pub const ZENO_OBJECT: &str = "object";
pub const CAVITY_LEFT: &str = "left";
pub const CAVITY_RIGHT: &str = "right";
pub const CAVITY_ABSORBED: &str = "absorbed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub distribution: OutcomeDistribution,
    /// `P(success) / (P(success) + P(explosion))`.
    pub efficiency: f64,
    /// `P(success)` for a single photon.
    pub single_shot_efficiency: f64,
    /// Mean number of photons sent before the protocol terminates.
    pub rounds_expected: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZenoConfig {
    pub cycles: u32,
    pub object_present: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Power transmission of the intermediate mirror.
    pub coupler_transmission: f64,
    pub bounces: u32,
    pub absorber_present: bool,
}

impl CavityConfig {
    pub fn validate(&self) -> Result<()> {
        let c = self.coupler_transmission;
        if !c.is_finite() || c <= 0.0 || c >= 1.0 {
            return Err(IfmError::Domain {
                param: "coupler_transmission",
                value: c,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(())
    }
}

/// `P(success) / (P(success) + P(failure))`, or zero when neither happens.
///
/// A denominator within the probability tolerance of zero counts as zero, so
/// a dark port that leaks `1e-33` through rounding does not report a
/// certain success.
pub fn efficiency(dist: &OutcomeDistribution, success_label: &str, failure_label: &str) -> f64 {
    let success = dist.prob(success_label);
    let total = success + dist.prob(failure_label);
    if total <= PROB_TOLERANCE {
        0.0
    } else {
        success / total
    }
}

fn ev_distribution(reflectivity: f64, object_present: bool) -> Result<OutcomeDistribution> {
    check_open_unit_interval("R", reflectivity)?;
    let t1 = 1.0 - reflectivity;
    let spec = build_mz(t1, tune_dark_port(t1)?, object_present, Arm::Lower)?;
    Ok(run_network(&spec)?.with_labels([D1, D2, EXPLOSION]))
}

/// Elitzur-Vaidman mine test in a dark-port-tuned interferometer whose first
/// splitter reflects `reflectivity` into the object's arm. A `D2` click
/// certifies the object.
pub fn ev_mine_test(reflectivity: f64, object_present: bool) -> Result<ProtocolOutcome> {
    let distribution = ev_distribution(reflectivity, object_present)?;
    Ok(ProtocolOutcome {
        efficiency: efficiency(&distribution, D2, EXPLOSION),
        single_shot_efficiency: distribution.prob(D2),
        rounds_expected: 1.0,
        distribution,
    })
}

/// The mine test repeated with a fresh photon after every `D1` click until
/// either `D2` clicks or the mine explodes.
///
/// Rounds are independent, so the terminal distribution is the single-round
/// one renormalized over `{D2, explosion}`. Under the splitter convention
/// the efficiency equals `(1 - R) / (2 - R)`, which tends to 1/2 as `R -> 0`.
pub fn repeated_ev(reflectivity: f64) -> Result<ProtocolOutcome> {
    let round = ev_distribution(reflectivity, true)?;
    let inconclusive = round.prob(D1);
    let eta = efficiency(&round, D2, EXPLOSION);
    let distribution = OutcomeDistribution::from_pairs([(D1, 0.0), (D2, eta), (EXPLOSION, 1.0 - eta)])?;
    Ok(ProtocolOutcome {
        distribution,
        efficiency: eta,
        single_shot_efficiency: round.prob(D2),
        rounds_expected: 1.0 / (1.0 - inconclusive),
    })
}

/// N-stage Zeno chain: each stage rotates the photon from the safe mode
/// towards the object mode by `pi / 2N`, and the object (if present) absorbs
/// whatever reached its mode.
pub fn zeno_network(cfg: &ZenoConfig) -> Result<NetworkSpec> {
    if cfg.cycles < 1 {
        return Err(IfmError::Domain {
            param: "N",
            value: cfg.cycles as f64,
            reason: "must be at least 1",
        });
    }
    let theta = FRAC_PI_2 / cfg.cycles as f64;
    let stage = BeamSplitter::rotation(ZENO_SAFE, ZENO_OBJECT, theta)?;
    let absorber = Absorber::new(ZENO_OBJECT, cfg.object_present);
    let elements = (0..cfg.cycles)
        .flat_map(|_| [stage.clone().into(), absorber.clone().into()])
        .collect();
    Ok(NetworkSpec {
        modes: vec![ZENO_SAFE.to_owned(), ZENO_OBJECT.to_owned()],
        input_mode: ZENO_SAFE.to_owned(),
        elements,
        detector_map: [
            (ZENO_SAFE.to_owned(), ZENO_SAFE.to_owned()),
            (ZENO_OBJECT.to_owned(), ZENO_OBJECT.to_owned()),
        ]
        .into(),
    })
}

/// Zeno-enhanced interaction-free measurement. Ending in the safe mode
/// certifies the object, because without it the photon ends in the object
/// mode with certainty.
pub fn zeno_ifm(cfg: &ZenoConfig) -> Result<ProtocolOutcome> {
    let distribution = run_network(&zeno_network(cfg)?)?.with_labels([ZENO_SAFE, ZENO_OBJECT, EXPLOSION]);
    let success = if cfg.object_present {
        distribution.prob(ZENO_SAFE)
    } else {
        0.0
    };
    Ok(ProtocolOutcome {
        efficiency: if cfg.object_present {
            efficiency(&distribution, ZENO_SAFE, EXPLOSION)
        } else {
            0.0
        },
        single_shot_efficiency: success,
        rounds_expected: 1.0,
        distribution,
    })
}

/// Photon in a cavity split by a weakly transmitting mirror. Every bounce
/// coherently couples left and right by the mirror's transmission; an object
/// on the right absorbs whatever crossed over.
pub fn xray_cavity(cfg: &CavityConfig) -> Result<OutcomeDistribution> {
    cfg.validate()?;
    let bounce = BeamSplitter::new(CAVITY_LEFT, CAVITY_RIGHT, 1.0 - cfg.coupler_transmission)?;
    let absorber = Absorber::new(CAVITY_RIGHT, cfg.absorber_present).with_label(CAVITY_ABSORBED);
    let spec = NetworkSpec {
        modes: vec![CAVITY_LEFT.to_owned(), CAVITY_RIGHT.to_owned()],
        input_mode: CAVITY_LEFT.to_owned(),
        elements: (0..cfg.bounces)
            .flat_map(|_| [bounce.clone().into(), absorber.clone().into()])
            .collect(),
        detector_map: [
            (CAVITY_LEFT.to_owned(), CAVITY_LEFT.to_owned()),
            (CAVITY_RIGHT.to_owned(), CAVITY_RIGHT.to_owned()),
        ]
        .into(),
    };
    Ok(run_network(&spec)?.with_labels([CAVITY_LEFT, CAVITY_RIGHT, CAVITY_ABSORBED]))
}
