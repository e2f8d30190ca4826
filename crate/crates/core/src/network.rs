//! Interferometer descriptions and exact propagation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{check_open_unit_interval, check_unit_interval, IfmError, Result};
use crate::quantum::{read_detectors, Absorber, BeamSplitter, Element, PhotonState};

/// Arm of the two-mode Mach-Zehnder.
///
/// The photon enters on the upper mode. The first splitter's reflected output
/// is the lower arm, which is where an object sits unless told otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// Reflected by the first splitter.
    #[default]
    Lower,
    /// Transmitted by the first splitter.
    Upper,
}

impl Arm {
    pub fn mode(self) -> &'static str {
        match self {
            Arm::Lower => MZ_LOWER,
            Arm::Upper => MZ_UPPER,
        }
    }
}

pub const MZ_UPPER: &str = "upper";
pub const MZ_LOWER: &str = "lower";
/// Bright output of a tuned interferometer.
pub const D1: &str = "D1";
/// Dark output of a tuned interferometer.
pub const D2: &str = "D2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub modes: Vec<String>,
    pub input_mode: String,
    pub elements: Vec<Element>,
    /// Detector label for each mode.
    pub detector_map: BTreeMap<String, String>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].contains(m) {
                return Err(IfmError::DuplicateMode(m.clone()));
            }
        }
        let known = |m: &str| -> Result<()> {
            if self.modes.iter().any(|x| x == m) {
                Ok(())
            } else {
                Err(IfmError::UnknownMode(m.to_owned()))
            }
        };
        known(&self.input_mode)?;
        for e in &self.elements {
            for m in e.modes() {
                known(m)?;
            }
        }
        for m in self.detector_map.keys() {
            known(m)?;
        }
        if let Some(m) = self.modes.iter().find(|m| !self.detector_map.contains_key(*m)) {
            return Err(IfmError::Incomplete(m.clone()));
        }
        Ok(())
    }

    /// Amplitudes and terminal branches just before the detectors.
    pub fn propagate(&self) -> Result<PhotonState> {
        self.validate()?;
        let mut state = PhotonState::single_photon(&self.modes, &self.input_mode)?;
        for e in &self.elements {
            state.apply_in_place(e)?;
        }
        Ok(state)
    }
}

/// Propagates a single photon through `spec` and reads out every detector.
pub fn run_network(spec: &NetworkSpec) -> Result<OutcomeDistribution> {
    let state = spec.propagate()?;
    read_detectors(&state, &spec.detector_map)
}

/// Two-splitter Mach-Zehnder with an optional absorber between the splitters.
///
/// The upper output after the second splitter goes to `D2`, the lower one to
/// `D1`. With `t2 = tune_dark_port(t1)` and no object, `D2` stays dark.
pub fn build_mz(t1: f64, t2: f64, object_present: bool, object_arm: Arm) -> Result<NetworkSpec> {
    check_unit_interval("t1", t1)?;
    check_unit_interval("t2", t2)?;
    let elements = vec![
        BeamSplitter::new(MZ_UPPER, MZ_LOWER, t1)?.into(),
        Absorber::new(object_arm.mode(), object_present).into(),
        BeamSplitter::new(MZ_UPPER, MZ_LOWER, t2)?.into(),
    ];
    Ok(NetworkSpec {
        modes: vec![MZ_UPPER.to_owned(), MZ_LOWER.to_owned()],
        input_mode: MZ_UPPER.to_owned(),
        elements,
        detector_map: [
            (MZ_UPPER.to_owned(), D2.to_owned()),
            (MZ_LOWER.to_owned(), D1.to_owned()),
        ]
        .into(),
    })
}

/// Second-splitter transmission that darkens `D2` for a given first splitter.
///
/// The upper output amplitude of the empty interferometer is `t1 t2 - r1 r2`,
/// which vanishes for `T2 = 1 - T1`.
pub fn tune_dark_port(t1: f64) -> Result<f64> {
    check_open_unit_interval("t1", t1)?;
    Ok(1.0 - t1)
}

/// Probability reaching `D2` in the empty interferometer.
pub fn dark_port_leak(t1: f64, t2: f64) -> Result<f64> {
    Ok(run_network(&build_mz(t1, t2, false, Arm::Lower)?)?.prob(D2))
}
