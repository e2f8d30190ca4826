//! Single-photon state and the primitive optical elements.
//!
//! A [`PhotonState`] is a dense list of complex amplitudes over named spatial
//! modes together with a set of *terminal* branches. Terminal branches are
//! classical probabilities: once a photon is absorbed (the bomb explodes) the
//! branch is recorded and never interferes again.
//!
//! Beam splitters use the symmetric convention
//!
//! ```text
//! U = | t    i r |      t = sqrt(T), r = sqrt(1 - T)
//!     | i r  t   |
//! ```
//!
//! which is unitary for every `T` in `[0, 1]`. A Mach-Zehnder built from two
//! such splitters has a dark port whenever `t1 t2 = r1 r2`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{check_unit_interval, IfmError, Result};
use crate::PROB_TOLERANCE;

pub type Amplitude = Complex64;

pub const EXPLOSION: &str = "explosion";

fn default_outcome_label() -> String {
    EXPLOSION.to_owned()
}

fn default_present() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    pub mode_a: String,
    pub mode_b: String,
    /// Power transmission `T`; the reflectivity is `1 - T`.
    pub transmission: f64,
}

impl BeamSplitter {
    pub fn new(mode_a: impl Into<String>, mode_b: impl Into<String>, transmission: f64) -> Result<Self> {
        check_unit_interval("transmission", transmission)?;
        Ok(Self {
            mode_a: mode_a.into(),
            mode_b: mode_b.into(),
            transmission,
        })
    }

    /// Splitter that rotates population by `theta`, i.e. `T = cos^2(theta)`.
    ///
    /// `theta = pi/2` is a perfect mirror and yields `T = 0` exactly rather
    /// than the `~1e-33` that `cos(pi/2)^2` rounds to.
    pub fn rotation(mode_a: impl Into<String>, mode_b: impl Into<String>, theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(IfmError::Domain {
                param: "theta",
                value: theta,
                reason: "must lie in [0, pi/2]",
            });
        }
        let transmission = if theta == FRAC_PI_2 { 0.0 } else { theta.cos().powi(2) };
        Self::new(mode_a, mode_b, transmission)
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.transmission
    }

    pub fn matrix(&self) -> [[Amplitude; 2]; 2] {
        let t = Complex64::new(self.transmission.sqrt(), 0.0);
        let ir = Complex64::new(0.0, (1.0 - self.transmission).sqrt());
        [[t, ir], [ir, t]]
    }

    fn validate(&self) -> Result<()> {
        check_unit_interval("transmission", self.transmission)?;
        if self.mode_a == self.mode_b {
            return Err(IfmError::DuplicateMode(self.mode_a.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShifter {
    pub mode: String,
    /// Radians.
    pub phase: f64,
}

impl PhaseShifter {
    pub fn new(mode: impl Into<String>, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(IfmError::Domain {
                param: "phase",
                value: phase,
                reason: "must be finite",
            });
        }
        Ok(Self {
            mode: mode.into(),
            phase,
        })
    }
}

/// A perfect absorber on one mode, e.g. the trigger mirror of a bomb.
///
/// When `present` is false the element is a dud and does nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub mode: String,
    #[serde(default = "default_present")]
    pub present: bool,
    #[serde(default = "default_outcome_label")]
    pub outcome_label: String,
}

impl Absorber {
    pub fn new(mode: impl Into<String>, present: bool) -> Self {
        Self {
            mode: mode.into(),
            present,
            outcome_label: default_outcome_label(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.outcome_label = label.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    BeamSplitter(BeamSplitter),
    Phase(PhaseShifter),
    Absorber(Absorber),
}

impl Element {
    /// Every mode the element acts on.
    pub fn modes(&self) -> Vec<&str> {
        match self {
            Element::BeamSplitter(bs) => vec![bs.mode_a.as_str(), bs.mode_b.as_str()],
            Element::Phase(ph) => vec![ph.mode.as_str()],
            Element::Absorber(ab) => vec![ab.mode.as_str()],
        }
    }
}

impl From<BeamSplitter> for Element {
    fn from(e: BeamSplitter) -> Self {
        Element::BeamSplitter(e)
    }
}

impl From<PhaseShifter> for Element {
    fn from(e: PhaseShifter) -> Self {
        Element::Phase(e)
    }
}

impl From<Absorber> for Element {
    fn from(e: Absorber) -> Self {
        Element::Absorber(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    modes: Vec<(String, Amplitude)>,
    terminal: BTreeMap<String, f64>,
}

impl PhotonState {
    /// A photon entering on `input_mode` with amplitude one.
    pub fn single_photon<S: AsRef<str>>(modes: &[S], input_mode: &str) -> Result<Self> {
        let amps = modes
            .iter()
            .map(|m| {
                let m = m.as_ref();
                let a = if m == input_mode { 1.0 } else { 0.0 };
                (m.to_owned(), Complex64::new(a, 0.0))
            })
            .collect::<Vec<_>>();
        if !amps.iter().any(|(m, _)| m == input_mode) {
            return Err(IfmError::UnknownMode(input_mode.to_owned()));
        }
        Self::new(amps, BTreeMap::new())
    }

    /// Builds a state from explicit amplitudes and terminal probabilities.
    ///
    /// Fails unless mode ids are unique, every number is finite, terminal
    /// probabilities are non-negative and the total probability is one.
    pub fn new(modes: Vec<(String, Amplitude)>, terminal: BTreeMap<String, f64>) -> Result<Self> {
        for (i, (m, a)) in modes.iter().enumerate() {
            if modes[..i].iter().any(|(other, _)| other == m) {
                return Err(IfmError::DuplicateMode(m.clone()));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(IfmError::Domain {
                    param: "amplitude",
                    value: f64::NAN,
                    reason: "must be finite",
                });
            }
        }
        for (label, &p) in &terminal {
            if !p.is_finite() || p < 0.0 {
                return Err(IfmError::InvalidProbability {
                    label: label.clone(),
                    value: p,
                });
            }
        }
        let state = Self { modes, terminal };
        let total = state.total_probability();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(IfmError::NotNormalized(total));
        }
        Ok(state)
    }

    pub fn modes(&self) -> impl Iterator<Item = (&str, Amplitude)> {
        self.modes.iter().map(|(m, a)| (m.as_str(), *a))
    }

    pub fn amplitudes(&self) -> Vec<Amplitude> {
        self.modes.iter().map(|(_, a)| *a).collect()
    }

    pub fn amplitude(&self, mode: &str) -> Option<Amplitude> {
        self.modes.iter().find(|(m, _)| m == mode).map(|(_, a)| *a)
    }

    pub fn terminal(&self) -> &BTreeMap<String, f64> {
        &self.terminal
    }

    pub fn terminal_prob(&self, label: &str) -> f64 {
        self.terminal.get(label).copied().unwrap_or(0.0)
    }

    /// `sum |amp|^2 + sum terminal`; one for every valid state.
    pub fn total_probability(&self) -> f64 {
        self.modes.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>() + self.terminal.values().sum::<f64>()
    }

    fn index_of(&self, mode: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|(m, _)| m == mode)
            .ok_or_else(|| IfmError::UnknownMode(mode.to_owned()))
    }

    pub fn apply(&self, element: &Element) -> Result<Self> {
        let mut next = self.clone();
        next.apply_in_place(element)?;
        Ok(next)
    }

    pub(crate) fn apply_in_place(&mut self, element: &Element) -> Result<()> {
        match element {
            Element::BeamSplitter(bs) => {
                bs.validate()?;
                let ia = self.index_of(&bs.mode_a)?;
                let ib = self.index_of(&bs.mode_b)?;
                let u = bs.matrix();
                let (a, b) = (self.modes[ia].1, self.modes[ib].1);
                self.modes[ia].1 = u[0][0] * a + u[0][1] * b;
                self.modes[ib].1 = u[1][0] * a + u[1][1] * b;
            }
            Element::Phase(ph) => {
                let i = self.index_of(&ph.mode)?;
                self.modes[i].1 *= Complex64::from_polar(1.0, ph.phase);
            }
            Element::Absorber(ab) => {
                let i = self.index_of(&ab.mode)?;
                if ab.present {
                    let absorbed = self.modes[i].1.norm_sqr();
                    if absorbed > 0.0 {
                        *self.terminal.entry(ab.outcome_label.clone()).or_insert(0.0) += absorbed;
                    }
                    self.modes[i].1 = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(())
    }
}

pub fn apply_beam_splitter(state: &PhotonState, bs: &BeamSplitter) -> Result<PhotonState> {
    let mut next = state.clone();
    next.apply_in_place(&Element::BeamSplitter(bs.clone()))?;
    Ok(next)
}

pub fn apply_absorber(state: &PhotonState, absorber: &Absorber) -> Result<PhotonState> {
    let mut next = state.clone();
    next.apply_in_place(&Element::Absorber(absorber.clone()))?;
    Ok(next)
}

pub fn apply_phase(state: &PhotonState, phase: &PhaseShifter) -> Result<PhotonState> {
    let mut next = state.clone();
    next.apply_in_place(&Element::Phase(phase.clone()))?;
    Ok(next)
}

/// Collapses the state into an outcome distribution.
///
/// Each mode's `|amp|^2` is credited to the label its detector reports, and
/// terminal branches are carried over unchanged. Several modes may share a
/// label. A mode with nonzero amplitude and no detector is an error.
pub fn read_detectors(state: &PhotonState, detector_map: &BTreeMap<String, String>) -> Result<OutcomeDistribution> {
    for mode in detector_map.keys() {
        state.index_of(mode)?;
    }
    let mut probs = state.terminal.clone();
    for (mode, amp) in &state.modes {
        let p = amp.norm_sqr();
        match detector_map.get(mode) {
            Some(label) => *probs.entry(label.clone()).or_insert(0.0) += p,
            None if p > 0.0 => return Err(IfmError::Incomplete(mode.clone())),
            None => {}
        }
    }
    OutcomeDistribution::new(probs)
}
