//! Exact single-photon propagation through lossy interferometers and the
//! interaction-free measurement protocols built on it.
//!
//! * [`quantum`]: photon state, beam splitters, phase shifters, absorbers and
//!   detector readout.
//! * [`network`]: ordered element lists, Mach-Zehnder construction and
//!   dark-port tuning.
//! * [`protocols`]: the bomb/mine test, its repeated variant, the Zeno chain
//!   and the X-ray cavity.
//! * [`generalized`]: the abstract probe/system measurement scheme.
//! * [`montecarlo`]: seeded outcome sampling and goodness-of-fit checks.

pub mod distribution;
pub mod error;
pub mod generalized;
pub mod montecarlo;
pub mod network;
pub mod protocols;
pub mod quantum;

pub use distribution::OutcomeDistribution;
pub use error::{IfmError, Result};
pub use generalized::{mz_as_generalized_ifm, run_generalized_ifm, GeneralizedIfmConfig, IfmResult, SystemState};
pub use montecarlo::{chi_square_check, sample, sample_parallel, sample_range, ChiSquare, TrialLedger};
pub use network::{build_mz, run_network, tune_dark_port, Arm, NetworkSpec};
pub use protocols::{
    efficiency, ev_mine_test, repeated_ev, xray_cavity, zeno_ifm, CavityConfig, ProtocolOutcome, ZenoConfig,
};
pub use quantum::{
    apply_absorber, apply_beam_splitter, apply_phase, read_detectors, Absorber, Amplitude, BeamSplitter, Element,
    PhaseShifter, PhotonState,
};

/// Absolute tolerance on probabilities that exact arithmetic would conserve.
pub const PROB_TOLERANCE: f64 = 1e-12;
