//! Command-line front end for `ifm-core`.
//!
//! ```text
//! ifm run    --protocol ev --param R=0.5 --param present=true
//! ifm sweep  --protocol repeated_ev --grid R=0.5,0.25,0.1,0.01 --format csv
//! ifm sample --protocol zeno --param N=10 --param present=true --trials 1000000 --seed 7
//! ifm tune   --param T1=0.9
//! ```
//!
//! Exit codes: 0 on success, 1 on internal error, 2 on invalid input.

pub mod app;
pub mod execute;
pub mod output;
pub mod request;

use ifm_core::IfmError;
use thiserror::Error;

pub use app::{run_cli, Cli};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn invalid(param: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("invalid parameter {param}: {reason}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<IfmError> for CliError {
    fn from(e: IfmError) -> Self {
        match e {
            IfmError::Domain { .. } | IfmError::Degenerate(_) => CliError::Validation(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}
