use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfmError {
    /// An element or detector refers to a mode the state does not carry.
    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("duplicate mode `{0}`")]
    DuplicateMode(String),

    /// A parameter lies outside its admissible range.
    #[error("invalid {param} = {value}: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The network cannot interfere (a splitter is a pure mirror or window).
    #[error("degenerate network: {0}")]
    Degenerate(String),

    /// A mode still holds amplitude but no detector watches it.
    #[error("mode `{0}` carries amplitude but has no detector")]
    Incomplete(String),

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid probability {value} for outcome `{label}`")]
    InvalidProbability { label: String, value: f64 },
}

pub type Result<T> = std::result::Result<T, IfmError>;

pub(crate) fn check_unit_interval(param: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(IfmError::Domain {
            param,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

pub(crate) fn check_open_unit_interval(param: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(IfmError::Domain {
            param,
            value,
            reason: "must lie in (0, 1)",
        });
    }
    if value == 0.0 || value == 1.0 {
        return Err(IfmError::Degenerate(format!(
            "{param} = {value} leaves no interference"
        )));
    }
    Ok(())
}
