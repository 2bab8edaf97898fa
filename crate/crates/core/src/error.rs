use thiserror::Error;

/// Failures raised by the library. Numerical overflow is never an error:
/// it is reported as `+∞` together with a finiteness flag.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// An argument is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Inputs are individually valid but cannot be combined as requested.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// The requested constant family does not apply to the given exponents.
    #[error("dispatch error: {0}")]
    Dispatch(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Parameter(msg.into()))
}
