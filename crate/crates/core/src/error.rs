use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inadmissible construction parameters: {0}")]
    Inadmissible(String),

    #[error("expected a real-valued function")]
    NotReal,

    #[error("quadrature did not reach tolerance: estimate {value}, error {error}")]
    NotConverged { value: f64, error: f64 },

    #[error("too few usable levels for a trend fit: {0}")]
    TooFewLevels(usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub(crate) fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
