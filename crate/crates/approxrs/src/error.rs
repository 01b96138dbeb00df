use thiserror::Error;

/// Errors shared by every structure in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A position or length argument fell outside the valid range.
    #[error("argument {arg} out of range {lo}..={hi}")]
    Range { arg: u64, lo: u64, hi: u64 },
    /// A rank argument asked for an occurrence that does not exist.
    #[error("occurrence {rank} requested but only {available} exist")]
    NotFound { rank: u64, available: u64 },
    /// A construction parameter was rejected.
    #[error("invalid parameter: {0}")]
    Param(String),
    /// Input data violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),
    /// Serialized bytes could not be decoded.
    #[error("malformed data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

#[inline]
pub(crate) fn check_range(arg: u64, lo: u64, hi: u64) -> Result<()> {
    if arg < lo || arg > hi {
        Err(Error::Range { arg, lo, hi })
    } else {
        Ok(())
    }
}
