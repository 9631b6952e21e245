use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed the precision-doubling acceptance test.
    #[error("precision exhausted for {what}: only {agreed_digits:.1} digits agreed at {bits} bits")]
    Precision {
        what: String,
        bits: u32,
        agreed_digits: f64,
    },

    /// Hankel factorization broke down even at the highest allowed precision.
    #[error("moment matrix is numerically singular at n = {n} ({bits} bits)")]
    Conditioning { n: usize, bits: u32 },

    #[error("singular step: {0}")]
    Singular(String),

    #[error("index {index} out of range (valid: {min}..={max})")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn check_index(index: usize, min: usize, max: usize) -> Result<()> {
        if index < min || index > max {
            Err(Error::IndexOutOfRange { index, min, max })
        } else {
            Ok(())
        }
    }
}
