use thiserror::Error;

use crate::radius::RadiusEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Malformed external input (matrix files, sweep specs).
    #[error("input error: {0}")]
    Input(String),

    /// A documented precondition does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The radius search hit its evaluation cap; the best enclosure found is attached.
    #[error(
        "numerical radius not certified: [{:.12e}, {:.12e}] after {} evaluations",
        .0.lo, .0.hi, .0.samples.len()
    )]
    Uncertified(Box<RadiusEstimate>),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Uncertified(_))
    }
}
