use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A lattice point with all coordinates zero has no admissible color.
    #[error("empty color list: the zero vector admits no color")]
    EmptyColorList,

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A certificate that must hold for every admissible input failed.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("search space of {size} labelings exceeds node budget {budget}; enable pruning")]
    SearchSpaceTooLarge { size: String, budget: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
