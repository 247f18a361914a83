use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("limit {limit} outside supported range {min}..={max}")]
    LimitOutOfRange { limit: u64, min: u64, max: u64 },

    #[error("could not allocate a table of {0} entries")]
    Allocation(u64),

    #[error("index {index} is outside the table range 1..={limit}")]
    OutOfTable { index: u64, limit: u64 },

    #[error("table covers 1..={have} but {need} is required")]
    TableTooSmall { need: u64, have: u64 },

    #[error("no decomposition of {0} reproduces its table value (corrupted table?)")]
    Inconsistent(u64),

    #[error("{0} is not of the form 2^i*3^j with i+j > 0")]
    NotSmooth(u64),

    #[error("residue {r} is out of range for base {base}")]
    ResidueOutOfRange { base: u64, r: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("bad table file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
