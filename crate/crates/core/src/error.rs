use thiserror::Error;

use crate::grid::Coord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid format error on line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("grid contains unknown cells")]
    UnknownCells,

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell {0:?} is out of bounds")]
    OutOfBounds(Coord),

    #[error("cell {0:?} is not free")]
    NotFree(Coord),

    #[error("observation at {0:?} contradicts what is already known")]
    Contradiction(Coord),

    #[error("weight codec error: {0}")]
    Codec(String),

    #[error("tensor shape error: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
