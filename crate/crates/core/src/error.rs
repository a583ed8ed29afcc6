use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("not a Euclidean diagram: {0}")]
    NotEuclidean(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unimodular")]
    NotUnimodular,

    #[error("{0} is not an exceptional root")]
    NotExceptional(String),

    #[error("invalid module id {0}")]
    InvalidModule(String),

    #[error("vertex {0} is neither a sink nor a source")]
    NotSinkOrSource(usize),

    #[error("vertex {vertex} is not a {expected} at this step")]
    IllegalFlip { vertex: usize, expected: &'static str },

    #[error("no flip sequence: {0}")]
    NoFlipSequence(String),

    #[error("the transported module is the simple at the flipped vertex {0}")]
    KilledSimple(usize),

    #[error("search box has {0} points, above the limit")]
    BoxTooLarge(u128),

    #[error("iteration bound exceeded: {0}")]
    IterationBound(String),

    #[error("wrong quiver type: {0}")]
    WrongType(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
