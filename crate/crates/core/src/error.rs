use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("invalid plumbing tree: {0}")]
    InvalidTree(String),
    #[error("intersection form is not negative definite")]
    NotNegativeDefinite,
    #[error("vector is not characteristic at vertex {0}")]
    NotCharacteristic(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("no integral Poincare dual found for the characteristic vector")]
    NonIntegralDual,
    #[error("graph involution: {0}")]
    Automorphism(String),
    #[error("graded root unstable: {0}")]
    Unstable(String),
    #[error("lattice enumeration exceeds budget ({points} points > {budget})")]
    Budget { points: u128, budget: u128 },
    #[error("tree is not star-shaped")]
    NotStarShaped,
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("complex rank {rank} exceeds the enumeration bound {bound}")]
    RankBound { rank: usize, bound: usize },
    #[error("homology truncation unstable")]
    TruncationUnstable,
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid knot: {0}")]
    InvalidKnot(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
