use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance table is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },

    #[error("entries ({i},{j}) and ({j},{i}) differ by {diff:e}, beyond tolerance")]
    AsymmetryBeyondTolerance { i: usize, j: usize, diff: f64 },

    #[error("entry ({i},{j}) is negative or not finite: {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },

    #[error("diagonal entry ({i},{i}) is {value}, expected 0")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },

    #[error("matrices have different sizes: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("k = {k} out of range for {n} points (need 1 <= k <= n-1)")]
    KOutOfRange { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("family of sets is not a topology: {0}")]
    NotATopology(String),

    #[error("map is not monotone: {x} <= {y} but f({x}) = {fx} is not <= f({y}) = {fy}")]
    NotMonotone { x: usize, y: usize, fx: usize, fy: usize },

    #[error("poset is empty")]
    EmptyPoset,

    #[error("only the maximal-element crosscut is supported")]
    UnsupportedCrosscut,

    #[error("complex exceeds the simplex cap of {cap}")]
    ComplexityCapExceeded { cap: usize },

    #[error("oracle supports at most {cap} simplices, got {count}")]
    OracleCapExceeded { cap: usize, count: usize },

    #[error("chain map does not commute with boundaries in degree {degree}")]
    ChainMapNotCommuting { degree: usize },

    #[error("negative interval multiplicity {value} at [{i},{j}]")]
    NegativeMultiplicity { i: usize, j: usize, value: i64 },

    #[error("relation at t = {t} is not contained in the relation at t + delta = {shifted}: pair ({x},{y})")]
    RelationInclusionFails { t: f64, shifted: f64, x: usize, y: usize },

    #[error("{0} is not prime")]
    NotPrime(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
