use crate::averaging::ConvergenceTrace;

/// Errors produced by validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("probability vector is empty")]
    EmptyVector,

    #[error("probability at index {index} is {value}, outside (0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("probability at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("topology has no nodes")]
    EmptyTopology,

    #[error("{n} neighbors exceeds the exact-enumeration cap of {cap}")]
    TooManyNeighbors { n: usize, cap: usize },

    #[error("argument {name} = {value} is outside {range}")]
    ArgOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid index pair ({j}, {k}) for a vector of length {n}")]
    BadPair { j: usize, k: usize, n: usize },

    #[error("averaging block {block} does not fit a {n}x{n} matrix")]
    BlockOutOfRange { block: usize, n: usize },

    #[error("dimension {n} is below the minimum of {min}")]
    DimensionTooSmall { n: usize, min: usize },

    #[error("matrix is not square: row {row} has {cols} columns, expected {expected}")]
    NotSquare {
        row: usize,
        cols: usize,
        expected: usize,
    },

    #[error("quadrature did not converge within {evaluations} integrand evaluations")]
    QuadratureBudgetExhausted { evaluations: u64 },

    #[error("averaging did not reach tolerance {tol:e} within {max_iters} iterations")]
    NoConvergence {
        tol: f64,
        max_iters: usize,
        /// Progress made before the iteration budget ran out.
        trace: Box<ConvergenceTrace>,
    },

    #[error("at least {min} replications required, got {reps}")]
    TooFewReps { reps: u64, min: u64 },

    #[error("a replication exceeded the slot budget of {cap}")]
    SlotBudgetExceeded { cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
