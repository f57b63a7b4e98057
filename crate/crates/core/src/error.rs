use std::io;

use thiserror::Error;

use crate::rank::RankVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node id {id} out of range [0, {bound})")]
    Range { id: i64, bound: u64 },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("invalid binary graph cache: {0}")]
    BadCache(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("subspace {subspace} has dimension {dim}, above the dense limit {limit}")]
    Capacity {
        subspace: usize,
        dim: usize,
        limit: usize,
    },

    #[error("start vector is zero")]
    ZeroVector,

    #[error("non-finite Arnoldi vector at step {step}")]
    ArnoldiBreakdown { step: usize },

    #[error("Krylov basis needs {required} bytes, budget is {budget} bytes")]
    MemoryBudget { required: usize, budget: usize },

    #[error("QR iteration did not converge for eigenvalues {unconverged:?}")]
    EigenNotConverged { unconverged: Vec<usize> },

    #[error("power iteration stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last: Box<RankVector>,
    },

    #[error("power-law fit: {0}")]
    Fit(String),
}
