use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is empty")]
    Empty,

    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("matrix is not Hermitian at ({i}, {j}), deviation {deviation:e}")]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge within {max_iter} sweeps")]
    NoConvergence { dim: usize, max_iter: usize },

    #[error("index {index} out of range for local dimension {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not invariant under the symmetric projector (deviation {deviation:e})")]
    NotSymmetricState { deviation: f64 },

    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}
