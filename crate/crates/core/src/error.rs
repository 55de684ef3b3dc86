use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid parameter (bad family spec, non-monotone grid, ...).
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Input that makes the operation meaningless (zero fields, φ ≡ 0 on the scan, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Tabulated Young function queried outside its table.
    #[error("extrapolation error: t = {t} outside table range [{lo}, {hi}]")]
    Extrapolation { t: f64, lo: f64, hi: f64 },

    /// Iterative solver did not reach the requested residual.
    #[error("solver failure: {context} (last relative residual {residual:e})")]
    SolverFailure { context: String, residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
