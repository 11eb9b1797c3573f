use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("term cap of {cap} reached before the tail bound met tolerance (tail {tail:e})")]
    Cap { cap: u64, tail: f64 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("depth {m} exceeds the tensor quadrature limit {max}")]
    Dimension { m: usize, max: usize },
    #[error("point outside the convergence strip: {0}")]
    OutOfStrip(String),
    #[error("refinement did not converge: last delta {delta:e} > tol {tol:e}")]
    NonConvergent { delta: f64, tol: f64 },
    #[error("non-finite intermediate value in {0}")]
    NonFinite(String),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
