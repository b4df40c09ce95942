use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a valid state: {0}")]
    Contract(String),

    #[error("truncation error: {mass_lost:.3e} of probability lost (tolerance {tolerance:.1e}); increase dim")]
    Truncation { mass_lost: f64, tolerance: f64 },

    #[error("quadrature did not converge at {nodes} nodes per axis: last change {last_change:.3e} > {tolerance:.1e}")]
    Quadrature {
        nodes: usize,
        last_change: f64,
        tolerance: f64,
    },

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
