use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("system size N={sites} outside the supported range {min}..={max}")]
    Size { sites: usize, min: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("momentum k={momentum} is not in 0..{sites}")]
    Momentum { momentum: usize, sites: usize },

    #[error("basis built for N={basis} but parameters have N={params}")]
    SiteMismatch { basis: usize, params: usize },

    #[error("formula valid only for N >= {min}, got N={sites}")]
    ValidityRange { sites: usize, min: usize },

    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver failed on matrix {fingerprint}: {reason}")]
    Convergence { fingerprint: String, reason: String },

    #[error("cache entry {path} is corrupted: {reason}")]
    CacheCorrupted { path: PathBuf, reason: String },

    #[error("maximum-entropy fit infeasible: {0}")]
    Infeasible(String),

    #[error("maximum-entropy fit did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("prediction and empirical series do not overlap in energy")]
    EmptyOverlap,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
