use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Gaussian scale {std}: standard deviation must be finite and > 0")]
    InvalidScale { std: f64 },

    #[error("invalid Gaussian location {mean}: mean must be finite")]
    InvalidLocation { mean: f64 },

    #[error("invalid class prior {prior}: must lie in (0, 1)")]
    InvalidPrior { prior: f64 },

    #[error("invalid label {value}: labels must be -1 or +1")]
    InvalidLabel { value: i64 },

    #[error("importance weight at x = {x} is out of floating-point range")]
    WeightOutOfRange { x: f64 },

    #[error("rejection sampler exceeded {cap} proposals for a single sample")]
    RejectionCapExceeded { cap: u64 },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    #[error("weight vector has length {weights}, dataset has {data}")]
    WeightLengthMismatch { weights: usize, data: usize },

    #[error("weight {value} at index {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("degenerate design: weighted sum of squared inputs is zero")]
    DegenerateDesign,

    #[error("invalid lambda grid {min}:{max}:{step}: need min < max and step > 0")]
    InvalidGrid { min: f64, max: f64, step: f64 },

    #[error("moment order must be >= 1, got {k}")]
    InvalidMomentOrder { k: u32 },

    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),

    #[error("quadrature failed to reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureNotConverged { tolerance: f64, estimate: f64 },

    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
