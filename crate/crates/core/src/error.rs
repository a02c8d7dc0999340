use thiserror::Error;

/// Errors raised by the holonomy laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric is not positive-definite at {point:?} (min eigenvalue {min_eigenvalue:e})")]
    SingularMetric {
        point: [f64; 4],
        min_eigenvalue: f64,
    },

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("unitarity drift {drift:e} exceeds {limit:e} at t = {t}")]
    StepFailure { t: f64, drift: f64, limit: f64 },

    #[error("ill-conditioned kernel fit: condition number {condition:e} exceeds {limit:e}")]
    IllConditionedFit { condition: f64, limit: f64 },

    #[error("operation requires a flat chart, got `{chart}`")]
    NotFlat { chart: String },

    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: [f64; 4] },

    #[error("unknown {kind} `{name}`; valid options: {valid}")]
    UnknownName {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
