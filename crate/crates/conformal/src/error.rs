use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("conformal factor is not positive at {point:?} (value {value})")]
    NonPositiveFactor { point: Vec<f64>, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("density has weight {got}, operator needs weight {expected}")]
    WeightMismatch { expected: String, got: String },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("tractor connection is not flat on the region: holonomy deviation {deviation:e} at {point:?}")]
    NotFlat { point: Vec<f64>, deviation: f64 },
    #[error("invalid chart specification: {0}")]
    InvalidChart(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
