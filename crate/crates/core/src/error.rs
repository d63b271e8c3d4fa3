use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid dimensions (p={p}, n={n}); each must lie in 1..=4")]
    InvalidDims { p: usize, n: usize },
    #[error("metric is singular or not invertible at a sample point: {0}")]
    SingularMetric(String),
    #[error("metric is not symmetric: {0}")]
    AsymmetricMetric(String),
    #[error("metric depends on the wrong coordinates: {0}")]
    MetricDependence(String),
    #[error("connection is not of Cartan type: {0}")]
    NotCartan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
