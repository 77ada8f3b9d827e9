//! Hyperparameter tuning, recursive month-ahead forecasting and the end-to-end pipeline.

use chrono::NaiveDate;

use crate::data::DataError;
use crate::mrmr::MrmrError;
use crate::optim::OptimizerError;
use crate::svr::SvrError;

mod pipeline;
mod recursive;
mod tuning;

pub use pipeline::{
    run_pipeline, run_pipeline_with_model, select_lags, DayForecast, ForecastReport, LagSelection, PipelineConfig, PipelineError,
    Stage, DEFAULT_CANDIDATE_LAGS, DEFAULT_MRMR_BINS, DEFAULT_MRMR_K,
};
pub use recursive::forecast_month;
pub use tuning::{
    decode, default_search_space, fitness, tune, FitnessEvaluator, FitnessScheme, TuningSpec, PENALTY_FITNESS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForecastError {
    #[error("MAPE needs equal non-zero lengths, got {actuals} actuals and {predictions} predictions")]
    MapeLength { actuals: usize, predictions: usize },
    #[error("actual value {value} at position {index} is not positive")]
    NonPositiveActual { index: usize, value: f64 },
    #[error("horizon is empty")]
    EmptyHorizon,
    #[error("horizon dates are not consecutive at {0}")]
    NonConsecutiveHorizon(NaiveDate),
    #[error("lag {lag} of {date} falls on {missing}, which has neither history nor a forecast")]
    UnresolvableLag {
        date: NaiveDate,
        lag: u32,
        missing: NaiveDate,
    },
    #[error("search space must have dimension 3, got {0}")]
    SearchSpaceDimension(usize),
    #[error("fitness scheme {scheme} cannot split {rows} training rows")]
    SchemeTooLarge { scheme: &'static str, rows: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Svr(#[from] SvrError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Mrmr(#[from] MrmrError),
}

/// Mean absolute percentage error, `100·mean(|a − p| / a)`.
pub fn mape(actuals: &[f64], predictions: &[f64]) -> Result<f64, ForecastError> {
    if actuals.is_empty() || actuals.len() != predictions.len() {
        return Err(ForecastError::MapeLength {
            actuals: actuals.len(),
            predictions: predictions.len(),
        });
    }
    let mut sum = 0.0;
    for (index, (&a, &p)) in actuals.iter().zip(predictions).enumerate() {
        if !(a > 0.0) || !a.is_finite() {
            return Err(ForecastError::NonPositiveActual { index, value: a });
        }
        sum += (a - p).abs() / a;
    }
    Ok(100.0 * sum / actuals.len() as f64)
}
