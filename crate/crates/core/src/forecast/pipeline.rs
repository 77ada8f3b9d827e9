use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

use super::{forecast_month, mape, tune, ForecastError, TuningSpec};
use crate::data::{build_lag_matrix, fit_normalization, DailySeries, DataError, SplitConfig, WeekConvention};
use crate::mrmr::{discretize, select_features, FeatureSet, SelectionResult};
use crate::optim::Algorithm;
use crate::svr::{train, SvrHyperparameters, SvrModel, TrainingDiagnostics, TrainingProblem};

pub const DEFAULT_MRMR_K: usize = 10;
pub const DEFAULT_CANDIDATE_LAGS: u32 = 60;
pub const DEFAULT_MRMR_BINS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LagSelection {
    /// Greedy MRMR pick of `k` lags among `1..=candidates`, each lag and the target binned
    /// into `bins` equal-width bins over the training rows.
    Mrmr { k: usize, candidates: u32, bins: usize },
    /// A fixed lag list, used as given.
    User(Vec<u32>),
}

impl Default for LagSelection {
    fn default() -> Self {
        LagSelection::Mrmr {
            k: DEFAULT_MRMR_K,
            candidates: DEFAULT_CANDIDATE_LAGS,
            bins: DEFAULT_MRMR_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub lag_selection: LagSelection,
    pub split: SplitConfig,
    pub week: WeekConvention,
    pub tuning: TuningSpec,
}

/// The pipeline step an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Selection,
    Matrix,
    Split,
    Normalization,
    Tuning,
    Training,
    Forecast,
    Evaluation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Selection => "selection",
            Stage::Matrix => "matrix",
            Stage::Split => "split",
            Stage::Normalization => "normalization",
            Stage::Tuning => "tuning",
            Stage::Training => "training",
            Stage::Forecast => "forecast",
            Stage::Evaluation => "evaluation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    pub source: ForecastError,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<ForecastError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError {
            stage,
            source: e.into(),
        })
    }
}

/// MRMR over lags `1..=candidates`, computed from the rows whose target date is a
/// training date. Returns the chosen lags in pick order with the selection traces.
pub fn select_lags(
    series: &DailySeries,
    split: &SplitConfig,
    week: &WeekConvention,
    k: usize,
    candidates: u32,
    bins: usize,
) -> Result<(Vec<u32>, SelectionResult), ForecastError> {
    split.validate()?;
    let lags: Vec<u32> = (1..=candidates).collect();
    let train = build_lag_matrix(series, &lags, week)?.filter_rows(|_, d| split.is_train(d));
    if train.is_empty() {
        return Err(DataError::EmptyTrain.into());
    }
    let features = train
        .lag_columns()
        .iter()
        .map(|c| discretize(c, bins))
        .collect::<Result<Vec<_>, _>>()?;
    let names: Vec<String> = lags.iter().map(|l| format!("lag_{l}")).collect();
    let target = discretize(train.targets(), bins)?;
    let set = FeatureSet::new(features, names, target)?;
    let result = select_features(&set, k)?;
    let chosen = result.selected_indices.iter().map(|&i| lags[i]).collect();
    Ok((chosen, result))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DayForecast {
    pub date: NaiveDate,
    pub actual: Option<f64>,
    pub predicted: f64,
}

/// Everything needed to inspect and reproduce one pipeline run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForecastReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub selected_lags: Vec<u32>,
    /// Present when the lags came from MRMR.
    pub selection: Option<SelectionResult>,
    pub tuned_hyperparameters: SvrHyperparameters,
    pub tuned_fitness: f64,
    pub evaluations: usize,
    pub fitness_history: Vec<f64>,
    pub train_rows: usize,
    pub dropped_row_count: usize,
    pub final_training: TrainingDiagnostics,
    pub horizon_days: usize,
    /// Present iff every horizon day has a recorded load.
    pub mape_percent: Option<f64>,
    pub per_day: Vec<DayForecast>,
}

/// Lag choice, lag matrix, split, train-only scaling, tuning, final fit, recursive forecast
/// of the whole test month and, when its loads are known, MAPE.
pub fn run_pipeline(series: &DailySeries, config: &PipelineConfig) -> Result<ForecastReport, PipelineError> {
    run_pipeline_with_model(series, config).map(|(report, _)| report)
}

/// [`run_pipeline`] that also hands back the final model, normalization attached.
pub fn run_pipeline_with_model(
    series: &DailySeries,
    config: &PipelineConfig,
) -> Result<(ForecastReport, SvrModel), PipelineError> {
    let (lags, selection) = match &config.lag_selection {
        LagSelection::Mrmr { k, candidates, bins } => {
            let (lags, result) =
                select_lags(series, &config.split, &config.week, *k, *candidates, *bins).at(Stage::Selection)?;
            (lags, Some(result))
        }
        LagSelection::User(lags) => (lags.clone(), None),
    };
    log::info!("lags {lags:?}");

    let matrix = build_lag_matrix(series, &lags, &config.week).at(Stage::Matrix)?;
    config.split.validate().at(Stage::Split)?;
    let train_raw = matrix.filter_rows(|_, d| config.split.is_train(d));
    if train_raw.is_empty() {
        return Err(DataError::EmptyTrain).at(Stage::Split);
    }
    let horizon = config.split.test_dates();

    let normalization = fit_normalization(&train_raw).at(Stage::Normalization)?;
    let train_scaled = normalization.apply(&train_raw).at(Stage::Normalization)?;

    let (hyper, optimization) = tune(&train_scaled, &config.tuning).at(Stage::Tuning)?;

    let problem =
        TrainingProblem::new(train_scaled.rows().to_vec(), train_scaled.targets().to_vec()).at(Stage::Training)?;
    let (model, diagnostics) = train(&problem, &hyper, &config.tuning.solver).at(Stage::Training)?;
    if !diagnostics.converged {
        log::warn!(
            "final training stopped at the pass limit with KKT violation {}",
            diagnostics.max_kkt_violation
        );
    }
    let model = model.with_normalization(Some(normalization));

    let predictions = forecast_month(&model, series, &horizon, &lags, &config.week).at(Stage::Forecast)?;
    let per_day: Vec<DayForecast> = predictions
        .into_iter()
        .map(|(date, predicted)| DayForecast {
            date,
            actual: series.load_on(date),
            predicted,
        })
        .collect();
    let mape_percent = if per_day.iter().all(|d| d.actual.is_some()) {
        let actuals: Vec<f64> = per_day.iter().filter_map(|d| d.actual).collect();
        let predicted: Vec<f64> = per_day.iter().map(|d| d.predicted).collect();
        Some(mape(&actuals, &predicted).at(Stage::Evaluation)?)
    } else {
        None
    };

    let report = ForecastReport {
        algorithm: config.tuning.optimizer.algorithm,
        seed: config.tuning.optimizer.seed,
        selected_lags: lags,
        selection,
        tuned_hyperparameters: hyper,
        tuned_fitness: optimization.best_fitness,
        evaluations: optimization.evaluations,
        fitness_history: optimization.fitness_history,
        train_rows: train_raw.len(),
        dropped_row_count: matrix.dropped_rows(),
        final_training: diagnostics,
        horizon_days: horizon.len(),
        mape_percent,
        per_day,
    };
    Ok((report, model))
}
