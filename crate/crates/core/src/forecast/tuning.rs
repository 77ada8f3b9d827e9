use alloc::vec::Vec;

use chrono::Datelike;

use super::{mape, ForecastError};
use crate::data::FeatureMatrix;
use crate::optim::{optimize, OptimizationResult, OptimizerConfig, SearchSpace};
use crate::svr::{train, SolverSettings, SvrError, SvrHyperparameters, TrainingProblem};

/// Fitness reported for a point whose training or prediction failed numerically.
pub const PENALTY_FITNESS: f64 = 1e6;

/// How a hyperparameter point is scored on the training rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FitnessScheme {
    /// Fit on every row except the chronologically last calendar month, score that month.
    #[default]
    HoldoutLastMonth,
    /// Mean score over `k` chronologically contiguous folds.
    KFold(usize),
}

impl FitnessScheme {
    fn name(&self) -> &'static str {
        match self {
            FitnessScheme::HoldoutLastMonth => "holdout_last_month",
            FitnessScheme::KFold(_) => "kfold",
        }
    }
}

/// `log10 C ∈ [−2, 4]`, `log10 γ ∈ [−4, 2]`, `ε ∈ [0, 0.2]`.
pub fn default_search_space() -> SearchSpace {
    SearchSpace::new(alloc::vec![-2.0, -4.0, 0.0], alloc::vec![4.0, 2.0, 0.2]).expect("static bounds")
}

/// `(log10 C, log10 γ, ε)` to hyperparameters.
pub fn decode(point: &[f64]) -> Result<SvrHyperparameters, ForecastError> {
    if point.len() != 3 {
        return Err(ForecastError::SearchSpaceDimension(point.len()));
    }
    Ok(SvrHyperparameters::new(
        libm::pow(10.0, point[0]),
        point[2],
        libm::pow(10.0, point[1]),
    )?)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TuningSpec {
    pub optimizer: OptimizerConfig,
    pub search_space: SearchSpace,
    pub fitness_scheme: FitnessScheme,
    pub solver: SolverSettings,
    /// Put the centre of the search space into the initial population, so the tuned
    /// fitness never exceeds the fitness there.
    pub seed_center: bool,
}

impl TuningSpec {
    pub fn new(optimizer: OptimizerConfig) -> Self {
        Self {
            optimizer,
            search_space: default_search_space(),
            fitness_scheme: FitnessScheme::default(),
            solver: SolverSettings::default(),
            seed_center: true,
        }
    }

    pub fn validate(&self) -> Result<(), ForecastError> {
        if self.search_space.dimension() != 3 {
            return Err(ForecastError::SearchSpaceDimension(self.search_space.dimension()));
        }
        Ok(())
    }
}

impl Default for TuningSpec {
    /// SOS with population 30 and 100 iterations, seed 0.
    fn default() -> Self {
        Self::new(OptimizerConfig::sos(30, 100, 0))
    }
}

/// A fit/score partition of the training rows.
struct Fold {
    fit: TrainingProblem,
    score_rows: Vec<Vec<f64>>,
    score_actuals: Vec<f64>,
}

/// Scores hyperparameter points on a fixed training matrix. Partitions are built once.
///
/// Scores are MAPE in target units: when the matrix is normalized, decision values and
/// targets are mapped back through its target scaling first.
pub struct FitnessEvaluator<'a> {
    train: &'a FeatureMatrix,
    folds: Vec<Fold>,
    solver: SolverSettings,
}

impl<'a> FitnessEvaluator<'a> {
    pub fn new(
        train: &'a FeatureMatrix,
        scheme: FitnessScheme,
        solver: SolverSettings,
    ) -> Result<Self, ForecastError> {
        let n = train.len();
        let too_large = || ForecastError::SchemeTooLarge {
            scheme: scheme.name(),
            rows: n,
        };
        let blocks: Vec<(usize, usize)> = match scheme {
            FitnessScheme::HoldoutLastMonth => {
                let last = *train.row_dates().last().ok_or_else(too_large)?;
                let start = train
                    .row_dates()
                    .iter()
                    .position(|d| d.year() == last.year() && d.month() == last.month())
                    .expect("last row is in its own month");
                alloc::vec![(start, n)]
            }
            FitnessScheme::KFold(k) => {
                if k < 2 || k > n {
                    return Err(too_large());
                }
                let (base, extra) = (n / k, n % k);
                let mut out = Vec::with_capacity(k);
                let mut start = 0;
                for f in 0..k {
                    let len = base + usize::from(f < extra);
                    out.push((start, start + len));
                    start += len;
                }
                out
            }
        };
        let mut folds = Vec::with_capacity(blocks.len());
        for (lo, hi) in blocks {
            if lo == 0 && hi == n {
                return Err(too_large());
            }
            let outside = |k: usize| k < lo || k >= hi;
            let fit = TrainingProblem::new(
                (0..n).filter(|&k| outside(k)).map(|k| train.rows()[k].clone()).collect(),
                (0..n).filter(|&k| outside(k)).map(|k| train.targets()[k]).collect(),
            )?;
            folds.push(Fold {
                fit,
                score_rows: train.rows()[lo..hi].to_vec(),
                score_actuals: train.targets()[lo..hi].iter().map(|&z| unscale(train, z)).collect(),
            });
        }
        Ok(Self {
            train,
            folds,
            solver,
        })
    }

    /// Fitness of a point in `(log10 C, log10 γ, ε)` coordinates. Numeric failures are
    /// logged and scored [`PENALTY_FITNESS`].
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        match self.try_evaluate(point) {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                log::warn!("fitness at {point:?} is {v}; scoring {PENALTY_FITNESS}");
                PENALTY_FITNESS
            }
            Err(e) => {
                log::warn!("fitness at {point:?} failed ({e}); scoring {PENALTY_FITNESS}");
                PENALTY_FITNESS
            }
        }
    }

    fn try_evaluate(&self, point: &[f64]) -> Result<f64, ForecastError> {
        let hyper = decode(point)?;
        let mut total = 0.0;
        for fold in &self.folds {
            let (model, _) = train(&fold.fit, &hyper, &self.solver)?;
            let mut predictions = Vec::with_capacity(fold.score_rows.len());
            for row in &fold.score_rows {
                let p = unscale(self.train, model.decision_value(row)?);
                if !p.is_finite() {
                    return Err(SvrError::NumericFailure { iteration: 0 }.into());
                }
                predictions.push(p);
            }
            total += mape(&fold.score_actuals, &predictions)?;
        }
        Ok(total / self.folds.len() as f64)
    }
}

fn unscale(matrix: &FeatureMatrix, z: f64) -> f64 {
    match matrix.normalization() {
        Some(n) => n.unscale_target(z),
        None => z,
    }
}

/// One-off fitness evaluation; see [`FitnessEvaluator`].
pub fn fitness(
    point: &[f64],
    train: &FeatureMatrix,
    scheme: FitnessScheme,
    solver: &SolverSettings,
) -> Result<f64, ForecastError> {
    Ok(FitnessEvaluator::new(train, scheme, *solver)?.evaluate(point))
}

/// Minimizes the fitness over `spec.search_space` with the configured optimizer.
pub fn tune(
    train: &FeatureMatrix,
    spec: &TuningSpec,
) -> Result<(SvrHyperparameters, OptimizationResult), ForecastError> {
    spec.validate()?;
    let evaluator = FitnessEvaluator::new(train, spec.fitness_scheme, spec.solver)?;
    let mut config = spec.optimizer.clone();
    if spec.seed_center {
        config.initial_guesses.insert(0, spec.search_space.center());
    }
    let result = optimize(|p: &[f64]| evaluator.evaluate(p), &spec.search_space, &config)?;
    let hyper = decode(&result.best_position)?;
    log::info!(
        "tuned C={:.6e} gamma={:.6e} epsilon={:.6} fitness={:.6} after {} evaluations",
        hyper.cost_c,
        hyper.gamma,
        hyper.epsilon,
        result.best_fitness,
        result.evaluations
    );
    Ok((hyper, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::build_lag_matrix;
    use crate::synthetic::sine_load;
    use crate::data::WeekConvention;

    fn sine_matrix(days: u32) -> FeatureMatrix {
        let s = sine_load(days);
        build_lag_matrix(&s, &[1, 2, 7], &WeekConvention::default()).unwrap()
    }

    #[test]
    fn decode_maps_log_axes() {
        let h = decode(&[1.0, -2.0, 0.05]).unwrap();
        assert!((h.cost_c - 10.0).abs() < 1e-12);
        assert!((h.gamma - 0.01).abs() < 1e-15);
        assert_eq!(h.epsilon, 0.05);
        assert!(decode(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn holdout_is_last_month() {
        let m = sine_matrix(60);
        let ev = FitnessEvaluator::new(&m, FitnessScheme::HoldoutLastMonth, SolverSettings::default()).unwrap();
        let last = *m.row_dates().last().unwrap();
        let expected = m.row_dates().iter().filter(|d| d.month() == last.month()).count();
        assert_eq!(ev.folds.len(), 1);
        assert_eq!(ev.folds[0].score_rows.len(), expected);
        assert_eq!(ev.folds[0].fit.len(), m.len() - expected);
    }

    #[test]
    fn kfold_partitions_rows() {
        let m = sine_matrix(60);
        let ev = FitnessEvaluator::new(&m, FitnessScheme::KFold(4), SolverSettings::default()).unwrap();
        let scored: usize = ev.folds.iter().map(|f| f.score_rows.len()).sum();
        assert_eq!(scored, m.len());
        assert!(FitnessEvaluator::new(&m, FitnessScheme::KFold(1), SolverSettings::default()).is_err());
    }

    #[test]
    fn single_month_cannot_hold_out() {
        let m = sine_matrix(20);
        assert!(matches!(
            FitnessEvaluator::new(&m, FitnessScheme::HoldoutLastMonth, SolverSettings::default()),
            Err(ForecastError::SchemeTooLarge { .. })
        ));
    }

    #[test]
    fn fitness_is_deterministic() {
        let m = sine_matrix(45);
        let s = SolverSettings::default();
        let a = fitness(&[1.0, 0.0, 0.01], &m, FitnessScheme::HoldoutLastMonth, &s).unwrap();
        let b = fitness(&[1.0, 0.0, 0.01], &m, FitnessScheme::HoldoutLastMonth, &s).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
