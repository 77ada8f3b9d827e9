//! The run configuration file (TOML). Every key is optional; omitted keys take the
//! defaults below, unknown keys are rejected.
//!
//! ```toml
//! [data]
//! loads = "loads.csv"
//! holidays = "holidays.txt"
//! output_dir = "out"
//!
//! [lags]
//! mode = "mrmr"            # or "user"
//! k = 10
//! candidates = 60
//! bins = 8
//! user = [1, 2, 3, 4, 6, 7, 8, 14, 26, 28]
//!
//! [optimizer]
//! algorithm = "sos"        # or "pso"
//! population = 30
//! iterations = 100         # SOS iterations; PSO gets 4x when equalize_budget is set
//! seed = 0
//! seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
//! parasite = "subset_resample"   # or "scalar_multiply"
//! equalize_budget = true
//!
//! [fitness]
//! scheme = "holdout_last_month"  # or "kfold"
//! folds = 5
//!
//! [split]
//! train_years = [1997, 1998]
//! train_months = [1, 2, 3, 10, 11, 12]
//! test_year = 1999
//! test_month = 1
//!
//! [calendar]
//! week_start = "mon"
//! weekend = ["sat", "sun"]
//!
//! [search]
//! log10_c = [-2.0, 4.0]
//! log10_gamma = [-4.0, 2.0]
//! epsilon = [0.0, 0.2]
//!
//! [solver]
//! tolerance = 1e-3
//! max_passes = 10000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mtlf_core::data::{SplitConfig, WeekConvention};
use mtlf_core::forecast::{FitnessScheme, LagSelection, PipelineConfig, TuningSpec};
use mtlf_core::optim::{Algorithm, OptimizerConfig, ParasiteMode, PsoParams, SearchSpace};
use mtlf_core::svr::SolverSettings;
use mtlf_core::Weekday;

use crate::error::CliError;

/// Lags reported for the hand-picked ("user selected") feature set.
pub const DEFAULT_USER_LAGS: [u32; 10] = [1, 2, 3, 4, 6, 7, 8, 14, 26, 28];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data: DataSection,
    pub lags: LagSection,
    pub optimizer: OptimizerSection,
    pub fitness: FitnessSection,
    pub split: SplitSection,
    pub calendar: CalendarSection,
    pub search: SearchSection,
    pub solver: SolverSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub loads: Option<PathBuf>,
    pub holidays: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            loads: None,
            holidays: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagMode {
    #[default]
    Mrmr,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LagSection {
    pub mode: LagMode,
    pub k: usize,
    pub candidates: u32,
    pub bins: usize,
    pub user: Vec<u32>,
}

impl Default for LagSection {
    fn default() -> Self {
        Self {
            mode: LagMode::Mrmr,
            k: 10,
            candidates: 60,
            bins: 8,
            user: DEFAULT_USER_LAGS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub algorithm: Algorithm,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub parasite: ParasiteMode,
    pub equalize_budget: bool,
    pub pso: PsoParams,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Sos,
            population: 30,
            iterations: 100,
            seed: 0,
            seeds: (0..11).collect(),
            parasite: ParasiteMode::SubsetResample,
            equalize_budget: true,
            pso: PsoParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    #[default]
    HoldoutLastMonth,
    Kfold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitnessSection {
    pub scheme: SchemeName,
    pub folds: usize,
}

impl Default for FitnessSection {
    fn default() -> Self {
        Self {
            scheme: SchemeName::HoldoutLastMonth,
            folds: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub train_years: Vec<i32>,
    pub train_months: Vec<u32>,
    pub test_year: i32,
    pub test_month: u32,
}

impl Default for SplitSection {
    fn default() -> Self {
        let s = SplitConfig::default();
        Self {
            train_years: s.train_years,
            train_months: s.train_months,
            test_year: s.test_year,
            test_month: s.test_month,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalendarSection {
    pub week_start: String,
    pub weekend: Vec<String>,
}

impl Default for CalendarSection {
    fn default() -> Self {
        Self {
            week_start: "mon".into(),
            weekend: vec!["sat".into(), "sun".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub log10_c: [f64; 2],
    pub log10_gamma: [f64; 2],
    pub epsilon: [f64; 2],
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            log10_c: [-2.0, 4.0],
            log10_gamma: [-4.0, 2.0],
            epsilon: [0.0, 0.2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_passes: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            tolerance: s.tolerance,
            max_passes: s.max_passes,
        }
    }
}

fn weekday(field: &str, s: &str) -> Result<Weekday, CliError> {
    s.parse()
        .map_err(|_| CliError::config(field, format!("{s:?} is not a weekday name")))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config file", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn loads_path(&self) -> Result<&Path, CliError> {
        self.data
            .loads
            .as_deref()
            .ok_or_else(|| CliError::config("data.loads", "no load CSV given (set data.loads or pass --loads)"))
    }

    /// Checks that the input files exist before anything is computed or written.
    pub fn check_inputs(&self) -> Result<(), CliError> {
        let loads = self.loads_path()?;
        if !loads.is_file() {
            return Err(CliError::config("data.loads", format!("{} does not exist", loads.display())));
        }
        if let Some(h) = &self.data.holidays {
            if !h.is_file() {
                return Err(CliError::config("data.holidays", format!("{} does not exist", h.display())));
            }
        }
        Ok(())
    }

    pub fn week(&self) -> Result<WeekConvention, CliError> {
        let c = &self.calendar;
        if c.weekend.len() != 2 {
            return Err(CliError::config("calendar.weekend", "exactly two weekend days are needed"));
        }
        Ok(WeekConvention {
            first_day: weekday("calendar.week_start", &c.week_start)?,
            weekend: [
                weekday("calendar.weekend", &c.weekend[0])?,
                weekday("calendar.weekend", &c.weekend[1])?,
            ],
        })
    }

    pub fn split_config(&self) -> Result<SplitConfig, CliError> {
        let s = SplitConfig {
            train_years: self.split.train_years.clone(),
            train_months: self.split.train_months.clone(),
            test_year: self.split.test_year,
            test_month: self.split.test_month,
        };
        s.validate().map_err(|e| CliError::config("split", e.to_string()))?;
        Ok(s)
    }

    pub fn lag_selection(&self) -> Result<LagSelection, CliError> {
        let l = &self.lags;
        match l.mode {
            LagMode::Mrmr => {
                if l.candidates == 0 {
                    return Err(CliError::config("lags.candidates", "candidates must be at least 1"));
                }
                if l.k == 0 || l.k > l.candidates as usize {
                    return Err(CliError::config(
                        "lags.k",
                        format!("k must be in 1..={}, got {}", l.candidates, l.k),
                    ));
                }
                if l.bins < 2 {
                    return Err(CliError::config("lags.bins", "bins must be at least 2"));
                }
                Ok(LagSelection::Mrmr {
                    k: l.k,
                    candidates: l.candidates,
                    bins: l.bins,
                })
            }
            LagMode::User => {
                if l.user.is_empty() {
                    return Err(CliError::config("lags.user", "user lag list is empty"));
                }
                for (k, &lag) in l.user.iter().enumerate() {
                    if lag == 0 || l.user[..k].contains(&lag) {
                        return Err(CliError::config(
                            "lags.user",
                            format!("lag {lag} is zero or repeated"),
                        ));
                    }
                }
                Ok(LagSelection::User(l.user.clone()))
            }
        }
    }

    pub fn search_space(&self) -> Result<SearchSpace, CliError> {
        let s = &self.search;
        for (name, [lo, hi]) in [
            ("search.log10_c", s.log10_c),
            ("search.log10_gamma", s.log10_gamma),
            ("search.epsilon", s.epsilon),
        ] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(CliError::config(name, format!("bounds [{lo}, {hi}] must be finite with lower < upper")));
            }
        }
        if s.epsilon[0] < 0.0 {
            return Err(CliError::config("search.epsilon", "epsilon cannot be negative"));
        }
        for (name, [lo, hi]) in [("search.log10_c", s.log10_c), ("search.log10_gamma", s.log10_gamma)] {
            if lo < -300.0 || hi > 300.0 {
                return Err(CliError::config(name, "exponents must lie within [-300, 300]"));
            }
        }
        SearchSpace::new(
            vec![s.log10_c[0], s.log10_gamma[0], s.epsilon[0]],
            vec![s.log10_c[1], s.log10_gamma[1], s.epsilon[1]],
        )
        .map_err(|e| CliError::config("search", e.to_string()))
    }

    /// Optimizer settings for one seed and kernel.
    pub fn optimizer_config(&self, algorithm: Algorithm, seed: u64) -> Result<OptimizerConfig, CliError> {
        let o = &self.optimizer;
        if o.population < 2 {
            return Err(CliError::config("optimizer.population", "population must be at least 2"));
        }
        if o.iterations == 0 {
            return Err(CliError::config("optimizer.iterations", "iterations must be at least 1"));
        }
        let p = &o.pso;
        if ![p.inertia, p.cognitive, p.social, p.velocity_clamp].iter().all(|v| v.is_finite())
            || !(p.velocity_clamp > 0.0)
        {
            return Err(CliError::config("optimizer.pso", "coefficients must be finite, velocity_clamp positive"));
        }
        let mut base = OptimizerConfig::sos(o.population, o.iterations, seed);
        base.parasite_mode = o.parasite;
        base.pso_params = Some(o.pso);
        Ok(match algorithm {
            Algorithm::Sos => base,
            Algorithm::Pso if o.equalize_budget => base.with_matched_budget(Algorithm::Pso),
            Algorithm::Pso => OptimizerConfig {
                algorithm: Algorithm::Pso,
                ..base
            },
        })
    }

    pub fn solver(&self) -> Result<SolverSettings, CliError> {
        let s = &self.solver;
        if !(s.tolerance > 0.0) || !s.tolerance.is_finite() {
            return Err(CliError::config("solver.tolerance", "tolerance must be positive"));
        }
        if s.max_passes == 0 {
            return Err(CliError::config("solver.max_passes", "max_passes must be at least 1"));
        }
        Ok(SolverSettings {
            tolerance: s.tolerance,
            max_passes: s.max_passes,
        })
    }

    pub fn fitness_scheme(&self) -> Result<FitnessScheme, CliError> {
        match self.fitness.scheme {
            SchemeName::HoldoutLastMonth => Ok(FitnessScheme::HoldoutLastMonth),
            SchemeName::Kfold if self.fitness.folds >= 2 => Ok(FitnessScheme::KFold(self.fitness.folds)),
            SchemeName::Kfold => Err(CliError::config("fitness.folds", "folds must be at least 2")),
        }
    }

    /// Fully validated pipeline settings for one kernel, lag mode and seed.
    pub fn pipeline(&self, algorithm: Algorithm, lags: LagSelection, seed: u64) -> Result<PipelineConfig, CliError> {
        Ok(PipelineConfig {
            lag_selection: lags,
            split: self.split_config()?,
            week: self.week()?,
            tuning: TuningSpec {
                optimizer: self.optimizer_config(algorithm, seed)?,
                search_space: self.search_space()?,
                fitness_scheme: self.fitness_scheme()?,
                solver: self.solver()?,
                seed_center: true,
            },
        })
    }

    /// Pipeline settings exactly as configured.
    pub fn default_pipeline(&self) -> Result<PipelineConfig, CliError> {
        self.pipeline(self.optimizer.algorithm, self.lag_selection()?, self.optimizer.seed)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.default_pipeline()?;
        if self.optimizer.seeds.is_empty() {
            return Err(CliError::config("optimizer.seeds", "seed list is empty"));
        }
        Ok(())
    }
}
