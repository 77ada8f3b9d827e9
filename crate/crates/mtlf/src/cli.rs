use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mtlf_core::data::{build_lag_matrix, DailySeries};
use mtlf_core::forecast::{run_pipeline, run_pipeline_with_model, select_lags, LagSelection};
use mtlf_core::optim::Algorithm;
use mtlf_core::synthetic;

use crate::config::{LagMode, RunConfig, SchemeName};
use crate::error::CliError;
use crate::formats::{load_series, write_holidays, write_matrix_csv, write_model, write_selection_report, write_series};
use crate::report::{chart_svg, compare_table, fitness_csv, per_day_csv, report_json, CompareCell};

#[derive(Debug, Parser)]
#[command(name = "mtlf", version, about = "Month-ahead daily peak-load forecasting with MRMR lags and SOS-tuned SVR")]
pub struct Cli {
    /// More log output (-v info, -vv debug); RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank candidate lags by MRMR and write selection.txt.
    Select(Overrides),
    /// Run the full pipeline and write report.json, forecast.csv, fitness.csv and model.txt.
    Run {
        #[command(flatten)]
        overrides: Overrides,
        /// Also write chart.svg (actual solid, predicted dashed).
        #[arg(long)]
        plot: bool,
    },
    /// Run {PSO, SOS} x {user lags, MRMR} over a seed list and write compare.txt.
    Compare {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated seeds; defaults to optimizer.seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Validate the configuration and input files and print a data summary.
    Check(Overrides),
    /// Write the lag/calendar matrix for the configured lags to matrix.csv.
    Matrix(Overrides),
    /// Write a synthetic EUNITE-format series (loads.csv, holidays.txt).
    Synth {
        /// Output directory.
        #[arg(long, default_value = "synthetic")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Half-width of the uniform noise in MW.
        #[arg(long, default_value_t = 15.0)]
        noise: f64,
    },
    /// Print the default configuration file.
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Sos,
    Pso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitnessArg {
    Holdout,
    Kfold,
}

/// Flags that override keys of the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Load CSV (`date,peak_load`); overrides data.loads.
    #[arg(long)]
    pub loads: Option<PathBuf>,
    /// Holiday file; overrides data.holidays.
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    /// Output directory; overrides data.output_dir.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Optimizer seed; overrides optimizer.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tuning kernel; overrides optimizer.algorithm.
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerArg>,
    /// Population size; overrides optimizer.population.
    #[arg(long)]
    pub population: Option<usize>,
    /// Iterations in SOS terms; overrides optimizer.iterations.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Number of MRMR lags; overrides lags.k and selects MRMR mode.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Comma-separated lag list; overrides lags.user and selects user mode.
    #[arg(long, value_delimiter = ',')]
    pub lags: Option<Vec<u32>>,
    /// Fitness scheme; overrides fitness.scheme.
    #[arg(long, value_enum)]
    pub fitness: Option<FitnessArg>,
    /// Fold count for k-fold fitness; overrides fitness.folds.
    #[arg(long)]
    pub folds: Option<usize>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_path(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.loads {
            c.data.loads = Some(v.clone());
        }
        if let Some(v) = &self.holidays {
            c.data.holidays = Some(v.clone());
        }
        if let Some(v) = &self.out {
            c.data.output_dir = v.clone();
        }
        if let Some(v) = self.seed {
            c.optimizer.seed = v;
        }
        if let Some(v) = self.optimizer {
            c.optimizer.algorithm = match v {
                OptimizerArg::Sos => Algorithm::Sos,
                OptimizerArg::Pso => Algorithm::Pso,
            };
        }
        if let Some(v) = self.population {
            c.optimizer.population = v;
        }
        if let Some(v) = self.iterations {
            c.optimizer.iterations = v;
        }
        if self.k.is_some() && self.lags.is_some() {
            return Err(CliError::config("--k/--lags", "give either an MRMR k or a lag list, not both"));
        }
        if let Some(v) = self.k {
            c.lags.k = v;
            c.lags.mode = LagMode::Mrmr;
        }
        if let Some(v) = &self.lags {
            c.lags.user = v.clone();
            c.lags.mode = LagMode::User;
        }
        if let Some(v) = self.fitness {
            c.fitness.scheme = match v {
                FitnessArg::Holdout => SchemeName::HoldoutLastMonth,
                FitnessArg::Kfold => SchemeName::Kfold,
            };
        }
        if let Some(v) = self.folds {
            c.fitness.folds = v;
        }
        Ok(c)
    }
}

/// Resolves and validates the configuration, then loads the data; nothing is written yet.
fn prepare(o: &Overrides) -> Result<(RunConfig, DailySeries), CliError> {
    let c = o.resolve()?;
    c.validate()?;
    c.check_inputs()?;
    let series = load_series(c.loads_path()?, c.data.holidays.as_deref())?;
    Ok((c, series))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(o) => cmd_select(&o),
        Command::Run { overrides, plot } => cmd_run(&overrides, plot),
        Command::Compare { overrides, seeds } => cmd_compare(&overrides, seeds),
        Command::Check(o) => cmd_check(&o),
        Command::Matrix(o) => cmd_matrix(&o),
        Command::Synth { out, seed, noise } => cmd_synth(&out, seed, noise),
        Command::Config => {
            print!("{}", RunConfig::default().to_toml());
            Ok(())
        }
    }
}

pub fn cmd_select(o: &Overrides) -> Result<(), CliError> {
    if o.lags.is_some() {
        return Err(CliError::config("--lags", "select ranks lags by MRMR; pass --k instead"));
    }
    let mut c = o.resolve()?;
    c.lags.mode = LagMode::Mrmr;
    let LagSelection::Mrmr { k, candidates, bins } = c.lag_selection()? else {
        unreachable!("mode forced to mrmr")
    };
    c.validate()?;
    c.check_inputs()?;
    let series = load_series(c.loads_path()?, c.data.holidays.as_deref())?;
    let (_, result) = select_lags(&series, &c.split_config()?, &c.week()?, k, candidates, bins)
        .map_err(|e| pipeline_error(mtlf_core::forecast::Stage::Selection, e))?;
    let names: Vec<String> = (1..=candidates).map(|l| format!("lag_{l}")).collect();
    let path = write(
        &c.data.output_dir,
        "selection.txt",
        &write_selection_report(&result, &names, candidates as usize, bins),
    )?;
    println!("{}", path.display());
    Ok(())
}

fn pipeline_error(stage: mtlf_core::forecast::Stage, source: mtlf_core::forecast::ForecastError) -> CliError {
    CliError::Pipeline(mtlf_core::forecast::PipelineError { stage, source })
}

pub fn cmd_run(o: &Overrides, plot: bool) -> Result<(), CliError> {
    let (c, series) = prepare(o)?;
    let (report, model) = run_pipeline_with_model(&series, &c.default_pipeline()?)?;
    let dir = &c.data.output_dir;
    write(dir, "report.json", &report_json(&report))?;
    write(dir, "forecast.csv", &per_day_csv(&report))?;
    write(dir, "fitness.csv", &fitness_csv(&report))?;
    write(dir, "model.txt", &write_model(&model))?;
    if plot {
        write(dir, "chart.svg", &chart_svg(&report))?;
    }
    match report.mape_percent {
        Some(m) => println!("MAPE {m:.4}% over {} days, lags {:?}", report.horizon_days, report.selected_lags),
        None => println!(
            "forecast of {} days written (no actuals for MAPE), lags {:?}",
            report.horizon_days, report.selected_lags
        ),
    }
    Ok(())
}

/// Ablation rows in reporting order.
pub fn compare_methods(c: &RunConfig) -> Result<Vec<(&'static str, Algorithm, LagSelection)>, CliError> {
    let mut mrmr_cfg = c.clone();
    mrmr_cfg.lags.mode = LagMode::Mrmr;
    let mut user_cfg = c.clone();
    user_cfg.lags.mode = LagMode::User;
    let mrmr = mrmr_cfg.lag_selection()?;
    let user = user_cfg.lag_selection()?;
    Ok(vec![
        ("PSO+user", Algorithm::Pso, user.clone()),
        ("PSO+MRMR", Algorithm::Pso, mrmr.clone()),
        ("SOS+user", Algorithm::Sos, user),
        ("SOS+MRMR", Algorithm::Sos, mrmr),
    ])
}

pub fn cmd_compare(o: &Overrides, seeds: Option<Vec<u64>>) -> Result<(), CliError> {
    let (mut c, series) = prepare(o)?;
    if let Some(s) = seeds {
        c.optimizer.seeds = s;
    }
    if c.optimizer.seeds.is_empty() {
        return Err(CliError::config("--seeds", "seed list is empty"));
    }
    let methods = compare_methods(&c)?;
    let mut jobs = Vec::new();
    for (m, (_, algorithm, lags)) in methods.iter().enumerate() {
        for &seed in &c.optimizer.seeds {
            jobs.push((m, seed, c.pipeline(*algorithm, lags.clone(), seed)?));
        }
    }
    let outcomes: Vec<(usize, u64, Result<f64, String>)> = jobs
        .into_par_iter()
        .map(|(m, seed, p)| {
            let r = match run_pipeline(&series, &p) {
                Ok(rep) => rep.mape_percent.ok_or_else(|| "test month has no actual loads".to_string()),
                Err(e) => Err(e.to_string()),
            };
            (m, seed, r)
        })
        .collect();
    let cells: Vec<CompareCell> = methods
        .iter()
        .enumerate()
        .map(|(m, (name, _, _))| CompareCell {
            method: (*name).to_string(),
            runs: outcomes
                .iter()
                .filter(|(mm, _, _)| *mm == m)
                .map(|(_, seed, r)| (*seed, r.clone()))
                .collect(),
        })
        .collect();
    let table = compare_table(&cells);
    write(&c.data.output_dir, "compare.txt", &table)?;
    print!("{table}");
    Ok(())
}

pub fn cmd_check(o: &Overrides) -> Result<(), CliError> {
    let (c, series) = prepare(o)?;
    let split = c.split_config()?;
    let train_days = series.records().iter().filter(|r| split.is_train(r.date)).count();
    let test = split.test_dates();
    let test_known = test.iter().filter(|d| series.load_on(**d).is_some()).count();
    println!("records {} from {} to {}", series.len(), series.first_date(), series.last_date());
    println!("gaps {}", series.gaps().len());
    println!(
        "holidays {} ({} outside the series)",
        series.holidays().len(),
        series.holidays_out_of_range().len()
    );
    println!("training days {train_days}");
    println!("test days {} ({} with recorded load)", test.len(), test_known);
    Ok(())
}

pub fn cmd_matrix(o: &Overrides) -> Result<(), CliError> {
    let (c, series) = prepare(o)?;
    let week = c.week()?;
    let lags = match c.lag_selection()? {
        LagSelection::User(l) => l,
        LagSelection::Mrmr { k, candidates, bins } => {
            select_lags(&series, &c.split_config()?, &week, k, candidates, bins)
                .map_err(|e| pipeline_error(mtlf_core::forecast::Stage::Selection, e))?
                .0
        }
    };
    let m = build_lag_matrix(&series, &lags, &week)
        .map_err(|e| pipeline_error(mtlf_core::forecast::Stage::Matrix, e.into()))?;
    let path = write(&c.data.output_dir, "matrix.csv", &write_matrix_csv(&m))?;
    println!("{} ({} rows, {} dropped)", path.display(), m.len(), m.dropped_rows());
    Ok(())
}

pub fn cmd_synth(out: &Path, seed: u64, noise: f64) -> Result<(), CliError> {
    if !(noise >= 0.0) || !noise.is_finite() || noise > 200.0 {
        return Err(CliError::config("--noise", "noise must be in [0, 200] MW"));
    }
    let s = synthetic::eunite_like(seed, noise);
    write(out, "loads.csv", &write_series(&s))?;
    write(out, "holidays.txt", &write_holidays(s.holidays()))?;
    println!("{} days written to {}", s.len(), out.display());
    Ok(())
}
