//! Bounded continuous black-box minimization.
//!
//! Two kernels share one contract: [`sos`] (Symbiotic Organism Search) and [`pso`]
//! (global-best particle swarm). Both take an objective `FnMut(&[f64]) -> f64`, a box
//! [`SearchSpace`] and an [`OptimizerConfig`], and return an [`OptimizationResult`] that is
//! bit-identical for identical inputs.

use alloc::vec::Vec;

pub mod benchmarks;
mod draws;
pub mod pso;
pub mod sos;

pub use draws::{Draws, SeededDraws};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizerError {
    #[error("search space has dimension 0")]
    EmptySpace,
    #[error("bounds have lengths {lower} (lower) and {upper} (upper)")]
    BoundsLength { lower: usize, upper: usize },
    #[error("dimension {dim}: lower bound {lower} is not below upper bound {upper}")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },
    #[error("population size {0} is below the minimum of 2")]
    PopulationTooSmall(usize),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("position has length {got}, search space has dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("PSO requested without PSO parameters")]
    MissingPsoParams,
    #[error("objective returned {value} at {position:?}")]
    NonFinite { position: Vec<f64>, value: f64 },
}

/// Axis-aligned box `[lower[d], upper[d]]` per dimension.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, OptimizerError> {
        if lower.len() != upper.len() {
            return Err(OptimizerError::BoundsLength {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(OptimizerError::EmptySpace);
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // also rejects NaN bounds
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(OptimizerError::InvalidBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval repeated over `dimension` axes.
    pub fn cube(dimension: usize, lower: f64, upper: f64) -> Result<Self, OptimizerError> {
        Self::new(alloc::vec![lower; dimension], alloc::vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension()
            && position
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub(crate) fn clamp_in_place(&self, position: &mut [f64]) {
        for ((x, &lo), &hi) in position.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(lo, hi);
        }
    }
}

/// Component-wise clamp of `position` into the box.
pub fn clip_to_bounds(position: &[f64], space: &SearchSpace) -> Result<Vec<f64>, OptimizerError> {
    if position.len() != space.dimension() {
        return Err(OptimizerError::LengthMismatch {
            expected: space.dimension(),
            got: position.len(),
        });
    }
    let mut out = position.to_vec();
    space.clamp_in_place(&mut out);
    Ok(out)
}

/// A candidate solution and its cached objective value (lower is better).
#[derive(Debug, Clone, PartialEq)]
pub struct Organism {
    pub position: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Algorithm {
    #[default]
    Sos,
    Pso,
}

/// How the parasitism phase builds its parasite vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ParasiteMode {
    /// Copy `x_i` and redraw a uniformly chosen non-empty subset of its coordinates
    /// uniformly inside the bounds.
    #[default]
    SubsetResample,
    /// `clip(r * x_i)` with a single `r ~ U(0, 1)`.
    ScalarMultiply,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Per-dimension velocity limit as a fraction of `upper - lower`.
    pub velocity_clamp: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            velocity_clamp: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub pso_params: Option<PsoParams>,
    pub parasite_mode: ParasiteMode,
    /// Positions that replace the first random members of the initial population
    /// (clipped into the box). Random draws are consumed as if they were absent.
    pub initial_guesses: Vec<Vec<f64>>,
}

impl OptimizerConfig {
    pub fn sos(population_size: usize, max_iterations: usize, seed: u64) -> Self {
        Self {
            population_size,
            max_iterations,
            seed,
            algorithm: Algorithm::Sos,
            pso_params: None,
            parasite_mode: ParasiteMode::default(),
            initial_guesses: Vec::new(),
        }
    }

    pub fn pso(population_size: usize, max_iterations: usize, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::Pso,
            pso_params: Some(PsoParams::default()),
            ..Self::sos(population_size, max_iterations, seed)
        }
    }

    /// Objective calls a run makes: `pop + 4·pop·iters` for SOS (four trial points per
    /// organism per iteration) and `pop + pop·iters` for PSO.
    pub fn evaluation_budget(&self) -> usize {
        let per_iteration = match self.algorithm {
            Algorithm::Sos => 4 * self.population_size,
            Algorithm::Pso => self.population_size,
        };
        self.population_size + per_iteration * self.max_iterations
    }

    /// The same population and seed under `algorithm`, with iterations rescaled so that
    /// both kernels spend the same number of objective calls. Going from PSO to SOS
    /// rounds the iteration count up.
    pub fn with_matched_budget(&self, algorithm: Algorithm) -> Self {
        let max_iterations = match (self.algorithm, algorithm) {
            (Algorithm::Sos, Algorithm::Pso) => 4 * self.max_iterations,
            (Algorithm::Pso, Algorithm::Sos) => self.max_iterations.div_ceil(4),
            _ => self.max_iterations,
        };
        let pso_params = match algorithm {
            Algorithm::Pso => Some(self.pso_params.unwrap_or_default()),
            Algorithm::Sos => self.pso_params,
        };
        Self {
            algorithm,
            max_iterations,
            pso_params,
            ..self.clone()
        }
    }

    pub(crate) fn validate(&self, space: &SearchSpace) -> Result<(), OptimizerError> {
        if space.dimension() == 0 {
            return Err(OptimizerError::EmptySpace);
        }
        if self.population_size < 2 {
            return Err(OptimizerError::PopulationTooSmall(self.population_size));
        }
        if self.max_iterations == 0 {
            return Err(OptimizerError::NoIterations);
        }
        if let Some(g) = self.initial_guesses.iter().find(|g| g.len() != space.dimension()) {
            return Err(OptimizerError::LengthMismatch {
                expected: space.dimension(),
                got: g.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizationResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness after each full iteration; never increases.
    pub fitness_history: Vec<f64>,
    /// Exact number of objective calls, initialization included.
    pub evaluations: usize,
}

/// Runs the kernel selected by `config.algorithm`.
pub fn optimize<F>(
    objective: F,
    space: &SearchSpace,
    config: &OptimizerConfig,
) -> Result<OptimizationResult, OptimizerError>
where
    F: FnMut(&[f64]) -> f64,
{
    match config.algorithm {
        Algorithm::Sos => sos::optimize(objective, space, config),
        Algorithm::Pso => pso::optimize(objective, space, config),
    }
}

/// Uniform random population with `guesses` overwriting its first members.
pub(crate) fn initial_positions<D: Draws>(
    space: &SearchSpace,
    size: usize,
    guesses: &[Vec<f64>],
    draws: &mut D,
) -> Vec<Vec<f64>> {
    let mut positions: Vec<Vec<f64>> = (0..size)
        .map(|_| {
            space
                .lower()
                .iter()
                .zip(space.upper())
                .map(|(&lo, &hi)| draws.uniform(lo, hi))
                .collect()
        })
        .collect();
    for (slot, guess) in positions.iter_mut().zip(guesses) {
        slot.clone_from(guess);
        space.clamp_in_place(slot);
    }
    positions
}

/// Counts calls and rejects non-finite values.
pub(crate) struct Evaluator<F> {
    objective: F,
    pub(crate) calls: usize,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<F> {
    pub(crate) fn new(objective: F) -> Self {
        Self {
            objective,
            calls: 0,
        }
    }

    pub(crate) fn eval(&mut self, position: &[f64]) -> Result<f64, OptimizerError> {
        self.calls += 1;
        let value = (self.objective)(position);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(OptimizerError::NonFinite {
                position: position.to_vec(),
                value,
            })
        }
    }
}
