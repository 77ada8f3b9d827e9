use alloc::vec::Vec;

use super::{
    kernel_matrix, verify_kkt, SolverSettings, SvrError, SvrHyperparameters, SvrModel,
    TrainingDiagnostics, TrainingProblem,
};

/// Curvature floor for degenerate pairs (e.g. `α_i` against `α*_i`).
const TAU: f64 = 1e-12;

/// Split-form dual: variable `t < l` is `α_t` (sign +1), `t ≥ l` is `α*_{t−l}` (sign −1).
///
/// `min ½ aᵀQa + pᵀa` with `Q_st = s_s·s_t·K`, `p = ε − y` for `α` and `ε + y` for `α*`,
/// subject to `Σ s_t·a_t = 0` and `0 ≤ a_t ≤ C`.
struct Solver<'k> {
    kernel: &'k [f64],
    l: usize,
    cost: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl<'k> Solver<'k> {
    fn new(kernel: &'k [f64], targets: &[f64], hyper: &SvrHyperparameters) -> Self {
        let l = targets.len();
        let mut grad = Vec::with_capacity(2 * l);
        grad.extend(targets.iter().map(|y| hyper.epsilon - y));
        grad.extend(targets.iter().map(|y| hyper.epsilon + y));
        Self {
            kernel,
            l,
            cost: hyper.cost_c,
            alpha: alloc::vec![0.0; 2 * l],
            grad,
        }
    }

    #[inline]
    fn sign(&self, t: usize) -> f64 {
        if t < self.l {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    fn k(&self, s: usize, t: usize) -> f64 {
        self.kernel[(s % self.l) * self.l + t % self.l]
    }

    #[inline]
    fn in_up(&self, t: usize) -> bool {
        if t < self.l {
            self.alpha[t] < self.cost
        } else {
            self.alpha[t] > 0.0
        }
    }

    #[inline]
    fn in_low(&self, t: usize) -> bool {
        if t < self.l {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.cost
        }
    }

    /// Maximal violating pair `(i, j, m, M)` with `m = max_{I_up} −s·G`,
    /// `M = min_{I_low} −s·G`. Ties keep the lowest index.
    fn select(&self) -> (Option<usize>, Option<usize>, f64, f64) {
        let mut up = None;
        let mut low = None;
        let mut m = f64::NEG_INFINITY;
        let mut big_m = f64::INFINITY;
        for t in 0..2 * self.l {
            let v = -self.sign(t) * self.grad[t];
            if self.in_up(t) && v > m {
                m = v;
                up = Some(t);
            }
            if self.in_low(t) && v < big_m {
                big_m = v;
                low = Some(t);
            }
        }
        (up, low, m, big_m)
    }

    /// Analytic two-variable update keeping `Σ s_t·a_t` fixed and both variables in
    /// `[0, C]`. Returns false if a non-finite value appeared.
    fn update_pair(&mut self, i: usize, j: usize) -> bool {
        let c = self.cost;
        let (si, sj) = (self.sign(i), self.sign(j));
        let q_ij = si * sj * self.k(i, j);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if si != sj {
            let mut quad = 2.0 + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = 2.0 - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        if !ai.is_finite() || !aj.is_finite() {
            return false;
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;

        let (di, dj) = (ai - old_i, aj - old_j);
        let mut finite = true;
        for t in 0..2 * self.l {
            let st = self.sign(t);
            let g = &mut self.grad[t];
            *g += st * si * self.kernel[(t % self.l) * self.l + i % self.l] * di
                + st * sj * self.kernel[(t % self.l) * self.l + j % self.l] * dj;
            finite &= g.is_finite();
        }
        finite
    }

    /// Mean of `−s·G` over free variables, else the midpoint of `[M, m]`.
    fn bias(&self, m: f64, big_m: f64) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        for t in 0..2 * self.l {
            if self.alpha[t] > 0.0 && self.alpha[t] < self.cost {
                sum += -self.sign(t) * self.grad[t];
                free += 1;
            }
        }
        if free > 0 {
            sum / free as f64
        } else if m.is_finite() && big_m.is_finite() {
            0.5 * (m + big_m)
        } else if m.is_finite() {
            m
        } else {
            big_m
        }
    }
}

/// Trains an SVR on `problem`.
///
/// Iterates maximal-violating-pair updates until `m − M ≤ settings.tolerance` or
/// `settings.max_passes` updates have run; hitting the pass limit is reported through
/// [`TrainingDiagnostics::converged`], not as an error. The returned model has no
/// normalization attached.
pub fn train(
    problem: &TrainingProblem,
    hyper: &SvrHyperparameters,
    settings: &SolverSettings,
) -> Result<(SvrModel, TrainingDiagnostics), SvrError> {
    hyper.validate()?;
    if !(settings.tolerance > 0.0) {
        return Err(SvrError::InvalidHyperparameter {
            name: "solver_tolerance",
            value: settings.tolerance,
        });
    }
    let l = problem.len();
    let kernel = kernel_matrix(problem.inputs(), hyper.gamma);
    let mut solver = Solver::new(&kernel, problem.targets(), hyper);

    let mut iterations = 0;
    let (mut m, mut big_m);
    let converged = loop {
        let (up, low, mm, bm) = solver.select();
        m = mm;
        big_m = bm;
        let (Some(i), Some(j)) = (up, low) else {
            break true;
        };
        if m - big_m <= settings.tolerance {
            break true;
        }
        if iterations >= settings.max_passes {
            break false;
        }
        if !solver.update_pair(i, j) {
            return Err(SvrError::NumericFailure { iteration: iterations });
        }
        iterations += 1;
    };

    let bias = solver.bias(m, big_m);
    if !bias.is_finite() {
        return Err(SvrError::NumericFailure { iteration: iterations });
    }

    let mut support_inputs = Vec::new();
    let mut coefficients = Vec::new();
    let mut indices = Vec::new();
    for p in 0..l {
        let beta = solver.alpha[p] - solver.alpha[p + l];
        if beta != 0.0 {
            support_inputs.push(problem.inputs()[p].clone());
            coefficients.push(beta);
            indices.push(p);
        }
    }
    let model = SvrModel::from_parts(
        problem.dimension(),
        support_inputs,
        coefficients,
        bias,
        *hyper,
        None,
    )?
    .with_support_indices(indices);

    let mut diagnostics = verify_kkt(problem, &model, settings.tolerance);
    diagnostics.iterations = iterations;
    diagnostics.converged = converged;
    Ok((model, diagnostics))
}
