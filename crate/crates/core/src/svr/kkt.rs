use alloc::vec::Vec;

use super::{kernel_matrix, SvrModel, TrainingDiagnostics, TrainingProblem};

/// Full-length `β` over the problem rows.
fn dense_coefficients(problem: &TrainingProblem, model: &SvrModel) -> Vec<f64> {
    let mut beta = alloc::vec![0.0; problem.len()];
    match model.support_indices() {
        Some(indices) => {
            for (&p, &b) in indices.iter().zip(model.dual_coefficients()) {
                beta[p] = b;
            }
        }
        None => {
            // deserialized model: match support vectors to rows by exact coordinates
            let mut taken = alloc::vec![false; problem.len()];
            for (sv, &b) in model.support_inputs().iter().zip(model.dual_coefficients()) {
                if let Some(p) = (0..problem.len()).find(|&p| !taken[p] && problem.inputs()[p] == *sv) {
                    taken[p] = true;
                    beta[p] = b;
                }
            }
        }
    }
    beta
}

/// Recomputes objectives and optimality violations of `model` on the problem it was
/// trained on. Works in the model's internal (scaled) units.
///
/// The reported violation is the largest of
/// - per-sample deviation of the residual `r = y − f(x)` from what its `β` requires
///   (`|r| ≤ ε` at `β = 0`, `r = ±ε` when free, `±r ≥ ε` at `β = ±C`),
/// - `|Σβ|`,
/// - any excess of `|β|` over `C`.
///
/// `converged` is set when that maximum is at most `tolerance`; `iterations` is 0.
pub fn verify_kkt(problem: &TrainingProblem, model: &SvrModel, tolerance: f64) -> TrainingDiagnostics {
    let h = model.hyperparameters();
    let (c, eps) = (h.cost_c, h.epsilon);
    let beta = dense_coefficients(problem, model);
    let l = problem.len();
    let k = kernel_matrix(problem.inputs(), h.gamma);

    let k_beta: Vec<f64> = (0..l)
        .map(|i| (0..l).map(|j| k[i * l + j] * beta[j]).sum())
        .collect();
    let quad: f64 = beta.iter().zip(&k_beta).map(|(b, kb)| b * kb).sum();

    let mut slack = 0.0;
    let mut linear = 0.0;
    let mut abs_sum = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..l {
        let y = problem.targets()[i];
        let b = beta[i];
        let r = y - (k_beta[i] + model.bias());
        slack += (r.abs() - eps).max(0.0);
        linear += y * b;
        abs_sum += b.abs();

        let v = if b == 0.0 {
            (r.abs() - eps).max(0.0)
        } else if b >= c {
            (eps - r).max(0.0)
        } else if b <= -c {
            (r + eps).max(0.0)
        } else if b > 0.0 {
            (r - eps).abs()
        } else {
            (r + eps).abs()
        };
        worst = worst.max(v).max(b.abs() - c);
    }
    let beta_sum: f64 = beta.iter().sum();
    worst = worst.max(beta_sum.abs());

    let primal = 0.5 * quad + c * slack;
    let dual = linear - eps * abs_sum - 0.5 * quad;
    TrainingDiagnostics {
        primal_objective: primal,
        dual_objective: dual,
        duality_gap: primal - dual,
        iterations: 0,
        max_kkt_violation: worst,
        converged: worst <= tolerance,
    }
}
