//! Epsilon-insensitive support vector regression with an RBF kernel.
//!
//! Training solves the dual problem
//!
//! ```text
//! max  yᵀβ − ε·Σ|β_i| − ½·βᵀKβ    s.t.  Σβ_i = 0,  −C ≤ β_i ≤ C
//! ```
//!
//! with `K(a, b) = exp(−γ‖a − b‖²)`. The solver ([`train`]) works on the equivalent split
//! form `β = α − α*` and updates the maximal KKT-violating pair each iteration.
//! [`verify_kkt`] recomputes primal and dual objectives and per-point optimality
//! violations from a finished model without touching the solver.

use alloc::vec::Vec;

use crate::data::NormalizationState;

mod kkt;
mod smo;

pub use kkt::verify_kkt;
pub use smo::train;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvrError {
    #[error("training problem has no samples")]
    EmptyProblem,
    #[error("{inputs} input rows but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("row {row} has dimension {got}, expected {expected}")]
    RaggedInputs { row: usize, expected: usize, got: usize },
    #[error("row {row} contains a non-finite value")]
    NonFiniteValue { row: usize },
    #[error("invalid {name} = {value}")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("input has dimension {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solver produced a non-finite value at iteration {iteration}")]
    NumericFailure { iteration: usize },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvrHyperparameters {
    /// Penalty on samples outside the tube.
    pub cost_c: f64,
    /// Tube half-width.
    pub epsilon: f64,
    /// RBF width.
    pub gamma: f64,
}

impl SvrHyperparameters {
    pub fn new(cost_c: f64, epsilon: f64, gamma: f64) -> Result<Self, SvrError> {
        let h = Self {
            cost_c,
            epsilon,
            gamma,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        if !(self.cost_c > 0.0 && self.cost_c.is_finite()) {
            return Err(SvrError::InvalidHyperparameter {
                name: "C",
                value: self.cost_c,
            });
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SvrError::InvalidHyperparameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SvrError::InvalidHyperparameter {
                name: "gamma",
                value: self.gamma,
            });
        }
        Ok(())
    }
}

/// Samples `(x_i, y_i)`, all finite and of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingProblem {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl TrainingProblem {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, SvrError> {
        if inputs.len() != targets.len() {
            return Err(SvrError::LengthMismatch {
                inputs: inputs.len(),
                targets: targets.len(),
            });
        }
        if inputs.is_empty() {
            return Err(SvrError::EmptyProblem);
        }
        let dim = inputs[0].len();
        for (row, (x, y)) in inputs.iter().zip(&targets).enumerate() {
            if x.len() != dim {
                return Err(SvrError::RaggedInputs {
                    row,
                    expected: dim,
                    got: x.len(),
                });
            }
            if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(SvrError::NonFiniteValue { row });
            }
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.inputs[0].len()
    }
}

/// Solver stopping rule. One pass is one working-pair update.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverSettings {
    pub tolerance: f64,
    pub max_passes: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_passes: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingDiagnostics {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub max_kkt_violation: f64,
    pub converged: bool,
}

/// A trained regressor. Only samples with nonzero `β` are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    support_inputs: Vec<Vec<f64>>,
    dual_coefficients: Vec<f64>,
    /// Row of each support vector in the training problem, when known.
    support_indices: Option<Vec<usize>>,
    bias: f64,
    hyper: SvrHyperparameters,
    dimension: usize,
    normalization: Option<NormalizationState>,
}

impl SvrModel {
    /// Assembles a model from stored parts, checking the dual feasibility invariants.
    pub fn from_parts(
        dimension: usize,
        support_inputs: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
        bias: f64,
        hyper: SvrHyperparameters,
        normalization: Option<NormalizationState>,
    ) -> Result<Self, SvrError> {
        hyper.validate()?;
        if support_inputs.len() != dual_coefficients.len() {
            return Err(SvrError::InvalidModel(
                "support vector and coefficient counts differ",
            ));
        }
        if support_inputs.iter().any(|x| x.len() != dimension) {
            return Err(SvrError::InvalidModel("support vector dimension mismatch"));
        }
        if dual_coefficients
            .iter()
            .any(|&b| b == 0.0 || !b.is_finite() || b.abs() > hyper.cost_c + 1e-12)
        {
            return Err(SvrError::InvalidModel(
                "dual coefficients must be nonzero and within [-C, C]",
            ));
        }
        if !bias.is_finite() {
            return Err(SvrError::InvalidModel("bias is not finite"));
        }
        if let Some(n) = &normalization {
            if n.lag_columns() > dimension {
                return Err(SvrError::InvalidModel(
                    "normalization scales more columns than the model has",
                ));
            }
        }
        Ok(Self {
            support_inputs,
            dual_coefficients,
            support_indices: None,
            bias,
            hyper,
            dimension,
            normalization,
        })
    }

    pub(crate) fn with_support_indices(mut self, indices: Vec<usize>) -> Self {
        self.support_indices = Some(indices);
        self
    }

    pub fn support_inputs(&self) -> &[Vec<f64>] {
        &self.support_inputs
    }

    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coefficients
    }

    pub fn support_indices(&self) -> Option<&[usize]> {
        self.support_indices.as_deref()
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn hyperparameters(&self) -> &SvrHyperparameters {
        &self.hyper
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn normalization(&self) -> Option<&NormalizationState> {
        self.normalization.as_ref()
    }

    /// Attaches the scaling the model was trained under; [`predict`](Self::predict) then
    /// accepts raw inputs and returns raw-unit targets.
    pub fn with_normalization(mut self, normalization: Option<NormalizationState>) -> Self {
        self.normalization = normalization;
        self
    }

    /// `Σ β_i·K(s_i, x) + b` on an already scaled input, summed in support-vector order
    /// with the bias added last.
    pub fn decision_value(&self, scaled: &[f64]) -> Result<f64, SvrError> {
        if scaled.len() != self.dimension {
            return Err(SvrError::DimensionMismatch {
                expected: self.dimension,
                got: scaled.len(),
            });
        }
        let sum: f64 = self
            .support_inputs
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, &beta)| beta * rbf_unchecked(sv, scaled, self.hyper.gamma))
            .sum();
        Ok(sum + self.bias)
    }

    /// Prediction in raw units: scales `input`, evaluates the decision function and maps
    /// the result back through the target scaling.
    pub fn predict(&self, input: &[f64]) -> Result<f64, SvrError> {
        match &self.normalization {
            None => self.decision_value(input),
            Some(n) => {
                if input.len() != self.dimension {
                    return Err(SvrError::DimensionMismatch {
                        expected: self.dimension,
                        got: input.len(),
                    });
                }
                let scaled = n.scale_row(input);
                Ok(n.unscale_target(self.decision_value(&scaled)?))
            }
        }
    }
}

pub(crate) fn rbf_unchecked(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::exp(-gamma * d2)
}

/// `exp(−γ‖a − b‖²)`.
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64, SvrError> {
    if a.len() != b.len() {
        return Err(SvrError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(gamma > 0.0) {
        return Err(SvrError::InvalidHyperparameter {
            name: "gamma",
            value: gamma,
        });
    }
    Ok(rbf_unchecked(a, b, gamma))
}

/// Zero inside the tube `|prediction − target| ≤ ε`, linear outside it.
pub fn epsilon_insensitive_loss(prediction: f64, target: f64, epsilon: f64) -> f64 {
    let r = (prediction - target).abs();
    if r <= epsilon {
        0.0
    } else {
        r - epsilon
    }
}

/// Full symmetric kernel matrix, row-major. Each entry is computed once for `i ≤ j` and
/// mirrored, so `K[i][j]` and `K[j][i]` are bit-identical.
pub fn kernel_matrix(inputs: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let n = inputs.len();
    let mut k = alloc::vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in i + 1..n {
            let v = rbf_unchecked(&inputs[i], &inputs[j], gamma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn kernel_values() {
        assert_eq!(rbf_kernel(&[0.3, -1.0], &[0.3, -1.0], 2.5).unwrap(), 1.0);
        let v = rbf_kernel(&[0.0], &[1.0], 1.0).unwrap();
        assert!((v - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(
            rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.7),
            rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.7)
        );
        assert!(matches!(
            rbf_kernel(&[0.0], &[0.0, 1.0], 1.0),
            Err(SvrError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_is_symmetric_and_bounded() {
        let a = [0.1, 0.9, -3.0];
        let b = [2.0, -0.4, 0.5];
        let ab = rbf_kernel(&a, &b, 0.3).unwrap();
        assert_eq!(ab, rbf_kernel(&b, &a, 0.3).unwrap());
        assert!(ab > 0.0 && ab <= 1.0);
    }

    #[test]
    fn loss_cases() {
        assert_eq!(epsilon_insensitive_loss(3.0, 3.0, 0.5), 0.0);
        assert_eq!(epsilon_insensitive_loss(2.5, 3.0, 0.5), 0.0);
        assert_eq!(epsilon_insensitive_loss(5.0, 2.0, 1.0), 2.0);
        assert_eq!(epsilon_insensitive_loss(-1.0, 2.0, 1.0), 2.0);
    }

    #[test]
    fn hyperparameter_validation() {
        assert!(SvrHyperparameters::new(1.0, 0.0, 1.0).is_ok());
        assert!(SvrHyperparameters::new(0.0, 0.1, 1.0).is_err());
        assert!(SvrHyperparameters::new(1.0, -0.1, 1.0).is_err());
        assert!(SvrHyperparameters::new(1.0, 0.1, 0.0).is_err());
        assert!(SvrHyperparameters::new(f64::NAN, 0.1, 1.0).is_err());
    }

    #[test]
    fn problem_validation() {
        assert_eq!(
            TrainingProblem::new(vec![], vec![]),
            Err(SvrError::EmptyProblem)
        );
        assert!(matches!(
            TrainingProblem::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0, 1.0]),
            Err(SvrError::RaggedInputs { row: 1, .. })
        ));
        assert!(matches!(
            TrainingProblem::new(vec![vec![f64::NAN]], vec![0.0]),
            Err(SvrError::NonFiniteValue { row: 0 })
        ));
        assert!(matches!(
            TrainingProblem::new(vec![vec![1.0]], vec![0.0, 1.0]),
            Err(SvrError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn empty_support_predicts_bias() {
        let hyper = SvrHyperparameters::new(1.0, 0.1, 1.0).unwrap();
        let model = SvrModel::from_parts(2, vec![], vec![], 4.25, hyper, None).unwrap();
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), 4.25);
        assert_eq!(model.predict(&[9.0, -3.0]).unwrap(), 4.25);
        assert!(model.predict(&[1.0]).is_err());
    }

    #[test]
    fn from_parts_rejects_bad_coefficients() {
        let hyper = SvrHyperparameters::new(1.0, 0.1, 1.0).unwrap();
        assert!(SvrModel::from_parts(1, vec![vec![0.0]], vec![0.0], 0.0, hyper, None).is_err());
        assert!(SvrModel::from_parts(1, vec![vec![0.0]], vec![1.5], 0.0, hyper, None).is_err());
        assert!(SvrModel::from_parts(1, vec![vec![0.0, 1.0]], vec![0.5], 0.0, hyper, None).is_err());
    }
}
