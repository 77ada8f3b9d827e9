use alloc::format;
use alloc::vec::Vec;

use super::{DataError, FeatureMatrix};

/// Min-max scaling of lag columns and the target to `[0, 1]`, fitted on training rows.
/// Calendar columns pass through. Values outside the fitted range map outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationState {
    pub(crate) lag_min: Vec<f64>,
    pub(crate) lag_max: Vec<f64>,
    pub(crate) target_min: f64,
    pub(crate) target_max: f64,
}

impl NormalizationState {
    pub fn new(lag_min: Vec<f64>, lag_max: Vec<f64>, target_min: f64, target_max: f64) -> Result<Self, DataError> {
        if lag_min.len() != lag_max.len() {
            return Err(DataError::ColumnMismatch {
                expected: lag_min.len(),
                got: lag_max.len(),
            });
        }
        for (c, (lo, hi)) in lag_min.iter().zip(&lag_max).enumerate() {
            if !(hi > lo) {
                return Err(DataError::ConstantColumn {
                    column: format!("lag column {c}"),
                });
            }
        }
        if !(target_max > target_min) {
            return Err(DataError::ConstantColumn {
                column: "target".into(),
            });
        }
        Ok(Self {
            lag_min,
            lag_max,
            target_min,
            target_max,
        })
    }

    pub fn lag_columns(&self) -> usize {
        self.lag_min.len()
    }

    pub fn lag_min(&self) -> &[f64] {
        &self.lag_min
    }

    pub fn lag_max(&self) -> &[f64] {
        &self.lag_max
    }

    pub fn target_range(&self) -> (f64, f64) {
        (self.target_min, self.target_max)
    }

    pub fn scale_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(c, &v)| match (self.lag_min.get(c), self.lag_max.get(c)) {
                (Some(lo), Some(hi)) => (v - lo) / (hi - lo),
                _ => v,
            })
            .collect()
    }

    pub fn scale_target(&self, y: f64) -> f64 {
        (y - self.target_min) / (self.target_max - self.target_min)
    }

    pub fn unscale_target(&self, z: f64) -> f64 {
        z * (self.target_max - self.target_min) + self.target_min
    }

    /// Scales rows and targets of a raw matrix; the result records this state.
    pub fn apply(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix, DataError> {
        if matrix.normalization.is_some() {
            return Err(DataError::AlreadyNormalized);
        }
        if matrix.lag_set.len() != self.lag_columns() {
            return Err(DataError::ColumnMismatch {
                expected: self.lag_columns(),
                got: matrix.lag_set.len(),
            });
        }
        Ok(FeatureMatrix {
            rows: matrix.rows.iter().map(|r| self.scale_row(r)).collect(),
            targets: matrix.targets.iter().map(|&y| self.scale_target(y)).collect(),
            row_dates: matrix.row_dates.clone(),
            lag_set: matrix.lag_set.clone(),
            normalization: Some(self.clone()),
            dropped_rows: matrix.dropped_rows,
        })
    }

    /// Targets of a matrix scaled by this state, in raw units.
    pub fn invert_targets(&self, matrix: &FeatureMatrix) -> Vec<f64> {
        matrix.targets.iter().map(|&z| self.unscale_target(z)).collect()
    }
}

/// Fits the scaling on `train` alone.
pub fn fit_normalization(train: &FeatureMatrix) -> Result<NormalizationState, DataError> {
    if train.normalization.is_some() {
        return Err(DataError::AlreadyNormalized);
    }
    if train.is_empty() {
        return Err(DataError::EmptyTrain);
    }
    let lags = train.lag_set.len();
    let mut lag_min = alloc::vec![f64::INFINITY; lags];
    let mut lag_max = alloc::vec![f64::NEG_INFINITY; lags];
    for row in &train.rows {
        for c in 0..lags {
            lag_min[c] = lag_min[c].min(row[c]);
            lag_max[c] = lag_max[c].max(row[c]);
        }
    }
    for c in 0..lags {
        if !(lag_max[c] > lag_min[c]) {
            return Err(DataError::ConstantColumn {
                column: format!("lag_{}", train.lag_set[c]),
            });
        }
    }
    let target_min = train.targets.iter().copied().fold(f64::INFINITY, f64::min);
    let target_max = train.targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    NormalizationState::new(lag_min, lag_max, target_min, target_max)
}
