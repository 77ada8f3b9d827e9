use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate};

use super::{DataError, FeatureMatrix};

/// Rows are assigned by their target date: training months of the training years, and
/// one test month.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitConfig {
    pub train_years: Vec<i32>,
    pub train_months: Vec<u32>,
    pub test_year: i32,
    pub test_month: u32,
}

impl Default for SplitConfig {
    /// Winter months of 1997 and 1998 for training, January 1999 for testing.
    fn default() -> Self {
        Self {
            train_years: vec![1997, 1998],
            train_months: vec![1, 2, 3, 10, 11, 12],
            test_year: 1999,
            test_month: 1,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.train_years.is_empty() || self.train_months.is_empty() {
            return Err(DataError::InvalidSplit("training years and months must be non-empty"));
        }
        if self
            .train_months
            .iter()
            .chain(core::iter::once(&self.test_month))
            .any(|m| !(1..=12).contains(m))
        {
            return Err(DataError::InvalidSplit("months must be in 1..=12"));
        }
        if self.is_train(self.test_start()) {
            return Err(DataError::InvalidSplit("test month overlaps the training months"));
        }
        Ok(())
    }

    pub fn is_train(&self, date: NaiveDate) -> bool {
        self.train_years.contains(&date.year()) && self.train_months.contains(&date.month())
    }

    pub fn is_test(&self, date: NaiveDate) -> bool {
        date.year() == self.test_year && date.month() == self.test_month
    }

    pub fn test_start(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.test_year, self.test_month, 1).expect("validated month")
    }

    /// Every calendar day of the test month.
    pub fn test_dates(&self) -> Vec<NaiveDate> {
        let mut out = Vec::new();
        let mut d = Some(self.test_start());
        while let Some(day) = d {
            if !self.is_test(day) {
                break;
            }
            out.push(day);
            d = day.succ_opt();
        }
        out
    }
}

pub fn split_train_test(
    matrix: &FeatureMatrix,
    config: &SplitConfig,
) -> Result<(FeatureMatrix, FeatureMatrix), DataError> {
    config.validate()?;
    let train = matrix.filter_rows(|_, d| config.is_train(d));
    let test = matrix.filter_rows(|_, d| config.is_test(d));
    if train.is_empty() {
        return Err(DataError::EmptyTrain);
    }
    if test.is_empty() {
        return Err(DataError::EmptyTest);
    }
    Ok((train, test))
}
