use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};

use super::{encode_calendar, DailySeries, DataError, NormalizationState, WeekConvention, CALENDAR_WIDTH};

/// Supervised rows: lag loads in `lag_set` order followed by [`CALENDAR_WIDTH`] calendar
/// bits, with the day's own load as target.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub(crate) rows: Vec<Vec<f64>>,
    pub(crate) targets: Vec<f64>,
    pub(crate) row_dates: Vec<NaiveDate>,
    pub(crate) lag_set: Vec<u32>,
    pub(crate) normalization: Option<NormalizationState>,
    pub(crate) dropped_rows: usize,
}

impl FeatureMatrix {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn row_dates(&self) -> &[NaiveDate] {
        &self.row_dates
    }

    pub fn lag_set(&self) -> &[u32] {
        &self.lag_set
    }

    /// Scaling applied to rows and targets, if any.
    pub fn normalization(&self) -> Option<&NormalizationState> {
        self.normalization.as_ref()
    }

    /// Series days that could not form a row because a lag date was missing.
    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.lag_set.len() + CALENDAR_WIDTH
    }

    /// `lag_<n>` per lag, then the calendar columns.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.lag_set.iter().map(|l| format!("lag_{l}")).collect();
        names.extend((1..=12).map(|m| format!("month_{m:02}")));
        for n in ["first_day", "weekday", "weekend", "holiday"] {
            names.push(String::from(n));
        }
        names
    }

    /// Rows whose position satisfies `keep`, in order.
    pub fn filter_rows(&self, mut keep: impl FnMut(usize, NaiveDate) -> bool) -> Self {
        let mut out = Self {
            rows: Vec::new(),
            targets: Vec::new(),
            row_dates: Vec::new(),
            lag_set: self.lag_set.clone(),
            normalization: self.normalization.clone(),
            dropped_rows: self.dropped_rows,
        };
        for (k, &date) in self.row_dates.iter().enumerate() {
            if keep(k, date) {
                out.rows.push(self.rows[k].clone());
                out.targets.push(self.targets[k]);
                out.row_dates.push(date);
            }
        }
        out
    }

    /// Lag columns only, as column vectors.
    pub fn lag_columns(&self) -> Vec<Vec<f64>> {
        (0..self.lag_set.len())
            .map(|c| self.rows.iter().map(|r| r[c]).collect())
            .collect()
    }
}

pub(crate) fn validate_lags(lag_set: &[u32], series_len: usize) -> Result<(), DataError> {
    if lag_set.is_empty() {
        return Err(DataError::EmptyLagSet);
    }
    for (k, &lag) in lag_set.iter().enumerate() {
        if lag == 0 || lag_set[..k].contains(&lag) {
            return Err(DataError::InvalidLag(lag));
        }
        if lag as usize >= series_len {
            return Err(DataError::LagTooLarge {
                lag,
                len: series_len,
            });
        }
    }
    Ok(())
}

/// Lag value `lag` days before `date`.
pub(crate) fn lag_date(date: NaiveDate, lag: u32) -> Option<NaiveDate> {
    date.checked_sub_days(Days::new(u64::from(lag)))
}

/// One row per series day whose every lag date has a recorded load. Days with a missing
/// lag (including the first `max(lag_set)` days) are dropped and counted.
pub fn build_lag_matrix(
    series: &DailySeries,
    lag_set: &[u32],
    week: &WeekConvention,
) -> Result<FeatureMatrix, DataError> {
    validate_lags(lag_set, series.len())?;
    let mut m = FeatureMatrix {
        rows: Vec::new(),
        targets: Vec::new(),
        row_dates: Vec::new(),
        lag_set: lag_set.to_vec(),
        normalization: None,
        dropped_rows: 0,
    };
    'days: for rec in series.records() {
        let mut row = Vec::with_capacity(lag_set.len() + CALENDAR_WIDTH);
        for &lag in lag_set {
            match lag_date(rec.date, lag).and_then(|d| series.load_on(d)) {
                Some(v) => row.push(v),
                None => {
                    m.dropped_rows += 1;
                    continue 'days;
                }
            }
        }
        row.extend_from_slice(&encode_calendar(rec.date, series.holidays(), week).bits());
        m.rows.push(row);
        m.targets.push(rec.peak_load);
        m.row_dates.push(rec.date);
    }
    Ok(m)
}
