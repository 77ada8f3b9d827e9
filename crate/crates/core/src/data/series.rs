use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use chrono::NaiveDate;

use super::DataError;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DailyLoad {
    pub date: NaiveDate,
    /// Daily peak demand in MW.
    pub peak_load: f64,
}

/// Date-ordered daily peak loads plus the holiday calendar. Missing days are allowed
/// and show up in [`gaps`](Self::gaps).
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    records: Vec<DailyLoad>,
    holidays: BTreeSet<NaiveDate>,
}

impl DailySeries {
    /// Sorts `records` by date and validates them.
    pub fn new(mut records: Vec<DailyLoad>, holidays: BTreeSet<NaiveDate>) -> Result<Self, DataError> {
        if records.is_empty() {
            return Err(DataError::EmptySeries);
        }
        records.sort_by_key(|r| r.date);
        for w in records.windows(2) {
            if w[0].date == w[1].date {
                return Err(DataError::DuplicateDate(w[0].date));
            }
        }
        if let Some(r) = records
            .iter()
            .find(|r| !(r.peak_load > 0.0 && r.peak_load.is_finite()))
        {
            return Err(DataError::NonPositiveLoad {
                date: r.date,
                value: r.peak_load,
            });
        }
        Ok(Self { records, holidays })
    }

    pub fn records(&self) -> &[DailyLoad] {
        &self.records
    }

    pub fn holidays(&self) -> &BTreeSet<NaiveDate> {
        &self.holidays
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.records[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.records[self.records.len() - 1].date
    }

    pub fn load_on(&self, date: NaiveDate) -> Option<f64> {
        self.records
            .binary_search_by_key(&date, |r| r.date)
            .ok()
            .map(|k| self.records[k].peak_load)
    }

    /// Calendar days between the first and last record that have no record.
    pub fn gaps(&self) -> Vec<NaiveDate> {
        let mut out = Vec::new();
        for w in self.records.windows(2) {
            let mut d = w[0].date.succ_opt();
            while let Some(day) = d {
                if day >= w[1].date {
                    break;
                }
                out.push(day);
                d = day.succ_opt();
            }
        }
        out
    }

    /// Holidays outside `[first_date, last_date]`.
    pub fn holidays_out_of_range(&self) -> Vec<NaiveDate> {
        let (lo, hi) = (self.first_date(), self.last_date());
        self.holidays
            .iter()
            .copied()
            .filter(|d| *d < lo || *d > hi)
            .collect()
    }

    /// Records strictly before `date`, same holidays.
    pub fn truncated_before(&self, date: NaiveDate) -> Option<Self> {
        let records: Vec<DailyLoad> = self.records.iter().copied().filter(|r| r.date < date).collect();
        if records.is_empty() {
            return None;
        }
        Some(Self {
            records,
            holidays: self.holidays.clone(),
        })
    }
}
