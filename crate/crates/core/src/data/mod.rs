//! Daily peak-load series and the supervised datasets built from them.

use alloc::string::String;

use chrono::NaiveDate;

mod calendar;
mod matrix;
mod normalize;
mod series;
mod split;

pub use calendar::{encode_calendar, CalendarEncoding, DayType, WeekConvention, CALENDAR_WIDTH};
pub use matrix::{build_lag_matrix, FeatureMatrix};
pub use normalize::{fit_normalization, NormalizationState};
pub use series::{DailyLoad, DailySeries};
pub use split::{split_train_test, SplitConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("series is empty")]
    EmptySeries,
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("load on {date} is {value}; loads must be finite and positive")]
    NonPositiveLoad { date: NaiveDate, value: f64 },
    #[error("lag set is empty")]
    EmptyLagSet,
    #[error("lag {0} is invalid; lags are positive day counts without repeats")]
    InvalidLag(u32),
    #[error("lag {lag} does not fit a series of {len} days")]
    LagTooLarge { lag: u32, len: usize },
    #[error("no training rows fall in the configured training months")]
    EmptyTrain,
    #[error("no test rows fall in the configured test month")]
    EmptyTest,
    #[error("column {column} is constant in the training rows")]
    ConstantColumn { column: String },
    #[error("matrix is already normalized")]
    AlreadyNormalized,
    #[error("matrix has {got} lag columns, normalization expects {expected}")]
    ColumnMismatch { expected: usize, got: usize },
    #[error("invalid split configuration: {0}")]
    InvalidSplit(&'static str),
}
