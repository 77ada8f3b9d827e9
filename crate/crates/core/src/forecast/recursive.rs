use alloc::vec::Vec;

use chrono::{Days, NaiveDate};

use super::ForecastError;
use crate::data::{encode_calendar, DailySeries, WeekConvention, CALENDAR_WIDTH};
use crate::svr::SvrModel;

/// Predicts each of `horizon` in order. A lag date before the first horizon day reads
/// the recorded load; a lag date inside the horizon reads the forecast already made for
/// it. Loads the series holds for horizon days are never read.
///
/// `model` must carry the normalization it was trained under (or none, for a model
/// trained on raw units); predictions are returned in load units.
pub fn forecast_month(
    model: &SvrModel,
    series: &DailySeries,
    horizon: &[NaiveDate],
    lag_set: &[u32],
    week: &WeekConvention,
) -> Result<Vec<(NaiveDate, f64)>, ForecastError> {
    let start = *horizon.first().ok_or(ForecastError::EmptyHorizon)?;
    for pair in horizon.windows(2) {
        if pair[0].succ_opt() != Some(pair[1]) {
            return Err(ForecastError::NonConsecutiveHorizon(pair[1]));
        }
    }
    let mut out: Vec<(NaiveDate, f64)> = Vec::with_capacity(horizon.len());
    for (h, &date) in horizon.iter().enumerate() {
        let mut row = Vec::with_capacity(lag_set.len() + CALENDAR_WIDTH);
        for &lag in lag_set {
            let back = (h as i64) - i64::from(lag);
            let lag_day = date
                .checked_sub_days(Days::new(u64::from(lag)))
                .unwrap_or(NaiveDate::MIN);
            let value = if back >= 0 {
                Some(out[back as usize].1)
            } else if lag_day < start {
                series.load_on(lag_day)
            } else {
                None
            };
            match value {
                Some(v) => row.push(v),
                None => {
                    return Err(ForecastError::UnresolvableLag {
                        date,
                        lag,
                        missing: lag_day,
                    })
                }
            }
        }
        row.extend_from_slice(&encode_calendar(date, series.holidays(), week).bits());
        out.push((date, model.predict(&row)?));
    }
    Ok(out)
}
