//! Deterministic synthetic series for tests, demos and the `synth` command.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{DailyLoad, DailySeries};

/// First and last day of the EUNITE-format range.
pub fn eunite_range() -> (NaiveDate, NaiveDate) {
    (
        NaiveDate::from_ymd_opt(1997, 1, 1).expect("valid"),
        NaiveDate::from_ymd_opt(1999, 1, 31).expect("valid"),
    )
}

/// Fixed-date public holidays of each year in `years`.
pub fn fixed_holidays(years: impl IntoIterator<Item = i32>) -> BTreeSet<NaiveDate> {
    const DAYS: [(u32, u32); 8] = [(1, 1), (1, 6), (5, 1), (5, 8), (7, 5), (10, 28), (12, 25), (12, 26)];
    years
        .into_iter()
        .flat_map(|y| DAYS.iter().filter_map(move |&(m, d)| NaiveDate::from_ymd_opt(y, m, d)))
        .collect()
}

/// Daily peaks shaped like the EUNITE data over 1997-01-01..=1999-01-31 (761 days): a
/// winter-high annual cycle around 700 MW, lower weekends, holiday dips, a slow trend and
/// uniform noise of ±`noise` MW drawn from `seed`.
pub fn eunite_like(seed: u64, noise: f64) -> DailySeries {
    let (start, end) = eunite_range();
    let mut holidays = fixed_holidays(1997..=1999);
    holidays.retain(|d| *d <= end);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut date = start;
    let mut t = 0.0;
    while date <= end {
        let doy = f64::from(date.ordinal0());
        let annual = 110.0 * libm::cos(2.0 * core::f64::consts::PI * (doy - 15.0) / 365.25);
        let weekly = match date.weekday() {
            Weekday::Sat => -55.0,
            Weekday::Sun => -75.0,
            Weekday::Mon => -8.0,
            _ => 0.0,
        };
        let holiday = if holidays.contains(&date) { -60.0 } else { 0.0 };
        let trend = 0.03 * t;
        let eps = if noise > 0.0 { rng.gen_range(-noise..noise) } else { 0.0 };
        records.push(DailyLoad {
            date,
            peak_load: 640.0 + annual + weekly + holiday + trend + eps,
        });
        date = date + Days::new(1);
        t += 1.0;
    }
    DailySeries::new(records, holidays).expect("synthetic loads are positive and ordered")
}

/// Noise-free load from 1997-01-01 for `days` days: a weekly sine plus a slower
/// 29.5-day sine around 600 MW, no holidays.
pub fn sine_load(days: u32) -> DailySeries {
    let start = NaiveDate::from_ymd_opt(1997, 1, 1).expect("valid");
    let tau = 2.0 * core::f64::consts::PI;
    let records = (0..days)
        .map(|k| {
            let t = f64::from(k);
            DailyLoad {
                date: start + Days::new(u64::from(k)),
                peak_load: 600.0 + 80.0 * libm::sin(tau * t / 7.0) + 40.0 * libm::sin(tau * t / 29.5),
            }
        })
        .collect();
    DailySeries::new(records, BTreeSet::new()).expect("sine loads are positive")
}
