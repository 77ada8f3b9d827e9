use alloc::collections::BTreeSet;

use chrono::{Datelike, NaiveDate, Weekday};

/// Binary calendar columns appended to every feature row: 12 month bits, 3 day-type bits
/// and 1 holiday bit.
pub const CALENDAR_WIDTH: usize = 16;

/// Which weekday opens the week and which two form the weekend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeekConvention {
    pub first_day: Weekday,
    pub weekend: [Weekday; 2],
}

impl Default for WeekConvention {
    fn default() -> Self {
        Self {
            first_day: Weekday::Mon,
            weekend: [Weekday::Sat, Weekday::Sun],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DayType {
    FirstDay,
    Weekday,
    Weekend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalendarEncoding {
    pub month_onehot: [bool; 12],
    pub day_type: DayType,
    pub holiday_flag: bool,
}

impl CalendarEncoding {
    pub fn bits(&self) -> [f64; CALENDAR_WIDTH] {
        let mut out = [0.0; CALENDAR_WIDTH];
        for (o, &b) in out.iter_mut().zip(&self.month_onehot) {
            *o = if b { 1.0 } else { 0.0 };
        }
        let slot = match self.day_type {
            DayType::FirstDay => 12,
            DayType::Weekday => 13,
            DayType::Weekend => 14,
        };
        out[slot] = 1.0;
        out[15] = if self.holiday_flag { 1.0 } else { 0.0 };
        out
    }
}

/// The first-day rule wins over the weekend rule when a convention puts one day in both.
pub fn encode_calendar(
    date: NaiveDate,
    holidays: &BTreeSet<NaiveDate>,
    week: &WeekConvention,
) -> CalendarEncoding {
    let mut month_onehot = [false; 12];
    month_onehot[date.month0() as usize] = true;
    let wd = date.weekday();
    let day_type = if wd == week.first_day {
        DayType::FirstDay
    } else if week.weekend.contains(&wd) {
        DayType::Weekend
    } else {
        DayType::Weekday
    };
    CalendarEncoding {
        month_onehot,
        day_type,
        holiday_flag: holidays.contains(&date),
    }
}
