//! MMWR epidemiological week calendar.
//!
//! Weeks run Sunday through Saturday and are identified by their Saturday.
//! Week 1 of an MMWR year is the first week with at least four days in
//! January, so a year starts on the Sunday on or before January 4th.

use std::fmt;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One MMWR week, identified by its Saturday end date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MmwrWeek {
    year: i32,
    week: u32,
    end_date: NaiveDate,
}

fn min_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(1900, 1, 1).unwrap()
}

fn max_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2100, 12, 31).unwrap()
}

/// Sunday that starts week 1 of MMWR year `year`.
fn mmwr_year_start(year: i32) -> NaiveDate {
    let jan4 = NaiveDate::from_ymd_opt(year, 1, 4).unwrap();
    jan4 - Duration::days(i64::from(jan4.weekday().num_days_from_sunday()))
}

/// Saturday that ends the Sunday..Saturday week containing `date`.
pub fn week_ending(date: NaiveDate) -> NaiveDate {
    date + Duration::days(i64::from(6 - date.weekday().num_days_from_sunday()))
}

/// Returns the MMWR week containing `date`.
pub fn mmwr_week_of(date: NaiveDate) -> Result<MmwrWeek> {
    if date < min_date() || date > max_date() {
        return Err(Error::DateOutOfRange(date));
    }
    let end_date = week_ending(date);
    let mut year = end_date.year();
    if end_date < mmwr_year_start(year) {
        year -= 1;
    } else if end_date >= mmwr_year_start(year + 1) {
        year += 1;
    }
    let days = (end_date - mmwr_year_start(year)).num_days();
    let week = (days / 7 + 1) as u32;
    Ok(MmwrWeek {
        year,
        week,
        end_date,
    })
}

impl MmwrWeek {
    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn week(&self) -> u32 {
        self.week
    }

    pub fn end_date(&self) -> NaiveDate {
        self.end_date
    }

    /// Sunday that starts this week.
    pub fn start_date(&self) -> NaiveDate {
        self.end_date - Duration::days(6)
    }

    /// The week `offset` weeks after this one (negative offsets go back).
    pub fn plus_weeks(&self, offset: i64) -> Result<MmwrWeek> {
        mmwr_week_of(self.end_date + Duration::weeks(offset))
    }

    /// Signed number of weeks from `self` to `other`.
    pub fn weeks_until(&self, other: &MmwrWeek) -> i64 {
        (other.end_date - self.end_date).num_days() / 7
    }

    /// Parses an ISO-8601 date that must be a Saturday.
    pub fn from_saturday(date: NaiveDate) -> Result<MmwrWeek> {
        if date.weekday() != Weekday::Sat {
            return Err(Error::InvalidObservation(format!(
                "{date} is a {:?}, expected an end-of-week Saturday",
                date.weekday()
            )));
        }
        mmwr_week_of(date)
    }
}

impl fmt::Display for MmwrWeek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}w{:02} ({})", self.year, self.week, self.end_date)
    }
}
