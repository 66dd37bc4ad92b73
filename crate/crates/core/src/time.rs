//! Civil calendar arithmetic and month sets.
//!
//! Timestamps are local civil time at a fixed UTC offset (no daylight saving).

use core::fmt;

use crate::{Error, Result};

/// A local civil date-time with one-second resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CivilDateTime {
    pub year: i32,
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        _ => 28,
    }
}

pub fn days_in_year(year: i32) -> u32 {
    if is_leap_year(year) {
        366
    } else {
        365
    }
}

// Days since 1970-01-01 of a proleptic Gregorian date (H. Hinnant's algorithm).
fn days_from_civil(year: i32, month: u8, day: u8) -> i64 {
    let y = i64::from(year) - i64::from(month <= 2);
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let m = i64::from(month);
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(day) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i32, u8, u8) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u8;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
    ((y + i64::from(m <= 2)) as i32, m, d)
}

impl CivilDateTime {
    pub fn new(year: i32, month: u8, day: u8, hour: u8, minute: u8, second: u8) -> Result<Self> {
        if !(1..=12).contains(&month)
            || day == 0
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
            || second > 59
        {
            return Err(Error::Invalid(alloc::format!(
                "invalid civil date-time {year:04}-{month:02}-{day:02}T{hour:02}:{minute:02}:{second:02}"
            )));
        }
        Ok(Self {
            year,
            month,
            day,
            hour,
            minute,
            second,
        })
    }

    /// Midnight of the given date. Panics on an invalid date; use [`CivilDateTime::new`] for
    /// untrusted input.
    pub fn date(year: i32, month: u8, day: u8) -> Self {
        Self::new(year, month, day, 0, 0, 0).expect("valid date")
    }

    pub fn at(self, hour: u8, minute: u8) -> Self {
        Self::new(self.year, self.month, self.day, hour, minute, 0).expect("valid time of day")
    }

    /// 1-based ordinal day of the year.
    pub fn day_of_year(&self) -> u32 {
        (days_from_civil(self.year, self.month, self.day) - days_from_civil(self.year, 1, 1) + 1) as u32
    }

    /// Clock time as fractional hours since local midnight.
    pub fn hours_of_day(&self) -> f64 {
        f64::from(self.hour) + f64::from(self.minute) / 60.0 + f64::from(self.second) / 3600.0
    }

    /// Seconds since 1970-01-01T00:00 of the same clock (no offset applied).
    pub fn epoch_seconds(&self) -> i64 {
        days_from_civil(self.year, self.month, self.day) * 86_400
            + i64::from(self.hour) * 3600
            + i64::from(self.minute) * 60
            + i64::from(self.second)
    }

    pub fn from_epoch_seconds(secs: i64) -> Self {
        let days = secs.div_euclid(86_400);
        let rem = secs.rem_euclid(86_400);
        let (year, month, day) = civil_from_days(days);
        Self {
            year,
            month,
            day,
            hour: (rem / 3600) as u8,
            minute: ((rem % 3600) / 60) as u8,
            second: (rem % 60) as u8,
        }
    }

    pub fn add_seconds(&self, secs: i64) -> Self {
        Self::from_epoch_seconds(self.epoch_seconds() + secs)
    }

    /// Same date with the clock set from fractional hours, rounded to the second.
    pub fn with_hours(&self, hours: f64) -> Self {
        let secs = crate::math::round(hours * 3600.0) as i64;
        Self::date(self.year, self.month, self.day).add_seconds(secs)
    }

    pub fn month(&self) -> Month {
        Month(self.month)
    }
}

impl fmt::Display for CivilDateTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:04}-{:02}-{:02}T{:02}:{:02}",
            self.year, self.month, self.day, self.hour, self.minute
        )?;
        if self.second != 0 {
            write!(f, ":{:02}", self.second)?;
        }
        Ok(())
    }
}

/// Calendar month, 1 = January.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month(u8);

impl Month {
    pub fn new(m: u8) -> Result<Self> {
        if (1..=12).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::Invalid(alloc::format!("month {m} is not in 1..=12")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Zero-based index for month-indexed arrays.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn all() -> impl Iterator<Item = Month> {
        (1..=12).map(Month)
    }

    pub fn abbrev(self) -> &'static str {
        [
            "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
        ][self.index()]
    }

    /// The month six places away, used for hemisphere mirroring.
    pub fn shifted(self, by: u8) -> Month {
        Month((self.0 - 1 + by) % 12 + 1)
    }
}

/// A set of calendar months stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MonthSet(u16);

impl MonthSet {
    pub const EMPTY: MonthSet = MonthSet(0);
    pub const ALL: MonthSet = MonthSet(0x0fff);

    /// Inclusive range that may wrap around the year end, e.g. `Oct..=Mar`.
    pub fn span(from: u8, to: u8) -> Result<Self> {
        let (a, b) = (Month::new(from)?, Month::new(to)?);
        let mut set = MonthSet::EMPTY;
        let mut m = a;
        loop {
            set = set.with(m);
            if m == b {
                break;
            }
            m = m.shifted(1);
        }
        Ok(set)
    }

    pub fn from_months(months: &[u8]) -> Result<Self> {
        months
            .iter()
            .try_fold(MonthSet::EMPTY, |s, &m| Ok(s.with(Month::new(m)?)))
    }

    pub fn with(self, m: Month) -> Self {
        MonthSet(self.0 | (1 << m.index()))
    }

    pub fn contains(self, m: Month) -> bool {
        self.0 & (1 << m.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: MonthSet) -> MonthSet {
        MonthSet(self.0 | other.0)
    }

    pub fn intersection(self, other: MonthSet) -> MonthSet {
        MonthSet(self.0 & other.0)
    }

    pub fn intersects(self, other: MonthSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn complement(self) -> MonthSet {
        MonthSet(!self.0 & 0x0fff)
    }

    pub fn iter(self) -> impl Iterator<Item = Month> {
        Month::all().filter(move |m| self.contains(*m))
    }

    /// Shift every month by `by` places (hemisphere mirroring uses 6).
    pub fn shifted(self, by: u8) -> MonthSet {
        self.iter().fold(MonthSet::EMPTY, |s, m| s.with(m.shifted(by)))
    }
}

/// Pakistani winter cropping season, November through April.
pub const RABI: MonthSet = MonthSet(0b1100_0000_1111);
/// Pakistani summer cropping season, May through October.
pub const KHARIF: MonthSet = MonthSet(0b0011_1111_0000);
