//! Calendar values and the interval arithmetic behind them.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Days, Months, NaiveDate, NaiveDateTime, TimeDelta, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Granularity {
    Year,
    Month,
    /// Only produced by week offsets; calendar values never carry it.
    Week,
    Day,
    Hour,
    Minute,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid calendar value `{0}`")]
pub struct CalendarError(pub String);

/// A calendar value with contiguous populated fields, e.g. `2003-03`,
/// `--03-05` or `T08:00`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CalendarValue {
    pub year: Option<i32>,
    pub month: Option<u32>,
    pub day: Option<u32>,
    pub hour: Option<u32>,
    pub minute: Option<u32>,
    pub second: Option<u32>,
}

const FIELD_GRANULARITY: [Granularity; 6] = [
    Granularity::Year,
    Granularity::Month,
    Granularity::Day,
    Granularity::Hour,
    Granularity::Minute,
    Granularity::Second,
];

impl CalendarValue {
    pub fn year(year: i32) -> Self {
        Self::from_fields([Some(year as i64), None, None, None, None, None])
    }

    pub fn ymd(year: i32, month: u32, day: u32) -> Self {
        Self::from_fields([Some(year as i64), Some(month as i64), Some(day as i64), None, None, None])
    }

    fn from_fields(f: [Option<i64>; 6]) -> Self {
        let u = |v: Option<i64>| v.map(|x| x as u32);
        CalendarValue {
            year: f[0].map(|y| y as i32),
            month: u(f[1]),
            day: u(f[2]),
            hour: u(f[3]),
            minute: u(f[4]),
            second: u(f[5]),
        }
    }

    fn fields(&self) -> [Option<i64>; 6] {
        let u = |v: Option<u32>| v.map(i64::from);
        [
            self.year.map(i64::from),
            u(self.month),
            u(self.day),
            u(self.hour),
            u(self.minute),
            u(self.second),
        ]
    }

    /// Index of the coarsest populated field.
    fn coarsest_index(&self) -> Option<usize> {
        self.fields().iter().position(Option::is_some)
    }

    fn finest_index(&self) -> Option<usize> {
        self.fields().iter().rposition(Option::is_some)
    }

    pub fn granularity(&self) -> Option<Granularity> {
        self.finest_index().map(|i| FIELD_GRANULARITY[i])
    }

    pub fn coarsest(&self) -> Option<Granularity> {
        self.coarsest_index().map(|i| FIELD_GRANULARITY[i])
    }

    pub fn is_complete(&self) -> bool {
        self.year.is_some()
    }

    /// Checks contiguity and field ranges. Day-of-month is checked against
    /// the month length whenever month (and, for February, year) is known.
    pub fn validate(&self) -> Result<(), CalendarError> {
        let err = || CalendarError(self.to_string());
        let fields = self.fields();
        let (Some(lo), Some(hi)) = (self.coarsest_index(), self.finest_index()) else {
            return Err(CalendarError("empty calendar value".into()));
        };
        // year-less values start at month, day or hour
        if fields[lo..=hi].iter().any(Option::is_none) || lo > 3 {
            return Err(err());
        }
        let in_range = |v: Option<u32>, lo: u32, hi: u32| v.is_none_or(|x| (lo..=hi).contains(&x));
        if !(in_range(self.month, 1, 12)
            && in_range(self.day, 1, 31)
            && in_range(self.hour, 0, 23)
            && in_range(self.minute, 0, 59)
            && in_range(self.second, 0, 59))
        {
            return Err(err());
        }
        if let Some(y) = self.year {
            if !(-9999..=9999).contains(&y) {
                return Err(err());
            }
        }
        if let (Some(month), Some(day)) = (self.month, self.day) {
            let max = match self.year {
                Some(y) => days_in_month(y, month),
                None if month == 2 => 29,
                None => days_in_month(2001, month),
            };
            if day > max {
                return Err(err());
            }
        }
        Ok(())
    }

    /// First instant of the value. Requires a year.
    pub fn start(&self) -> Option<NaiveDateTime> {
        let date = NaiveDate::from_ymd_opt(self.year?, self.month.unwrap_or(1), self.day.unwrap_or(1))?;
        date.and_hms_opt(
            self.hour.unwrap_or(0),
            self.minute.unwrap_or(0),
            self.second.unwrap_or(0),
        )
    }

    /// Fills every field coarser than this value's coarsest one from `at`.
    pub fn anchored_at(&self, at: NaiveDateTime) -> CalendarValue {
        let Some(lo) = self.coarsest_index() else {
            return *self;
        };
        let src = [
            at.year() as i64,
            at.month() as i64,
            at.day() as i64,
            at.hour() as i64,
            at.minute() as i64,
            at.second() as i64,
        ];
        let mut fields = self.fields();
        for i in 0..lo {
            fields[i] = Some(src[i]);
        }
        Self::from_fields(fields)
    }

    pub fn from_datetime(at: NaiveDateTime, granularity: Granularity) -> CalendarValue {
        let src = [
            at.year() as i64,
            at.month() as i64,
            at.day() as i64,
            at.hour() as i64,
            at.minute() as i64,
            at.second() as i64,
        ];
        let depth = match granularity {
            Granularity::Year => 1,
            Granularity::Month => 2,
            Granularity::Week | Granularity::Day => 3,
            Granularity::Hour => 4,
            Granularity::Minute => 5,
            Granularity::Second => 6,
        };
        let mut fields = [None; 6];
        for i in 0..depth {
            fields[i] = Some(src[i]);
        }
        Self::from_fields(fields)
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    match (NaiveDate::from_ymd_opt(year, month, 1), NaiveDate::from_ymd_opt(ny, nm, 1)) {
        (Some(a), Some(b)) => (b - a).num_days() as u32,
        _ => 31,
    }
}

impl fmt::Display for CalendarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.year {
            Some(y) if y < 0 => write!(f, "-{:04}", -y)?,
            Some(y) => write!(f, "{y:04}")?,
            None => {}
        }
        if let Some(m) = self.month {
            if self.year.is_some() {
                write!(f, "-{m:02}")?;
            } else {
                write!(f, "--{m:02}")?;
            }
        }
        if let Some(d) = self.day {
            if self.year.is_some() || self.month.is_some() {
                write!(f, "-{d:02}")?;
            } else {
                write!(f, "---{d:02}")?;
            }
        }
        if let Some(h) = self.hour {
            write!(f, "T{h:02}")?;
        }
        if let Some(m) = self.minute {
            write!(f, ":{m:02}")?;
        }
        if let Some(s) = self.second {
            write!(f, ":{s:02}")?;
        }
        Ok(())
    }
}

fn number(s: &str, width: usize) -> Option<i64> {
    (s.len() == width && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok())?
}

impl FromStr for CalendarValue {
    type Err = CalendarError;

    /// Accepts `YYYY[-MM[-DD[THH[:MM[:SS]]]]]`, the year-less forms `--MM…`,
    /// `---DD…`, `THH…`, and `:` in place of `T` after a full date.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = || CalendarError(input.to_owned());
        let mut fields: [Option<i64>; 6] = [None; 6];

        let (date, time) = match input.find('T') {
            Some(i) => (&input[..i], Some(&input[i + 1..])),
            None => {
                // 2018-02-15:00:00:00
                if input.len() > 10 && input.as_bytes().get(10) == Some(&b':') && !input.starts_with('-') {
                    (&input[..10], Some(&input[11..]))
                } else {
                    (input, None)
                }
            }
        };

        if let Some(rest) = date.strip_prefix("---") {
            fields[2] = Some(number(rest, 2).ok_or_else(err)?);
        } else if let Some(rest) = date.strip_prefix("--") {
            let mut parts = rest.split('-');
            fields[1] = Some(number(parts.next().ok_or_else(err)?, 2).ok_or_else(err)?);
            if let Some(d) = parts.next() {
                fields[2] = Some(number(d, 2).ok_or_else(err)?);
            }
            if parts.next().is_some() {
                return Err(err());
            }
        } else if !date.is_empty() {
            let (neg, body) = match date.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, date),
            };
            let mut parts = body.split('-');
            let y = parts.next().ok_or_else(err)?;
            let y = number(y, 4).ok_or_else(err)?;
            fields[0] = Some(if neg { -y } else { y });
            for (slot, p) in fields[1..=2].iter_mut().zip(parts.by_ref()) {
                *slot = Some(number(p, 2).ok_or_else(err)?);
            }
            if parts.next().is_some() {
                return Err(err());
            }
        }

        if let Some(time) = time {
            if time.is_empty() {
                return Err(err());
            }
            let mut parts = time.split(':');
            for (slot, p) in fields[3..=5].iter_mut().zip(parts.by_ref()) {
                *slot = Some(number(p, 2).ok_or_else(err)?);
            }
            if parts.next().is_some() {
                return Err(err());
            }
        }

        if fields.iter().all(Option::is_none) {
            return Err(err());
        }
        let value = CalendarValue::from_fields(fields);
        value.validate().map_err(|_| err())?;
        Ok(value)
    }
}

impl Serialize for CalendarValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn floor(at: NaiveDateTime, g: Granularity) -> NaiveDateTime {
    let date = at.date();
    let midnight = |d: NaiveDate| d.and_hms_opt(0, 0, 0).expect("midnight exists");
    match g {
        Granularity::Year => midnight(date.with_day(1).unwrap().with_month(1).unwrap()),
        Granularity::Month => midnight(date.with_day(1).unwrap()),
        Granularity::Week => {
            let back = date.weekday().num_days_from_monday() as u64;
            midnight(date - Days::new(back))
        }
        Granularity::Day => midnight(date),
        Granularity::Hour => date.and_hms_opt(at.hour(), 0, 0).unwrap(),
        Granularity::Minute => date.and_hms_opt(at.hour(), at.minute(), 0).unwrap(),
        Granularity::Second => date.and_hms_opt(at.hour(), at.minute(), at.second()).unwrap(),
    }
}

/// Shifts `at` by `amount` units of `g`. Month and year steps clamp the day
/// to the end of the target month.
pub(crate) fn shift(at: NaiveDateTime, g: Granularity, amount: i64) -> Option<NaiveDateTime> {
    let months = |n: i64| -> Option<NaiveDateTime> {
        let m = Months::new(u32::try_from(n.unsigned_abs()).ok()?);
        if n >= 0 {
            at.checked_add_months(m)
        } else {
            at.checked_sub_months(m)
        }
    };
    let delta = |d: TimeDelta| at.checked_add_signed(d);
    match g {
        Granularity::Year => months(amount.checked_mul(12)?),
        Granularity::Month => months(amount),
        Granularity::Week => delta(TimeDelta::try_weeks(amount)?),
        Granularity::Day => delta(TimeDelta::try_days(amount)?),
        Granularity::Hour => delta(TimeDelta::try_hours(amount)?),
        Granularity::Minute => delta(TimeDelta::try_minutes(amount)?),
        Granularity::Second => delta(TimeDelta::try_seconds(amount)?),
    }
}

/// The `[start, end)` instants of the unit of `g` containing `at`.
pub(crate) fn unit_bounds(at: NaiveDateTime, g: Granularity) -> Option<(NaiveDateTime, NaiveDateTime)> {
    let start = floor(at, g);
    Some((start, shift(start, g, 1)?))
}

pub(crate) fn to_seconds(at: NaiveDateTime) -> i64 {
    at.and_utc().timestamp()
}

pub(crate) fn from_seconds(secs: i64) -> Option<NaiveDateTime> {
    chrono::DateTime::from_timestamp(secs, 0).map(|dt| dt.naive_utc())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_forms() {
        for s in [
            "2003",
            "2003-03",
            "2003-04-05",
            "2003-04-05T08",
            "2003-04-05T08:00",
            "2003-04-05T08:00:00",
            "--03",
            "--04-05",
            "---05",
            "T08",
            "T08:00",
            "T08:00:00",
            "-0044-03-15",
        ] {
            let v: CalendarValue = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        let v: CalendarValue = "2018-02-15:00:00:00".parse().unwrap();
        assert_eq!(v.to_string(), "2018-02-15T00:00:00");
        assert_eq!(v.granularity(), Some(Granularity::Second));
    }

    #[test]
    fn rejects_invalid_values() {
        for s in ["", "03", "2003-13", "2003-02-30", "2001-02-29", "2003-04-05T24", "T08:60", "2003-4", "--02-30", "2003-04-05T"] {
            assert!(s.parse::<CalendarValue>().is_err(), "{s}");
        }
        assert!("2004-02-29".parse::<CalendarValue>().is_ok());
        assert!("--02-29".parse::<CalendarValue>().is_ok());
    }

    #[test]
    fn month_shift_clamps() {
        let jan31 = NaiveDate::from_ymd_opt(2003, 1, 31).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let feb = shift(jan31, Granularity::Month, 1).unwrap();
        assert_eq!(feb.date(), NaiveDate::from_ymd_opt(2003, 2, 28).unwrap());
        let leap = NaiveDate::from_ymd_opt(2004, 1, 31).unwrap().and_hms_opt(0, 0, 0).unwrap();
        assert_eq!(shift(leap, Granularity::Month, 1).unwrap().day(), 29);
    }

    #[test]
    fn week_floor_is_monday() {
        let sat = NaiveDate::from_ymd_opt(2003, 4, 5).unwrap().and_hms_opt(13, 0, 0).unwrap();
        assert_eq!(floor(sat, Granularity::Week).date(), NaiveDate::from_ymd_opt(2003, 3, 31).unwrap());
    }
}
