//! Day serials counted from 1899-12-30.
//!
//! Serial 1 is 1899-12-31 and 2015-04-01 is 42095. There is no phantom
//! 1900-02-29, so serials agree with the proleptic Gregorian calendar on
//! every day.

use std::fmt;

const EPOCH_DAYS: i64 = days_from_civil(1899, 12, 30);

/// Latest supported date, 9999-12-31.
pub const MAX_SERIAL: i64 = days_from_civil(9999, 12, 31) - EPOCH_DAYS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DateSerial(pub i64);

impl DateSerial {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<DateSerial> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(DateSerial(days_from_civil(year as i64, month as i64, day as i64) - EPOCH_DAYS))
    }

    pub fn to_ymd(self) -> (i32, u32, u32) {
        civil_from_days(self.0 + EPOCH_DAYS)
    }

    pub fn serial(self) -> i64 {
        self.0
    }

    /// Parses strict `YYYY-MM-DD`.
    pub fn parse_iso(text: &str) -> Option<DateSerial> {
        let b = text.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return None;
        }
        let digits = |r: std::ops::Range<usize>| -> Option<u32> {
            let s = &text[r];
            if s.bytes().all(|c| c.is_ascii_digit()) {
                s.parse().ok()
            } else {
                None
            }
        };
        let year = digits(0..4)? as i32;
        let month = digits(5..7)?;
        let day = digits(8..10)?;
        DateSerial::from_ymd(year, month, day)
    }

    /// Last day of the month `months` calendar months away.
    pub fn end_of_month(self, months: i64) -> Option<DateSerial> {
        let (y, m, _) = self.to_ymd();
        let index = y as i64 * 12 + (m as i64 - 1) + months;
        let year = i32::try_from(index.div_euclid(12)).ok()?;
        let month = (index.rem_euclid(12) + 1) as u32;
        DateSerial::from_ymd(year, month, days_in_month(year, month))
    }
}

impl fmt::Display for DateSerial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = self.to_ymd();
        write!(f, "{y:04}-{m:02}-{d:02}")
    }
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

// Days since 1970-01-01 (Hinnant's algorithm).
const fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    ((if m <= 2 { y + 1 } else { y }) as i32, m, d)
}
