//! Civil-calendar conversions and the date formats recognised at load time.

use alloc::format;
use alloc::string::String;

/// Days since 1970-01-01 for a proleptic Gregorian date.
pub fn days_from_civil(year: i32, month: u32, day: u32) -> i32 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let m = month as i32;
    let mp = if m > 2 { m - 3 } else { m + 9 };
    let doy = (153 * mp + 2) / 5 + day as i32 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Inverse of [`days_from_civil`]: `(year, month, day)`.
pub fn civil_from_days(days: i32) -> (i32, u32, u32) {
    let z = days + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// ISO weekday, 1 = Monday .. 7 = Sunday.
pub fn weekday(days: i32) -> u32 {
    ((days + 3).rem_euclid(7) + 1) as u32
}

pub fn format_iso(days: i32) -> String {
    let (y, m, d) = civil_from_days(days);
    format!("{y:04}-{m:02}-{d:02}")
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateFormat {
    /// `YYYY-MM-DD`, optionally followed by `T` or a space and a time of day
    /// (the time is discarded).
    Iso,
    /// `YYYY/MM/DD`
    YearSlash,
    /// `DD-MM-YYYY`
    DayFirst,
}

fn digits(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn validated(year: u32, month: u32, day: u32) -> Option<i32> {
    let year = year as i32;
    if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
        return None;
    }
    Some(days_from_civil(year, month, day))
}

fn parse_time_suffix(rest: &str) -> bool {
    if rest.is_empty() {
        return true;
    }
    let mut chars = rest.chars();
    match chars.next() {
        Some('T') | Some(' ') => {}
        _ => return false,
    }
    let t = chars.as_str();
    let b = t.as_bytes();
    b.len() >= 5
        && b[0..2].iter().all(u8::is_ascii_digit)
        && b[2] == b':'
        && b[3..5].iter().all(u8::is_ascii_digit)
        && t[5..].bytes().all(|c| c.is_ascii_digit() || c == b':' || c == b'.')
}

impl DateFormat {
    pub const ALL: [DateFormat; 3] = [DateFormat::Iso, DateFormat::YearSlash, DateFormat::DayFirst];

    /// Days since epoch, or `None` when `s` is not in this format.
    pub fn parse(self, s: &str) -> Option<i32> {
        match self {
            DateFormat::Iso => {
                if s.len() < 10 || !s.is_char_boundary(10) {
                    return None;
                }
                let (date, rest) = s.split_at(10);
                if !parse_time_suffix(rest) {
                    return None;
                }
                let b = date.as_bytes();
                if b[4] != b'-' || b[7] != b'-' {
                    return None;
                }
                validated(digits(&date[0..4])?, digits(&date[5..7])?, digits(&date[8..10])?)
            }
            DateFormat::YearSlash => {
                let b = s.as_bytes();
                if s.len() != 10 || b[4] != b'/' || b[7] != b'/' {
                    return None;
                }
                validated(digits(&s[0..4])?, digits(&s[5..7])?, digits(&s[8..10])?)
            }
            DateFormat::DayFirst => {
                let b = s.as_bytes();
                if s.len() != 10 || b[2] != b'-' || b[5] != b'-' {
                    return None;
                }
                validated(digits(&s[6..10])?, digits(&s[3..5])?, digits(&s[0..2])?)
            }
        }
    }
}
