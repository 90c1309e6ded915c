//! Datetime and duration conversions. Datetimes are stored as UTC epoch
//! seconds and durations as seconds, both as `f64`.

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3600.0;
pub const DAY: f64 = 86_400.0;
pub const WEEK: f64 = 7.0 * DAY;
/// Calendar months in duration literals are normalized to 30 days.
pub const MONTH: f64 = 30.0 * DAY;
pub const YEAR: f64 = 365.0 * DAY;

const DATETIME_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

/// Parses an ISO-8601 date or datetime into epoch seconds.
pub fn parse_datetime(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(epoch_seconds(&dt.naive_utc()));
    }
    for fmt in DATETIME_FORMATS {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, fmt) {
            return Some(epoch_seconds(&dt));
        }
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| epoch_seconds(&dt))
}

/// Parses with an explicit chrono format string; date-only formats are accepted.
pub fn parse_datetime_with(text: &str, format: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(dt) = NaiveDateTime::parse_from_str(text, format) {
        return Some(epoch_seconds(&dt));
    }
    NaiveDate::parse_from_str(text, format)
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| epoch_seconds(&dt))
}

fn epoch_seconds(dt: &NaiveDateTime) -> f64 {
    let utc = dt.and_utc();
    utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
}

pub fn to_naive(seconds: f64) -> Option<NaiveDateTime> {
    let whole = seconds.floor();
    let nanos = ((seconds - whole) * 1e9).round().clamp(0.0, 999_999_999.0) as u32;
    DateTime::from_timestamp(whole as i64, nanos).map(|d| d.naive_utc())
}

pub fn format_datetime(seconds: f64) -> String {
    match to_naive(seconds) {
        Some(dt) if dt.time() == chrono::NaiveTime::MIN => dt.format("%Y-%m-%d").to_string(),
        Some(dt) if dt.nanosecond() == 0 => dt.format("%Y-%m-%dT%H:%M:%S").to_string(),
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.f").to_string(),
        None => format!("{seconds}s"),
    }
}

/// Parses `"<n> <unit>"` literals (`6 months`, `1 year`, `90 seconds`) and
/// ISO-8601 durations (`P1Y2M3DT4H5M6S`) into seconds.
pub fn parse_duration(text: &str) -> Option<f64> {
    let text = text.trim();
    if text.starts_with('P') || text.starts_with('p') {
        return parse_iso_duration(&text[1..]);
    }
    let mut parts = text.split_whitespace();
    let amount: f64 = parts.next()?.parse().ok()?;
    let unit = unit_seconds(parts.next()?)?;
    if parts.next().is_some() || !amount.is_finite() {
        return None;
    }
    Some(amount * unit)
}

fn unit_seconds(unit: &str) -> Option<f64> {
    let unit = unit.to_ascii_lowercase();
    let unit = unit.strip_suffix('s').unwrap_or(&unit);
    Some(match unit {
        "second" | "sec" => 1.0,
        "minute" | "min" => MINUTE,
        "hour" | "hr" => HOUR,
        "day" => DAY,
        "week" => WEEK,
        "month" => MONTH,
        "year" | "yr" => YEAR,
        _ => return None,
    })
}

fn parse_iso_duration(body: &str) -> Option<f64> {
    if body.is_empty() {
        return None;
    }
    let mut total = 0.0;
    let mut in_time = false;
    let mut number = String::new();
    let mut saw_component = false;
    for ch in body.chars() {
        match ch {
            'T' | 't' => {
                if in_time || !number.is_empty() {
                    return None;
                }
                in_time = true;
            }
            '0'..='9' | '.' => number.push(ch),
            _ => {
                let value: f64 = number.parse().ok()?;
                number.clear();
                let unit = match (in_time, ch.to_ascii_uppercase()) {
                    (false, 'Y') => YEAR,
                    (false, 'M') => MONTH,
                    (false, 'W') => WEEK,
                    (false, 'D') => DAY,
                    (true, 'H') => HOUR,
                    (true, 'M') => MINUTE,
                    (true, 'S') => 1.0,
                    _ => return None,
                };
                total += value * unit;
                saw_component = true;
            }
        }
    }
    (number.is_empty() && saw_component).then_some(total)
}

/// Renders seconds with the largest unit that divides it exactly, so
/// `15552000` becomes `"6 months"` and `31536000` becomes `"1 year"`.
pub fn format_duration(seconds: f64) -> String {
    const UNITS: &[(f64, &str)] = &[
        (YEAR, "year"),
        (MONTH, "month"),
        (WEEK, "week"),
        (DAY, "day"),
        (HOUR, "hour"),
        (MINUTE, "minute"),
    ];
    if seconds != 0.0 && seconds.fract() == 0.0 {
        for &(unit, name) in UNITS {
            let n = seconds / unit;
            if n.fract() == 0.0 {
                return plural(n, name);
            }
        }
    }
    plural(seconds, "second")
}

fn plural(n: f64, unit: &str) -> String {
    if n == 1.0 {
        format!("1 {unit}")
    } else {
        format!("{n} {unit}s")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Year,
    Quarter,
    Month,
    Week,
    Day,
    Weekday,
    Hour,
    Minute,
    Second,
}

impl TimeUnit {
    pub const ALL: [TimeUnit; 9] = [
        TimeUnit::Year,
        TimeUnit::Quarter,
        TimeUnit::Month,
        TimeUnit::Week,
        TimeUnit::Day,
        TimeUnit::Weekday,
        TimeUnit::Hour,
        TimeUnit::Minute,
        TimeUnit::Second,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Year => "year",
            TimeUnit::Quarter => "quarter",
            TimeUnit::Month => "month",
            TimeUnit::Week => "week",
            TimeUnit::Day => "day",
            TimeUnit::Weekday => "weekday",
            TimeUnit::Hour => "hour",
            TimeUnit::Minute => "minute",
            TimeUnit::Second => "seconds",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|u| u.as_str() == text)
    }

    /// Extracts the attribute from epoch seconds.
    pub fn extract(self, seconds: f64) -> Option<u32> {
        let dt = to_naive(seconds)?;
        Some(match self {
            TimeUnit::Year => dt.year() as u32,
            TimeUnit::Quarter => (dt.month() - 1) / 3 + 1,
            TimeUnit::Month => dt.month(),
            TimeUnit::Week => dt.iso_week().week(),
            TimeUnit::Day => dt.day(),
            TimeUnit::Weekday => dt.weekday().number_from_monday(),
            TimeUnit::Hour => dt.hour(),
            TimeUnit::Minute => dt.minute(),
            TimeUnit::Second => dt.second(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_durations_use_thirty_day_months() {
        assert_eq!(parse_duration("6 months"), Some(180.0 * DAY));
        assert_eq!(parse_duration("1 year"), Some(365.0 * DAY));
        assert_eq!(parse_duration("3 Months"), Some(90.0 * DAY));
        assert_eq!(parse_duration("P1Y2M"), Some(YEAR + 2.0 * MONTH));
        assert_eq!(parse_duration("PT1H30M"), Some(5400.0));
        assert_eq!(parse_duration("six months"), None);
        assert_eq!(parse_duration("P"), None);
        assert_eq!(parse_duration("12"), None);
    }

    #[test]
    fn duration_rendering_picks_exact_unit() {
        assert_eq!(format_duration(180.0 * DAY), "6 months");
        assert_eq!(format_duration(YEAR), "1 year");
        assert_eq!(format_duration(90.0 * DAY), "3 months");
        assert_eq!(format_duration(2.5), "2.5 seconds");
        assert_eq!(format_duration(0.0), "0 seconds");
    }

    #[test]
    fn datetime_round_trip() {
        let t = parse_datetime("2020-09-01").unwrap();
        assert_eq!(format_datetime(t), "2020-09-01");
        assert_eq!(TimeUnit::Month.extract(t), Some(9));
        let t = parse_datetime("2021-01-10T13:45:07").unwrap();
        assert_eq!(format_datetime(t), "2021-01-10T13:45:07");
        assert_eq!(TimeUnit::Quarter.extract(t), Some(1));
        assert_eq!(TimeUnit::Second.extract(t), Some(7));
        assert!(parse_datetime("2021-13-10").is_none());
        assert_eq!(parse_datetime_with("01/02/2020", "%d/%m/%Y"), parse_datetime("2020-02-01"));
    }
}
