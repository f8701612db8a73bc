use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};

use crate::calendar::{civil_from_days, DAY};
use crate::ReduceError;

/// 1970-01-01T00:00:00Z
pub const MIN_TIMESTAMP: i64 = 0;
/// 9999-12-31T23:59:59Z
pub const MAX_TIMESTAMP: i64 = 253_402_300_799;

/// A UTC instant with whole-second precision, bounded to years 1970..=9999.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_unix(secs: i64) -> Result<Self, ReduceError> {
        if (MIN_TIMESTAMP..=MAX_TIMESTAMP).contains(&secs) {
            Ok(Timestamp(secs))
        } else {
            Err(ReduceError::Range(format!(
                "timestamp {secs} outside 1970-01-01T00:00:00Z..=9999-12-31T23:59:59Z"
            )))
        }
    }

    pub fn unix(self) -> i64 {
        self.0
    }

    pub fn to_datetime(self) -> DateTime<Utc> {
        // In range by construction.
        DateTime::from_timestamp(self.0, 0).expect("bounded timestamp")
    }

    pub fn from_datetime(dt: DateTime<Utc>) -> Result<Self, ReduceError> {
        Self::from_unix(dt.timestamp())
    }

    /// RFC 3339 with a `Z` suffix, e.g. `2022-03-18T14:33:12Z`.
    pub fn to_rfc3339(self) -> String {
        let (y, mo, d) = civil_from_days(self.0.div_euclid(DAY));
        let s = self.0.rem_euclid(DAY);
        let mut out = *b"0000-00-00T00:00:00Z";
        for (at, value, width) in [
            (0, y, 4),
            (5, mo, 2),
            (8, d, 2),
            (11, s / 3600, 2),
            (14, s / 60 % 60, 2),
            (17, s % 60, 2),
        ] {
            let mut v = value;
            for i in (at..at + width).rev() {
                out[i] = b'0' + (v % 10) as u8;
                v /= 10;
            }
        }
        String::from_utf8(out.to_vec()).expect("ascii")
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rfc3339())
    }
}

impl FromStr for Timestamp {
    type Err = ReduceError;

    /// Accepts any RFC 3339 timestamp; offsets are normalized to UTC and
    /// sub-second digits are truncated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dt = DateTime::parse_from_rfc3339(s)
            .map_err(|e| ReduceError::param(format!("bad timestamp {s:?}: {e}")))?;
        Self::from_unix(dt.timestamp())
    }
}

/// A scalar flowing through the reduction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Date(Timestamp),
}

impl ScalarValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            ScalarValue::Null => "null",
            ScalarValue::Bool(_) => "boolean",
            ScalarValue::Int(_) => "int",
            ScalarValue::Float(_) => "float",
            ScalarValue::Text(_) => "text",
            ScalarValue::Date(_) => "date",
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, ScalarValue::Null)
    }
}

impl From<i64> for ScalarValue {
    fn from(v: i64) -> Self {
        ScalarValue::Int(v)
    }
}

impl From<f64> for ScalarValue {
    fn from(v: f64) -> Self {
        ScalarValue::Float(v)
    }
}

impl From<&str> for ScalarValue {
    fn from(v: &str) -> Self {
        ScalarValue::Text(v.to_owned())
    }
}

impl From<String> for ScalarValue {
    fn from(v: String) -> Self {
        ScalarValue::Text(v)
    }
}

impl From<Timestamp> for ScalarValue {
    fn from(v: Timestamp) -> Self {
        ScalarValue::Date(v)
    }
}
