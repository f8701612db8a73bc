//! Generalization: coarsening a value to the representative of its range.
//!
//! Numbers map to the lower bound of their `step`-wide bucket, dates are
//! truncated to the start of their containing unit, and strings keep a
//! visible prefix with the remainder masked.

use std::fmt;
use std::str::FromStr;

use crate::calendar::{civil_from_days, days_from_civil, DAY};
use crate::{ReduceError, ScalarValue, Timestamp};

/// Calendar granularity for date generalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeUnit {
    Second,
    Minute,
    Hour,
    Day,
    Month,
    Year,
}

impl TimeUnit {
    pub const ALL: [TimeUnit; 6] = [
        TimeUnit::Second,
        TimeUnit::Minute,
        TimeUnit::Hour,
        TimeUnit::Day,
        TimeUnit::Month,
        TimeUnit::Year,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Second => "second",
            TimeUnit::Minute => "minute",
            TimeUnit::Hour => "hour",
            TimeUnit::Day => "day",
            TimeUnit::Month => "month",
            TimeUnit::Year => "year",
        }
    }

    /// Fixed length in seconds, for the units that have one.
    fn fixed_seconds(self) -> Option<i64> {
        match self {
            TimeUnit::Second => Some(1),
            TimeUnit::Minute => Some(60),
            TimeUnit::Hour => Some(3_600),
            TimeUnit::Day => Some(86_400),
            TimeUnit::Month | TimeUnit::Year => None,
        }
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeUnit {
    type Err = ReduceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimeUnit::ALL
            .into_iter()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| ReduceError::param(format!("unknown time unit {s:?}")))
    }
}

/// Parameters for generalization; the variant selects the target type.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneralizationParams {
    /// Bucket width for `Int`/`Float` targets.
    Numeric { step: f64 },
    /// Truncation unit for `Date` targets.
    Date { unit: TimeUnit },
    /// Visible prefix length and mask for `Text` targets.
    Text { visible_count: usize, mask_char: char },
}

impl GeneralizationParams {
    pub fn step(step: f64) -> Self {
        GeneralizationParams::Numeric { step }
    }

    pub fn unit(unit: TimeUnit) -> Self {
        GeneralizationParams::Date { unit }
    }

    /// Text masking with the default `*` mask.
    pub fn visible(visible_count: usize) -> Self {
        GeneralizationParams::Text {
            visible_count,
            mask_char: '*',
        }
    }

    pub fn validate(&self) -> Result<(), ReduceError> {
        match *self {
            GeneralizationParams::Numeric { step } if !(step.is_finite() && step > 0.0) => Err(
                ReduceError::param(format!("generalization step must be positive, got {step}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Buckets a number: returns `floor(value / step) * step` in the input's
/// numeric variant.
pub fn generalize_number(
    value: &ScalarValue,
    params: &GeneralizationParams,
) -> Result<ScalarValue, ReduceError> {
    let GeneralizationParams::Numeric { step } = *params else {
        return Err(ReduceError::param("number generalization requires `step`"));
    };
    params.validate()?;
    match *value {
        ScalarValue::Int(v) => {
            if step.fract() != 0.0 || step > i64::MAX as f64 {
                return Err(ReduceError::param(format!(
                    "integer generalization needs an integral step, got {step}"
                )));
            }
            let step = step as i64;
            v.div_euclid(step)
                .checked_mul(step)
                .map(ScalarValue::Int)
                .ok_or_else(|| ReduceError::Range(format!("{v} bucketed by {step} overflows")))
        }
        ScalarValue::Float(v) => {
            if !v.is_finite() {
                return Err(ReduceError::Range(format!("cannot bucket {v}")));
            }
            Ok(ScalarValue::Float(float_bucket(v, step)))
        }
        ref other => Err(ReduceError::Type {
            transform: "number generalization",
            found: other.type_name(),
        }),
    }
}

// `(v / step).floor()` can land one bucket off when the division rounds
// across an integer; correcting against the products keeps `r <= v < r + step`
// exact in floating arithmetic, which also makes the function idempotent.
fn float_bucket(v: f64, step: f64) -> f64 {
    let mut k = (v / step).floor();
    if k * step > v {
        k -= 1.0;
    } else if (k + 1.0) * step <= v {
        k += 1.0;
    }
    k * step
}

/// Keeps the first `visible_count` characters and masks the rest, preserving
/// the length in Unicode scalar values.
pub fn generalize_string(
    value: &ScalarValue,
    params: &GeneralizationParams,
) -> Result<ScalarValue, ReduceError> {
    let GeneralizationParams::Text {
        visible_count,
        mask_char,
    } = *params
    else {
        return Err(ReduceError::param("string generalization requires `visible`"));
    };
    let ScalarValue::Text(ref s) = *value else {
        return Err(ReduceError::Type {
            transform: "string generalization",
            found: value.type_name(),
        });
    };
    let mut masked = String::with_capacity(s.len());
    for (i, c) in s.chars().enumerate() {
        masked.push(if i < visible_count { c } else { mask_char });
    }
    Ok(ScalarValue::Text(masked))
}

/// Truncates a timestamp down to the start of its containing unit.
pub fn generalize_date(
    value: &ScalarValue,
    params: &GeneralizationParams,
) -> Result<ScalarValue, ReduceError> {
    let GeneralizationParams::Date { unit } = *params else {
        return Err(ReduceError::param("date generalization requires `unit`"));
    };
    let ScalarValue::Date(ts) = *value else {
        return Err(ReduceError::Type {
            transform: "date generalization",
            found: value.type_name(),
        });
    };
    Ok(ScalarValue::Date(truncate(ts, unit)))
}

fn truncate(ts: Timestamp, unit: TimeUnit) -> Timestamp {
    let secs = ts.unix();
    let truncated = match unit.fixed_seconds() {
        Some(len) => secs - secs.rem_euclid(len),
        None => {
            let days = secs.div_euclid(DAY);
            let (y, _, d) = civil_from_days(days);
            let first = if unit == TimeUnit::Year {
                days_from_civil(y, 1, 1)
            } else {
                days - (d - 1)
            };
            first * DAY
        }
    };
    // Truncation never leaves the valid range: it only moves backwards and
    // 1970-01-01 is a year, month and day boundary.
    Timestamp::from_unix(truncated).expect("truncated timestamp in range")
}

/// Dispatches on the value's type. `Null` passes through unchanged.
pub fn generalize(value: &ScalarValue, params: &GeneralizationParams) -> Result<ScalarValue, ReduceError> {
    match value {
        ScalarValue::Null => Ok(ScalarValue::Null),
        ScalarValue::Int(_) | ScalarValue::Float(_) => generalize_number(value, params),
        ScalarValue::Text(_) => generalize_string(value, params),
        ScalarValue::Date(_) => generalize_date(value, params),
        ScalarValue::Bool(_) => Err(ReduceError::Type {
            transform: "generalization",
            found: value.type_name(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> ScalarValue {
        ScalarValue::Date(s.parse().unwrap())
    }

    #[test]
    fn number_buckets() {
        let p = GeneralizationParams::step(10.0);
        assert_eq!(generalize_number(&17.into(), &p).unwrap(), ScalarValue::Int(10));
        assert_eq!(generalize_number(&0.into(), &p).unwrap(), ScalarValue::Int(0));
        assert_eq!(
            generalize_number(&(-5).into(), &p).unwrap(),
            ScalarValue::Int(-10)
        );
        assert_eq!(
            generalize_number(&7.into(), &GeneralizationParams::step(1.0)).unwrap(),
            ScalarValue::Int(7)
        );
        assert_eq!(
            generalize_number(&7.3.into(), &p).unwrap(),
            ScalarValue::Float(0.0)
        );
        assert_eq!(
            generalize_number(&27.5.into(), &p).unwrap(),
            ScalarValue::Float(20.0)
        );
    }

    #[test]
    fn negative_bucket_brute_force() {
        // -10 is the unique multiple of 10 with r <= -5 < r + 10.
        let candidates: Vec<i64> = (-100..=100)
            .filter(|r| r % 10 == 0 && *r <= -5 && -5 < r + 10)
            .collect();
        assert_eq!(candidates, vec![-10]);
    }

    #[test]
    fn step_must_be_positive() {
        for step in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = generalize_number(&1.into(), &GeneralizationParams::step(step)).unwrap_err();
            assert!(matches!(err, ReduceError::Param(_)), "{step}: {err}");
        }
    }

    #[test]
    fn integer_target_rejects_fractional_step() {
        let err = generalize_number(&5.into(), &GeneralizationParams::step(2.5)).unwrap_err();
        assert!(matches!(err, ReduceError::Param(_)));
        assert_eq!(
            generalize_number(&5.0.into(), &GeneralizationParams::step(2.5)).unwrap(),
            ScalarValue::Float(5.0)
        );
    }

    #[test]
    fn integer_overflow_is_range_error() {
        let err = generalize_number(&i64::MIN.into(), &GeneralizationParams::step(10.0)).unwrap_err();
        assert!(matches!(err, ReduceError::Range(_)));
    }

    #[test]
    fn string_masking() {
        let g = |s: &str, n| generalize_string(&s.into(), &GeneralizationParams::visible(n)).unwrap();
        assert_eq!(g("Johanna", 2), ScalarValue::from("Jo*****"));
        assert_eq!(g("", 3), ScalarValue::from(""));
        assert_eq!(g("ab", 5), ScalarValue::from("ab"));
        assert_eq!(g("Zoë", 1), ScalarValue::from("Z**"));
        let custom = GeneralizationParams::Text {
            visible_count: 1,
            mask_char: '#',
        };
        assert_eq!(
            generalize_string(&"abc".into(), &custom).unwrap(),
            ScalarValue::from("a##")
        );
    }

    #[test]
    fn date_truncation() {
        let g = |s: &str, unit| generalize_date(&ts(s), &GeneralizationParams::unit(unit)).unwrap();
        assert_eq!(
            g("2022-03-18T14:33:12Z", TimeUnit::Month),
            ts("2022-03-01T00:00:00Z")
        );
        assert_eq!(
            g("2022-03-18T14:33:12Z", TimeUnit::Second),
            ts("2022-03-18T14:33:12Z")
        );
        assert_eq!(
            g("2022-12-31T23:59:59Z", TimeUnit::Year),
            ts("2022-01-01T00:00:00Z")
        );
        assert_eq!(
            g("2022-03-18T14:33:12Z", TimeUnit::Minute),
            ts("2022-03-18T14:33:00Z")
        );
        assert_eq!(
            g("2022-03-18T14:33:12Z", TimeUnit::Hour),
            ts("2022-03-18T14:00:00Z")
        );
        assert_eq!(
            g("2022-03-18T14:33:12Z", TimeUnit::Day),
            ts("2022-03-18T00:00:00Z")
        );
        assert_eq!(
            g("1970-01-01T00:00:00Z", TimeUnit::Year),
            ts("1970-01-01T00:00:00Z")
        );
    }

    #[test]
    fn params_must_match_type() {
        let err = generalize(&"x".into(), &GeneralizationParams::step(10.0)).unwrap_err();
        assert!(matches!(err, ReduceError::Param(_)));
        let err = generalize(&ScalarValue::Bool(true), &GeneralizationParams::step(1.0)).unwrap_err();
        assert!(matches!(err, ReduceError::Type { .. }));
        assert_eq!(
            generalize(&ScalarValue::Null, &GeneralizationParams::step(1.0)).unwrap(),
            ScalarValue::Null
        );
    }

    #[test]
    fn unit_names_round_trip() {
        for u in TimeUnit::ALL {
            assert_eq!(u.as_str().parse::<TimeUnit>().unwrap(), u);
        }
        assert!("fortnight".parse::<TimeUnit>().is_err());
    }
}
