//! Additive noise drawn from a configured probability distribution.
//!
//! Distributions are looked up by name in a [`DistributionRegistry`]; the
//! built-in set is `laplace`, `normal` and `uniform`. Additional
//! distributions can be registered without touching the transforms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand_distr::Distribution as _;

use crate::{RandomSource, ReduceError, ScalarValue, Timestamp};

/// Named numeric parameters of a distribution, e.g. `{scale: 2.0}`.
pub type ParamMap = BTreeMap<String, f64>;

/// A real-valued distribution that noise samples are drawn from.
pub trait NoiseDistribution: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    /// The validated parameters, in a stable order.
    fn params(&self) -> Vec<(&'static str, f64)>;
    fn sample(&self, rng: &mut RandomSource) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
}

impl PartialEq for dyn NoiseDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name() && self.params() == other.params()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    pub location: f64,
    pub scale: f64,
}

impl Laplace {
    pub fn new(location: f64, scale: f64) -> Result<Self, ReduceError> {
        finite("location", location)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ReduceError::param(format!(
                "laplace scale must be > 0, got {scale}"
            )));
        }
        Ok(Laplace { location, scale })
    }
}

impl NoiseDistribution for Laplace {
    fn name(&self) -> &str {
        "laplace"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("location", self.location), ("scale", self.scale)]
    }

    // Inverse CDF on u in (-1/2, 1/2).
    fn sample(&self, rng: &mut RandomSource) -> f64 {
        let u = loop {
            let u = rng.next_unit();
            if u > 0.0 {
                break u - 0.5;
            }
        };
        self.location - self.scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    fn mean(&self) -> f64 {
        self.location
    }

    fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub std_dev: f64,
    inner: rand_distr::Normal<f64>,
}

impl Normal {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self, ReduceError> {
        finite("mean", mean)?;
        if !(std_dev.is_finite() && std_dev >= 0.0) {
            return Err(ReduceError::param(format!(
                "normal std_dev must be >= 0, got {std_dev}"
            )));
        }
        let inner =
            rand_distr::Normal::new(mean, std_dev).map_err(|e| ReduceError::param(format!("normal: {e}")))?;
        Ok(Normal { mean, std_dev, inner })
    }
}

impl NoiseDistribution for Normal {
    fn name(&self) -> &str {
        "normal"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("mean", self.mean), ("std_dev", self.std_dev)]
    }

    fn sample(&self, rng: &mut RandomSource) -> f64 {
        self.inner.sample(rng)
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub low: f64,
    pub high: f64,
}

impl Uniform {
    pub fn new(low: f64, high: f64) -> Result<Self, ReduceError> {
        finite("low", low)?;
        finite("high", high)?;
        if low > high {
            return Err(ReduceError::param(format!(
                "uniform needs low <= high, got {low} > {high}"
            )));
        }
        Ok(Uniform { low, high })
    }
}

impl NoiseDistribution for Uniform {
    fn name(&self) -> &str {
        "uniform"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("low", self.low), ("high", self.high)]
    }

    fn sample(&self, rng: &mut RandomSource) -> f64 {
        let u = rng.next_unit();
        if self.low == self.high {
            self.low
        } else {
            self.low + (self.high - self.low) * u
        }
    }

    fn mean(&self) -> f64 {
        (self.low + self.high) / 2.0
    }

    fn variance(&self) -> f64 {
        let w = self.high - self.low;
        w * w / 12.0
    }
}

fn finite(name: &str, v: f64) -> Result<(), ReduceError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ReduceError::param(format!("{name} must be finite, got {v}")))
    }
}

fn require(params: &ParamMap, dist: &str, key: &str) -> Result<f64, ReduceError> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| ReduceError::param(format!("{dist} requires `{key}`")))
}

fn reject_unknown(params: &ParamMap, dist: &str, known: &[&str]) -> Result<(), ReduceError> {
    match params.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(ReduceError::param(format!("{dist} has no parameter `{k}`"))),
        None => Ok(()),
    }
}

/// Builds a distribution from its named parameters.
pub type DistributionCtor = fn(&ParamMap) -> Result<Arc<dyn NoiseDistribution>, ReduceError>;

fn build_laplace(p: &ParamMap) -> Result<Arc<dyn NoiseDistribution>, ReduceError> {
    reject_unknown(p, "laplace", &["location", "scale"])?;
    let location = p.get("location").copied().unwrap_or(0.0);
    Ok(Arc::new(Laplace::new(location, require(p, "laplace", "scale")?)?))
}

fn build_normal(p: &ParamMap) -> Result<Arc<dyn NoiseDistribution>, ReduceError> {
    reject_unknown(p, "normal", &["mean", "std_dev"])?;
    let mean = p.get("mean").copied().unwrap_or(0.0);
    Ok(Arc::new(Normal::new(mean, require(p, "normal", "std_dev")?)?))
}

fn build_uniform(p: &ParamMap) -> Result<Arc<dyn NoiseDistribution>, ReduceError> {
    reject_unknown(p, "uniform", &["low", "high"])?;
    Ok(Arc::new(Uniform::new(
        require(p, "uniform", "low")?,
        require(p, "uniform", "high")?,
    )?))
}

/// Name → constructor table for noise distributions.
#[derive(Debug, Clone)]
pub struct DistributionRegistry {
    ctors: BTreeMap<String, DistributionCtor>,
}

impl Default for DistributionRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl DistributionRegistry {
    pub fn empty() -> Self {
        DistributionRegistry {
            ctors: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("laplace", build_laplace);
        r.register("normal", build_normal);
        r.register("uniform", build_uniform);
        r
    }

    pub fn register(&mut self, name: impl Into<String>, ctor: DistributionCtor) {
        self.ctors.insert(name.into(), ctor);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ctors.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &ParamMap) -> Result<Arc<dyn NoiseDistribution>, ReduceError> {
        let ctor = self
            .ctors
            .get(name)
            .ok_or_else(|| ReduceError::param(format!("unknown distribution {name:?}")))?;
        ctor(params)
    }
}

/// Scale applied to samples before they are added to a date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseUnit {
    #[default]
    Second,
    Minute,
    Hour,
    Day,
}

impl NoiseUnit {
    pub fn seconds(self) -> f64 {
        match self {
            NoiseUnit::Second => 1.0,
            NoiseUnit::Minute => 60.0,
            NoiseUnit::Hour => 3_600.0,
            NoiseUnit::Day => 86_400.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseUnit::Second => "second",
            NoiseUnit::Minute => "minute",
            NoiseUnit::Hour => "hour",
            NoiseUnit::Day => "day",
        }
    }
}

impl FromStr for NoiseUnit {
    type Err = ReduceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "second" => Ok(NoiseUnit::Second),
            "minute" => Ok(NoiseUnit::Minute),
            "hour" => Ok(NoiseUnit::Hour),
            "day" => Ok(NoiseUnit::Day),
            _ => Err(ReduceError::param(format!("unknown noise unit {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoiseParams {
    pub distribution: Arc<dyn NoiseDistribution>,
    pub date_unit: NoiseUnit,
}

impl NoiseParams {
    pub fn new(distribution: impl NoiseDistribution + 'static) -> Self {
        NoiseParams {
            distribution: Arc::new(distribution),
            date_unit: NoiseUnit::Second,
        }
    }

    pub fn with_date_unit(mut self, unit: NoiseUnit) -> Self {
        self.date_unit = unit;
        self
    }
}

impl PartialEq for NoiseParams {
    fn eq(&self, other: &Self) -> bool {
        *self.distribution == *other.distribution && self.date_unit == other.date_unit
    }
}

/// Adds one sample to a number. `Int` results are rounded half away from zero.
pub fn noise_number(
    value: &ScalarValue,
    params: &NoiseParams,
    rng: &mut RandomSource,
) -> Result<ScalarValue, ReduceError> {
    match *value {
        ScalarValue::Int(v) => {
            let noised = (v as f64 + params.distribution.sample(rng)).round();
            // i64::MAX as f64 rounds up to 2^63, which is itself out of range.
            if noised.is_finite() && noised >= i64::MIN as f64 && noised < i64::MAX as f64 {
                Ok(ScalarValue::Int(noised as i64))
            } else {
                Err(ReduceError::Range(format!(
                    "noised integer {noised} out of range"
                )))
            }
        }
        ScalarValue::Float(v) => Ok(ScalarValue::Float(v + params.distribution.sample(rng))),
        ref other => Err(ReduceError::Type {
            transform: "number noise",
            found: other.type_name(),
        }),
    }
}

/// Shifts a date by one sample, scaled by `date_unit` and rounded to the second.
pub fn noise_date(
    value: &ScalarValue,
    params: &NoiseParams,
    rng: &mut RandomSource,
) -> Result<ScalarValue, ReduceError> {
    let ScalarValue::Date(ts) = *value else {
        return Err(ReduceError::Type {
            transform: "date noise",
            found: value.type_name(),
        });
    };
    let offset = (params.distribution.sample(rng) * params.date_unit.seconds()).round();
    if !offset.is_finite() || offset.abs() > 1e15 {
        return Err(ReduceError::Range(format!("date offset {offset}s out of range")));
    }
    Timestamp::from_unix(ts.unix() + offset as i64).map(ScalarValue::Date)
}

/// Dispatches on the value's type. `Null` passes through and consumes no randomness.
pub fn noise(
    value: &ScalarValue,
    params: &NoiseParams,
    rng: &mut RandomSource,
) -> Result<ScalarValue, ReduceError> {
    match value {
        ScalarValue::Null => Ok(ScalarValue::Null),
        ScalarValue::Int(_) | ScalarValue::Float(_) => noise_number(value, params, rng),
        ScalarValue::Date(_) => noise_date(value, params, rng),
        other => Err(ReduceError::Type {
            transform: "noise",
            found: other.type_name(),
        }),
    }
}
