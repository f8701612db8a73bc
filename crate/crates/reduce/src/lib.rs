//! Information-reduction transforms over scalar values.
//!
//! Every transform is a pure function of its inputs (noise additionally takes
//! a caller-owned [`RandomSource`]). The crate knows nothing about schemas,
//! roles or HTTP; it is the value layer the gateway drives.
//!
//! ```
//! use datamin_reduce::{generalize_number, GeneralizationParams, ScalarValue};
//!
//! let bucket = generalize_number(&ScalarValue::Int(17), &GeneralizationParams::step(10.0)).unwrap();
//! assert_eq!(bucket, ScalarValue::Int(10));
//! ```

mod calendar;
mod error;
mod generalize;
mod hash;
mod noise;
mod random;
mod value;

pub use error::ReduceError;
pub use generalize::{
    generalize, generalize_date, generalize_number, generalize_string, GeneralizationParams, TimeUnit,
};
pub use hash::{hash_value, HashBits, HashParams};
pub use noise::{
    noise, noise_date, noise_number, DistributionCtor, DistributionRegistry, Laplace, NoiseDistribution,
    NoiseParams, NoiseUnit, Normal, ParamMap, Uniform,
};
pub use random::RandomSource;
pub use value::{ScalarValue, Timestamp, MAX_TIMESTAMP, MIN_TIMESTAMP};

/// Replaces any value with `Null`.
#[inline]
pub fn suppress(_value: &ScalarValue) -> ScalarValue {
    ScalarValue::Null
}
