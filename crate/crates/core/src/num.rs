//! Scalar abstraction and decibel helpers.
//!
//! The radio math in this crate (geometry, antenna patterns, propagation,
//! link budgets and consumption factors) is written against [`Real`] so it
//! can run in `f32` or `f64`. The Monte Carlo engine itself is `f64` only.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable by the radio math: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        // from_f64 only fails for types that cannot hold any float
        Self::from_f64(x).expect("Real::lit: value not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise power spectral density at 290 K, rounded the usual way.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

#[inline]
pub fn linear_to_db<T: Real>(lin: T) -> T {
    T::lit(10.0) * lin.log10()
}

/// Power sum of dB quantities, returned in dB. Empty input yields `None`.
pub fn power_sum_db<T: Real>(terms: impl IntoIterator<Item = T>) -> Option<T> {
    let mut acc: Option<T> = None;
    for t in terms {
        let lin = db_to_linear(t);
        acc = Some(acc.map_or(lin, |a| a + lin));
    }
    acc.map(linear_to_db)
}

/// Wraps an angle in degrees into `[-180, 180)`.
pub fn wrap_degrees<T: Real>(deg: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut a = (deg + half) % full;
    if a < T::zero() {
        a = a + full;
    }
    a - half
}
