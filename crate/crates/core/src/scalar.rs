//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All operators, forms and maps are generic over [`Real`], which bundles the
//! dense linear algebra bound of `nalgebra` with the FFT bound of `rustfft`.
//! Both `f32` and `f64` implement it; the identity checks are only meaningful
//! at `f64` precision.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use rustfft::FftNum;

/// Floating point scalar usable by the discretization, the FFT and the
/// dense factorizations.
pub trait Real: RealField + FftNum + Copy + Display + Debug + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal or configuration value.
    fn of(x: f64) -> Self;

    /// Conversion back to `f64` for reporting and serialization.
    fn as_f64(self) -> f64;

    /// Machine epsilon of the type.
    fn eps() -> Self;

    /// Converts a count or index.
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }

    #[inline]
    fn eps() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn eps() -> Self {
        f32::EPSILON
    }
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<T: Real>(a: T, b: T, floor: T) -> T {
    let scale = a.abs().max(b.abs()).max(floor);
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_f64() {
        assert_eq!(<f64 as Real>::of(0.25).as_f64(), 0.25);
        assert_eq!(<f64 as Real>::of_usize(17), 17.0);
    }

    #[test]
    fn f32_is_lossy_but_close() {
        let x = <f32 as Real>::of(0.1);
        assert!((x.as_f64() - 0.1).abs() < 1e-7);
    }

    #[test]
    fn rel_diff_uses_floor_for_zeros() {
        assert_eq!(rel_diff(0.0_f64, 0.0, 1e-300), 0.0);
        assert!((rel_diff(1.0_f64, 1.1, 1e-300) - 0.1 / 1.1).abs() < 1e-15);
    }
}
