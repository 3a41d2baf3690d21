use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real scalar backing every complex amplitude in the crate.
pub trait Real: RealField + Copy + ToPrimitive {
    /// Tolerance used when a unit-norm invariant is checked on construction.
    fn unit_tolerance() -> Self {
        let floor: Self = lit(1e-12);
        let eps = Self::default_epsilon() * lit(100.0);
        if eps > floor {
            eps
        } else {
            floor
        }
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T: RealField + Copy + ToPrimitive> Real for T {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}
