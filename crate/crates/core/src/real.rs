//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `Real` can represent (a rounding of) any `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// `x - log(1 + x)`, accurate for small `x`.
pub fn excess_over_log1p<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.1) {
        // alternating series x^2/2 - x^3/3 + ...
        let mut term = x * x;
        let mut sum = T::zero();
        let mut sign = T::one();
        for k in 2..40 {
            let add = sign * term / T::from_usize_lossy(k);
            sum += add;
            if add.abs() <= T::epsilon() * sum.abs() {
                break;
            }
            term *= x;
            sign = -sign;
        }
        sum
    } else {
        x - x.ln_1p()
    }
}

/// `sin(x/2) / (x/2)` with the removable singularity at zero.
pub fn sinc<T: Real>(x: T) -> T {
    let half = x / T::lit(2.0);
    if x.abs() < T::lit(1e-4) {
        let h2 = half * half;
        T::one() - h2 / T::lit(6.0) + h2 * h2 / T::lit(120.0)
    } else {
        half.sin() / half
    }
}
