//! Scalar abstraction shared by every module.

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// `x` if it is representable above machine resolution, else a few ulps.
    #[inline]
    fn tol_or_eps(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(8.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
}

/// Pairwise (cascade) summation of `term(0) + ... + term(n-1)`.
///
/// The reduction tree depends only on `n`, so results are bit-stable.
pub fn pairwise_sum_by<T: Scalar>(n: usize, term: &impl Fn(usize) -> T) -> T {
    fn rec<T: Scalar>(lo: usize, hi: usize, term: &impl Fn(usize) -> T) -> T {
        const BLOCK: usize = 16;
        if hi - lo <= BLOCK {
            let mut acc = T::zero();
            for i in lo..hi {
                acc = acc + term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, term)
}

/// Pairwise sum of a slice.
pub fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    pairwise_sum_by(xs.len(), &|i| xs[i])
}
