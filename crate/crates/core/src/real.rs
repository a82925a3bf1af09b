//! Scalar abstraction: the whole pricing stack is generic over `f32`/`f64`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar the library is generic over.
///
/// Combines the linear-algebra requirements of `nalgebra` with numeric
/// casts and a standard-normal sampling hook.
pub trait Real:
    nalgebra::RealField
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Copy
    + Default
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Draws one standard normal variate.
    fn std_normal<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Machine epsilon of the concrete type.
    fn machine_epsilon() -> Self;

    /// Converts an `f64` literal; panics on values outside the type's range.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Converts a count; panics only on absurd sizes for `f32`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }
}

impl Real for f32 {
    #[inline]
    fn std_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn machine_epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    #[inline]
    fn std_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn machine_epsilon() -> Self {
        f64::EPSILON
    }
}
