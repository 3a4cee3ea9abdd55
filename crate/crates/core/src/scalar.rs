//! Scalar abstraction shared by the state algebra, the element library and
//! the circuit engine.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field the simulator is parameterised over (`f32` or `f64`).
///
/// Every tolerance quoted in the crate documentation assumes `f64`; the
/// `f32` instantiation is useful for quick exploratory runs only.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Amplitudes whose magnitude falls below this are dropped from sparse maps.
    fn prune_threshold() -> Self {
        Self::from_f64(1e-15).unwrap()
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Amplitude<T> = Complex<T>;

pub(crate) fn cis<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// `|z|` below the prune threshold.
pub(crate) fn negligible<T: Real>(z: &Complex<T>) -> bool {
    z.norm() < T::prune_threshold()
}
