//! Scalar traits the numeric core is generic over.
//!
//! [`Scalar`] is the minimum needed for structural matrix algebra (products,
//! Kronecker products, partial traces) and is implemented for exact rationals
//! as well as floats. [`Real`] adds what the decompositions and entanglement
//! measures need.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_rational::Rational64;
use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Ring-like element type of a [`ComplexMatrix`](crate::linalg::ComplexMatrix).
pub trait Scalar: Clone + Num + std::ops::Neg<Output = Self> + PartialEq + Debug {
    /// Constructors reject entries for which this returns false.
    fn is_finite_value(&self) -> bool;
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational64 {
    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Scalar + Float + FloatConst + FromPrimitive + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Rescales a tolerance stated for double precision to this type.
    ///
    /// The scale factor is `sqrt(eps_self / eps_f64)`, so `f64` tolerances
    /// are returned unchanged and `f32` ones grow by roughly `2.3e4`.
    fn tol(base: f64) -> Self {
        let ratio = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::lit(base * ratio.sqrt())
    }
}

impl Real for f32 {}
impl Real for f64 {}
