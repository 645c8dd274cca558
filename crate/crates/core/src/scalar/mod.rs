//! Scalar traits and the concrete scalar types the rest of the workspace is
//! generic over.
//!
//! Three families implement [`RealField`]:
//!
//! * [`Rational`]: arbitrary-precision rationals, exact and certified;
//! * [`Surd`]: the multiquadratic extension of the rationals by square roots
//!   of positive integers, exact and certified;
//! * [`Interval`]: dyadic intervals with outward rounding, certified but not
//!   exact;
//!
//! plus the IEEE floats, which are neither and are only used by heuristics.

mod complex;
mod dyadic;
mod interval;
mod rational;
mod surd;

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_traits::{One, Zero};

pub use complex::Complex;
pub use dyadic::{Dyadic, Round};
pub use interval::{set_working_precision, with_precision, working_precision, Interval};
pub use rational::{parse_rational, rational_to_string, simplest_between};
pub use surd::Surd;

pub type Rational = num_rational::BigRational;

/// Commutative ring with identity, owned arithmetic.
pub trait Ring:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

impl<T> Ring for T where
    T: Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

pub trait Field: Ring + Div<Output = Self> {
    /// `None` when the element is (or, for intervals, may be) zero.
    fn try_inv(&self) -> Option<Self>;

    /// Rough magnitude, used only to pick pivots.
    fn magnitude_hint(&self) -> f64;
}

/// Complex conjugation; the identity on real scalars.
pub trait Conj {
    fn conj(&self) -> Self;
}

/// An ordered field with (partial) square roots.
pub trait RealField: Field + Conj {
    /// Equality and sign are decided without error.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// Square root, when it can be represented (exact types) or enclosed
    /// (intervals whose lower end is non-negative).
    fn try_sqrt(&self) -> Option<Self>;

    /// Sign of the value; `None` when it cannot be decided (an interval
    /// straddling zero). Floats answer but do not certify.
    fn sign(&self) -> Option<Ordering>;

    /// Certified `self ≥ 0`, or `None` when undecidable.
    fn nonneg(&self) -> Option<bool> {
        self.sign().map(|s| s != Ordering::Less)
    }

    /// A certified enclosure with endpoints carrying `prec` bits.
    fn enclosure(&self, prec: u32) -> Interval;

    fn approx_f64(&self) -> f64;
}

/// Marker for types whose `sign` is a proof, not an estimate.
pub trait Certified: RealField {}

impl Certified for Rational {}
impl Certified for Surd {}
impl Certified for Interval {}

/// Certified comparison `a` vs `b`.
pub fn compare<S: RealField>(a: &S, b: &S) -> Option<Ordering> {
    (a.clone() - b.clone()).sign()
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn try_inv(&self) -> Option<Self> {
                if *self == 0.0 {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }

            fn magnitude_hint(&self) -> f64 {
                self.abs() as f64
            }
        }

        impl Conj for $t {
            fn conj(&self) -> Self {
                *self
            }
        }

        impl RealField for $t {
            const EXACT: bool = false;

            fn from_rational(q: &Rational) -> Self {
                rational::rational_to_f64(q) as $t
            }

            fn try_sqrt(&self) -> Option<Self> {
                if *self >= 0.0 {
                    Some(self.sqrt())
                } else {
                    None
                }
            }

            fn sign(&self) -> Option<Ordering> {
                self.partial_cmp(&0.0)
            }

            fn enclosure(&self, prec: u32) -> Interval {
                Interval::from_f64(*self as f64, prec)
            }

            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_field!(f32);
float_field!(f64);
