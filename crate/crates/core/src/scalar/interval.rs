use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Conj, Dyadic, Field, Rational, RealField, Round};

thread_local! {
    static WORKING_PREC: Cell<u32> = const { Cell::new(256) };
}

/// Bits of mantissa used for constants created without an explicit precision.
pub fn working_precision() -> u32 {
    WORKING_PREC.with(|p| p.get())
}

pub fn set_working_precision(bits: u32) {
    assert!(bits >= 16, "working precision below 16 bits");
    WORKING_PREC.with(|p| p.set(bits));
}

/// Runs `f` with the thread's working precision temporarily set to `bits`.
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_PREC.with(|p| p.set(self.0));
        }
    }
    let _restore = Restore(working_precision());
    set_working_precision(bits);
    f()
}

/// A closed interval `[lo, hi]` with dyadic endpoints. Every operation
/// rounds outward, so the true value of an expression always lies inside
/// the interval computed for it.
#[derive(Clone)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval with lo > hi");
        Interval { lo, hi, prec }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        Interval { lo: x.clone(), hi: x, prec }
    }

    pub fn from_rational_prec(q: &Rational, prec: u32) -> Self {
        if q.is_integer() && q.numer().bits() <= prec as u64 {
            return Self::point(Dyadic::from_int(q.numer().clone()), prec);
        }
        Interval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
            prec,
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        let d = Dyadic::from_f64(x).expect("non-finite float");
        Self::point(d, prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.midpoint(&self.hi)
    }

    /// The midpoint as a point interval, rounded to the working precision.
    /// Used when iterating to a numerical fixed point whose accuracy is
    /// certified afterwards.
    pub fn collapse(&self) -> Self {
        Self::point(self.mid().round(self.prec, Round::Down), self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() != Ordering::Greater && self.hi.signum() != Ordering::Less
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> Dyadic {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    pub fn sqrt(&self) -> Option<Interval> {
        if self.lo.signum() == Ordering::Less {
            return None;
        }
        Some(Interval {
            lo: self.lo.sqrt_rounded(self.prec, Round::Down),
            hi: self.hi.sqrt_rounded(self.prec, Round::Up),
            prec: self.prec,
        })
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let one = Dyadic::from_int(1);
        Some(Interval {
            lo: one.div_rounded(&self.hi, self.prec, Round::Down),
            hi: one.div_rounded(&self.lo, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    /// True if every point of `self` is strictly greater than every point
    /// of `o`.
    pub fn certainly_gt(&self, o: &Interval) -> bool {
        self.lo > o.hi
    }

    pub fn certainly_ge(&self, o: &Interval) -> bool {
        self.lo >= o.hi
    }
}

// Precision is a rounding policy, not part of the value.
impl PartialEq for Interval {
    fn eq(&self, o: &Self) -> bool {
        self.lo == o.lo && self.hi == o.hi
    }
}

impl Eq for Interval {}

impl std::hash::Hash for Interval {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.lo.hash(state);
        self.hi.hash(state);
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        let prec = self.prec.max(o.prec);
        Interval {
            lo: self.lo.add_rounded(&o.lo, prec, Round::Down),
            hi: self.hi.add_rounded(&o.hi, prec, Round::Up),
            prec,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo, prec: self.prec }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let prec = self.prec.max(o.prec);
        let nonneg = |x: &Interval| x.lo.signum() != Ordering::Less;
        let (lo, hi) = if nonneg(&self) && nonneg(&o) {
            (self.lo.mul_exact(&o.lo), self.hi.mul_exact(&o.hi))
        } else {
            let products = [
                self.lo.mul_exact(&o.lo),
                self.lo.mul_exact(&o.hi),
                self.hi.mul_exact(&o.lo),
                self.hi.mul_exact(&o.hi),
            ];
            let lo = products.iter().min().unwrap().clone();
            let hi = products.iter().max().unwrap().clone();
            (lo, hi)
        };
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up), prec }
    }
}

impl Div for Interval {
    type Output = Interval;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Interval) -> Interval {
        self * o.recip().expect("interval division by an interval containing zero")
    }
}

impl Zero for Interval {
    fn zero() -> Self {
        Self::point(Dyadic::zero(), working_precision())
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for Interval {
    fn one() -> Self {
        Self::point(Dyadic::from_int(1), working_precision())
    }
}

impl Field for Interval {
    fn try_inv(&self) -> Option<Self> {
        self.recip()
    }

    fn magnitude_hint(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.mid().to_f64().abs()
        }
    }
}

impl Conj for Interval {
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl RealField for Interval {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        Self::from_rational_prec(q, working_precision())
    }

    fn try_sqrt(&self) -> Option<Self> {
        self.sqrt()
    }

    fn sign(&self) -> Option<Ordering> {
        if self.lo.signum() == Ordering::Greater {
            Some(Ordering::Greater)
        } else if self.hi.signum() == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn nonneg(&self) -> Option<bool> {
        if self.lo.signum() != Ordering::Less {
            Some(true)
        } else if self.hi.signum() == Ordering::Less {
            Some(false)
        } else {
            None
        }
    }

    fn enclosure(&self, prec: u32) -> Interval {
        if prec >= self.prec {
            return self.clone();
        }
        Interval {
            lo: self.lo.round(prec, Round::Down),
            hi: self.hi.round(prec, Round::Up),
            prec,
        }
    }

    fn approx_f64(&self) -> f64 {
        self.mid().to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(n: i64, d: i64) -> Interval {
        Interval::from_rational(&Rational::new(n.into(), d.into()))
    }

    #[test]
    fn arithmetic_contains_exact_value() {
        let a = iv(1, 3);
        let b = iv(-2, 7);
        let exact = Rational::new(1.into(), 3.into()) * Rational::new((-2).into(), 7.into())
            - Rational::new((-2).into(), 7.into());
        let got = a * b.clone() - b;
        assert!(got.contains_rational(&exact));
        assert!(got.width().to_f64() < 1e-70);
    }

    #[test]
    fn precision_scoping() {
        let w = with_precision(64, || iv(1, 3).width().to_f64());
        assert!(w > 1e-25);
        assert_eq!(working_precision(), 256);
    }

    #[test]
    fn sign_is_three_valued() {
        assert_eq!(iv(1, 3).sign(), Some(Ordering::Greater));
        assert_eq!((iv(1, 3) - iv(1, 3)).sign(), None);
        assert_eq!(Interval::zero().sign(), Some(Ordering::Equal));
    }

    #[test]
    fn division_by_straddling_interval_is_refused() {
        assert!((iv(1, 3) - iv(1, 3)).recip().is_none());
        let q = iv(1, 1) / iv(3, 1);
        assert!(q.contains_rational(&Rational::new(1.into(), 3.into())));
    }
}
