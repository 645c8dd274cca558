use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Conj, Dyadic, Field, Interval, Rational, RealField, Round};

impl Field for Rational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn magnitude_hint(&self) -> f64 {
        rational_to_f64(self).abs()
    }
}

impl Conj for Rational {
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl RealField for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rational::new(n, d))
    }

    fn sign(&self) -> Option<Ordering> {
        Some(match self.numer().sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }

    fn enclosure(&self, prec: u32) -> Interval {
        Interval::from_rational_prec(self, prec)
    }

    fn approx_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Nearest-ish double; exact for dyadics that fit.
pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    Dyadic::from_rational(q, 64, Round::Down).to_f64()
}

/// Parses `"p"`, `"-p/q"`, or a plain decimal like `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(n, d));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

pub fn rational_to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// The rational with the smallest denominator in `[lo, hi]` (then the
/// smallest numerator in absolute value), via continued fractions.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if lo.is_positive() {
        return simplest_positive(lo, hi);
    }
    if hi.is_negative() {
        return -simplest_positive(&-hi.clone(), &-lo.clone());
    }
    Rational::zero()
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + Rational::one() <= *hi {
        return fl + Rational::one();
    }
    // lo and hi share the integer part; recurse on the reciprocals of the
    // fractional parts, which swaps the ends.
    let a = hi.clone() - fl.clone();
    let b = lo.clone() - fl.clone();
    fl + simplest_positive(&a.recip(), &b.recip()).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("-0.25"), Some(Rational::new((-1).into(), 4.into())));
        assert_eq!(parse_rational("7"), Some(Rational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn simplest_rational_in_range() {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(simplest_between(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_between(&q(-4, 10), &q(-3, 10)), q(-1, 3));
        assert_eq!(simplest_between(&q(-1, 2), &q(1, 7)), q(0, 1));
        assert_eq!(simplest_between(&q(7, 2), &q(7, 2)), q(7, 2));
        // brute force: first denominator admitting a numerator in range
        for (a, b) in [(31415, 10000), (2718, 1000), (1, 1000), (123, 457)] {
            let (lo, hi) = (q(a, b), q(a + 1, b));
            let found = simplest_between(&lo, &hi);
            let want = (1i64..)
                .find_map(|d| {
                    let n = (lo.clone() * q(d, 1)).ceil();
                    (n.clone() / q(d, 1) <= hi).then(|| n / q(d, 1))
                })
                .unwrap();
            assert_eq!(found, want);
        }
    }

    #[test]
    fn sqrt_only_for_squares() {
        let q = Rational::new(9.into(), 4.into());
        assert_eq!(q.try_sqrt(), Some(Rational::new(3.into(), 2.into())));
        assert_eq!(Rational::from_integer(2.into()).try_sqrt(), None);
    }
}
