use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::rational_to_f64;
use super::{rational_to_string, Conj, Field, Interval, Rational, RealField};

/// Trial division bound used when extracting square-free parts.
const TRIAL_LIMIT: u64 = 100_000;

/// An element of Q(√s₁, √s₂, …): a finite sum `Σ c_s √s` with rational
/// coefficients over square-free radicands `s ≥ 1`.
///
/// Square roots of distinct square-free integers are linearly independent
/// over Q, so the map below is a canonical form and structural equality is
/// field equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    terms: BTreeMap<BigUint, Rational>,
}

impl Surd {
    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(BigUint::one(), q);
        }
        Surd { terms }
    }

    /// `c·√s` for a square-free `s` (not checked).
    fn monomial(c: Rational, s: BigUint) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(s, c);
        }
        Surd { terms }
    }

    /// √q for a non-negative rational, if the square-free part of its
    /// numerator·denominator can be extracted.
    pub fn sqrt_rational(q: &Rational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Surd::default());
        }
        // √(n/d) = √(n·d) / d
        let nd = (q.numer() * q.denom()).to_biguint()?;
        let (square_root, free) = square_free_split(&nd)?;
        let c = Rational::new(square_root.into(), q.denom().clone());
        Some(Self::monomial(c, free))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|s| s.is_one())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, s: BigUint, c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Flips the sign of every term whose radicand is divisible by `b`.
    fn conjugate_by(&self, b: &BigUint) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(s, c)| (s.clone(), if (s % b).is_zero() { -c.clone() } else { c.clone() }))
            .collect();
        Surd { terms }
    }

    fn inverse(&self) -> Option<Self> {
        if self.terms.is_empty() {
            return None;
        }
        let radicands: Vec<BigUint> = self.terms.keys().filter(|s| !s.is_one()).cloned().collect();
        let base = coprime_base(radicands);
        let mut num = Surd::from_rational(Rational::one());
        let mut den = self.clone();
        for b in &base {
            let c = den.conjugate_by(b);
            num = num * c.clone();
            den = den * c;
        }
        let den = den.as_rational().expect("conjugate product is rational");
        Some(num * Surd::from_rational(den.recip()))
    }

    fn interval(&self, prec: u32) -> Interval {
        let guard = prec + 16;
        let mut acc = Interval::from_rational_prec(&Rational::zero(), guard);
        for (s, c) in &self.terms {
            let c = Interval::from_rational_prec(c, guard);
            let term = if s.is_one() {
                c
            } else {
                let r = Interval::from_rational_prec(&Rational::from_integer(s.clone().into()), guard);
                c * r.sqrt().expect("positive radicand")
            };
            acc = acc + term;
        }
        acc
    }
}

/// Splits n = a²·s with s square-free; `None` if a large cofactor cannot be
/// classified by trial division.
fn square_free_split(n: &BigUint) -> Option<(BigUint, BigUint)> {
    let mut rest = n.clone();
    let mut root = BigUint::one();
    let mut free = BigUint::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut k = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            k += 1;
        }
        if k > 0 {
            root *= num_traits::pow(pb.clone(), (k / 2) as usize);
            if k % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((root, free));
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return Some((root * r, free));
    }
    // All prime factors of `rest` exceed TRIAL_LIMIT; below the cube of the
    // limit it has at most two, and a square was excluded above.
    let limit = BigUint::from(TRIAL_LIMIT);
    if rest < &limit * &limit * &limit {
        return Some((root, free * rest));
    }
    None
}

/// Pairwise coprime numbers generating the same multiplicative structure as
/// the (square-free) inputs.
fn coprime_base(mut items: Vec<BigUint>) -> Vec<BigUint> {
    items.retain(|x| !x.is_one());
    items.sort();
    items.dedup();
    loop {
        let mut split = None;
        'outer: for i in 0..items.len() {
            for j in i + 1..items.len() {
                let g = items[i].gcd(&items[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else { return items };
        let a = &items[i] / &g;
        let b = &items[j] / &g;
        items.remove(j);
        items.remove(i);
        items.extend([a, b, g]);
        items.retain(|x| !x.is_one());
        items.sort();
        items.dedup();
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, o: Surd) -> Surd {
        for (s, c) in o.terms {
            self.add_term(s, c);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self + (-o)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { terms: self.terms.into_iter().map(|(s, c)| (s, -c)).collect() }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let mut out = Surd::default();
        for (s1, c1) in &self.terms {
            for (s2, c2) in &o.terms {
                let g = s1.gcd(s2);
                let s = (s1 / &g) * (s2 / &g);
                let c = c1 * c2 * Rational::from_integer(g.into());
                out.add_term(s, c);
            }
        }
        out
    }
}

impl Div for Surd {
    type Output = Surd;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Surd) -> Surd {
        self * o.inverse().expect("surd division by zero")
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::from_rational(Rational::one())
    }
}

impl Field for Surd {
    fn try_inv(&self) -> Option<Self> {
        self.inverse()
    }

    fn magnitude_hint(&self) -> f64 {
        self.approx_f64().abs()
    }
}

impl Conj for Surd {
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl RealField for Surd {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        Surd::from_rational(q.clone())
    }

    fn try_sqrt(&self) -> Option<Self> {
        Surd::sqrt_rational(&self.as_rational()?)
    }

    fn sign(&self) -> Option<Ordering> {
        if self.terms.is_empty() {
            return Some(Ordering::Equal);
        }
        // A non-zero algebraic number separates from zero at some precision.
        let mut prec = 64;
        loop {
            if let Some(s) = self.interval(prec).sign() {
                if s != Ordering::Equal {
                    return Some(s);
                }
            }
            prec *= 2;
        }
    }

    fn enclosure(&self, prec: u32) -> Interval {
        self.interval(prec)
    }

    fn approx_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| rational_to_f64(c) * s.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| {
                if s.is_one() {
                    rational_to_string(c)
                } else {
                    format!("{}*sqrt({})", rational_to_string(c), s)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn sqrt(n: i64) -> Surd {
        Surd::sqrt_rational(&q(n, 1)).unwrap()
    }

    #[test]
    fn products_of_roots_reduce() {
        assert_eq!(sqrt(2) * sqrt(2), Surd::from_rational(q(2, 1)));
        assert_eq!(sqrt(6), sqrt(2) * sqrt(3));
        assert_eq!(sqrt(12), Surd::from_rational(q(2, 1)) * sqrt(3));
        assert_eq!(Surd::sqrt_rational(&q(1, 2)).unwrap(), sqrt(2) * Surd::from_rational(q(1, 2)));
    }

    #[test]
    fn inverse_of_multiquadratic() {
        let x = Surd::from_rational(q(1, 1)) + sqrt(2) + sqrt(3) + sqrt(6) * Surd::from_rational(q(2, 5));
        let inv = x.try_inv().unwrap();
        assert_eq!(x * inv, Surd::one());
        let y = sqrt(10) + sqrt(15);
        assert_eq!(y.clone() * y.try_inv().unwrap(), Surd::one());
    }

    #[test]
    fn sign_of_nearly_cancelling_sum() {
        // √2 + √3 − √(5 + 2√6) = 0 is not expressible here, but
        // 3√2 − √17.99... style gaps are.
        let x = sqrt(18) - Surd::from_rational(q(4243, 1000));
        assert_eq!(x.sign(), Some(Ordering::Less));
        assert_eq!((sqrt(2) - sqrt(2)).sign(), Some(Ordering::Equal));
    }

    #[test]
    fn square_free_split_handles_large_prime_cofactor() {
        let p = BigUint::from(1_000_003u64);
        let (a, s) = square_free_split(&(&p * &p * BigUint::from(12u32))).unwrap();
        assert_eq!(a, &p * BigUint::from(2u32));
        assert_eq!(s, BigUint::from(3u32));
    }
}
