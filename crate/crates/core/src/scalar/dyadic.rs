use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Rounding direction for directed operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    fn flip(self) -> Self {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// `mant * 2^exp`, kept with an odd mantissa (or the canonical zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

/// floor or ceil of m / 2^s.
fn shr_round(m: &BigInt, s: u64, dir: Round) -> BigInt {
    let mag = m.magnitude();
    let q = mag >> s;
    let exact = (&q << s) == *mag;
    let q = BigInt::from_biguint(Sign::Plus, q);
    match (m.sign(), dir, exact) {
        (_, _, true) | (Sign::NoSign, _, _) => {
            if m.is_negative() {
                -q
            } else {
                q
            }
        }
        (Sign::Plus, Round::Down, false) => q,
        (Sign::Plus, Round::Up, false) => q + BigInt::one(),
        (Sign::Minus, Round::Down, false) => -(q + BigInt::one()),
        (Sign::Minus, Round::Up, false) => -q,
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    /// 2^e.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    fn normalize(&mut self) {
        match self.mant.trailing_zeros() {
            None => self.exp = 0,
            Some(0) => {}
            Some(tz) => {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        match self.mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// The value lies in [2^(msb-1), 2^msb) in magnitude.
    fn msb(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Self::new(shr_round(&self.mant, s, dir), self.exp + s as i64)
    }

    fn add_exact(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &o.mant << (o.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn add_rounded(&self, o: &Self, prec: u32, dir: Round) -> Self {
        if self.is_zero() {
            return o.round(prec, dir);
        }
        if o.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.msb() >= o.msb() { (self, o) } else { (o, self) };
        let cut = big.msb() - prec as i64 - 3;
        if small.msb() < cut {
            // The small term only matters through the rounding direction.
            let nudge = Dyadic::pow2(cut);
            return match (small.signum(), dir) {
                (Ordering::Greater, Round::Down) | (Ordering::Less, Round::Up) => big.round(prec, dir),
                (Ordering::Greater, Round::Up) => big.add_exact(&nudge).round(prec, dir),
                _ => big.add_exact(&-nudge).round(prec, dir),
            };
        }
        self.add_exact(o).round(prec, dir)
    }

    pub fn mul_exact(&self, o: &Self) -> Self {
        Self::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    pub fn mul_rounded(&self, o: &Self, prec: u32, dir: Round) -> Self {
        self.mul_exact(o).round(prec, dir)
    }

    /// Directed quotient. Panics on a zero divisor.
    pub fn div_rounded(&self, o: &Self, prec: u32, dir: Round) -> Self {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let negative = self.mant.is_negative() != o.mant.is_negative();
        let mag_dir = if negative { dir.flip() } else { dir };
        let a = self.mant.abs();
        let b = o.mant.abs();
        let k = (prec as i64 + 2 + b.bits() as i64 - a.bits() as i64).max(0) as u64;
        let (mut q, r) = (a << k).div_rem(&b);
        if mag_dir == Round::Up && !r.is_zero() {
            q += 1;
        }
        let mag = Self::new(q, self.exp - o.exp - k as i64).round(prec, mag_dir);
        if negative {
            -mag
        } else {
            mag
        }
    }

    /// Directed square root of a non-negative value.
    pub fn sqrt_rounded(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.mant.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let want = 2 * prec as i64 + 4;
        let mut t = (want - self.mant.bits() as i64).max(0);
        if (self.exp - t) % 2 != 0 {
            t += 1;
        }
        let m = &self.mant << t as u64;
        let mut s = m.sqrt();
        if dir == Round::Up && &s * &s != m {
            s += 1;
        }
        Self::new(s, (self.exp - t) / 2).round(prec, dir)
    }

    pub fn from_rational(q: &Rational, prec: u32, dir: Round) -> Self {
        Self::from_int(q.numer().clone()).div_rounded(&Self::from_int(q.denom().clone()), prec, dir)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.round(60, Round::Down);
        let m = r.mant.to_f64().unwrap_or(0.0);
        let e = r.exp;
        if e > 1100 {
            return m * f64::INFINITY;
        }
        if e < -1200 {
            return 0.0;
        }
        // split to stay within powi's range
        m * 2f64.powi((e / 2) as i32) * 2f64.powi((e - e / 2) as i32)
    }

    /// Exact enclosure of an f64.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    /// Exact midpoint.
    pub fn midpoint(&self, o: &Self) -> Self {
        let s = self.add_exact(o);
        Dyadic::new(s.mant, s.exp - 1)
    }

    pub fn sub_exact(&self, o: &Self) -> Self {
        self.add_exact(&-o.clone())
    }
}

impl std::ops::Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), o.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Ordering::Equal;
        }
        let (ma, mb) = (self.msb(), o.msb());
        if ma != mb {
            let by_mag = ma.cmp(&mb);
            return if sa == Ordering::Greater { by_mag } else { by_mag.reverse() };
        }
        self.sub_exact(o).signum()
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::rational_to_string(&self.to_rational()))
    }
}
