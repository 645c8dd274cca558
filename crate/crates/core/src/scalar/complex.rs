use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Conj, Field, Ring};

/// A complex number over any ring. Unlike `num_complex::Complex` this only
/// needs ring operations, so it also works over polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }
}

impl<T: Ring> Complex<T> {
    pub fn real(re: T) -> Self {
        Self { re, im: T::zero() }
    }

    pub fn i() -> Self {
        Self { re: T::zero(), im: T::one() }
    }

    /// re² + im².
    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            re: self.re.clone() * k.clone(),
            im: self.im.clone() * k.clone(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Complex<U> {
        Complex { re: f(&self.re), im: f(&self.im) }
    }
}

impl<T: Ring> Conj for Complex<T> {
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }
}

impl<T: Ring> Add for Complex<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Ring> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Ring> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if o.im.is_zero() {
            return Self { re: self.re * o.re.clone(), im: self.im * o.re };
        }
        if self.im.is_zero() {
            return Self { re: o.re * self.re.clone(), im: o.im * self.re };
        }
        Self {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<T: Ring> Neg for Complex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl<T: Ring> Zero for Complex<T> {
    fn zero() -> Self {
        Self { re: T::zero(), im: T::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<T: Ring> One for Complex<T> {
    fn one() -> Self {
        Self { re: T::one(), im: T::zero() }
    }
}

impl<T: Field> Div for Complex<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.try_inv().expect("complex division by zero")
    }
}

impl<T: Field> Field for Complex<T> {
    fn try_inv(&self) -> Option<Self> {
        if self.im.is_zero() {
            return self.re.try_inv().map(Self::real);
        }
        let n = self.norm_sqr().try_inv()?;
        Some(Self { re: self.re.clone() * n.clone(), im: -self.im.clone() * n })
    }

    fn magnitude_hint(&self) -> f64 {
        self.re.magnitude_hint() + self.im.magnitude_hint()
    }
}
