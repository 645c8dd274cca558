//! Eigenvalue certification for Hermitian matrices through the
//! characteristic polynomial.
//!
//! A Hermitian matrix has a real-rooted characteristic polynomial
//! `det(tI - H) = Σ c_k t^(n-k)`, and `H ⪰ 0` exactly when every
//! `(-1)^k c_k` is non-negative. Shifting `t ↦ t + m` tests `H - mI ⪰ 0`,
//! i.e. `λ_min ≥ m`, which drives a bisection on `m`.


use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::matrix::CMatrix;
use crate::scalar::{Dyadic, Interval, RealField};

/// Default target width of eigenvalue brackets: 2^-100 ≈ 7.9e-31.
pub const DEFAULT_WIDTH_BITS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    NotPsd,
    Undecided,
}

/// Real parts of the characteristic polynomial coefficients, highest
/// degree first.
pub fn hermitian_charpoly<T: RealField>(h: &CMatrix<T>) -> Vec<T> {
    h.charpoly().into_iter().map(|z| z.re).collect()
}

/// Coefficients of `p(t + m)` from those of `p(t)`, both highest degree first.
pub fn taylor_shift<T: RealField>(p: &[T], m: &T) -> Vec<T> {
    let mut a: Vec<T> = p.iter().rev().cloned().collect();
    let n = a.len().saturating_sub(1);
    for i in 0..n {
        for j in (i..n).rev() {
            let t = m.clone() * a[j + 1].clone();
            a[j] = a[j].clone() + t;
        }
    }
    a.reverse();
    a
}

/// PSD verdict from the sign pattern of a real-rooted characteristic
/// polynomial.
pub fn coefficient_verdict<T: RealField>(p: &[T]) -> PsdVerdict {
    let mut undecided = false;
    for (k, c) in p.iter().enumerate() {
        let c = if k % 2 == 0 { c.clone() } else { -c.clone() };
        match c.nonneg() {
            Some(true) => {}
            Some(false) => return PsdVerdict::NotPsd,
            None => undecided = true,
        }
    }
    if undecided {
        PsdVerdict::Undecided
    } else {
        PsdVerdict::Psd
    }
}

pub fn psd_verdict<T: RealField>(h: &CMatrix<T>) -> Result<PsdVerdict> {
    if !h.is_square() {
        return Err(CoreError::DimensionMismatch("PSD test on a non-square matrix".into()));
    }
    Ok(coefficient_verdict(&hermitian_charpoly(h)))
}

/// Integer upper bound on the spectral radius (maximum absolute row sum).
fn spectral_bound<T: RealField>(h: &CMatrix<T>) -> i64 {
    let mut best = 0i64;
    for i in 0..h.rows() {
        let mut row = crate::scalar::Rational::zero();
        for z in h.row(i) {
            row += z.re.enclosure(64).mag().to_rational();
            row += z.im.enclosure(64).mag().to_rational();
        }
        let c = row.ceil().to_integer();
        let c: i64 = c.try_into().unwrap_or(i64::MAX / 4);
        best = best.max(c);
    }
    best + 1
}

/// A certified bracket `[lo, hi]` for the smallest eigenvalue, together
/// with a flag telling whether the target width `2^-width_bits` was reached.
pub fn min_eigenvalue_bracket<T: RealField>(h: &CMatrix<T>, width_bits: u32) -> (Interval, bool) {
    assert!(h.is_square(), "eigenvalues of a non-square matrix");
    let p = hermitian_charpoly(h);
    let r = spectral_bound(h);
    let mut lo = Dyadic::from_int(-r);
    let mut hi = Dyadic::from_int(r);
    let target = Dyadic::pow2(-(width_bits as i64));
    let mut reached = true;
    while hi.sub_exact(&lo) > target {
        let m = lo.midpoint(&hi);
        let shifted = taylor_shift(&p, &T::from_rational(&m.to_rational()));
        match coefficient_verdict(&shifted) {
            PsdVerdict::Psd => lo = m,
            PsdVerdict::NotPsd => hi = m,
            PsdVerdict::Undecided => {
                reached = false;
                break;
            }
        }
    }
    let prec = (lo.mantissa().bits().max(hi.mantissa().bits()) as u32).max(64);
    (Interval::new(lo, hi, prec), reached)
}

/// Certified interval containing `λ_min(H)` of width at most 2^-100.
pub fn min_eigenvalue_interval<T: RealField>(h: &CMatrix<T>) -> Result<Interval> {
    min_eigenvalue_interval_to(h, DEFAULT_WIDTH_BITS)
}

pub fn min_eigenvalue_interval_to<T: RealField>(h: &CMatrix<T>, width_bits: u32) -> Result<Interval> {
    if !h.is_square() {
        return Err(CoreError::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let (bracket, reached) = min_eigenvalue_bracket(h, width_bits);
    if reached {
        Ok(bracket)
    } else {
        Err(CoreError::PrecisionExhausted { bracket })
    }
}

/// Certified bracket for the largest eigenvalue.
pub fn max_eigenvalue_interval<T: RealField>(h: &CMatrix<T>) -> Result<Interval> {
    let neg = h.map(|z| -z.clone());
    min_eigenvalue_interval(&neg).map(|i| -i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex, Rational};
    use crate::matrix::Matrix;

    fn herm(rows: &[&[i64]]) -> CMatrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::real(Rational::from_integer(x.into()))).collect())
                .collect(),
        )
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // p(t) = t^2 - 3t + 1, p(t+2) = t^2 + t - 1
        let p: Vec<Rational> = [1, -3, 1].iter().map(|&x| Rational::from_integer(x.into())).collect();
        let s = taylor_shift(&p, &Rational::from_integer(2.into()));
        let want: Vec<Rational> = [1, 1, -1].iter().map(|&x| Rational::from_integer(x.into())).collect();
        assert_eq!(s, want);
    }

    #[test]
    fn brackets_contain_known_eigenvalues() {
        let i3 = herm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = min_eigenvalue_interval(&i3).unwrap();
        assert!(b.contains_rational(&Rational::from_integer(1.into())));
        assert!(b.width().to_f64() <= 1e-30);
        let d = herm(&[&[2, 0], &[0, -5]]);
        assert!(min_eigenvalue_interval(&d).unwrap().contains_rational(&Rational::from_integer((-5).into())));
        let x = herm(&[&[0, 1], &[1, 0]]);
        assert!(min_eigenvalue_interval(&x).unwrap().contains_rational(&Rational::from_integer((-1).into())));
        assert!(max_eigenvalue_interval(&x).unwrap().contains_rational(&Rational::from_integer(1.into())));
    }

    #[test]
    fn interval_entries_give_certified_brackets() {
        let x = herm(&[&[2, 1], &[1, 1]]).map(|z| z.map(Interval::from_rational));
        // λ_min = (3 - √5)/2 ≈ 0.381966
        let b = min_eigenvalue_interval(&x).unwrap();
        let v = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(b.lo().to_f64() <= v + 1e-15 && v - 1e-15 <= b.hi().to_f64());
    }
}
