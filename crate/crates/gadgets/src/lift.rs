//! Lifting a real matrix to a channel whose transfer matrix is
//! `[[1, 0], [ν, 0]] ⊕ εM` in a basis anchored at a pure state `ψ`.
//!
//! At `ε = 0` the map is `T(X) = tr X/d · (𝟙 + ν(𝟙 - dψ)/√(d-1))`, with
//! Choi matrix `A ⊗ 𝟙/d²`, whose smallest eigenvalue is
//! `μ = min(1 - ν√(d-1), 1 + ν/√(d-1))/d²`, positive exactly on the open
//! interval for `ν`. The `M` block contributes `ε Σ M_ij H_{i+2} ⊗ H_{j+2}ᵀ/d`
//! to the Choi matrix; its operator norm is at most its Frobenius norm
//! `‖M‖_F/d` because the `H_i ⊗ H_jᵀ` are orthonormal. Hence
//! `ε ≤ μ/(2 max(1, ‖M‖_F/d))` keeps the Choi matrix above `μ/2`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Zero};
use qdecide_core::{Channel, CpVerdict, Dyadic, HermitianBasis, Interval, Matrix, Rational, RealField, Surd};

use crate::error::{GadgetError, Result};

/// Transfer matrix `[[1, 0], [ν, 0]] ⊕ εM`.
pub fn block_transfer<T: RealField>(nu: &T, eps: &T, m: &Matrix<T>) -> Matrix<T> {
    let n = m.rows() + 2;
    Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => T::one(),
        (1, 0) => nu.clone(),
        (i, j) if i >= 2 && j >= 2 => eps.clone() * m[(i - 2, j - 2)].clone(),
        _ => T::zero(),
    })
}

/// Largest power of two not above `x > 0`.
pub(crate) fn floor_pow2(x: &Dyadic) -> Rational {
    assert_eq!(x.signum(), Ordering::Greater, "power-of-two floor of a non-positive value");
    let e = x.exponent() + x.mantissa().bits() as i64 - 1;
    Dyadic::pow2(e).to_rational()
}

pub(crate) fn surd_interval(s: &Surd) -> Interval {
    s.enclosure(qdecide_core::scalar::working_precision())
}

/// `ν ∈ (-√(d-1), 1/√(d-1))`, decided exactly.
pub fn nu_in_range(nu: &Surd, d: usize) -> bool {
    let r = Surd::sqrt_rational(&Rational::from_integer(((d - 1) as i64).into())).expect("integer root");
    let upper = Surd::one() / r.clone();
    (nu.clone() + r).sign() == Some(Ordering::Greater) && (upper - nu.clone()).sign() == Some(Ordering::Greater)
}

/// Certified lower bound on `λ_min` of the `ε = 0` Choi matrix.
pub fn mu_lower_bound(nu: &Surd, d: usize) -> Interval {
    let r = surd_interval(&Surd::sqrt_rational(&Rational::from_integer(((d - 1) as i64).into())).expect("root"));
    let n = surd_interval(nu);
    let one = Interval::one();
    let a = one.clone() - n.clone() * r.clone();
    let b = one + n / r;
    let m = if a.hi() <= b.lo() {
        a
    } else if b.hi() <= a.lo() {
        b
    } else {
        Interval::new(a.lo().clone().min(b.lo().clone()), a.hi().clone().min(b.hi().clone()), a.precision())
    };
    m / Interval::from_i64((d * d) as i64)
}

/// Upper bound on `‖ΔChoi‖_∞` through `‖M‖_F / d`.
pub fn delta_choi_bound(m: &Matrix<Rational>, d: usize) -> Interval {
    let f2 = m.iter().fold(Rational::zero(), |acc, v| acc + v * v);
    let f = Interval::from_rational(&f2).sqrt().expect("non-negative");
    f / Interval::from_i64(d as i64)
}

/// `ε* = μ/(2·max(1, ‖ΔChoi‖))`, rounded down to a power of two.
pub fn eps_star(m: &Matrix<Rational>, nu: &Surd, d: usize) -> Result<Rational> {
    let mu = mu_lower_bound(nu, d);
    if mu.lo().signum() != Ordering::Greater {
        return Err(GadgetError::NuOutOfRange(nu.to_string()));
    }
    let norm = delta_choi_bound(m, d);
    let denom = Dyadic::from_int(2).mul_exact(&norm.hi().clone().max(Dyadic::from_int(1)));
    let q = mu.lo().div_rounded(&denom, 64, qdecide_core::scalar::Round::Down);
    Ok(floor_pow2(&q))
}

/// A certified lift of one matrix.
#[derive(Clone, Debug)]
pub struct Lemma2Lift {
    pub eps_star: Rational,
    pub mu: Interval,
    pub delta_choi: Interval,
    /// The channel at `ε = ε*`, certified completely positive.
    pub channel: Channel<Interval>,
}

fn check_shapes(m: &Matrix<Rational>, d: usize) -> Result<()> {
    let n = d * d - 2;
    if m.shape() != (n, n) {
        return Err(GadgetError::InvalidInstance(format!("matrix must be {n}x{n} for d = {d}")));
    }
    Ok(())
}

pub fn lift_lemma2(m: &Matrix<Rational>, nu: &Surd, basis: Arc<HermitianBasis<Interval>>) -> Result<Lemma2Lift> {
    let d = basis.dim();
    check_shapes(m, d)?;
    if basis.psi().is_none() {
        return Err(GadgetError::InvalidInstance("the basis must be anchored at ψ".into()));
    }
    if !nu_in_range(nu, d) {
        return Err(GadgetError::NuOutOfRange(nu.to_string()));
    }
    let eps = eps_star(m, nu, d)?;
    let t = block_transfer(&surd_interval(nu), &Interval::from_rational(&eps), &m.map(Interval::from_rational));
    let channel = Channel::from_transfer(basis, t)?;
    certify_cp(&channel)?;
    Ok(Lemma2Lift { eps_star: eps, mu: mu_lower_bound(nu, d), delta_choi: delta_choi_bound(m, d), channel })
}

pub(crate) fn certify_cp(ch: &Channel<Interval>) -> Result<()> {
    match ch.is_completely_positive() {
        CpVerdict::CertifiedTrue => Ok(()),
        CpVerdict::CertifiedFalse => Err(GadgetError::NotCertified("complete positivity (Choi matrix is not PSD)".into())),
        CpVerdict::Indeterminate(bracket) => Err(GadgetError::Core(qdecide_core::CoreError::PrecisionExhausted { bracket })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdecide_core::CMatrix;

    fn anchored(d: usize) -> Arc<HermitianBasis<Interval>> {
        let psi = CMatrix::<Interval>::unit(d, d, 0, 0);
        Arc::new(HermitianBasis::new(d, Some(&psi), None).unwrap())
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn zero_block_is_completely_depolarizing() {
        let b = anchored(2);
        let m = Matrix::<Rational>::zeros(2, 2);
        let lift = lift_lemma2(&m, &Surd::zero(), b.clone()).unwrap();
        assert!(lift.channel.is_trace_preserving());
        // every state goes to 𝟙/2
        let rho = CMatrix::<Interval>::unit(2, 2, 1, 1);
        let out = lift.channel.apply_via_choi(&rho).unwrap();
        let half = Interval::from_rational(&Rational::new(1.into(), 2.into()));
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { half.clone() } else { Interval::zero() };
                assert!((out[(i, j)].re.clone() - want).contains_zero());
                assert!(out[(i, j)].im.contains_zero());
            }
        }
        assert_eq!(lift.mu.lo().to_rational(), Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn nu_at_the_boundary_is_rejected() {
        let b = anchored(2);
        let m = Matrix::<Rational>::zeros(2, 2);
        assert!(matches!(lift_lemma2(&m, &Surd::one(), b.clone()), Err(GadgetError::NuOutOfRange(_))));
        assert!(matches!(lift_lemma2(&m, &-Surd::one(), b), Err(GadgetError::NuOutOfRange(_))));
        let b3 = anchored(3);
        let m3 = Matrix::<Rational>::zeros(7, 7);
        let root2 = Surd::sqrt_rational(&int(2)).unwrap();
        assert!(lift_lemma2(&m3, &-root2.clone(), b3.clone()).is_err());
        assert!(lift_lemma2(&m3, &(Surd::one() / root2.clone()), b3.clone()).is_err());
        assert!(lift_lemma2(&m3, &(Surd::one() / (root2 * Surd::from_rational(int(2)))), b3).is_ok());
    }

    #[test]
    fn random_block_in_three_dimensions() {
        let b = anchored(3);
        let m = Matrix::from_fn(7, 7, |i, j| int(((i * 7 + j * 3) % 5) as i64 - 2));
        let nu = Surd::from_rational(Rational::new((-1).into(), 3.into()));
        let lift = lift_lemma2(&m, &nu, b).unwrap();
        assert!(lift.eps_star > Rational::zero());
        assert!(lift.channel.is_completely_positive().is_certified_true());
        // the analytic μ is the smallest eigenvalue of the ε = 0 Choi matrix
        let zero = block_transfer(&surd_interval(&nu), &Interval::zero(), &m.map(Interval::from_rational));
        let ch = Channel::from_transfer(lift.channel.basis().clone(), zero).unwrap();
        let (lo, _) = qdecide_core::eigen::min_eigenvalue_bracket(ch.choi(), 40);
        assert!(lo.lo() <= lift.mu.hi() && lift.mu.lo() <= lo.hi());
    }

    #[test]
    fn block_template_is_exact() {
        let m = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(0), int(-1)]]);
        let t = block_transfer(&int(3), &Rational::new(1.into(), 2.into()), &m);
        assert_eq!(t[(1, 0)], int(3));
        assert_eq!(t[(2, 3)], int(1));
        assert_eq!(t[(0, 1)], int(0));
    }
}
