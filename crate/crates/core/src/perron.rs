//! Positive fixed points of `Φ(Y) = Σ_i M_i Y M_i†`.
//!
//! Power iteration from `Y = 𝟙` on the shifted map `Φ + c·id` with
//! `c = tr Φ(𝟙)/d`. The shift has the same eigenvectors, and it removes the
//! rotation of periodic irreducible maps. Each iterate is collapsed to a point
//! interval, so rounding never accumulates; the final residual is recomputed
//! in interval arithmetic and is a certified bound.

use num_traits::Zero;

use crate::eigen::min_eigenvalue_bracket;
use crate::error::{CoreError, Result};
use crate::matrix::{lift_complex, CMatrix};
use crate::scalar::{simplest_between, Complex, Dyadic, Interval, Rational, RealField, Surd};

const REMEDY: &str = "the map Y -> sum_i M_i Y M_i^dagger is reducible or nilpotent; restrict the \
matrices to an invariant subspace on which the map is irreducible and normalize that block instead";

#[derive(Debug, Clone)]
pub struct PerronOptions {
    /// Bound on `‖Φ(X²) - λX²‖_∞` (maximum absolute row sum).
    pub tolerance: Rational,
    pub max_iterations: usize,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tolerance: Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 30)),
            max_iterations: 100_000,
        }
    }
}

/// An exactly verified fixed point `Φ(Y) = λY`, `Y ≻ 0`, `tr Y = 1`.
#[derive(Debug, Clone)]
pub struct ExactFixedPoint {
    pub lambda: Rational,
    pub y: CMatrix<Rational>,
    /// `√Y`, available when `Y` is diagonal.
    pub x: Option<CMatrix<Surd>>,
}

#[derive(Debug, Clone)]
pub struct PerronPair {
    pub lambda: Interval,
    /// Positive-definite Hermitian `X` with `X² ≈ Y`.
    pub x: CMatrix<Interval>,
    /// The eigenvector `Y`, normalized to unit trace.
    pub y: CMatrix<Interval>,
    /// Certified upper bound on `‖Φ(X²) - λX²‖_∞`.
    pub residual: Dyadic,
    pub iterations: usize,
    pub exact: Option<ExactFixedPoint>,
}

pub fn perron_pair(maps: &[CMatrix<Rational>]) -> Result<PerronPair> {
    perron_pair_with(maps, &PerronOptions::default())
}

fn apply_map<T: RealField>(maps: &[CMatrix<T>], adj: &[CMatrix<T>], y: &CMatrix<T>) -> CMatrix<T> {
    let d = y.rows();
    maps.iter()
        .zip(adj)
        .fold(CMatrix::zeros(d, d), |acc, (m, ma)| acc + m.matmul(y).matmul(ma))
}

fn collapse(m: &CMatrix<Interval>) -> CMatrix<Interval> {
    m.map(|z| Complex::new(z.re.collapse(), z.im.collapse()))
}

fn hermitize(m: &CMatrix<Interval>) -> CMatrix<Interval> {
    let half = Interval::from_rational(&Rational::new(1.into(), 2.into()));
    let s = m.clone() + m.adjoint();
    s.map(|z| z.scale(&half))
}

/// Upper bound on the maximum absolute row sum.
pub fn inf_norm_bound(m: &CMatrix<Interval>) -> Dyadic {
    (0..m.rows())
        .map(|i| {
            m.row(i).iter().fold(Dyadic::zero(), |acc, z| {
                acc.add_rounded(&z.re.mag(), 64, crate::scalar::Round::Up)
                    .add_rounded(&z.im.mag(), 64, crate::scalar::Round::Up)
            })
        })
        .max()
        .unwrap_or_else(Dyadic::zero)
}

pub fn perron_pair_with(maps: &[CMatrix<Rational>], opts: &PerronOptions) -> Result<PerronPair> {
    let Some(first) = maps.first() else {
        return Err(CoreError::DimensionMismatch("empty list of matrices".into()));
    };
    let d = first.rows();
    if d == 0 || maps.iter().any(|m| m.shape() != (d, d)) {
        return Err(CoreError::DimensionMismatch("matrices must be square and of equal size".into()));
    }
    let no_vector = || CoreError::NoPositiveEigenvector { remedy: REMEDY.to_string() };

    // Spectral radius zero iff Φ is nilpotent on the d²-dimensional space.
    let adj_q: Vec<_> = maps.iter().map(|m| m.adjoint()).collect();
    let mut p = CMatrix::<Rational>::identity(d);
    for _ in 0..d * d {
        p = apply_map(maps, &adj_q, &p);
        if p.is_zero() {
            return Err(no_vector());
        }
        let tr = p.trace().re;
        p = p.map(|z| z.scale(&tr.recip()));
    }
    let shift_q = apply_map(maps, &adj_q, &CMatrix::identity(d)).trace().re / Rational::from_integer(d.into());

    let ms: Vec<CMatrix<Interval>> = maps.iter().map(lift_complex).collect();
    let adj: Vec<_> = ms.iter().map(|m| m.adjoint()).collect();
    let shift = Interval::from_rational(&shift_q);
    let tol = Dyadic::from_rational(&opts.tolerance, 64, crate::scalar::Round::Down);

    let inv_d = Interval::from_rational(&Rational::new(1.into(), (d as i64).into()));
    let mut y = CMatrix::<Interval>::identity(d).map(|z| z.scale(&inv_d));
    let mut iterations = 0;
    let mut lambda;
    loop {
        let phi = apply_map(&ms, &adj, &y);
        lambda = phi.trace().re / y.trace().re;
        let r = phi.clone() - y.map(|z| z.scale(&lambda));
        if inf_norm_bound(&r) <= tol {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(no_vector());
        }
        iterations += 1;
        let z = phi + y.map(|z| z.scale(&shift));
        let tr = z.trace().re;
        if tr.contains_zero() {
            return Err(no_vector());
        }
        y = collapse(&hermitize(&z.map(|e| e.scale(&tr.recip().expect("nonzero trace")))));
    }
    if lambda.lo().signum() != std::cmp::Ordering::Greater {
        return Err(no_vector());
    }
    let (ymin, _) = min_eigenvalue_bracket(&y, 60);
    if ymin.lo().signum() != std::cmp::Ordering::Greater {
        return Err(no_vector());
    }

    let x = sqrt_pd(&y).ok_or_else(no_vector)?;
    let x2 = x.matmul(&x);
    let lam = Interval::point(lambda.mid(), lambda.precision());
    let residual = inf_norm_bound(&(apply_map(&ms, &adj, &x2) - x2.map(|z| z.scale(&lam))));
    if residual > tol {
        return Err(no_vector());
    }
    let exact = exact_fixed_point(maps, &adj_q, &lam, &y);
    Ok(PerronPair { lambda: lam, x, y: x2, residual, iterations, exact })
}

/// Snap `λ` and `Y` to nearby simple rationals and check `Φ(Y) = λY` exactly.
fn exact_fixed_point(
    maps: &[CMatrix<Rational>],
    adj: &[CMatrix<Rational>],
    lambda: &Interval,
    y: &CMatrix<Interval>,
) -> Option<ExactFixedPoint> {
    let eps = Dyadic::pow2(-60).to_rational();
    let snap = |v: &Interval| {
        let m = v.mid().to_rational();
        simplest_between(&(m.clone() - eps.clone()), &(m + eps.clone()))
    };
    let lq = snap(lambda);
    let yq = y.map(|z| Complex::new(snap(&z.re), snap(&z.im)));
    let tr = yq.trace().re;
    if tr.is_zero() || !yq.is_hermitian() {
        return None;
    }
    let yq = yq.map(|z| z.scale(&tr.recip()));
    if apply_map(maps, adj, &yq) != yq.map(|z| z.scale(&lq)) {
        return None;
    }
    let d = yq.rows();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || yq[(i, j)].is_zero()));
    let x = if diagonal {
        let roots: Option<Vec<Surd>> = (0..d).map(|i| Surd::sqrt_rational(&yq[(i, i)].re)).collect();
        roots.map(|r| CMatrix::diagonal(r.into_iter().map(Complex::real).collect()))
    } else {
        None
    };
    Some(ExactFixedPoint { lambda: lq, y: yq, x })
}

/// Principal square root of a positive-definite Hermitian interval matrix by
/// the Denman–Beavers iteration.
pub fn sqrt_pd(a: &CMatrix<Interval>) -> Option<CMatrix<Interval>> {
    let d = a.rows();
    let half = Interval::from_rational(&Rational::new(1.into(), 2.into()));
    let target = Dyadic::pow2(-(crate::scalar::working_precision() as i64 - 24));
    let mut y = collapse(a);
    let mut z = CMatrix::<Interval>::identity(d);
    for _ in 0..200 {
        let yi = y.inverse()?;
        let zi = z.inverse()?;
        let ny = collapse(&(y + zi).map(|e| e.scale(&half)));
        let nz = collapse(&(z + yi).map(|e| e.scale(&half)));
        y = hermitize(&ny);
        z = nz;
        let err = inf_norm_bound(&(y.matmul(&y) - a.clone()));
        if err <= target {
            return Some(collapse(&y));
        }
    }
    None
}

impl PerronPair {
    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl ExactFixedPoint {
    pub fn is_identity_scaled(&self) -> bool {
        let d = self.y.rows();
        let c = Rational::new(1.into(), (d as i64).into());
        self.y == CMatrix::identity(d).map(|z| z.scale(&c))
    }
}
