//! Orthonormal Hermitian operator bases with `H_1 = 𝟙/√d`.

use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{Complex, RealField};

/// `d²` Hermitian `d×d` matrices with `tr[H_i H_j] = δ_ij` and
/// `H_1 = 𝟙/√d`; optionally `H_2 = (𝟙 - dψ)/√(d² - d)` for an anchor
/// projector `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBasis<T> {
    d: usize,
    elems: Vec<CMatrix<T>>,
    psi: Option<CMatrix<T>>,
    delta1: Option<T>,
}

/// Target of the aligned construction: `tr[φ H_{i+2}] = δ₁ x_i`.
#[derive(Clone, Copy, Debug)]
pub struct Alignment<'a, T> {
    pub phi: &'a CMatrix<T>,
    pub x: &'a [T],
}

fn real<T: RealField>(x: T) -> Complex<T> {
    Complex::real(x)
}

fn sqrt<T: RealField>(x: &T) -> Result<T> {
    x.try_sqrt().ok_or(CoreError::SqrtUnavailable)
}

/// Traceless generalized Gell-Mann matrices, unnormalized: diagonal ones,
/// then symmetric and antisymmetric off-diagonal pairs.
fn gell_mann_raw<T: RealField>(d: usize) -> Vec<(CMatrix<T>, T)> {
    let mut out = Vec::with_capacity(d * d - 1);
    for l in 1..d {
        let mut m = CMatrix::<T>::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = Complex::one();
        }
        m[(l, l)] = real(-T::from_i64(l as i64));
        out.push((m, T::from_i64((l * (l + 1)) as i64)));
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::<T>::zeros(d, d);
            m[(j, k)] = Complex::one();
            m[(k, j)] = Complex::one();
            out.push((m, T::from_i64(2)));
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::<T>::zeros(d, d);
            m[(j, k)] = Complex::new(T::zero(), -T::one());
            m[(k, j)] = Complex::new(T::zero(), T::one());
            out.push((m, T::from_i64(2)));
        }
    }
    out
}

fn scale<T: RealField>(m: &CMatrix<T>, k: &T) -> CMatrix<T> {
    m.map(|z| z.scale(k))
}

fn check_projector<T: RealField>(p: &CMatrix<T>, d: usize) -> Result<()> {
    if p.shape() != (d, d) {
        return Err(CoreError::DimensionMismatch(format!("projector must be {d}x{d}")));
    }
    if T::EXACT && (!p.is_hermitian() || p.matmul(p) != *p || p.trace() != Complex::one()) {
        return Err(CoreError::DimensionMismatch("expected a rank-one projector".into()));
    }
    Ok(())
}

impl<T: RealField> HermitianBasis<T> {
    /// Normalized generalized Gell-Mann basis.
    pub fn gell_mann(d: usize) -> Result<Self> {
        Self::new(d, None, None)
    }

    pub fn new(d: usize, psi: Option<&CMatrix<T>>, align: Option<Alignment<'_, T>>) -> Result<Self> {
        if d < 2 {
            return Err(CoreError::DimensionTooSmall);
        }
        let dd = T::from_i64(d as i64);
        let mut elems = vec![scale(&CMatrix::identity(d), &sqrt(&dd)?.try_inv().expect("√d > 0"))];
        let raw = gell_mann_raw::<T>(d);
        match psi {
            None => {
                if align.is_some() {
                    return Err(CoreError::DegenerateAlignment);
                }
                for (m, n2) in &raw {
                    let inv = sqrt(n2)?.try_inv().expect("positive norm");
                    elems.push(scale(m, &inv));
                }
                return Ok(HermitianBasis { d, elems, psi: None, delta1: None });
            }
            Some(p) => {
                check_projector(p, d)?;
                let norm = sqrt(&T::from_i64((d * d - d) as i64))?;
                let h2 = CMatrix::identity(d) - scale(p, &dd);
                elems.push(scale(&h2, &norm.try_inv().expect("positive")));
            }
        }
        // Gram-Schmidt over the Gell-Mann candidates, always taking the one
        // with the largest residual next.
        let mut pending: Vec<CMatrix<T>> = raw.into_iter().map(|(m, _)| m).collect();
        while elems.len() < d * d {
            let mut best: Option<(usize, CMatrix<T>, T, f64)> = None;
            for (idx, g) in pending.iter().enumerate() {
                let mut r = g.clone();
                for e in &elems {
                    let c = e.trace_product_re(g);
                    r = r - scale(e, &c);
                }
                let n2 = r.trace_product_re(&r);
                let h = n2.magnitude_hint();
                if best.as_ref().is_none_or(|b| h > b.3) {
                    best = Some((idx, r, n2, h));
                }
            }
            let (idx, r, n2, _) = best.expect("candidates span the traceless space");
            pending.remove(idx);
            let inv = sqrt(&n2)?.try_inv().ok_or(CoreError::SqrtUnavailable)?;
            elems.push(scale(&r, &inv));
        }
        let mut basis = HermitianBasis { d, elems, psi: psi.cloned(), delta1: None };
        if let Some(a) = align {
            basis.align(a)?;
        }
        Ok(basis)
    }

    /// Rotates `H_3..H_{d²}` so that `tr[φ H_{i+2}] = δ₁ x_i`.
    fn align(&mut self, a: Alignment<'_, T>) -> Result<()> {
        let d = self.d;
        let n = d * d - 2;
        check_projector(a.phi, d)?;
        if a.x.len() != n {
            return Err(CoreError::DimensionMismatch(format!("alignment vector must have length {n}")));
        }
        let psi = self.psi.as_ref().expect("aligned bases are anchored");
        let c = psi.trace_product_re(a.phi);
        let dd = T::from_i64(d as i64);
        let one_minus = T::one() - dd.clone() * c;
        let r = T::one() - dd.try_inv().unwrap()
            - one_minus.clone() * one_minus / T::from_i64((d * d - d) as i64);
        if r.sign() != Some(std::cmp::Ordering::Greater) {
            return Err(CoreError::DegenerateAlignment);
        }
        let x2 = a.x.iter().fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
        if x2.sign() != Some(std::cmp::Ordering::Greater) {
            return Err(CoreError::ZeroVector);
        }
        let sr = sqrt(&r)?;
        let nx = sqrt(&x2)?;
        let sr_inv = sr.try_inv().expect("r > 0");
        let nx_inv = nx.try_inv().expect("x ≠ 0");
        let ahat: Vec<T> =
            self.elems[2..].iter().map(|e| a.phi.trace_product_re(e) * sr_inv.clone()).collect();
        let xhat: Vec<T> = a.x.iter().map(|v| v.clone() * nx_inv.clone()).collect();
        let minus: Vec<T> = ahat.iter().zip(&xhat).map(|(p, q)| p.clone() - q.clone()).collect();
        let plus: Vec<T> = ahat.iter().zip(&xhat).map(|(p, q)| p.clone() + q.clone()).collect();
        let norm2 = |v: &[T]| v.iter().fold(T::zero(), |acc, t| acc + t.clone() * t.clone());
        let (nm, np) = (norm2(&minus), norm2(&plus));
        let (v, vv, flip) = if nm.magnitude_hint() >= np.magnitude_hint() {
            (minus, nm, false)
        } else {
            (plus, np, true)
        };
        // Householder Q = ±(I - 2vvᵀ/vᵀv) with Qᵀâ = x̂.
        let two_over = T::from_i64(2) * vv.try_inv().ok_or(CoreError::DegenerateAlignment)?;
        let q = Matrix::<T>::from_fn(n, n, |i, j| {
            let id = if i == j { T::one() } else { T::zero() };
            let h = id - two_over.clone() * v[i].clone() * v[j].clone();
            if flip {
                -h
            } else {
                h
            }
        });
        let old: Vec<CMatrix<T>> = self.elems.drain(2..).collect();
        for i in 0..n {
            let mut b = CMatrix::<T>::zeros(d, d);
            for (j, e) in old.iter().enumerate() {
                b = b + scale(e, &q[(j, i)]);
            }
            self.elems.push(b);
        }
        self.delta1 = Some(sr * nx_inv);
        Ok(())
    }

    /// Basis `{H_i ⊗ K_j}` of the tensor product, `i`-major.
    pub fn product(&self, o: &Self) -> Self {
        let mut elems = Vec::with_capacity(self.elems.len() * o.elems.len());
        for h in &self.elems {
            for k in &o.elems {
                elems.push(h.kron(k));
            }
        }
        HermitianBasis { d: self.d * o.d, elems, psi: None, delta1: None }
    }
}

impl<T: RealField> HermitianBasis<T> {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix<T>] {
        &self.elems
    }

    pub fn element(&self, i: usize) -> &CMatrix<T> {
        &self.elems[i]
    }

    pub fn psi(&self) -> Option<&CMatrix<T>> {
        self.psi.as_ref()
    }

    /// Alignment factor `δ₁`, when the basis was built aligned.
    pub fn delta1(&self) -> Option<&T> {
        self.delta1.as_ref()
    }

    /// Coordinates `tr[H_i X]`; real for Hermitian `X`.
    pub fn coords(&self, x: &CMatrix<T>) -> Vec<Complex<T>> {
        self.elems.iter().map(|h| h.trace_product(x)).collect()
    }

    pub fn real_coords(&self, x: &CMatrix<T>) -> Vec<T> {
        self.elems.iter().map(|h| h.trace_product_re(x)).collect()
    }

    pub fn from_coords(&self, v: &[T]) -> CMatrix<T> {
        assert_eq!(v.len(), self.elems.len());
        let mut m = CMatrix::zeros(self.d, self.d);
        for (h, c) in self.elems.iter().zip(v) {
            if !c.is_zero() {
                m = m + scale(h, c);
            }
        }
        m
    }

    pub fn from_complex_coords(&self, v: &[Complex<T>]) -> CMatrix<T> {
        assert_eq!(v.len(), self.elems.len());
        let mut m = CMatrix::zeros(self.d, self.d);
        for (h, c) in self.elems.iter().zip(v) {
            if !c.is_zero() {
                m = m + h.map(|z| z.clone() * c.clone());
            }
        }
        m
    }

    /// Gram matrix `tr[H_i H_j]`.
    pub fn gram(&self) -> Matrix<T> {
        let n = self.elems.len();
        Matrix::from_fn(n, n, |i, j| self.elems[i].trace_product_re(&self.elems[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Surd};

    #[test]
    fn gell_mann_is_orthonormal_exactly() {
        for d in 2..=4 {
            let b = HermitianBasis::<Surd>::gell_mann(d).unwrap();
            assert_eq!(b.len(), d * d);
            assert_eq!(b.gram(), Matrix::identity(d * d));
            for h in &b.elements()[1..] {
                assert!(h.trace().is_zero());
                assert!(h.is_hermitian());
            }
        }
        assert!(matches!(HermitianBasis::<Rational>::gell_mann(2), Err(CoreError::SqrtUnavailable)));
    }

    #[test]
    fn anchored_second_element() {
        let psi = CMatrix::<Surd>::unit(2, 2, 0, 0);
        let b = HermitianBasis::new(2, Some(&psi), None).unwrap();
        let half_root2 = Surd::sqrt_rational(&Rational::new(1.into(), 2.into())).unwrap();
        let want = CMatrix::diagonal(vec![Complex::real(-half_root2.clone()), Complex::real(half_root2)]);
        assert_eq!(b.element(1), &want);
        assert_eq!(b.gram(), Matrix::identity(4));
    }

    #[test]
    fn aligned_equal_projectors_degenerate() {
        let psi = CMatrix::<Surd>::unit(2, 2, 0, 0);
        let x = vec![Surd::one(), Surd::zero()];
        let r = HermitianBasis::new(2, Some(&psi), Some(Alignment { phi: &psi, x: &x }));
        assert!(matches!(r, Err(CoreError::DegenerateAlignment)));
    }
}
