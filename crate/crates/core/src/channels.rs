//! Linear maps on `M_d(ℂ)`: transfer matrices, Choi matrices, composition,
//! and the state-level helpers built on them.
//!
//! Conventions:
//! * transfer matrix `T̂_ij = tr[H_i T(H_j)]` in a [`HermitianBasis`];
//! * Choi matrix `C = (T ⊗ id)(|Ω⟩⟨Ω|)` with `|Ω⟩ = Σ_i |ii⟩/√d`, so
//!   `C[(a,i),(b,j)] = T(E_ij)[a,b] / d` with the output index first;
//! * `compose(T₁, T₂)` applies `T₂` first.

use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use crate::basis::HermitianBasis;
use crate::eigen::{min_eigenvalue_bracket, DEFAULT_WIDTH_BITS};
use crate::error::{CoreError, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{Complex, Interval, RealField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CpVerdict {
    CertifiedTrue,
    CertifiedFalse,
    Indeterminate(Interval),
}

impl CpVerdict {
    pub fn is_certified_true(&self) -> bool {
        matches!(self, CpVerdict::CertifiedTrue)
    }
}

/// A linear map on `d×d` matrices, stored by its transfer matrix.
#[derive(Clone, Debug)]
pub struct Channel<T> {
    basis: Arc<HermitianBasis<T>>,
    transfer: Matrix<T>,
    choi: OnceLock<CMatrix<T>>,
}

impl<T: RealField> PartialEq for Channel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.transfer == o.transfer && (Arc::ptr_eq(&self.basis, &o.basis) || self.basis == o.basis)
    }
}

impl<T: RealField> Channel<T> {
    pub fn from_transfer(basis: Arc<HermitianBasis<T>>, transfer: Matrix<T>) -> Result<Self> {
        let n = basis.len();
        if transfer.shape() != (n, n) {
            return Err(CoreError::DimensionMismatch(format!("transfer matrix must be {n}x{n}")));
        }
        Ok(Channel { basis, transfer, choi: OnceLock::new() })
    }

    /// Tabulates an arbitrary linear map on the basis.
    pub fn from_map(basis: Arc<HermitianBasis<T>>, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> Self {
        let n = basis.len();
        let images: Vec<CMatrix<T>> = basis.elements().iter().map(&f).collect();
        let transfer =
            Matrix::from_fn(n, n, |i, j| basis.element(i).trace_product_re(&images[j]));
        Channel { basis, transfer, choi: OnceLock::new() }
    }

    /// `X ↦ Σ K X K†`.
    pub fn from_kraus(basis: Arc<HermitianBasis<T>>, kraus: &[CMatrix<T>]) -> Result<Self> {
        let d = basis.dim();
        if kraus.iter().any(|k| k.shape() != (d, d)) {
            return Err(CoreError::DimensionMismatch("Kraus operators must be d×d".into()));
        }
        let adj: Vec<CMatrix<T>> = kraus.iter().map(Matrix::adjoint).collect();
        Ok(Self::from_map(basis, |x| {
            kraus.iter().zip(&adj).fold(CMatrix::zeros(d, d), |acc, (k, ka)| acc + k.matmul(x).matmul(ka))
        }))
    }

    /// Inverse of [`Channel::choi`].
    pub fn from_choi(choi: &CMatrix<T>, basis: Arc<HermitianBasis<T>>) -> Result<Self> {
        let d = basis.dim();
        if choi.shape() != (d * d, d * d) {
            return Err(CoreError::DimensionMismatch(format!("Choi matrix must be {0}x{0}", d * d)));
        }
        let c = choi.clone();
        let mut ch = Self::from_map(basis, |x| apply_choi(&c, d, x));
        ch.choi = OnceLock::from(choi.clone());
        Ok(ch)
    }

    pub fn identity(basis: Arc<HermitianBasis<T>>) -> Self {
        let n = basis.len();
        Channel { basis, transfer: Matrix::identity(n), choi: OnceLock::new() }
    }

    /// `X ↦ tr[X] 𝟙/d`.
    pub fn depolarizing(basis: Arc<HermitianBasis<T>>) -> Self {
        let n = basis.len();
        Channel { basis, transfer: Matrix::unit(n, n, 0, 0), choi: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Arc<HermitianBasis<T>> {
        &self.basis
    }

    pub fn transfer(&self) -> &Matrix<T> {
        &self.transfer
    }

    fn image_of_unit(&self, i: usize, j: usize) -> CMatrix<T> {
        // coords of E_ij are tr[H_k E_ij] = H_k[j][i]
        let u: Vec<Complex<T>> = self.basis.elements().iter().map(|h| h[(j, i)].clone()).collect();
        let tc = self.transfer.map(|t| Complex::real(t.clone()));
        let v = tc.mul_vec(&u);
        self.basis.from_complex_coords(&v)
    }

    pub fn choi(&self) -> &CMatrix<T> {
        self.choi.get_or_init(|| {
            let d = self.dim();
            let inv_d = Complex::real(T::from_i64(d as i64).try_inv().expect("d ≥ 1"));
            let mut c = CMatrix::zeros(d * d, d * d);
            for i in 0..d {
                for j in 0..d {
                    let img = self.image_of_unit(i, j);
                    for a in 0..d {
                        for b in 0..d {
                            c[(a * d + i, b * d + j)] = img[(a, b)].clone() * inv_d.clone();
                        }
                    }
                }
            }
            c
        })
    }

    /// Natural representation `S` with `vec(T(X)) = S vec(X)`, row-major
    /// vectorization: `S[(a,b),(i,j)] = d·C[(a,i),(b,j)]`.
    pub fn natural(&self) -> CMatrix<T> {
        natural_from_choi(self.choi(), self.dim())
    }

    /// `T(X)` through the transfer matrix.
    pub fn apply(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_operand(x)?;
        let u = self.basis.coords(x);
        let tc = self.transfer.map(|t| Complex::real(t.clone()));
        Ok(self.basis.from_complex_coords(&tc.mul_vec(&u)))
    }

    /// `T(X)` through the Choi matrix, independent of the basis.
    pub fn apply_via_choi(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_operand(x)?;
        Ok(apply_choi(self.choi(), self.dim(), x))
    }

    fn check_operand(&self, x: &CMatrix<T>) -> Result<()> {
        let d = self.dim();
        if x.shape() != (d, d) {
            return Err(CoreError::DimensionMismatch(format!("operand must be {d}x{d}")));
        }
        Ok(())
    }

    /// First `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && self.basis != other.basis {
            return Err(CoreError::BasisMismatch);
        }
        Self::from_transfer(self.basis.clone(), self.transfer.matmul(&other.transfer))
    }

    /// `T₁ ⊗ T₂` in the product basis.
    pub fn tensor(&self, other: &Self) -> Self {
        let basis = Arc::new(self.basis.product(&other.basis));
        Channel { basis, transfer: self.transfer.kron(&other.transfer), choi: OnceLock::new() }
    }

    /// First transfer row equals `(1, 0, …, 0)`.
    pub fn is_trace_preserving(&self) -> bool {
        self.transfer.row(0).iter().enumerate().all(|(j, t)| {
            if j == 0 {
                t.is_one()
            } else {
                t.is_zero()
            }
        })
    }

    /// First transfer column equals `(1, 0, …, 0)ᵀ`, i.e. `T(𝟙) = 𝟙`.
    pub fn is_unital(&self) -> bool {
        (0..self.transfer.rows()).all(|i| {
            let t = &self.transfer[(i, 0)];
            if i == 0 {
                t.is_one()
            } else {
                t.is_zero()
            }
        })
    }

    pub fn is_completely_positive(&self) -> CpVerdict {
        psd_certificate(self.choi())
    }
}

/// Three-valued PSD certificate from the smallest-eigenvalue bracket.
pub fn psd_certificate<T: RealField>(h: &CMatrix<T>) -> CpVerdict {
    let (bracket, _) = min_eigenvalue_bracket(h, DEFAULT_WIDTH_BITS);
    if bracket.lo().signum() != std::cmp::Ordering::Less {
        CpVerdict::CertifiedTrue
    } else if bracket.hi().signum() != std::cmp::Ordering::Greater {
        CpVerdict::CertifiedFalse
    } else {
        CpVerdict::Indeterminate(bracket)
    }
}

/// `T(X)[a,b] = d·Σ_ij C[(a,i),(b,j)] X[i,j]`.
pub fn apply_choi<T: RealField>(c: &CMatrix<T>, d: usize, x: &CMatrix<T>) -> CMatrix<T> {
    let dd = Complex::real(T::from_i64(d as i64));
    CMatrix::from_fn(d, d, |a, b| {
        let mut acc = Complex::zero();
        for i in 0..d {
            for j in 0..d {
                let xij = &x[(i, j)];
                if xij.is_zero() {
                    continue;
                }
                acc = acc + c[(a * d + i, b * d + j)].clone() * xij.clone();
            }
        }
        acc * dd.clone()
    })
}

pub fn natural_from_choi<T: RealField>(c: &CMatrix<T>, d: usize) -> CMatrix<T> {
    let dd = Complex::real(T::from_i64(d as i64));
    CMatrix::from_fn(d * d, d * d, |r, s| {
        let (a, b) = (r / d, r % d);
        let (i, j) = (s / d, s % d);
        c[(a * d + i, b * d + j)].clone() * dd.clone()
    })
}

/// Choi matrix of `X ↦ Σ K X K†` without going through a basis.
pub fn choi_of_kraus<T: RealField>(kraus: &[CMatrix<T>], d: usize) -> CMatrix<T> {
    let inv_d = Complex::real(T::from_i64(d as i64).try_inv().expect("d ≥ 1"));
    let mut c = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let e = CMatrix::<T>::unit(d, d, i, j);
            let img = kraus
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, k| acc + k.matmul(&e).matmul(&k.adjoint()));
            for a in 0..d {
                for b in 0..d {
                    c[(a * d + i, b * d + j)] = img[(a, b)].clone() * inv_d.clone();
                }
            }
        }
    }
    c
}

/// Partial transpose of the subsystems flagged in `transpose`, for an
/// operator on `⊗_k ℂ^{dims[k]}` with the first factor most significant.
pub fn partial_transpose<T: RealField>(
    rho: &CMatrix<T>,
    dims: &[usize],
    transpose: &[bool],
) -> Result<CMatrix<T>> {
    let n: usize = dims.iter().product();
    if dims.len() != transpose.len() || rho.shape() != (n, n) || dims.contains(&0) {
        return Err(CoreError::BadGrouping(format!(
            "operator of shape {:?} does not match subsystem dimensions {:?}",
            rho.shape(),
            dims
        )));
    }
    let split = |mut idx: usize| {
        let mut digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = idx % dims[k];
            idx /= dims[k];
        }
        digits
    };
    let join = |digits: &[usize]| digits.iter().zip(dims).fold(0, |acc, (x, d)| acc * d + x);
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let mut rd = split(r);
        let mut cd = split(c);
        for k in 0..dims.len() {
            if transpose[k] {
                std::mem::swap(&mut rd[k], &mut cd[k]);
            }
        }
        rho[(join(&rd), join(&cd))].clone()
    }))
}

/// Transpose of the first factor of `ℂ^{d_a} ⊗ ℂ^{d_b}`.
pub fn partial_transpose_first<T: RealField>(rho: &CMatrix<T>, d_a: usize, d_b: usize) -> Result<CMatrix<T>> {
    partial_transpose(rho, &[d_a, d_b], &[true, false])
}

/// `tr[φ ρ]` for a rank-one projector `φ`.
pub fn fidelity_overlap<T: RealField>(phi: &CMatrix<T>, rho: &CMatrix<T>) -> Result<T> {
    if phi.shape() != rho.shape() {
        return Err(CoreError::DimensionMismatch("overlap of differently sized operators".into()));
    }
    Ok(phi.trace_product_re(rho))
}

/// `|v⟩⟨v|`.
pub fn projector<T: RealField>(v: &[Complex<T>]) -> CMatrix<T> {
    let n = v.len();
    CMatrix::from_fn(n, n, |i, j| v[i].clone() * crate::scalar::Conj::conj(&v[j]))
}

/// Certified density-matrix check: Hermitian, unit trace, PSD.
pub fn density_verdict<T: RealField>(rho: &CMatrix<T>) -> CpVerdict {
    if !rho.is_square() {
        return CpVerdict::CertifiedFalse;
    }
    if T::EXACT && (!rho.is_hermitian() || !rho.trace().re.is_one()) {
        return CpVerdict::CertifiedFalse;
    }
    if !T::EXACT {
        let tr = rho.trace().re - T::one();
        if tr.nonneg() != Some(true) || (-tr).nonneg() != Some(true) {
            return CpVerdict::Indeterminate(rho.trace().re.enclosure(64));
        }
    }
    psd_certificate(rho)
}
