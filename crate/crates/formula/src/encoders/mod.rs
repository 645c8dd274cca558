//! One encoder per decision problem, each producing a closed [`Formula`]
//! whose quantifier prefix follows the problem's definition.
//!
//! Shared conventions:
//! * tensor products put the first factor in the most significant index;
//! * `vec` is row-major, so `vec(A X B) = (A ⊗ Bᵀ) vec(X)`;
//! * channels are given by their Choi matrix
//!   `C[(a,i),(b,j)] = T(E_ij)[a,b] / d` (output index first).

mod additivity;
mod birkhoff;
mod distillability;
mod lhv;
mod separability;
mod zero_error;

pub use additivity::encode_additivity;
pub use birkhoff::{encode_birkhoff, natural_of_unitary_conjugation};
pub use distillability::{distillability_form, encode_n_distillable};
pub use lhv::{deterministic_vertex, encode_lhv_distribution, encode_quantum_representation, encode_state_lhv};
pub use separability::encode_separability;
pub use zero_error::encode_zero_error;

use num_traits::{One, Zero};
use qdecide_core::channels::{density_verdict, natural_from_choi, psd_certificate};
use qdecide_core::{CMatrix, Complex, CpVerdict, Matrix, QMatrix, Rational};

use crate::error::{FormulaError, Result};
use crate::formula::{Formula, Norm};
use crate::poly::Poly;

/// Conditional distribution `P(i,j|k,l)` for `n` settings and `m` outcomes
/// per party: row `k·n + l`, column `i·m + j`.
pub type Distribution = Matrix<Rational>;

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemInstance {
    /// `terms` lowers the Carathéodory bound `d^{2n}` (sufficient condition only).
    Separability { rho: QMatrix, d: usize, n: usize, terms: Option<usize> },
    Distillability { rho: QMatrix, d: usize, n: usize },
    LhvDistribution { p: Distribution, n: usize, m: usize },
    StateLhv { rho: QMatrix, d: usize, n: usize, m: usize },
    QuantumRepresentation { p: Distribution, n: usize, m: usize, d: usize },
    /// `terms` lowers the Carathéodory bound `d^{4n}` (sufficient condition only).
    Birkhoff { choi: QMatrix, d: usize, n: usize, terms: Option<usize> },
    ZeroError { choi: QMatrix, d: usize, n: usize, m: usize },
    Additivity { choi: QMatrix, d: usize, p: Norm, d_prime: usize },
}

impl ProblemInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemInstance::Separability { .. } => "separability",
            ProblemInstance::Distillability { .. } => "distillability",
            ProblemInstance::LhvDistribution { .. } => "lhv-distribution",
            ProblemInstance::StateLhv { .. } => "state-lhv",
            ProblemInstance::QuantumRepresentation { .. } => "quantum-representation",
            ProblemInstance::Birkhoff { .. } => "birkhoff",
            ProblemInstance::ZeroError { .. } => "zero-error",
            ProblemInstance::Additivity { .. } => "additivity",
        }
    }

    /// Warnings about weakened encodings.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            ProblemInstance::Separability { d, n, terms: Some(t), .. } if *t < d.pow(2 * *n as u32) => out.push(format!(
                "{t} product terms is below the Caratheodory bound {}; a witness still proves separability but absence of one proves nothing",
                d.pow(2 * *n as u32)
            )),
            ProblemInstance::Birkhoff { d, n, terms: Some(t), .. } if *t < d.pow(4 * *n as u32) => out.push(format!(
                "{t} unitaries is below the Caratheodory bound {}; a witness still proves the property but absence of one proves nothing",
                d.pow(4 * *n as u32)
            )),
            _ => {}
        }
        out
    }
}

/// Runs the encoder matching the instance.
pub fn encode(inst: &ProblemInstance) -> Result<Formula> {
    match inst {
        ProblemInstance::Separability { rho, d, n, terms } => encode_separability(rho, *d, *n, *terms),
        ProblemInstance::Distillability { rho, d, n } => encode_n_distillable(rho, *d, *n),
        ProblemInstance::LhvDistribution { p, n, m } => encode_lhv_distribution(p, *n, *m),
        ProblemInstance::StateLhv { rho, d, n, m } => encode_state_lhv(rho, *d, *n, *m),
        ProblemInstance::QuantumRepresentation { p, n, m, d } => encode_quantum_representation(p, *n, *m, *d),
        ProblemInstance::Birkhoff { choi, d, n, terms } => encode_birkhoff(choi, *d, *n, *terms),
        ProblemInstance::ZeroError { choi, d, n, m } => encode_zero_error(choi, *d, *n, *m),
        ProblemInstance::Additivity { choi, d, p, d_prime } => encode_additivity(choi, *d, *p, *d_prime),
    }
}

fn invalid(msg: impl Into<String>) -> FormulaError {
    FormulaError::InvalidInstance(msg.into())
}

pub(crate) fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(invalid(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Hermitian, unit trace, certified PSD.
pub fn check_density(rho: &QMatrix, dim: usize) -> Result<()> {
    if rho.shape() != (dim, dim) {
        return Err(invalid(format!("state must be {dim}x{dim}, got {}x{}", rho.rows(), rho.cols())));
    }
    match density_verdict(rho) {
        CpVerdict::CertifiedTrue => Ok(()),
        _ => Err(invalid("state is not a density matrix")),
    }
}

/// Choi matrix of a CPTP map on `d×d` matrices.
pub fn check_channel_choi(c: &QMatrix, d: usize) -> Result<()> {
    if c.shape() != (d * d, d * d) {
        return Err(invalid(format!("Choi matrix must be {0}x{0}", d * d)));
    }
    if !c.is_hermitian() || !psd_certificate(c).is_certified_true() {
        return Err(invalid("Choi matrix is not positive semidefinite"));
    }
    let target = Rational::new(One::one(), (d as i64).into());
    for i in 0..d {
        for j in 0..d {
            let s = (0..d).fold(Complex::<Rational>::zero(), |acc, a| acc + c[(a * d + i, a * d + j)].clone());
            let want = if i == j { target.clone() } else { Rational::zero() };
            if s != Complex::real(want) {
                return Err(invalid("channel is not trace preserving"));
            }
        }
    }
    Ok(())
}

/// `P(i,j|k,l) ≥ 0` and `Σ_ij P(i,j|k,l) = 1` for every setting pair.
pub fn check_distribution(p: &Distribution, n: usize, m: usize) -> Result<()> {
    positive("n", n)?;
    positive("m", m)?;
    if p.shape() != (n * n, m * m) {
        return Err(invalid(format!("distribution must be {}x{}", n * n, m * m)));
    }
    for r in 0..n * n {
        let row = p.row(r);
        if row.iter().any(|x| x < &Rational::zero()) {
            return Err(invalid("negative probability"));
        }
        if row.iter().cloned().fold(Rational::zero(), |a, b| a + b) != Rational::one() {
            return Err(invalid(format!("probabilities for setting pair {r} do not sum to 1")));
        }
    }
    Ok(())
}

pub(crate) fn kron_power(m: &QMatrix, n: usize) -> QMatrix {
    (1..n).fold(m.clone(), |acc, _| acc.kron(m))
}

/// Natural representation of `T^{⊗n}` on `d^n × d^n` matrices from the Choi
/// matrix of `T`.
pub fn tensor_power_natural(choi: &QMatrix, d: usize, n: usize) -> QMatrix {
    let s = natural_from_choi(choi, d);
    let dn = d.pow(n as u32);
    let digits = |mut x: usize| {
        let mut v = vec![0; n];
        for k in (0..n).rev() {
            v[k] = x % d;
            x /= d;
        }
        v
    };
    CMatrix::from_fn(dn * dn, dn * dn, |r, c| {
        let (a, b) = (digits(r / dn), digits(r % dn));
        let (i, j) = (digits(c / dn), digits(c % dn));
        (0..n).fold(Complex::one(), |acc, k| acc * s[(a[k] * d + b[k], i[k] * d + j[k])].clone())
    })
}

/// `T(X)` for a symbolic `X`, with `T` given by its natural representation.
pub(crate) fn apply_natural(nat: &QMatrix, x: &CMatrix<Poly>) -> CMatrix<Poly> {
    let dim = x.rows();
    let mut out = CMatrix::<Poly>::zeros(dim, dim);
    for r in 0..dim * dim {
        let mut acc = Complex::<Poly>::zero();
        for c in 0..dim * dim {
            let s = &nat[(r, c)];
            if s.is_zero() {
                continue;
            }
            let v = &x[(c / dim, c % dim)];
            acc = acc + Complex::new(poly_c(&s.re), poly_c(&s.im)) * v.clone();
        }
        out[(r / dim, r % dim)] = acc;
    }
    out
}

pub(crate) fn poly_c(q: &Rational) -> Poly {
    Poly::constant(q.clone())
}

pub(crate) fn sum_polys(it: impl IntoIterator<Item = Poly>) -> Poly {
    it.into_iter().fold(Poly::zero(), |a, b| a + b)
}

/// Reorders the tensor factors of a square operator: factor `perm[k]` of
/// the input becomes factor `k` of the output.
pub(crate) fn permute_subsystems(m: &QMatrix, dims: &[usize], perm: &[usize]) -> QMatrix {
    let n = m.rows();
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map = |mut idx: usize| {
        let mut out_digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out_digits[k] = idx % out_dims[k];
            idx /= out_dims[k];
        }
        let mut in_digits = vec![0; dims.len()];
        for (k, &p) in perm.iter().enumerate() {
            in_digits[p] = out_digits[k];
        }
        in_digits.iter().zip(dims).fold(0, |acc, (x, d)| acc * d + x)
    };
    CMatrix::from_fn(n, n, |r, c| m[(map(r), map(c))].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn permutation_swaps_factors() {
        let a = QMatrix::from_rational(&Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(4, 1)]]));
        let b = QMatrix::from_rational(&Matrix::from_rows(vec![vec![q(5, 1), q(0, 1)], vec![q(0, 1), q(7, 1)]]));
        assert_eq!(permute_subsystems(&a.kron(&b), &[2, 2], &[1, 0]), b.kron(&a));
    }

    #[test]
    fn tensor_power_of_identity_channel_is_identity() {
        // identity channel Choi = |Ω⟩⟨Ω|
        let d = 2;
        let mut c = QMatrix::zeros(4, 4);
        for i in 0..d {
            for j in 0..d {
                c[(i * d + i, j * d + j)] = Complex::real(q(1, 2));
            }
        }
        assert_eq!(tensor_power_natural(&c, d, 2), QMatrix::identity(16));
    }
}
