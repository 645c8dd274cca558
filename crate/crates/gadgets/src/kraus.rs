//! Similarity normalization of a matrix family to Kraus form.
//!
//! With `Φ(Y) = Σ M_i Y M_i† = λY`, `Y = X² ≻ 0`, the family
//! `M_i' = X⁻¹ M_i X / √λ` satisfies `Σ M_i' M_i'† = 𝟙`. Similarity leaves
//! zero products alone, so both families are mortal together.

use qdecide_core::scalar::Field;
use qdecide_core::perron::{inf_norm_bound, perron_pair};
use qdecide_core::{CMatrix, Complex, Dyadic, IMatrix, Interval, QMatrix, SMatrix, Surd};

use crate::error::{GadgetError, Result};

#[derive(Clone, Debug)]
pub struct NormalizedFamily {
    /// `M_i'` enclosed in intervals.
    pub matrices: Vec<IMatrix>,
    /// `M_i'` over the multiquadratic field, when the fixed point is exact
    /// and diagonal.
    pub exact: Option<Vec<SMatrix>>,
    pub lambda: Interval,
    /// Certified bound on `‖Σ M_i' M_i'† - 𝟙‖_∞` for the interval family.
    pub residual: Dyadic,
}

impl NormalizedFamily {
    /// Zero residual, proved in exact arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

fn gram_sum<T: qdecide_core::RealField>(ms: &[CMatrix<T>]) -> CMatrix<T> {
    let d = ms[0].rows();
    ms.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m.matmul(&m.adjoint()))
}

pub fn kraus_normalize(ms: &[QMatrix]) -> Result<NormalizedFamily> {
    let pair = perron_pair(ms)?;
    let x_inv = pair
        .x
        .inverse()
        .ok_or_else(|| GadgetError::NotCertified("invertibility of the Perron square root".into()))?;
    let s = pair
        .lambda
        .sqrt()
        .and_then(|r| r.recip())
        .ok_or_else(|| GadgetError::NotCertified("positivity of the Perron eigenvalue".into()))?;
    let matrices: Vec<IMatrix> = ms
        .iter()
        .map(|m| {
            let mi = qdecide_core::matrix::lift_complex::<Interval>(m);
            x_inv.matmul(&mi).matmul(&pair.x).map(|z| z.scale(&s))
        })
        .collect();
    let d = ms[0].rows();
    let residual = inf_norm_bound(&(gram_sum(&matrices) - IMatrix::identity(d)));

    let exact = pair.exact.as_ref().and_then(|fp| {
        let x = fp.x.as_ref()?;
        let x_inv = x.inverse()?;
        let s = Surd::sqrt_rational(&fp.lambda)?.try_inv()?;
        let out: Vec<SMatrix> = ms
            .iter()
            .map(|m| {
                let ms = qdecide_core::matrix::lift_complex::<Surd>(m);
                x_inv.matmul(&ms).matmul(x).map(|z| z.scale(&s))
            })
            .collect();
        (gram_sum(&out) == SMatrix::identity(d)).then_some(out)
    });
    Ok(NormalizedFamily { matrices, exact, lambda: pair.lambda, residual })
}

/// Exact check that a word annihilates a family: `M_{i1}⋯M_{in} = 0`.
pub fn annihilates<T: qdecide_core::RealField>(ms: &[CMatrix<T>], word: &[usize]) -> bool {
    let d = ms[0].rows();
    let p = word.iter().fold(CMatrix::<T>::identity(d), |acc, &i| acc.matmul(&ms[i - 1]));
    let zero = p.iter().all(|z| z.re.is_zero() && z.im.is_zero());
    zero
}

/// Interval version: every entry of the product encloses zero.
pub fn interval_annihilates(ms: &[IMatrix], word: &[usize]) -> bool {
    let d = ms[0].rows();
    let p = word.iter().fold(IMatrix::identity(d), |acc, &i| acc.matmul(&ms[i - 1]));
    let zero = p.iter().all(|z: &Complex<Interval>| z.re.contains_zero() && z.im.contains_zero());
    zero
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdecide_core::{Matrix, Rational};

    fn q(rows: Vec<Vec<i64>>) -> QMatrix {
        QMatrix::from_rational(&Matrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(|v| Rational::from_integer(v.into())).collect()).collect(),
        ))
    }

    #[test]
    fn identity_family_is_fixed() {
        let n = kraus_normalize(&[q(vec![vec![1, 0], vec![0, 1]])]).unwrap();
        assert_eq!(n.exact.unwrap(), vec![SMatrix::identity(2)]);
        assert!(n.residual < Dyadic::pow2(-200));
    }

    #[test]
    fn nilpotent_singleton_has_no_vector() {
        let r = kraus_normalize(&[q(vec![vec![0, 1], vec![0, 0]])]);
        assert!(matches!(r, Err(GadgetError::Core(qdecide_core::CoreError::NoPositiveEigenvector { .. }))));
    }

    #[test]
    fn diagonal_pair_from_the_perron_example() {
        let fam = [q(vec![vec![1, 0], vec![0, 0]]), q(vec![vec![0, 0], vec![0, 1]])];
        let n = kraus_normalize(&fam).unwrap();
        // Y = 𝟙/2, λ = 1: the family is already normalized
        let exact = n.exact.expect("rational diagonal fixed point");
        assert_eq!(exact[0], qdecide_core::matrix::lift_complex::<Surd>(&fam[0]));
        assert_eq!(gram_sum(&exact), SMatrix::identity(2));
    }

    #[test]
    fn surd_fixed_point() {
        // N = E12, P = diag(1, 2): Φ(diag(a, b)) = diag(a + b, 4b), so λ = 4 and
        // Y = diag(1/4, 3/4), X = diag(1/2, √3/2)
        let fam = [q(vec![vec![0, 1], vec![0, 0]]), q(vec![vec![1, 0], vec![0, 2]])];
        let n = kraus_normalize(&fam).unwrap();
        let exact = n.exact.expect("diagonal fixed point");
        assert_eq!(gram_sum(&exact), SMatrix::identity(2));
        assert!(n.residual < Dyadic::pow2(-67));
        assert!(annihilates(&exact, &[1, 1]));
        assert!(!annihilates(&exact, &[1, 2]));
        assert!(interval_annihilates(&n.matrices, &[1, 1]));
    }
}
