use num_traits::Zero;
use qdecide_core::channels::natural_from_choi;
use qdecide_core::{CMatrix, Complex, QMatrix};

use super::{apply_natural, check_channel_choi, poly_c, positive};
use crate::error::{FormulaError, Result};
use crate::formula::{poly_identity, Body, Domain, FieldKind, Formula, FormulaBuilder, MatrixVar, Norm, Quant};
use crate::membership::psd_minors;
use crate::poly::Poly;

fn scalar(v: &MatrixVar) -> Poly {
    v.entry(0, 0).re
}

/// `T'(X)[a,b] = d'·Σ_ij C'[(a,i),(b,j)] X[i,j]` for a symbolic Choi matrix.
fn apply_symbolic_choi(c: &CMatrix<Poly>, d: usize, x: &CMatrix<Poly>) -> CMatrix<Poly> {
    let k = Complex::real(Poly::from_i64(d as i64));
    CMatrix::from_fn(d, d, |a, b| {
        let mut acc = Complex::<Poly>::zero();
        for i in 0..d {
            for j in 0..d {
                acc = acc + c[(a * d + i, b * d + j)].clone() * x[(i, j)].clone();
            }
        }
        acc * k.clone()
    })
}

/// `(T ⊗ T')(X)` with `T` given by its natural representation `s` on
/// `d×d` and `T'` by a symbolic Choi matrix on `d'×d'`.
fn apply_product(s: &QMatrix, d: usize, c: &CMatrix<Poly>, dp: usize, x: &CMatrix<Poly>) -> CMatrix<Poly> {
    let n = d * dp;
    let k = Complex::real(Poly::from_i64(dp as i64));
    CMatrix::from_fn(n, n, |r, col| {
        let (a, ap) = (r / dp, r % dp);
        let (b, bp) = (col / dp, col % dp);
        let mut acc = Complex::<Poly>::zero();
        for i in 0..d {
            for j in 0..d {
                let sv = &s[(a * d + b, i * d + j)];
                if sv.is_zero() {
                    continue;
                }
                let sv = Complex::new(poly_c(&sv.re), poly_c(&sv.im));
                let mut inner = Complex::<Poly>::zero();
                for ip in 0..dp {
                    for jp in 0..dp {
                        inner = inner + c[(ap * dp + ip, bp * dp + jp)].clone() * x[(i * dp + ip, j * dp + jp)].clone();
                    }
                }
                acc = acc + sv * inner;
            }
        }
        acc * k.clone()
    })
}

fn shifted(t: &Poly, a: &CMatrix<Poly>) -> CMatrix<Poly> {
    let n = a.rows();
    poly_identity(n).map(|z| Complex::new(&z.re * t, z.im.clone())) - a.clone()
}

/// `ν ≥ 0 ∧ ν^p = tr[A^p]` (even `p`) or `t𝟙 − A ⪰ 0 ∧ det(t𝟙 − A) = 0`
/// (`p = ∞`): in both cases the auxiliary equals `‖A‖_p` for `A ⪰ 0`.
fn norm_value(norm: Norm, nu: &Poly, a: &CMatrix<Poly>) -> Body {
    match norm {
        Norm::P(p) => Body::and([Body::ge(nu.clone()), Body::eq(nu.pow(p) - a.pow(p).trace().re)]),
        Norm::Infinity => {
            let gap = shifted(nu, a);
            Body::and(psd_minors(&gap).into_iter().chain([Body::eq(gap.det().re)]))
        }
    }
}

/// `∃ρ₁ ∀T' ∃ρ₂ ∀ρ₁₂: ‖(T⊗T')(ρ₁₂)‖_p ≤ ‖T(ρ₁)‖_p ‖T'(ρ₂)‖_p`, with `T'`
/// ranging over channels on `d'×d'` through its Choi matrix.
///
/// Norms go through auxiliaries: `nu1`, `nu2` sit in the blocks of `ρ₁`,
/// `ρ₂`, and the output `Z = (T⊗T')(ρ₁₂)` is a universally quantified
/// Hermitian matrix constrained by an equality premise, so the prefix keeps
/// exactly three alternations.
pub fn encode_additivity(choi: &QMatrix, d: usize, p: Norm, d_prime: usize) -> Result<Formula> {
    positive("d", d)?;
    positive("d'", d_prime)?;
    if let Norm::P(q) = p {
        if q == 0 || q % 2 == 1 {
            return Err(FormulaError::UnsupportedDomain(format!(
                "p = {q}: only even p and p = infinity are encoded"
            )));
        }
    }
    check_channel_choi(choi, d)?;
    let s = natural_from_choi(choi, d);
    let dp = d_prime;
    let mut fb = FormulaBuilder::new();
    let rho1 = fb.declare(Quant::Exists, "rho1", d, d, FieldKind::Complex, Domain::Density)?;
    let nu1 = fb.real(Quant::Exists, "nu1");
    let tp = fb.declare(
        Quant::Forall,
        "Tp",
        dp * dp,
        dp * dp,
        FieldKind::Complex,
        Domain::ChannelChoi { d_in: dp, d_out: dp },
    )?;
    let rho2 = fb.declare(Quant::Exists, "rho2", dp, dp, FieldKind::Complex, Domain::Density)?;
    let nu2 = fb.real(Quant::Exists, "nu2");
    let rho12 = fb.declare(Quant::Forall, "rho12", d * dp, d * dp, FieldKind::Complex, Domain::Density)?;
    let z = fb.declare(Quant::Forall, "Z", d * dp, d * dp, FieldKind::Complex, Domain::Hermitian)?;

    let (n1, n2) = (scalar(&nu1), scalar(&nu2));
    let c = tp.view();
    let out1 = apply_natural(&s, &rho1.view());
    let out2 = apply_symbolic_choi(&c, dp, &rho2.view());
    let image = apply_product(&s, d, &c, dp, &rho12.view());
    let zv = z.view();
    let premise = Body::and(zv.iter().zip(image.iter()).map(|(a, b)| {
        Body::complex_eq(Complex::new(a.re.clone() - b.re.clone(), a.im.clone() - b.im.clone()))
    }));
    let bound = &n1 * &n2;
    let inequality = match p {
        Norm::P(q) => Body::ge(bound.pow(q) - zv.pow(q).trace().re),
        Norm::Infinity => Body::and(psd_minors(&shifted(&bound, &zv))),
    };
    let body = Body::and([
        norm_value(p, &n1, &out1),
        norm_value(p, &n2, &out2),
        Body::implies(premise, inequality),
    ]);
    Ok(fb.finish(body))
}
