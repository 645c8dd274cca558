use num_traits::{One, Zero};
use qdecide_core::channels::natural_from_choi;
use qdecide_core::scalar::{Conj, Ring};
use qdecide_core::{CMatrix, Complex, Matrix, QMatrix, Rational};

use super::{check_channel_choi, poly_c, positive, tensor_power_natural};
use crate::error::{FormulaError, Result};
use crate::formula::{Body, Domain, FieldKind, Formula, FormulaBuilder, Quant};
use crate::poly::Poly;

/// `U ⊗ Ū`, the natural representation of `X ↦ U X U†`.
pub fn natural_of_unitary_conjugation<T: Ring + Conj>(u: &Matrix<T>) -> Matrix<T> {
    u.kron(&u.conj())
}

/// `∃λ ∈ Δ_K ∃U_1 … U_K ∈ U(d^n)`: the natural representation of
/// `T^{⊗n}` equals `Σ_i λ_i U_i ⊗ Ū_i` entrywise, with `K = d^{4n}` unless
/// lowered through `terms`. Variables `lambda` and `U_{i}`.
pub fn encode_birkhoff(choi: &QMatrix, d: usize, n: usize, terms: Option<usize>) -> Result<Formula> {
    positive("d", d)?;
    positive("n", n)?;
    check_channel_choi(choi, d)?;
    let s = natural_from_choi(choi, d);
    // T(𝟙) = 𝟙 ⟺ Σ_i S[(a,b),(i,i)] = δ_ab
    for a in 0..d {
        for b in 0..d {
            let v = (0..d).fold(Complex::<Rational>::zero(), |acc, i| acc + s[(a * d + b, i * d + i)].clone());
            if v != if a == b { Complex::one() } else { Complex::zero() } {
                return Err(FormulaError::NotUnital);
            }
        }
    }
    let target = tensor_power_natural(choi, d, n);
    let dn = d.pow(n as u32);
    let k = terms.unwrap_or(d.pow(4 * n as u32));
    positive("terms", k)?;
    let mut fb = FormulaBuilder::new();
    let lambda = fb.declare(Quant::Exists, "lambda", 1, k, FieldKind::Real, Domain::ProbabilitySimplex)?;
    let mut mix = CMatrix::<Poly>::zeros(dn * dn, dn * dn);
    for i in 0..k {
        let u = fb.declare(Quant::Exists, &format!("U_{i}"), dn, dn, FieldKind::Complex, Domain::Unitary)?;
        let w = Complex::real(lambda.entry(0, i).re);
        mix = mix + natural_of_unitary_conjugation(&u.view()).map(|z| w.clone() * z.clone());
    }
    let body = Body::and(mix.iter().zip(target.iter()).map(|(m, t)| {
        Body::complex_eq(Complex::new(m.re.clone() - poly_c(&t.re), m.im.clone() - poly_c(&t.im)))
    }));
    Ok(fb.finish(body))
}
