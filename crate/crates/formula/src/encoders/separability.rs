use qdecide_core::{CMatrix, Complex, QMatrix};

use super::{check_density, poly_c, positive};
use crate::error::Result;
use crate::formula::{Body, Domain, FieldKind, Formula, FormulaBuilder, Quant};
use crate::poly::Poly;

/// `∃λ ∈ Δ_K ∃ρ_i^{(α)} ∈ density(d): ρ = Σ_i λ_i ρ_i^{(1)} ⊗ ⋯ ⊗ ρ_i^{(n)}`
/// entrywise, with `K = d^{2n}` unless lowered through `terms`.
///
/// Variables: `lambda` (1×K) and `rho_{i}_{α}`.
pub fn encode_separability(rho: &QMatrix, d: usize, n: usize, terms: Option<usize>) -> Result<Formula> {
    positive("d", d)?;
    positive("n", n)?;
    let dn = d.pow(n as u32);
    check_density(rho, dn)?;
    let k = terms.unwrap_or(d.pow(2 * n as u32));
    positive("terms", k)?;
    let mut fb = FormulaBuilder::new();
    let lambda = fb.declare(Quant::Exists, "lambda", 1, k, FieldKind::Real, Domain::ProbabilitySimplex)?;
    let mut mix = CMatrix::<Poly>::zeros(dn, dn);
    for i in 0..k {
        let mut prod: Option<CMatrix<Poly>> = None;
        for a in 0..n {
            let v = fb.declare(Quant::Exists, &format!("rho_{i}_{a}"), d, d, FieldKind::Complex, Domain::Density)?;
            let view = v.view();
            prod = Some(match prod {
                None => view,
                Some(p) => p.kron(&view),
            });
        }
        let w = Complex::real(lambda.entry(0, i).re);
        mix = mix + prod.expect("n ≥ 1").map(|z| w.clone() * z.clone());
    }
    let body = Body::and(mix.iter().zip(rho.iter()).map(|(s, r)| {
        Body::complex_eq(Complex::new(s.re.clone() - poly_c(&r.re), s.im.clone() - poly_c(&r.im)))
    }));
    Ok(fb.finish(body))
}
