use qdecide_core::channels::partial_transpose;
use qdecide_core::{Complex, QMatrix};

use super::{check_density, kron_power, permute_subsystems, poly_c, positive};
use crate::error::Result;
use crate::formula::{Body, Domain, FieldKind, Formula, FormulaBuilder, Quant};
use crate::poly::Poly;

/// `(ρ^{⊗n})^{T_A}` on `(A₁…A_n)(B₁…B_n)`: the copies `A₁B₁…A_nB_n` are
/// regrouped with the `A` parties first, then every `A` factor is
/// transposed.
pub fn distillability_form(rho: &QMatrix, d: usize, n: usize) -> Result<QMatrix> {
    let power = kron_power(rho, n);
    let dims = vec![d; 2 * n];
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let grouped = permute_subsystems(&power, &dims, &perm);
    let mask: Vec<bool> = (0..2 * n).map(|k| k < n).collect();
    Ok(partial_transpose(&grouped, &dims, &mask)?)
}

/// `∃Y` of rank at most 2 (`Y = u₀v₀† + u₁v₁†`): `⟨y|(ρ^{⊗n})^{T_A}|y⟩ < 0`
/// with `|y⟩ = Σ_{K,L} Y_{K,L} |K,L⟩`, `K` indexing the `A` parties.
pub fn encode_n_distillable(rho: &QMatrix, d: usize, n: usize) -> Result<Formula> {
    positive("d", d)?;
    positive("n", n)?;
    check_density(rho, d * d)?;
    let r = distillability_form(rho, d, n)?;
    let dn = d.pow(n as u32);
    let mut fb = FormulaBuilder::new();
    let y = fb.declare(Quant::Exists, "Y", dn, dn, FieldKind::Complex, Domain::RankAtMost(2))?;
    let yv = y.view();
    let vec: Vec<Complex<Poly>> = yv.iter().cloned().collect();
    // Re Σ conj(y_a) R_ab y_b; the imaginary part vanishes for Hermitian R.
    let mut form = Poly::default();
    for a in 0..vec.len() {
        for b in 0..vec.len() {
            let e = &r[(a, b)];
            if num_traits::Zero::is_zero(e) {
                continue;
            }
            let ya = &vec[a];
            let yb = &vec[b];
            // conj(ya)·yb = (ar·br + ai·bi) + i(ar·bi − ai·br)
            let pr = &ya.re * &yb.re + &ya.im * &yb.im;
            let pi = &ya.re * &yb.im - &ya.im * &yb.re;
            form = form + &poly_c(&e.re) * &pr - &poly_c(&e.im) * &pi;
        }
    }
    Ok(fb.finish(Body::lt(form)))
}
