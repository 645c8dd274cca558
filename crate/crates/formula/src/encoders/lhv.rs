use num_traits::{One, Zero};
use qdecide_core::{Matrix, QMatrix, Rational};

use super::{check_density, check_distribution, poly_c, positive, sum_polys, Distribution};
use crate::error::Result;
use crate::formula::{constant_matrix, trace_product_re, Body, Domain, FieldKind, Formula, FormulaBuilder, MatrixVar, Quant};
use crate::poly::Poly;

/// Outcome of the deterministic response `a ∈ [m]^n` at setting `k`: the
/// `k`-th base-`m` digit, most significant first.
fn response(a: usize, k: usize, n: usize, m: usize) -> usize {
    (a / m.pow((n - 1 - k) as u32)) % m
}

/// The point mass `P(i,j|k,l) = δ_{a(k),i} δ_{b(l),j}`.
pub fn deterministic_vertex(n: usize, m: usize, a: usize, b: usize) -> Distribution {
    Matrix::from_fn(n * n, m * m, |r, c| {
        let (k, l) = (r / n, r % n);
        let (i, j) = (c / m, c % m);
        if response(a, k, n, m) == i && response(b, l, n, m) == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

fn declare_lambda(fb: &mut FormulaBuilder, n: usize, m: usize) -> Result<MatrixVar> {
    let s = m.pow(n as u32);
    fb.declare(Quant::Exists, "Lambda", s, s, FieldKind::Real, Domain::NonnegMatrix)
}

/// `ΣΛ = 1` and `target(k,l,i,j) = Σ_{a(k)=i, b(l)=j} Λ_{a,b}` for all indices.
fn hidden_variable_model(lambda: &MatrixVar, n: usize, m: usize, target: impl Fn(usize, usize, usize, usize) -> Poly) -> Body {
    let s = m.pow(n as u32);
    let entry = |a: usize, b: usize| lambda.entry(a, b).re;
    let total = sum_polys((0..s).flat_map(|a| (0..s).map(move |b| (a, b))).map(|(a, b)| entry(a, b)));
    let mut parts = vec![Body::eq(total - Poly::one())];
    for k in 0..n {
        for l in 0..n {
            for i in 0..m {
                for j in 0..m {
                    let mixture = sum_polys(
                        (0..s)
                            .filter(|&a| response(a, k, n, m) == i)
                            .flat_map(|a| (0..s).filter(move |&b| response(b, l, n, m) == j).map(move |b| (a, b)))
                            .map(|(a, b)| entry(a, b)),
                    );
                    parts.push(Body::eq(target(k, l, i, j) - mixture));
                }
            }
        }
    }
    Body::and(parts)
}

/// `∃Λ ≥ 0, ΣΛ = 1`, reproducing `P` from deterministic local responses.
/// `Λ` is `m^n × m^n`, rows indexing Alice's response functions.
pub fn encode_lhv_distribution(p: &Distribution, n: usize, m: usize) -> Result<Formula> {
    check_distribution(p, n, m)?;
    let mut fb = FormulaBuilder::new();
    let lambda = declare_lambda(&mut fb, n, m)?;
    let body = hidden_variable_model(&lambda, n, m, |k, l, i, j| poly_c(&p[(k * n + l, i * m + j)]));
    Ok(fb.finish(body))
}

fn declare_povms(fb: &mut FormulaBuilder, quant: Quant, tag: &str, n: usize, m: usize, d: usize) -> Result<Vec<MatrixVar>> {
    (0..n).map(|k| fb.declare(quant, &format!("{tag}_{k}"), m * d, d, FieldKind::Complex, Domain::Povm(m))).collect()
}

/// `tr[ρ (Q_i^{(k)} ⊗ P_j^{(l)})]` with `ρ` given by `rho` (constant or symbolic).
fn born_rule(
    rho: &qdecide_core::CMatrix<Poly>,
    q: &[MatrixVar],
    p: &[MatrixVar],
) -> impl Fn(usize, usize, usize, usize) -> Poly {
    let qs: Vec<Vec<_>> = q.iter().map(|v| (0..v.rows / v.cols).map(|i| v.block_view(i)).collect()).collect();
    let ps: Vec<Vec<_>> = p.iter().map(|v| (0..v.rows / v.cols).map(|j| v.block_view(j)).collect()).collect();
    let rho = rho.clone();
    move |k, l, i, j| trace_product_re(&rho, &qs[k][i].kron(&ps[l][j]))
}

/// `∀{Q^{(k)}} ∀{P^{(l)}} ∃Λ`: every pair of local POVM families (`m`
/// effects each) yields statistics with a local hidden-variable model.
pub fn encode_state_lhv(rho: &QMatrix, d: usize, n: usize, m: usize) -> Result<Formula> {
    positive("d", d)?;
    positive("n", n)?;
    positive("m", m)?;
    check_density(rho, d * d)?;
    let mut fb = FormulaBuilder::new();
    let q = declare_povms(&mut fb, Quant::Forall, "Q", n, m, d)?;
    let p = declare_povms(&mut fb, Quant::Forall, "P", n, m, d)?;
    let lambda = declare_lambda(&mut fb, n, m)?;
    let born = born_rule(&constant_matrix(rho), &q, &p);
    Ok(fb.finish(hidden_variable_model(&lambda, n, m, born)))
}

/// `∃ρ ∈ density(d²) ∃{Q^{(k)}} ∃{P^{(l)}}: P(i,j|k,l) = tr[ρ(Q_i^{(k)} ⊗ P_j^{(l)})]`.
pub fn encode_quantum_representation(p: &Distribution, n: usize, m: usize, d: usize) -> Result<Formula> {
    check_distribution(p, n, m)?;
    positive("d", d)?;
    let mut fb = FormulaBuilder::new();
    let rho = fb.declare(Quant::Exists, "rho", d * d, d * d, FieldKind::Complex, Domain::Density)?;
    let q = declare_povms(&mut fb, Quant::Exists, "Q", n, m, d)?;
    let pv = declare_povms(&mut fb, Quant::Exists, "P", n, m, d)?;
    let born = born_rule(&rho.view(), &q, &pv);
    let mut parts = Vec::new();
    for k in 0..n {
        for l in 0..n {
            for i in 0..m {
                for j in 0..m {
                    parts.push(Body::eq(born(k, l, i, j) - poly_c(&p[(k * n + l, i * m + j)])));
                }
            }
        }
    }
    Ok(fb.finish(Body::and(parts)))
}
