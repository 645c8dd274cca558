//! Domain membership as Boolean combinations of polynomial atoms.

use num_traits::{One, Zero};
use qdecide_core::minors::{combinations, index_subsets};
use qdecide_core::{CMatrix, Complex, Rational};

use crate::formula::{poly_identity, Body, Domain, FieldKind, MatrixVar, Norm};
use crate::poly::Poly;

/// `X = X†` on the raw flattening: `im X_ii = 0`, and for `i < j`
/// `re X_ji = re X_ij`, `im X_ji = -im X_ij` (per block for stacked POVMs).
pub fn hermiticity(var: &MatrixVar) -> Vec<Body> {
    let raw = var.full_view();
    let b = var.cols;
    let mut out = Vec::new();
    for blk in 0..var.rows / b {
        let at = |i: usize, j: usize| raw[(blk * b + i, j)].clone();
        for i in 0..b {
            if var.field == FieldKind::Complex {
                out.push(Body::eq(at(i, i).im));
            }
            for j in i + 1..b {
                let (u, l) = (at(i, j), at(j, i));
                out.push(Body::eq(l.re - u.re));
                if var.field == FieldKind::Complex {
                    out.push(Body::eq(l.im + u.im));
                }
            }
        }
    }
    out
}

/// `det(M_S) ≥ 0` for every principal submatrix of a Hermitian polynomial
/// matrix, in size-then-lexicographic subset order.
pub fn psd_minors(m: &CMatrix<Poly>) -> Vec<Body> {
    index_subsets(m.rows())
        .iter()
        .map(|s| Body::ge(m.submatrix(s, s).det().re))
        .collect()
}

/// PSD constraints for an arbitrary Hermitian polynomial matrix.
pub fn psd_constraint(m: &CMatrix<Poly>) -> Body {
    Body::and(psd_minors(m))
}

fn entrywise_eq(a: &CMatrix<Poly>, b: &CMatrix<Poly>) -> Body {
    Body::and(
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| Body::complex_eq(Complex::new(x.re.clone() - y.re.clone(), x.im.clone() - y.im.clone()))),
    )
}

fn scaled_identity(n: usize, c: Rational) -> CMatrix<Poly> {
    poly_identity(n).map(|z| Complex::new(z.re.scale(&c), z.im.clone()))
}

fn minors_of_size(m: &CMatrix<Poly>, k: usize, mut f: impl FnMut(Complex<Poly>)) {
    let mut rows = Vec::new();
    combinations(m.rows(), k, &mut |r| rows.push(r.to_vec()));
    for r in &rows {
        combinations(m.cols(), k, &mut |c| f(m.submatrix(r, c).det()));
    }
}

/// Membership of `var` in its domain, over the variable's symbolic view.
pub fn encode_membership(var: &MatrixVar) -> Body {
    let v = var.view();
    match var.domain {
        Domain::Free => Body::True,
        Domain::Hermitian => Body::and(hermiticity(var)),
        Domain::Psd => Body::and(hermiticity(var).into_iter().chain(psd_minors(&v))),
        Domain::Density => Body::and(
            hermiticity(var)
                .into_iter()
                .chain(psd_minors(&v))
                .chain([Body::eq(v.trace().re - Poly::one())]),
        ),
        Domain::Unitary => entrywise_eq(&v.adjoint().matmul(&v), &poly_identity(var.cols)),
        Domain::NormBall(Norm::Infinity) => {
            let gap = poly_identity(var.rows) - v.adjoint().matmul(&v);
            Body::and(hermiticity(var).into_iter().chain(psd_minors(&gap)))
        }
        Domain::NormBall(Norm::P(p)) => {
            let tr = v.pow(p).trace().re;
            Body::and(hermiticity(var).into_iter().chain([Body::ge(Poly::one() - tr)]))
        }
        Domain::Rank(r) => {
            let mut vanish = Vec::new();
            minors_of_size(&v, r + 1, |d| vanish.push(Body::complex_eq(d)));
            let mut witness = Vec::new();
            if r <= var.rows.min(var.cols) {
                minors_of_size(&v, r, |d| witness.push(Body::not(Body::complex_eq(d))));
            }
            Body::and(vanish.into_iter().chain([Body::or(witness)]))
        }
        Domain::RankAtMost(_) => {
            let factors = var.outer_factors();
            let sum = CMatrix::from_fn(var.rows, var.cols, |i, j| {
                factors.iter().fold(Complex::<Poly>::zero(), |acc, (u, w)| {
                    acc + u[i].clone() * qdecide_core::scalar::Conj::conj(&w[j])
                })
            });
            entrywise_eq(&v, &sum)
        }
        Domain::ChannelChoi { d_in, d_out } => {
            // Σ_a C[(a,i),(a,j)] = δ_ij / d_in
            let ptrace = CMatrix::from_fn(d_in, d_in, |i, j| {
                (0..d_out).fold(Complex::<Poly>::zero(), |acc, a| acc + v[(a * d_in + i, a * d_in + j)].clone())
            });
            let target = scaled_identity(d_in, Rational::new(1.into(), (d_in as i64).into()));
            Body::and(
                hermiticity(var)
                    .into_iter()
                    .chain(psd_minors(&v))
                    .chain([entrywise_eq(&ptrace, &target)]),
            )
        }
        Domain::ProbabilitySimplex => {
            let entries: Vec<Poly> = v.iter().map(|z| z.re.clone()).collect();
            let total = entries.iter().cloned().fold(Poly::zero(), |a, b| a + b);
            Body::and(entries.into_iter().map(Body::ge).chain([Body::eq(total - Poly::one())]))
        }
        Domain::NonnegMatrix => Body::and(v.iter().map(|z| Body::ge(z.re.clone()))),
        Domain::Povm(m) => {
            let blocks: Vec<CMatrix<Poly>> = (0..m).map(|k| var.block_view(k)).collect();
            let sum = blocks.iter().skip(1).fold(blocks[0].clone(), |a, b| a + b.clone());
            Body::and(
                hermiticity(var)
                    .into_iter()
                    .chain(blocks.iter().flat_map(psd_minors))
                    .chain([entrywise_eq(&sum, &poly_identity(var.cols))]),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{FormulaBuilder, Quant};

    fn count_atoms(b: &Body) -> usize {
        b.atoms().len()
    }

    #[test]
    fn psd_two_by_two() {
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "X", 2, 2, FieldKind::Complex, Domain::Psd).unwrap();
        let h = hermiticity(&x);
        assert_eq!(h.len(), 4);
        let minors = psd_minors(&x.view());
        assert_eq!(minors.len(), 3);
        // x11 x22 - a^2 - b^2 with a + ib the upper off-diagonal entry
        let re = |i: usize, j: usize| Poly::var(x.ids[2 * (i * 2 + j)]);
        let im = |i: usize, j: usize| Poly::var(x.ids[2 * (i * 2 + j) + 1]);
        let want = re(0, 0) * re(1, 1) - re(0, 1).pow(2) - im(0, 1).pow(2);
        assert_eq!(minors[2], Body::ge(want));
    }

    #[test]
    fn one_by_one_real_density() {
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "x", 1, 1, FieldKind::Real, Domain::Density).unwrap();
        let b = encode_membership(&x);
        let v = Poly::var(x.ids[0]);
        assert_eq!(b, Body::and([Body::ge(v.clone()), Body::eq(v - Poly::one())]));
    }

    #[test]
    fn rank_zero_forces_zero_matrix() {
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "X", 2, 2, FieldKind::Complex, Domain::Rank(0)).unwrap();
        let b = encode_membership(&x);
        assert_eq!(count_atoms(&b), 8);
        for a in b.atoms() {
            assert_eq!(a.poly.len(), 1);
            assert_eq!(a.poly.degree(), 1);
        }
    }

    #[test]
    fn rank_one_of_two_by_two() {
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "X", 2, 2, FieldKind::Real, Domain::Rank(1)).unwrap();
        let b = encode_membership(&x);
        let check = |vals: [i64; 4]| {
            b.eval(&|v| Some(Rational::from_integer(vals[x.ids.iter().position(|&w| w == v).unwrap()].into())))
                .unwrap()
        };
        assert!(check([1, 2, 2, 4]));
        assert!(!check([1, 0, 0, 1]));
        assert!(!check([0, 0, 0, 0]));
    }

    #[test]
    fn unitary_and_simplex() {
        let mut fb = FormulaBuilder::new();
        let u = fb.declare(Quant::Exists, "U", 2, 2, FieldKind::Complex, Domain::Unitary).unwrap();
        let b = encode_membership(&u);
        // [[0, i], [i, 0]] is unitary
        let vals = [0, 0, 0, 1, 0, 1, 0, 0];
        let at = |v| Some(Rational::from_integer(vals[u.ids.iter().position(|&w| w == v).unwrap()].into()));
        assert_eq!(b.eval(&at), Some(true));
        let p = fb.declare(Quant::Exists, "p", 1, 3, FieldKind::Real, Domain::ProbabilitySimplex).unwrap();
        assert_eq!(count_atoms(&encode_membership(&p)), 4);
    }
}
