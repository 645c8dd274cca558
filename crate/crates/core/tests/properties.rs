use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use qdecide_core::channels::{partial_transpose_first, psd_certificate};
use qdecide_core::eigen::{min_eigenvalue_interval, psd_verdict, PsdVerdict};
use qdecide_core::minors::principal_minors;
use qdecide_core::scalar::with_precision;
use qdecide_core::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn cq(re: i64, im: i64) -> Complex<Rational> {
    Complex::new(q(re, 1), q(im, 1))
}

/// Exact PSD test by symmetric elimination: a zero pivot forces its row to
/// vanish, a negative pivot refutes.
fn psd_by_elimination(h: &QMatrix) -> bool {
    let mut a = h.clone();
    let mut live: Vec<usize> = (0..a.rows()).collect();
    while let Some(&p) = live.first() {
        let piv = a[(p, p)].re.clone();
        live.remove(0);
        if piv < Rational::zero() {
            return false;
        }
        if piv.is_zero() {
            if live.iter().any(|&j| !a[(p, j)].is_zero()) {
                return false;
            }
            continue;
        }
        let inv = Complex::real(piv.recip());
        for &i in &live {
            for &j in &live {
                let t = a[(i, p)].clone() * a[(p, j)].clone() * inv.clone();
                a[(i, j)] = a[(i, j)].clone() - t;
            }
        }
    }
    true
}

fn hermitian_from(d: usize, vals: &[i64]) -> QMatrix {
    let mut m = QMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        m[(i, i)] = cq(vals[k], 0);
        k += 1;
        for j in i + 1..d {
            m[(i, j)] = cq(vals[k], vals[k + 1]);
            m[(j, i)] = cq(vals[k], -vals[k + 1]);
            k += 2;
        }
    }
    m
}

fn gram_from(d: usize, r: usize, vals: &[i64]) -> QMatrix {
    let b = QMatrix::from_fn(d, r, |i, j| cq(vals[2 * (i * r + j)], vals[2 * (i * r + j) + 1]));
    b.matmul(&b.adjoint())
}

fn hermitian_strategy() -> impl Strategy<Value = QMatrix> {
    let indefinite = (1usize..=4).prop_flat_map(|d| {
        prop::collection::vec(-3i64..=3, d * d).prop_map(move |v| hermitian_from(d, &v))
    });
    let gram = (1usize..=4, 1usize..=3).prop_flat_map(|(d, r)| {
        prop::collection::vec(-2i64..=2, 2 * d * r).prop_map(move |v| gram_from(d, r, &v))
    });
    prop_oneof![indefinite, gram]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn minors_eigen_and_elimination_agree(h in hermitian_strategy()) {
        let minors_ok = principal_minors(&h).unwrap().iter().all(|m| *m >= Rational::zero());
        let bracket = min_eigenvalue_interval(&h).unwrap();
        let eigen_ok = bracket.lo().signum() != Ordering::Less;
        let oracle = psd_by_elimination(&h);
        prop_assert_eq!(minors_ok, oracle);
        prop_assert_eq!(eigen_ok, oracle);
        prop_assert_eq!(psd_verdict(&h).unwrap() == PsdVerdict::Psd, oracle);
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Const(i64, i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = (-50i64..=50, 1i64..=30).prop_map(|(n, d)| Expr::Const(n, d));
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

/// Evaluates exactly and in intervals side by side; `None` on division by a
/// (possibly) zero value.
fn eval(e: &Expr) -> Option<(Rational, Interval)> {
    Some(match e {
        Expr::Const(n, d) => (q(*n, *d), Interval::from_rational(&q(*n, *d))),
        Expr::Add(a, b) => {
            let ((x, i), (y, j)) = (eval(a)?, eval(b)?);
            (x + y, i + j)
        }
        Expr::Sub(a, b) => {
            let ((x, i), (y, j)) = (eval(a)?, eval(b)?);
            (x - y, i - j)
        }
        Expr::Mul(a, b) => {
            let ((x, i), (y, j)) = (eval(a)?, eval(b)?);
            (x * y, i * j)
        }
        Expr::Div(a, b) => {
            let ((x, i), (y, j)) = (eval(a)?, eval(b)?);
            if y.is_zero() || j.contains_zero() {
                return None;
            }
            (x / y, i / j)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interval_evaluation_encloses_exact_value(e in expr_strategy(), prec in prop::sample::select(vec![24u32, 53, 128, 256])) {
        if let Some((exact, iv)) = with_precision(prec, || eval(&e)) {
            prop_assert!(iv.contains_rational(&exact), "{} not in {}", exact, iv);
        }
    }
}

/// Rational unitary by the Cayley transform of an anti-Hermitian matrix.
fn cayley(d: usize, vals: &[i64]) -> QMatrix {
    let h = hermitian_from(d, vals);
    let a = h.map(|z| z.clone() * Complex::i());
    let id = QMatrix::identity(d);
    (id.clone() - a.clone()).matmul(&(id + a).inverse().unwrap())
}

fn mixed_unitary(d: usize, parts: &[(i64, Vec<i64>)]) -> (Vec<QMatrix>, Vec<Rational>) {
    let total: i64 = parts.iter().map(|(w, _)| w).sum();
    let us = parts.iter().map(|(_, v)| cayley(d, v)).collect();
    let ws = parts.iter().map(|(w, _)| q(*w, total)).collect();
    (us, ws)
}

fn surd_kraus(us: &[QMatrix], ws: &[Rational]) -> Vec<SMatrix> {
    us.iter()
        .zip(ws)
        .map(|(u, w)| {
            let s = Surd::sqrt_rational(w).unwrap();
            matrix::lift_complex::<Surd>(u).map(|z| z.scale(&s))
        })
        .collect()
}

fn qubit_basis() -> Arc<HermitianBasis<Surd>> {
    Arc::new(HermitianBasis::gell_mann(2).unwrap())
}

fn channel_strategy() -> impl Strategy<Value = Vec<(i64, Vec<i64>)>> {
    prop::collection::vec((1i64..=4, prop::collection::vec(-2i64..=2, 4)), 1..=3)
}

fn rational_state(vals: &[i64]) -> SMatrix {
    // (B B† + 𝟙) / tr
    let g = gram_from(2, 2, vals) + QMatrix::identity(2);
    let tr = g.trace().re;
    matrix::lift_complex(&g.map(|z| z.scale(&tr.recip())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_channels_are_tp_cp_and_round_trip(parts in channel_strategy(), sv in prop::collection::vec(-2i64..=2, 8)) {
        let (us, ws) = mixed_unitary(2, &parts);
        let basis = qubit_basis();
        let t = Channel::from_kraus(basis.clone(), &surd_kraus(&us, &ws)).unwrap();
        prop_assert!(t.is_trace_preserving());
        prop_assert!(t.is_unital());
        prop_assert!(t.is_completely_positive().is_certified_true());
        let back = Channel::from_choi(t.choi(), basis).unwrap();
        prop_assert_eq!(back.transfer(), t.transfer());
        let rebuilt = Channel::from_transfer(t.basis().clone(), t.transfer().clone()).unwrap();
        prop_assert_eq!(rebuilt.choi(), t.choi());

        let rho = rational_state(&sv);
        let out = t.apply(&rho).unwrap();
        prop_assert_eq!(out.trace(), Complex::one());
        prop_assert_eq!(&out, &t.apply_via_choi(&rho).unwrap());
        prop_assert!(psd_certificate(&out).is_certified_true());
    }

    #[test]
    fn compose_is_associative_and_tensor_preserves_tp(a in channel_strategy(), b in channel_strategy(), c in channel_strategy()) {
        let basis = qubit_basis();
        let mk = |p: &[(i64, Vec<i64>)]| {
            let (us, ws) = mixed_unitary(2, p);
            Channel::from_kraus(basis.clone(), &surd_kraus(&us, &ws)).unwrap()
        };
        let (ta, tb, tc) = (mk(&a), mk(&b), mk(&c));
        let left = ta.compose(&tb).unwrap().compose(&tc).unwrap();
        let right = ta.compose(&tb.compose(&tc).unwrap()).unwrap();
        prop_assert_eq!(left.transfer(), right.transfer());
        let with_id = ta.compose(&Channel::identity(basis.clone())).unwrap();
        prop_assert_eq!(with_id.transfer(), ta.transfer());
        prop_assert!(ta.tensor(&tb).is_trace_preserving());
    }

    #[test]
    fn overlap_agrees_between_paths(parts in channel_strategy(), sv in prop::collection::vec(-2i64..=2, 8), pv in prop::collection::vec(-3i64..=3, 4)) {
        let basis = qubit_basis();
        let (us, ws) = mixed_unitary(2, &parts);
        let t = Channel::from_kraus(basis, &surd_kraus(&us, &ws)).unwrap();
        let rho = rational_state(&sv);
        let v: Vec<Complex<Rational>> = vec![cq(pv[0], pv[1]), cq(pv[2], pv[3])];
        prop_assume!(v.iter().any(|z| !z.is_zero()));
        let phi_q = channels::projector(&v);
        let norm = phi_q.trace().re;
        let phi: SMatrix = matrix::lift_complex(&phi_q.map(|z| z.scale(&norm.recip())));
        let chain_transfer = t.apply(&t.apply(&rho).unwrap()).unwrap();
        let chain_full = t.apply_via_choi(&t.apply_via_choi(&rho).unwrap()).unwrap();
        prop_assert_eq!(
            channels::fidelity_overlap(&phi, &chain_transfer).unwrap(),
            channels::fidelity_overlap(&phi, &chain_full).unwrap()
        );
    }
}

#[test]
fn spec_examples_for_minors() {
    let m = |rows: &[&[i64]]| QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| cq(x, 0)).collect()).collect());
    let v = |xs: &[i64]| xs.iter().map(|&x| q(x, 1)).collect::<Vec<_>>();
    assert_eq!(principal_minors(&m(&[&[1, 0], &[0, 1]])).unwrap(), v(&[1, 1, 1]));
    assert_eq!(principal_minors(&m(&[&[2, 1], &[1, 1]])).unwrap(), v(&[2, 1, 1]));
    assert_eq!(principal_minors(&m(&[&[0, 1], &[1, 0]])).unwrap(), v(&[0, 0, -1]));
    assert!(matches!(principal_minors(&m(&[&[0, 1], &[2, 0]])), Err(CoreError::NotHermitian)));
}

#[test]
fn bell_state_partial_transpose_spectrum() {
    let mut phi = QMatrix::zeros(4, 4);
    for (r, s) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        phi[(r, s)] = Complex::real(q(1, 2));
    }
    let pt = partial_transpose_first(&phi, 2, 2).unwrap();
    // eigenvalues {1/2, 1/2, 1/2, -1/2}: charpoly (t - 1/2)^3 (t + 1/2)
    let p = eigen::hermitian_charpoly(&pt);
    let want = [q(1, 1), q(-1, 1), q(0, 1), q(1, 4), q(-1, 16)];
    assert_eq!(p, want);
    assert_eq!(pt.trace(), Complex::one());
    assert_eq!(psd_certificate(&pt), CpVerdict::CertifiedFalse);
}

#[test]
fn overlap_examples() {
    let e0: SMatrix = matrix::lift_complex(&channels::projector(&[cq(1, 0), cq(0, 0)]));
    let e1: SMatrix = matrix::lift_complex(&channels::projector(&[cq(0, 0), cq(1, 0)]));
    let half = Complex::real(Surd::from_rational(q(1, 2)));
    let mixed = SMatrix::identity(2).map(|z| z.clone() * half.clone());
    assert!(channels::fidelity_overlap(&e0, &e0).unwrap().is_one());
    assert!(channels::fidelity_overlap(&e0, &e1).unwrap().is_zero());
    assert_eq!(channels::fidelity_overlap(&e0, &mixed).unwrap(), Surd::from_rational(q(1, 2)));
}

#[test]
fn perron_examples() {
    let diag = |a: i64, b: i64| QMatrix::diagonal(vec![cq(a, 0), cq(b, 0)]);
    let p = perron::perron_pair(&[diag(1, 0), diag(0, 1)]).unwrap();
    assert!(p.lambda.contains_rational(&Rational::one()));
    assert!(p.residual.to_f64() <= 1e-30);
    assert!(p.exact.is_some());
    let nil = QMatrix::from_rows(vec![vec![cq(0, 0), cq(1, 0)], vec![cq(0, 0), cq(0, 0)]]);
    assert!(matches!(perron::perron_pair(&[nil]), Err(CoreError::NoPositiveEigenvector { .. })));
}
