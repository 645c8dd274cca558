//! Small gadget inputs with known threshold behaviour, shared by tests and
//! the command line.

use num_traits::{One, Zero};
use qdecide_core::{Complex, Matrix, Rational};

use crate::prop1::Prop1Input;
use crate::words::PcpInstance;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ints(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
}

fn vector(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&a| int(a)).collect()
}

fn ket(d: usize, k: usize) -> Vec<Complex<Rational>> {
    (0..d).map(|i| if i == k { Complex::one() } else { Complex::zero() }).collect()
}

#[derive(Clone, Debug)]
pub struct BundleFixture {
    pub name: &'static str,
    pub input: Prop1Input,
    /// Minimal witness for `> λ` and for `≥ λ` within depth 5, by hand.
    pub strict_witness: Option<Vec<usize>>,
    pub nonstrict_witness: Option<Vec<usize>>,
}

/// `[[A, 0], [0, 0]]` with `A` in the top-left corner.
fn pad(a: &Matrix<Rational>, n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, n, |i, j| if i < a.rows() && j < a.cols() { a[(i, j)].clone() } else { Rational::zero() })
}

fn pad_vec(v: &[Rational], n: usize) -> Vec<Rational> {
    (0..n).map(|i| v.get(i).cloned().unwrap_or_else(Rational::zero)).collect()
}

/// A two-tile instance whose only short solution is `(1, 2)`:
/// `(1, 12)` and `(21, 1)` over `{1, 2}`.
pub fn tiny_pcp() -> PcpInstance {
    PcpInstance::new(2, vec![(vec![1], vec![1, 2]), (vec![2, 1], vec![1])]).expect("valid tiles")
}

/// The squared Paterson matrices of [`tiny_pcp`] padded into a `d = 4`
/// gadget, with `⟨x|∏M|y⟩ = -(σ(X(w)) - σ(Y(w)))²`: the value reaches
/// `λ` exactly on solutions and never exceeds it.
fn paterson_input() -> Prop1Input {
    let inst = tiny_pcp();
    let matrices = inst
        .tiles
        .iter()
        .map(|(a, b)| {
            let g = crate::words::gamma_square(a, b, inst.m).expect("valid");
            pad(&g.map(|v| Rational::from_integer(v.clone())), 14)
        })
        .collect();
    let (px, py) = crate::words::paterson_square_vectors();
    let q = |v: Vec<num_bigint::BigInt>| v.into_iter().map(Rational::from_integer).collect::<Vec<_>>();
    let y: Vec<Rational> = q(px).into_iter().map(|v| -v).collect();
    Prop1Input {
        lambda: rat(1, 2),
        phi: vec![Complex::one(), Complex::one(), Complex::zero(), Complex::new(int(0), int(1))],
        matrices,
        x: pad_vec(&q(py), 14),
        y: pad_vec(&y, 14),
    }
}

pub fn bundle_fixtures() -> Vec<BundleFixture> {
    let e0 = || vector(&[1, 0]);
    vec![
        BundleFixture {
            name: "identity",
            input: Prop1Input { lambda: rat(1, 2), phi: ket(2, 0), matrices: vec![Matrix::identity(2)], x: e0(), y: e0() },
            strict_witness: Some(vec![1]),
            nonstrict_witness: Some(vec![1]),
        },
        BundleFixture {
            name: "zero",
            input: Prop1Input {
                lambda: rat(1, 3),
                phi: ket(2, 1),
                matrices: vec![Matrix::zeros(2, 2)],
                x: e0(),
                y: vector(&[1, 1]),
            },
            strict_witness: None,
            nonstrict_witness: Some(vec![1]),
        },
        BundleFixture {
            // a quarter turn and a sign flip: the form is 0, -1, 0, 1 along powers
            name: "rotation",
            input: Prop1Input {
                lambda: rat(3, 4),
                phi: vec![Complex::one(), Complex::new(int(1), int(-1))],
                matrices: vec![ints(&[&[0, 1], &[-1, 0]]), ints(&[&[-1, 0], &[0, -1]])],
                x: e0(),
                y: e0(),
            },
            strict_witness: Some(vec![2, 2]),
            nonstrict_witness: Some(vec![1]),
        },
        BundleFixture {
            // every value is 0: equality throughout
            name: "nilpotent",
            input: Prop1Input {
                lambda: rat(1, 4),
                phi: ket(2, 0),
                matrices: vec![ints(&[&[0, 1], &[0, 0]]), ints(&[&[0, 0], &[0, 1]])],
                x: e0(),
                y: e0(),
            },
            strict_witness: None,
            nonstrict_witness: Some(vec![1]),
        },
        BundleFixture {
            // strictly negative until the third letter of a run of 1s
            name: "three-step",
            input: Prop1Input {
                lambda: rat(1, 2),
                phi: vec![Complex::new(int(1), int(1)), Complex::real(int(2)), Complex::zero()],
                matrices: vec![
                    pad(&ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]), 7),
                    pad(&ints(&[&[0, 1, 0], &[0, 1, 0], &[0, 0, 1]]), 7),
                ],
                x: pad_vec(&vector(&[1, 0, 0]), 7),
                y: pad_vec(&vector(&[1, -1, -1]), 7),
            },
            strict_witness: Some(vec![1, 1, 1]),
            nonstrict_witness: Some(vec![1, 1, 1]),
        },
        BundleFixture {
            name: "paterson",
            input: paterson_input(),
            strict_witness: None,
            nonstrict_witness: Some(vec![1, 2]),
        },
    ]
}
