use num_traits::Zero;
use proptest::prelude::*;
use qdecide_core::channels::psd_certificate;
use qdecide_core::{Complex, Matrix, QMatrix, Rational};
use qdecide_formula::fixtures::{int, rat};
use qdecide_formula::{
    check_witness, export_smt, formula_stats, numeric_search, parse_smt, prenex, Assignment, Body, Domain, FieldKind,
    Formula, FormulaBuilder, Monomial, NumericOutcome, Poly, Quant, SearchBudget,
};

fn hermitian_from(d: usize, vals: &[(i64, i64)], gram: bool) -> QMatrix {
    let mut k = 0;
    let mut h = QMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let (a, b) = vals[k % vals.len()];
            k += 1;
            if i == j {
                h[(i, i)] = Complex::real(rat(a, 2));
            } else {
                h[(i, j)] = Complex::new(rat(a, 2), rat(b, 3));
                h[(j, i)] = Complex::new(rat(a, 2), rat(-b, 3));
            }
        }
    }
    if gram {
        // rank-deficient PSD matrices sit on the boundary of the cone
        let g = Matrix::from_fn(d, d, |i, j| if i + 1 == d { Complex::zero() } else { h[(i, j)].clone() });
        g.adjoint().matmul(&g)
    } else {
        h
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn psd_encoding_matches_eigenvalue_oracle(
        d in 1usize..=3,
        vals in prop::collection::vec((-4i64..=4, -4i64..=4), 6),
        gram in any::<bool>(),
    ) {
        let h = hermitian_from(d, &vals, gram);
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "X", d, d, FieldKind::Complex, Domain::Psd).unwrap();
        let f = fb.finish(Body::True);
        let mut a = Assignment::new();
        a.set_matrix(&f, &x, &h).unwrap();
        let encoded = check_witness(&f, &a).unwrap();
        let oracle = psd_certificate(&h);
        prop_assert!(!matches!(oracle, qdecide_core::CpVerdict::Indeterminate(_)));
        prop_assert_eq!(encoded, oracle.is_certified_true());
    }
}

/// Random polynomial over `vars` with small coefficients.
fn poly_strategy(vars: Vec<u32>) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    prop::collection::vec((-3i64..=3, 1i64..=3, prop::collection::vec(0u32..=2, n)), 1..4).prop_map(move |terms| {
        terms.into_iter().fold(Poly::zero(), |acc, (c, den, exps)| {
            let m = Monomial::from_powers(vars.iter().copied().zip(exps).collect());
            acc + Poly::term(rat(c, den), m)
        })
    })
}

fn body_strategy(vars: Vec<u32>) -> impl Strategy<Value = Body> {
    let leaf = (poly_strategy(vars), 0u8..3).prop_map(|(p, r)| match r {
        0 => Body::gt(p),
        1 => Body::ge(p),
        _ => Body::eq(p),
    });
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Body::and),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Body::or),
            inner.prop_map(Body::not),
        ]
    })
}

/// `Q X ∈ domain` (2 reals) followed by a free scalar `y`.
fn formula_strategy() -> impl Strategy<Value = (Formula, Domain, Quant)> {
    (0u8..3, any::<bool>()).prop_flat_map(|(dom, forall)| {
        let domain = match dom {
            0 => Domain::ProbabilitySimplex,
            1 => Domain::NonnegMatrix,
            _ => Domain::Free,
        };
        let quant = if forall { Quant::Forall } else { Quant::Exists };
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(quant, "X", 1, 2, FieldKind::Real, domain).unwrap();
        let y = fb.real(Quant::Exists, "y");
        let vars = vec![x.ids[0], x.ids[1], y.ids[0]];
        body_strategy(vars).prop_map(move |b| {
            let mut fb2 = FormulaBuilder::new();
            fb2.declare(quant, "X", 1, 2, FieldKind::Real, domain).unwrap();
            fb2.real(Quant::Exists, "y");
            (fb2.finish(b), domain, quant)
        })
    })
}

fn grid() -> Vec<Rational> {
    [-1, 0, 1, 2].iter().map(|&k| rat(k, 2)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The relativized body agrees pointwise with "membership and body"
    /// (∃) or "membership implies body" (∀), membership decided directly.
    #[test]
    fn prenex_preserves_truth((f, domain, quant) in formula_strategy()) {
        let p = prenex(&f);
        prop_assert!(p.prenex);
        prop_assert_eq!(&prenex(&p), &p);
        for x0 in grid() {
            for x1 in grid() {
                for y in grid() {
                    let vals = [x0.clone(), x1.clone(), y.clone()];
                    let at = |v: u32| Some(vals[v as usize].clone());
                    let member = match domain {
                        Domain::ProbabilitySimplex => {
                            x0 >= Rational::zero() && x1 >= Rational::zero() && &x0 + &x1 == int(1)
                        }
                        Domain::NonnegMatrix => x0 >= Rational::zero() && x1 >= Rational::zero(),
                        _ => true,
                    };
                    let phi = f.body.eval(&at).unwrap();
                    let want = match quant {
                        Quant::Exists => member && phi,
                        Quant::Forall => !member || phi,
                    };
                    prop_assert_eq!(p.body.eval(&at).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn smt_round_trip((f, _, _) in formula_strategy()) {
        let s = export_smt(&f);
        prop_assert_eq!(&parse_smt(&s).unwrap(), &f);
        let p = prenex(&f);
        let back = parse_smt(&export_smt(&p)).unwrap();
        prop_assert_eq!(formula_stats(&back), formula_stats(&p));
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn numeric_witnesses_pass_exact_check((f, _, quant) in formula_strategy(), seed in 0u64..1000) {
        prop_assume!(quant == Quant::Exists);
        let budget = SearchBudget { restarts: 3, iterations: 80, seed, ..SearchBudget::default() };
        if let NumericOutcome::Witness(a) = numeric_search(&f, &budget).unwrap() {
            prop_assert!(check_witness(&f, &a).unwrap());
        }
    }

    #[test]
    fn linear_systems_are_solved(a in -20i64..=20, b in -20i64..=20, den in 1i64..=4) {
        let mut fb = FormulaBuilder::new();
        let x = Poly::var(fb.real(Quant::Exists, "x").ids[0]);
        let y = Poly::var(fb.real(Quant::Exists, "y").ids[0]);
        let f = fb.finish(Body::and([
            Body::eq(x.clone() + y.clone() - Poly::constant(rat(a, den))),
            Body::eq(x - y - Poly::constant(rat(b, den))),
        ]));
        let NumericOutcome::Witness(w) = numeric_search(&f, &SearchBudget::default()).unwrap() else {
            return Err(TestCaseError::fail("no witness"));
        };
        prop_assert!(check_witness(&f, &w).unwrap());
        prop_assert_eq!(w.get("x").unwrap(), &rat(a + b, 2 * den));
    }
}
