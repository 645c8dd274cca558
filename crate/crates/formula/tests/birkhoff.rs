use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qdecide_core::QMatrix;
use qdecide_formula::encoders::encode_birkhoff;
use qdecide_formula::fixtures::{cayley_unitary, mixed_unitary_choi, rat, real_matrix};
use qdecide_formula::{numeric_search, NumericOutcome, SearchBudget};

fn hermitian(a: i64, b: i64, c: i64, e: i64) -> QMatrix {
    let mut h = real_matrix(vec![vec![rat(a, 2), rat(b, 3)], vec![rat(b, 3), rat(c, 2)]]);
    h[(0, 1)].im = rat(e, 5);
    h[(1, 0)].im = rat(-e, 5);
    h
}

#[test]
fn random_unital_qubit_channels_are_mixed_unitary() {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 10, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strat = (prop::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3), 3), prop::collection::vec(1i64..=5, 3));
    runner
        .run(&strat, |(hs, ws)| {
            let total: i64 = ws.iter().sum();
            let weights: Vec<_> = ws.iter().map(|&w| rat(w, total)).collect();
            let us: Vec<QMatrix> = hs.iter().map(|&(a, b, c, e)| cayley_unitary(&hermitian(a, b, c, e))).collect();
            let choi = mixed_unitary_choi(&weights, &us);
            let f = encode_birkhoff(&choi, 2, 1, Some(4)).unwrap();
            let out = numeric_search(&f, &SearchBudget::default()).unwrap();
            prop_assert!(
                matches!(out, NumericOutcome::Witness(_) | NumericOutcome::Approximate { .. }),
                "search failed: {out:?}"
            );
            prop_assert!(out.residual() <= 1e-6);
            Ok(())
        })
        .unwrap();
}
