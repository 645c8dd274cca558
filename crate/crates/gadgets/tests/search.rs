use num_traits::{One, Zero};
use qdecide_core::{CMatrix, Complex, Matrix, QMatrix, Rational};
use qdecide_gadgets::fixtures::{bundle_fixtures, tiny_pcp};
use qdecide_gadgets::kraus::{annihilates, interval_annihilates, kraus_normalize};
use qdecide_gadgets::search::ORACLE_CAP;
use qdecide_gadgets::{
    bruteforce_bundle, bruteforce_oracle, build_prop1, bundle_threshold_search, mortality_search, oracle_verdict,
    pcp_search, threshold_search, ChannelInstance, OracleVerdict, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn e0() -> Vec<Rational> {
    vec![int(1), int(0)]
}

fn ket(d: usize, k: usize) -> Vec<Complex<Rational>> {
    (0..d).map(|i| if i == k { Complex::one() } else { Complex::zero() }).collect()
}

fn expected(o: &OracleVerdict) -> Option<Vec<usize>> {
    match o {
        OracleVerdict::Witness(w) => Some(w.clone()),
        OracleVerdict::NoWitness => None,
        OracleVerdict::Undetermined(w) => panic!("oracle could not decide {w:?}"),
    }
}

#[test]
fn identity_block_gives_a_first_letter_witness() {
    for lambda in [rat(1, 10), rat(1, 2), rat(9, 10)] {
        let b = build_prop1(lambda, ket(2, 0), vec![Matrix::identity(2)], e0(), e0()).unwrap();
        let out = bundle_threshold_search(&b, true, 3).unwrap();
        assert_eq!(out.verdict, Verdict::Witness { word: vec![1] });
        let cert = out.certificate.unwrap();
        assert_eq!(cert.exact, "1");
        assert!(qdecide_core::scalar::parse_rational(&cert.overlap_lo).unwrap() > *b.lambda());
    }
}

#[test]
fn zero_block_sits_on_the_threshold() {
    let b = build_prop1(rat(1, 2), ket(2, 0), vec![Matrix::zeros(2, 2)], e0(), e0()).unwrap();
    assert_eq!(bundle_threshold_search(&b, true, 4).unwrap().verdict, Verdict::Exhausted { depth: 4 });
    assert_eq!(bundle_threshold_search(&b, false, 4).unwrap().verdict, Verdict::Witness { word: vec![1] });
}

#[test]
fn fixture_bundles_agree_with_the_oracle() {
    for f in bundle_fixtures() {
        let b = build_prop1(f.input.lambda.clone(), f.input.phi.clone(), f.input.matrices.clone(), f.input.x.clone(), f.input.y.clone())
            .unwrap();
        let entries = bruteforce_bundle(&b, 5, ORACLE_CAP).unwrap();
        for (strict, want) in [(true, &f.strict_witness), (false, &f.nonstrict_witness)] {
            let oracle = expected(&oracle_verdict(&entries, strict));
            assert_eq!(&oracle, want, "{} strict={strict}: oracle vs hand value", f.name);
            let search = bundle_threshold_search(&b, strict, 5).unwrap();
            assert_eq!(search.witness().cloned(), oracle, "{} strict={strict}", f.name);
            if oracle.is_none() {
                assert_eq!(search.verdict, Verdict::Exhausted { depth: 5 });
            }
        }
    }
}

#[test]
fn paterson_fixture_solves_the_pcp_instance() {
    let f = bundle_fixtures().into_iter().find(|f| f.name == "paterson").unwrap();
    let word = f.nonstrict_witness.unwrap();
    assert!(tiny_pcp().is_solution(&word).unwrap());
    assert_eq!(f.input.block_value(&word), int(0));
    let out = pcp_search(&tiny_pcp(), 8, 5, false).unwrap();
    assert_eq!(out.witness(), Some(&word));
}

/// Choi matrix of `X ↦ Σ w K X K†`, normalized to trace 1.
fn choi(d: usize, kraus: &[(Rational, QMatrix)]) -> QMatrix {
    let mut c = QMatrix::zeros(d * d, d * d);
    for (w, k) in kraus {
        for (a, i, b, j) in index_quads(d) {
            let kb = &k[(b, j)];
            let v = k[(a, i)].clone() * Complex::new(kb.re.clone(), -kb.im.clone());
            c[(a * d + i, b * d + j)] = c[(a * d + i, b * d + j)].clone() + v.scale(&(w.clone() / int(d as i64)));
        }
    }
    c
}

fn index_quads(d: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..d).flat_map(move |a| (0..d).flat_map(move |i| (0..d).flat_map(move |b| (0..d).map(move |j| (a, i, b, j)))))
}

fn qm(rows: &[&[Rational]]) -> QMatrix {
    QMatrix::from_rational(&Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()))
}

fn projector(d: usize, k: usize) -> QMatrix {
    CMatrix::unit(d, d, k, k)
}

/// `p·U X Uᵀ + (1-p)·tr X·𝟙/2` for a rational rotation `U`.
fn noisy_rotation(p: Rational, c: Rational, s: Rational) -> QMatrix {
    let u = qm(&[&[c.clone(), -s.clone()], &[s, c]]);
    let mut kraus = vec![(p.clone(), u)];
    let rest = Rational::one() - p;
    for a in 0..2 {
        for i in 0..2 {
            kraus.push((rest.clone() / int(2), CMatrix::unit(2, 2, a, i)));
        }
    }
    choi(2, &kraus)
}

#[test]
fn amplitude_damping_instance() {
    // K0 = diag(1, 1/2), K1 = (√3/2)|0⟩⟨1|
    let damp = choi(2, &[(int(1), qm(&[&[int(1), int(0)], &[int(0), rat(1, 2)]])), (rat(3, 4), CMatrix::unit(2, 2, 0, 1))]);
    let inst = ChannelInstance { d: 2, chois: vec![damp], rho: projector(2, 1), phi: projector(2, 0), lambda: rat(9, 10) };
    // |1⟩ keeps weight 4^-n, so the |0⟩ weight 1 - 4^-n first exceeds 9/10 at n = 2
    let out = threshold_search(&inst, true, 4).unwrap();
    assert_eq!(out.verdict, Verdict::Witness { word: vec![1, 1] });
    assert_eq!(out.certificate.unwrap().exact, "15/16");
}

#[test]
fn channel_search_agrees_with_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rotations = [(rat(3, 5), rat(4, 5)), (rat(5, 13), rat(12, 13)), (int(0), int(1)), (int(1), int(0))];
    for _ in 0..12 {
        let k = rng.gen_range(1..=3);
        let chois: Vec<QMatrix> = (0..k)
            .map(|_| {
                let (c, s) = rotations[rng.gen_range(0..rotations.len())].clone();
                noisy_rotation(rat(rng.gen_range(1..=4), 4), c, s)
            })
            .collect();
        let lambda = rat(rng.gen_range(1..10), 10);
        let rho = projector(2, rng.gen_range(0..2));
        let inst = ChannelInstance { d: 2, chois, rho, phi: projector(2, 0), lambda };
        let entries = bruteforce_oracle(&inst, 5, ORACLE_CAP).unwrap();
        for strict in [true, false] {
            let oracle = expected(&oracle_verdict(&entries, strict));
            let search = threshold_search(&inst, strict, 5).unwrap();
            assert_eq!(search.witness().cloned(), oracle, "{inst:?} strict={strict}");
        }
    }
}

#[test]
fn normalization_preserves_mortality() {
    let n = qm(&[&[int(0), int(1)], &[int(0), int(0)]]);
    let p = qm(&[&[int(1), int(0)], &[int(0), int(2)]]);
    let real = |m: &QMatrix| Matrix::from_fn(2, 2, |i, j| m[(i, j)].re.clone());
    let before = mortality_search(&[real(&n), real(&p)], 4).unwrap();
    assert_eq!(before.witness(), Some(&vec![1, 1]));
    let fam = kraus_normalize(&[n.clone(), p.clone()]).unwrap();
    let exact = fam.exact.as_ref().unwrap();
    for len in 1..=4 {
        for w in qdecide_gadgets::words::words_of_length(2, len) {
            let zero = annihilates(&[n.clone(), p.clone()], &w);
            assert_eq!(annihilates(exact, &w), zero, "{w:?}");
            if zero {
                assert!(interval_annihilates(&fam.matrices, &w));
            }
        }
    }
}
