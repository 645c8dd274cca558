//! Acceptance run: one PASS/FAIL line per criterion, then a single assert.
//! Run with `cargo test -p qdecide --test acceptance -- --nocapture`.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qdecide_core::channels::psd_certificate;
use qdecide_core::eigen::min_eigenvalue_interval;
use qdecide_core::minors::principal_minors;
use qdecide_core::{CMatrix, Complex, CpVerdict, Matrix, QMatrix, Rational};
use qdecide_formula::encoders::encode_birkhoff;
use qdecide_formula::fixtures::{cayley_unitary, mixed_unitary_choi, real_matrix, witness_fixtures};
use qdecide_formula::{check_witness, export_smt, formula_stats, numeric_search, parse_smt, prenex, SearchBudget};
use qdecide_gadgets::fixtures::bundle_fixtures;
use qdecide_gadgets::kraus::{annihilates, interval_annihilates, kraus_normalize};
use qdecide_gadgets::prop1::check_constraints;
use qdecide_gadgets::search::ORACLE_CAP;
use qdecide_gadgets::words::{
    bilinear, gamma, gamma_square, paterson_square_vectors, paterson_x, paterson_y, sigma, words_of_length,
};
use qdecide_gadgets::{
    bruteforce_bundle, build_prop1, bundle_threshold_search, mortality_search, oracle_verdict, pcp_search,
    verify_prop1_identity, GadgetBundle, OracleVerdict, PcpInstance, Prop1Input,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    within_after(Duration::ZERO, start, limit)
}

/// As [`within`], counting `spent` (shared setup) towards the limit.
fn within_after(spent: Duration, start: Instant, limit: Duration) -> Result<(), String> {
    let t = spent + start.elapsed();
    ensure(t <= limit, || format!("took {t:.1?}, limit {limit:?}"))
}

// ------------------------------------------------------------ criterion 1

fn random_word(rng: &mut ChaCha8Rng, m: usize, max: usize) -> Vec<usize> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| rng.gen_range(1..=m)).collect()
}

fn cat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn morphisms() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = 3;
    for _ in 0..200 {
        let (u, w, u2, w2) =
            (random_word(&mut rng, m, 6), random_word(&mut rng, m, 6), random_word(&mut rng, m, 6), random_word(&mut rng, m, 6));
        let s = |x: &[usize]| sigma(x, m).unwrap();
        let law = num_traits::pow(BigInt::from(m), w.len()) * s(&u) + s(&w);
        ensure(s(&cat(&u, &w)) == law, || format!("σ law fails on {u:?}, {w:?}"))?;
        let g = |a: &[usize], b: &[usize]| gamma(a, b, m).unwrap();
        ensure(g(&cat(&u, &u2), &cat(&w, &w2)) == g(&u, &w).matmul(&g(&u2, &w2)), || format!("γ law fails on {u:?} {w:?}"))?;
        let gg = |a: &[usize], b: &[usize]| gamma_square(a, b, m).unwrap();
        ensure(gg(&cat(&u, &u2), &cat(&w, &w2)) == gg(&u, &w).matmul(&gg(&u2, &w2)), || {
            format!("γ⊗γ law fails on {u:?} {w:?}")
        })?;
        let (x, y) = paterson_square_vectors();
        let d = s(&u) - s(&w);
        ensure(bilinear(&y, &gg(&u, &w), &x) == &d * &d, || format!("squared pairing fails on {u:?} {w:?}"))?;
    }
    let words: Vec<Vec<usize>> = (0..=4).flat_map(|n| words_of_length(m, n)).collect();
    for u in &words {
        for w in &words {
            let v = bilinear(&paterson_y(), &gamma(u, w, m).unwrap(), &paterson_x());
            ensure(v == sigma(u, m).unwrap() - sigma(w, m).unwrap(), || format!("pairing fails on {u:?} {w:?}"))?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("200 random tuples, {} exhaustive pairs, {:.2?}", words.len() * words.len(), start.elapsed()))
}

// ------------------------------------------------------------ criterion 2

fn random_hermitian(rng: &mut ChaCha8Rng) -> QMatrix {
    let d = rng.gen_range(1..=4);
    if rng.gen_bool(0.5) {
        let mut h = QMatrix::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = Complex::real(int(rng.gen_range(-3..=3)));
            for j in i + 1..d {
                let (a, b) = (int(rng.gen_range(-3..=3)), int(rng.gen_range(-3..=3)));
                h[(i, j)] = Complex::new(a.clone(), b.clone());
                h[(j, i)] = Complex::new(a, -b);
            }
        }
        h
    } else {
        // Gram matrices, often singular, so the PSD side is exercised too
        let r = rng.gen_range(1..=3);
        let b = QMatrix::from_fn(d, r, |_, _| Complex::new(int(rng.gen_range(-2..=2)), int(rng.gen_range(-2..=2))));
        b.matmul(&b.adjoint())
    }
}

fn lemma1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut psd = 0;
    for i in 0..500 {
        let h = random_hermitian(&mut rng);
        let minors = principal_minors(&h).map_err(|e| e.to_string())?.iter().all(|m| *m >= Rational::zero());
        let eigen = min_eigenvalue_interval(&h).map_err(|e| e.to_string())?.lo().signum() != Ordering::Less;
        ensure(minors == eigen, || format!("matrix {i} disagrees: minors {minors}, eigenvalues {eigen}: {h:?}"))?;
        psd += usize::from(minors);
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("500 matrices ({psd} PSD), 0 disagreements, {:.2?}", start.elapsed()))
}

// ------------------------------------------------------------ criteria 3, 4

fn random_input(rng: &mut ChaCha8Rng, d: usize, k: usize, lambda: Rational) -> Prop1Input {
    let n = d * d - 2;
    let vector = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
        if v.iter().any(|a| !a.is_zero()) {
            break v;
        }
    };
    let x = vector(rng);
    let y = vector(rng);
    let phi = loop {
        let v: Vec<Complex<Rational>> =
            (0..d).map(|_| Complex::new(int(rng.gen_range(-2..=2)), int(rng.gen_range(-2..=2)))).collect();
        if v.iter().any(|z| !z.re.is_zero() || !z.im.is_zero()) {
            break v;
        }
    };
    let matrices = (0..k).map(|_| Matrix::from_fn(n, n, |_, _| int(rng.gen_range(-2..=2)))).collect();
    Prop1Input { lambda, phi, matrices, x, y }
}

fn random_bundles() -> Result<Vec<GadgetBundle>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lambdas = [rat(1, 4), rat(1, 2), rat(3, 4)];
    (0..20)
        .map(|i| {
            let d = 2 + i % 2;
            let k = 1 + (i / 2) % 3;
            let lambda = lambdas[i % 3].clone();
            let inp = random_input(&mut rng, d, k, lambda);
            build_prop1(inp.lambda, inp.phi, inp.matrices, inp.x, inp.y).map_err(|e| format!("bundle {i}: {e}"))
        })
        .collect()
}

fn identity(bundles: &[GadgetBundle], spent: Duration) -> Check {
    let start = Instant::now();
    let tol = rat(1, 1) / Rational::from_integer(num_traits::pow(BigInt::from(10), 20));
    let mut words = 0;
    let mut widest = Rational::zero();
    for (i, b) in bundles.iter().enumerate() {
        ensure(b.precision == 256, || format!("bundle {i} built at {} bits", b.precision))?;
        for w in (1..=4).flat_map(|n| words_of_length(b.k(), n)) {
            let c = verify_prop1_identity(b, &w).map_err(|e| format!("bundle {i}, {w:?}: {e}"))?;
            let width = c.difference.width().to_rational();
            ensure(c.difference.contains_zero() && width <= tol, || {
                format!("bundle {i}, word {w:?}: difference [{:e}, {:e}]", c.difference.lo().to_f64(), c.difference.hi().to_f64())
            })?;
            widest = widest.max(width);
            words += 1;
        }
    }
    within_after(spent, start, Duration::from_secs(300))?;
    Ok(format!("20 bundles, {words} words, widest difference {:.1e}, {:.2?}", rat_f64(&widest), spent + start.elapsed()))
}

fn rat_f64(q: &Rational) -> f64 {
    qdecide_core::Dyadic::from_rational(q, 64, qdecide_core::scalar::Round::Up).to_f64()
}

fn bundle_valid(b: &GadgetBundle) -> Result<(), String> {
    for (i, ch) in b.channels.iter().enumerate() {
        ensure(ch.is_trace_preserving(), || format!("channel {i} not certified TP"))?;
        ensure(ch.is_completely_positive() == CpVerdict::CertifiedTrue, || format!("channel {i} not certified CP"))?;
    }
    ensure(b.rho.trace().re.contains_rational(&Rational::one()), || "tr ρ ≠ 1".into())?;
    ensure(psd_certificate(&b.rho) == CpVerdict::CertifiedTrue, || "ρ not certified PSD".into())?;
    check_constraints(b.lambda(), b.dim(), &b.params).map_err(|e| e.to_string())?;
    ensure(b.lambda_term.contains_rational(b.lambda()), || "constant term misses λ".into())
}

fn validity(bundles: &[GadgetBundle], spent: Duration) -> Check {
    let start = Instant::now();
    for (i, b) in bundles.iter().enumerate() {
        bundle_valid(b).map_err(|e| format!("random bundle {i}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut swept = 0;
    for lambda in [rat(1, 10), rat(1, 2), rat(9, 10)] {
        for d in [2, 3, 5] {
            let inp = random_input(&mut rng, d, 1, lambda.clone());
            let b = build_prop1(inp.lambda, inp.phi, inp.matrices, inp.x, inp.y)
                .map_err(|e| format!("sweep λ={lambda}, d={d}: {e}"))?;
            bundle_valid(&b).map_err(|e| format!("sweep λ={lambda}, d={d}: {e}"))?;
            swept += 1;
        }
    }
    within_after(spent, start, Duration::from_secs(120))?;
    Ok(format!("{} random + {swept} sweep bundles valid, {:.2?}", bundles.len(), spent + start.elapsed()))
}

// ------------------------------------------------------------ criterion 5

fn search_vs_oracle() -> Check {
    let start = Instant::now();
    let mut compared = 0;
    for f in bundle_fixtures() {
        let i = &f.input;
        ensure(i.k() <= 3, || format!("{} has k > 3", f.name))?;
        let b = build_prop1(i.lambda.clone(), i.phi.clone(), i.matrices.clone(), i.x.clone(), i.y.clone())
            .map_err(|e| format!("{}: {e}", f.name))?;
        let entries = bruteforce_bundle(&b, 5, ORACLE_CAP).map_err(|e| e.to_string())?;
        for strict in [true, false] {
            let oracle = match oracle_verdict(&entries, strict) {
                OracleVerdict::Witness(w) => Some(w),
                OracleVerdict::NoWitness => None,
                OracleVerdict::Undetermined(w) => return Err(format!("{}: oracle undetermined on {w:?}", f.name)),
            };
            let search = bundle_threshold_search(&b, strict, 5).map_err(|e| e.to_string())?;
            let got = search.witness().cloned();
            ensure(got.as_ref().map(Vec::len) == oracle.as_ref().map(Vec::len) && got == oracle, || {
                format!("{} strict={strict}: search {got:?}, oracle {oracle:?}", f.name)
            })?;
            compared += 1;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{compared} fixture/strictness pairs agree at depth 5, {:.2?}", start.elapsed()))
}

// ------------------------------------------------------------ criterion 6

fn pcp() -> Check {
    let start = Instant::now();
    let sipser = PcpInstance::new(
        3,
        vec![(vec![2], vec![3, 1]), (vec![1], vec![1, 2]), (vec![3, 1], vec![1]), (vec![1, 2, 3], vec![3])],
    )
    .unwrap();
    let out = pcp_search(&sipser, 64, 8, false).map_err(|e| e.to_string())?;
    let w = out.witness().cloned().ok_or("no witness for the 4-tile instance")?;
    ensure(w == vec![2, 1, 3, 2, 4], || format!("witness {w:?}"))?;
    let (top, bottom) = sipser.concatenate(&w).unwrap();
    ensure(top == bottom, || "concatenations differ".into())?;

    let claus = PcpInstance::new(3, vec![(vec![1], vec![1, 2]), (vec![2, 3], vec![3, 1]), (vec![1, 1], vec![1])]).unwrap();
    let k = claus.k();
    let out = pcp_search(&claus, 64, 6, true).map_err(|e| e.to_string())?;
    let c = out.witness().cloned().ok_or("no Claus-shaped witness")?;
    let shaped = c.first() == Some(&1) && c.last() == Some(&k) && c[1..c.len() - 1].iter().all(|&i| 1 < i && i < k);
    ensure(shaped && claus.is_solution(&c).unwrap(), || format!("Claus witness {c:?}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("witness {w:?}, Claus witness {c:?}, {:.2?}", start.elapsed()))
}

// ------------------------------------------------------------ criterion 7

fn mortality() -> Check {
    let start = Instant::now();
    let n = real_matrix(vec![vec![int(0), int(1)], vec![int(0), int(0)]]);
    let real = |m: &QMatrix| Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].re.clone());
    let out = mortality_search(&[real(&n)], 4).map_err(|e| e.to_string())?;
    let w = out.witness().cloned().ok_or("no mortality witness")?;
    ensure(w.len() == 2, || format!("witness {w:?}"))?;

    let p = real_matrix(vec![vec![int(1), int(0)], vec![int(0), int(2)]]);
    let fam = [n.clone(), p];
    let norm = kraus_normalize(&fam).map_err(|e| e.to_string())?;
    let tol = rat(1, 1) / Rational::from_integer(num_traits::pow(BigInt::from(10), 20));
    ensure(norm.residual.to_rational() <= tol, || format!("residual {:e}", norm.residual.to_f64()))?;
    let exact = norm.exact.as_ref().ok_or("no exact normalized family")?;
    let gram = exact.iter().fold(CMatrix::zeros(2, 2), |acc, m| acc + m.matmul(&m.adjoint()));
    ensure(gram == CMatrix::identity(2), || "exact residual is not 0".into())?;
    let fw = mortality_search(&[real(&fam[0]), real(&fam[1])], 4).map_err(|e| e.to_string())?;
    let fw = fw.witness().cloned().ok_or("no witness for the family")?;
    ensure(annihilates(&fam, &fw) && annihilates(exact, &fw) && interval_annihilates(&norm.matrices, &fw), || {
        format!("witness {fw:?} not preserved")
    })?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "nilpotent witness {w:?}; normalized family residual ≤ {:.1e} (exact 0), witness {fw:?} preserved, {:.2?}",
        norm.residual.to_f64(),
        start.elapsed()
    ))
}

// ------------------------------------------------------------ criterion 8

fn hermitian2(a: i64, b: i64, c: i64, e: i64) -> QMatrix {
    let mut h = real_matrix(vec![vec![rat(a, 2), rat(b, 3)], vec![rat(b, 3), rat(c, 2)]]);
    h[(0, 1)].im = rat(e, 5);
    h[(1, 0)].im = rat(-e, 5);
    h
}

fn encoders() -> Check {
    let start = Instant::now();
    let fixtures = witness_fixtures().map_err(|e| e.to_string())?;
    for fx in &fixtures {
        ensure(check_witness(&fx.formula, &fx.witness).map_err(|e| e.to_string())?, || format!("{} rejected", fx.name))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let ws: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
        let total: i64 = ws.iter().sum();
        let weights: Vec<Rational> = ws.iter().map(|&w| rat(w, total)).collect();
        let us: Vec<QMatrix> = (0..3)
            .map(|_| {
                let mut g = || rng.gen_range(-3..=3);
                cayley_unitary(&hermitian2(g(), g(), g(), g()))
            })
            .collect();
        let choi = mixed_unitary_choi(&weights, &us);
        let f = encode_birkhoff(&choi, 2, 1, Some(4)).map_err(|e| e.to_string())?;
        let out = numeric_search(&f, &SearchBudget::default()).map_err(|e| e.to_string())?;
        ensure(out.residual() <= 1e-6, || format!("channel {i}: residual {:e}", out.residual()))?;
        worst = worst.max(out.residual());
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} witness fixtures exact; 10 Birkhoff searches, worst residual {worst:.1e}, {:.2?}",
        fixtures.len(),
        start.elapsed()
    ))
}

// ------------------------------------------------------------ criterion 9

fn io() -> Check {
    let start = Instant::now();
    let fixtures = witness_fixtures().map_err(|e| e.to_string())?;
    for fx in &fixtures {
        let p = prenex(&fx.formula);
        let back = parse_smt(&export_smt(&p)).map_err(|e| format!("{}: {e}", fx.name))?;
        ensure(back == p, || format!("{}: round trip changed the formula", fx.name))?;
        let (a, b) = (formula_stats(&back), formula_stats(&fx.formula));
        ensure(a.real_vars() == b.real_vars() && a.atoms == b.atoms && a == b, || format!("{}: {a} vs {b}", fx.name))?;
    }
    Ok(format!("{} fixtures round-trip with equal counts, {:.2?}", fixtures.len(), start.elapsed()))
}

#[test]
fn acceptance() {
    // both criteria 3 and 4 are charged the construction time
    let start = Instant::now();
    let bundles = random_bundles();
    let built = start.elapsed();
    let with_bundles = |f: fn(&[GadgetBundle], Duration) -> Check| -> Check {
        match &bundles {
            Ok(b) => f(b, built),
            Err(e) => Err(e.clone()),
        }
    };
    let results: Vec<(&str, Check)> = vec![
        ("morphism suite", morphisms()),
        ("principal minors vs eigenvalue oracle", lemma1()),
        ("fidelity identity on random bundles", with_bundles(identity)),
        ("bundle validity", with_bundles(validity)),
        ("search vs oracle", search_vs_oracle()),
        ("PCP fixtures", pcp()),
        ("mortality and normalization", mortality()),
        ("encoder witnesses and Birkhoff search", encoders()),
        ("SMT-LIB2 round trip", io()),
    ];
    let mut failed = Vec::new();
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL  {name}: {msg}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
