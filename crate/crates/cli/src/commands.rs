//! The verbs. Each writes its report to `out` and returns whether it
//! established something (a witness, a true check) or not.

use std::cmp::Ordering;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use anyhow::{bail, Context, Result};
use num_traits::Zero;
use qdecide_core::scalar::rational_to_string;
use qdecide_formula::{
    check_witness, encode, export_smt, formula_stats, instantiate, numeric_search, prenex, sweep, Formula,
    FormulaStats, NumericOutcome, SearchBudget, SweepBackend, SweepVerdict,
};
use qdecide_gadgets::bundle::{from_doc, to_doc};
use qdecide_gadgets::prop1::identity_tolerance;
use qdecide_gadgets::search::{bundle_relation, product};
use qdecide_gadgets::words::words_of_length;
use qdecide_gadgets::{
    bundle_threshold_search, mortality_search, pcp_search, threshold_search, verify_prop1_identity, BundleDoc,
    GadgetBundle, IdentityCheck, SearchOutcome,
};
use serde::Serialize;
use serde_json::json;

use crate::instance::{read_instance, read_witness, write_instance, Instance};

/// Outcome of a verb, mapped onto the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A witness was found or the check holds: exit 0.
    Established,
    /// Exhausted, unknown or refuted: exit 2.
    Open,
}

impl Status {
    pub fn from_bool(b: bool) -> Status {
        if b {
            Status::Established
        } else {
            Status::Open
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Established => 0,
            Status::Open => 2,
        }
    }
}

/// Settings shared by every verb and echoed in the header.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    /// Bits for interval arithmetic; `None` keeps what the instance says.
    pub precision: Option<u32>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, precision: None, jobs: 1 }
    }
}

impl RunConfig {
    pub fn header(&self) -> String {
        let prec = self.precision.map_or_else(|| "instance".to_string(), |p| p.to_string());
        format!("# qdecide {} seed={} precision={} jobs={}", env!("CARGO_PKG_VERSION"), self.seed, prec, self.jobs)
    }

    fn budget(&self) -> SearchBudget {
        SearchBudget { seed: self.seed, ..SearchBudget::default() }
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn problem(inst: &Instance) -> Result<&qdecide_formula::ProblemInstance> {
    match inst {
        Instance::Problem(p) => Ok(p),
        other => bail!("`{}` instances have no formula encoding; use `search`", other.kind()),
    }
}

/// Formula file: the kind, its statistics, and the SMT-LIB2 text, which is
/// the canonical serialization of the formula.
#[derive(Serialize)]
struct FormulaFile<'a> {
    kind: &'a str,
    stats: &'a FormulaStats,
    smtlib2: &'a str,
}

pub fn cmd_encode(
    file: &Path,
    out_file: Option<&Path>,
    smt_file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Status> {
    let inst = read_instance(file)?;
    let p = problem(&inst)?;
    for w in p.warnings() {
        eprintln!("warning: {w}");
    }
    let f = prenex(&encode(p)?);
    let stats = formula_stats(&f);
    writeln!(out, "{stats}")?;
    let smt = export_smt(&f);
    if let Some(path) = smt_file {
        std::fs::write(path, &smt).with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    if let Some(path) = out_file {
        let doc = FormulaFile { kind: p.kind(), stats: &stats, smtlib2: &smt };
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(Status::Established)
}

/// Checks an exact witness. Universal blocks must be fully assigned
/// (Skolem values) and are substituted before the existential check.
fn check_formula(f: &Formula, w: &crate::instance::WitnessFile) -> Result<bool> {
    let a = w.assignment(f)?;
    let f = if f.is_existential() { f.clone() } else { instantiate(f, &a)? };
    Ok(check_witness(&f, &a)?)
}

fn gadget_bundle(doc: &BundleDoc, cfg: &RunConfig) -> Result<GadgetBundle> {
    let mut doc = doc.clone();
    if let Some(bits) = cfg.precision.filter(|&b| b != doc.precision) {
        // recorded enclosures belong to the old precision
        doc.precision = bits;
        doc.derived = None;
    }
    Ok(from_doc(&doc)?)
}

pub fn cmd_check(file: &Path, witness: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    let inst = read_instance(file)?;
    let w = read_witness(witness)?;
    let (holds, detail) = match &inst {
        Instance::Problem(p) => (check_formula(&encode(p)?, &w)?, json!({})),
        Instance::Pcp(p) => {
            let (top, bottom) = p.concatenate(w.word()?)?;
            (p.is_solution(w.word()?)?, json!({ "top": top, "bottom": bottom }))
        }
        Instance::Mortality(ms) => {
            let word = w.word()?;
            if word.is_empty() || word.iter().any(|&i| i == 0 || i > ms.len()) {
                bail!("mortality words are nonempty over 1..={}", ms.len());
            }
            (product(ms, word).iter().all(Zero::is_zero), json!({}))
        }
        Instance::Threshold(t) => {
            let word = w.word()?;
            if word.iter().any(|&i| i == 0 || i > t.chois.len()) {
                bail!("letters must lie in 1..={}", t.chois.len());
            }
            let v = t.overlap(word);
            let rel = v.cmp(&t.lambda);
            (rel == Ordering::Greater || (!w.strict && rel == Ordering::Equal), json!({ "overlap": rational_to_string(&v) }))
        }
        Instance::Gadget(doc) => {
            let b = gadget_bundle(doc, cfg)?;
            let word = w.word()?;
            let (overlap, rel) = bundle_relation(&b, word)?;
            let Some(rel) = rel else { bail!("the overlap of {word:?} could not be compared with λ at {} bits", b.precision) };
            let detail = json!({
                "overlap_lo": rational_to_string(&overlap.lo().to_rational()),
                "overlap_hi": rational_to_string(&overlap.hi().to_rational()),
                "block": rational_to_string(&b.input.block_value(word)),
            });
            (rel == Ordering::Greater || (!w.strict && rel == Ordering::Equal), detail)
        }
    };
    print_json(out, &json!({ "kind": inst.kind(), "holds": holds, "detail": detail }))?;
    Ok(Status::from_bool(holds))
}

#[derive(Clone, Debug)]
pub struct SearchArgs {
    pub depth: usize,
    pub strict: bool,
    pub max_overhang: usize,
    pub claus: bool,
}

fn report(out: &mut dyn Write, kind: &str, outcome: &SearchOutcome) -> Result<Status> {
    let mut v = serde_json::to_value(outcome)?;
    v["kind"] = json!(kind);
    print_json(out, &v)?;
    Ok(Status::from_bool(outcome.witness().is_some()))
}

pub fn cmd_search(file: &Path, args: &SearchArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    let inst = read_instance(file)?;
    let kind = inst.kind();
    match &inst {
        Instance::Pcp(p) => report(out, kind, &pcp_search(p, args.max_overhang, args.depth, args.claus || p.claus)?),
        Instance::Mortality(ms) => report(out, kind, &mortality_search(ms, args.depth)?),
        Instance::Threshold(t) => report(out, kind, &threshold_search(t, args.strict, args.depth)?),
        Instance::Gadget(doc) => {
            let b = gadget_bundle(doc, cfg)?;
            report(out, kind, &bundle_threshold_search(&b, args.strict, args.depth)?)
        }
        Instance::Problem(p) => {
            let f = prenex(&encode(p)?);
            if !f.is_existential() {
                print_json(out, &json!({ "kind": kind, "verdict": "unknown", "reason": "formula has universal blocks" }))?;
                return Ok(Status::Open);
            }
            let outcome = numeric_search(&f, &cfg.budget())?;
            let v = match &outcome {
                NumericOutcome::Witness(a) => {
                    let values: serde_json::Map<String, serde_json::Value> =
                        a.iter().map(|(k, v)| (k.clone(), json!(rational_to_string(v)))).collect();
                    json!({ "kind": kind, "verdict": "witness", "values": values })
                }
                NumericOutcome::Approximate { residual, .. } => {
                    json!({ "kind": kind, "verdict": "approximate", "residual": residual })
                }
                NumericOutcome::Unknown { best_residual } => {
                    json!({ "kind": kind, "verdict": "unknown", "best_residual": best_residual })
                }
            };
            print_json(out, &v)?;
            Ok(Status::from_bool(outcome.is_witness()))
        }
    }
}

fn load_gadget(file: &Path, cfg: &RunConfig) -> Result<GadgetBundle> {
    match read_instance(file)? {
        Instance::Gadget(doc) => gadget_bundle(&doc, cfg),
        other => bail!("expected a `gadget` instance, got `{}`", other.kind()),
    }
}

pub fn cmd_gadget_build(file: &Path, out_file: Option<&PathBuf>, cfg: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    let b = load_gadget(file, cfg)?;
    let doc = to_doc(&b);
    print_json(
        out,
        &json!({
            "d": b.dim(),
            "k": b.k(),
            "channels_cp_tp": true,
            "rho_certified": true,
            "derived": doc.derived,
        }),
    )?;
    if let Some(path) = out_file {
        write_instance(path, &Instance::Gadget(doc))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(Status::Established)
}

/// Checks the identity on every word of length `1..=max_len`, spread over
/// `cfg.jobs` threads. Results are reported in word order.
pub fn verify_words(b: &GadgetBundle, max_len: usize, jobs: usize) -> Result<Vec<IdentityCheck>> {
    let words: Vec<Vec<usize>> = (1..=max_len).flat_map(|n| words_of_length(b.k(), n)).collect();
    let jobs = jobs.clamp(1, words.len().max(1));
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<Result<IdentityCheck>>> = (0..words.len()).map(|_| None).collect();
    let chunks: Vec<Vec<(usize, Result<IdentityCheck>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                        if i >= words.len() {
                            break done;
                        }
                        done.push((i, verify_prop1_identity(b, &words[i]).map_err(Into::into)));
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification worker panicked")).collect()
    });
    for (i, r) in chunks.into_iter().flatten() {
        results[i] = Some(r);
    }
    results.into_iter().map(|r| r.expect("every word is claimed once")).collect()
}

pub fn cmd_gadget_verify(file: &Path, max_len: usize, cfg: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    let b = load_gadget(file, cfg)?;
    let checks = verify_words(&b, max_len, cfg.jobs)?;
    let tol = identity_tolerance();
    let failures: Vec<_> = checks.iter().filter(|c| !c.holds(&tol)).map(|c| c.word.clone()).collect();
    let widest = checks.iter().map(|c| c.difference.width()).max().unwrap_or_else(qdecide_core::Dyadic::zero);
    print_json(
        out,
        &json!({
            "words": checks.len(),
            "max_len": max_len,
            "precision": b.precision,
            "tolerance": rational_to_string(&tol.to_rational()),
            "widest_difference": format!("{:e}", widest.to_f64()),
            "failures": failures,
        }),
    )?;
    Ok(Status::from_bool(failures.is_empty()))
}

pub fn cmd_sweep(file: &Path, n_max: usize, numeric: bool, cfg: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    let inst = read_instance(file)?;
    let p = problem(&inst)?;
    let backend = if numeric { SweepBackend::Numeric(cfg.budget()) } else { SweepBackend::Export };
    let mut found = false;
    for e in sweep(p, n_max, &backend)? {
        let verdict = match &e.verdict {
            SweepVerdict::Witness(_) => {
                found = true;
                "witness".to_string()
            }
            SweepVerdict::Approximate { residual } => format!("approximate (residual {residual:e})"),
            SweepVerdict::Unknown => "unknown".to_string(),
            SweepVerdict::Exported(s) => format!("exported ({} bytes of SMT-LIB2)", s.len()),
        };
        writeln!(out, "n={} {} : {verdict}", e.n, e.stats)?;
    }
    Ok(Status::from_bool(found))
}
