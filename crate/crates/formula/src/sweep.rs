//! Fixed-parameter encoders run for every parameter value `1..=n_max`.
//!
//! A sweep only ever reports witnesses, exported scripts, or `unknown`; it
//! never answers the unbounded question negatively.

use crate::encoders::{encode, ProblemInstance};
use crate::error::{FormulaError, Result};
use crate::numeric::{numeric_search, NumericOutcome, SearchBudget};
use crate::prenex::prenex;
use crate::smt::export_smt;
use crate::stats::{formula_stats, FormulaStats};
use crate::witness::Assignment;

#[derive(Clone, Debug)]
pub enum SweepBackend {
    Export,
    Numeric(SearchBudget),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepVerdict {
    Witness(Assignment),
    Approximate { residual: f64 },
    Unknown,
    /// SMT-LIB2 text for an external solver.
    Exported(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub n: usize,
    pub stats: FormulaStats,
    pub verdict: SweepVerdict,
}

/// Name of the integer parameter a sweep varies for this instance kind.
pub fn sweep_parameter(inst: &ProblemInstance) -> Result<&'static str> {
    match inst {
        ProblemInstance::Distillability { .. }
        | ProblemInstance::StateLhv { .. }
        | ProblemInstance::Birkhoff { .. }
        | ProblemInstance::ZeroError { .. } => Ok("n"),
        ProblemInstance::QuantumRepresentation { .. } => Ok("d"),
        ProblemInstance::Additivity { .. } => Ok("d'"),
        ProblemInstance::Separability { .. } | ProblemInstance::LhvDistribution { .. } => Err(FormulaError::Usage(
            format!("{} instances have no free integer parameter to sweep", inst.kind()),
        )),
    }
}

/// The instance with its sweep parameter set to `v`.
pub fn with_parameter(inst: &ProblemInstance, v: usize) -> Result<ProblemInstance> {
    sweep_parameter(inst)?;
    let mut out = inst.clone();
    match &mut out {
        ProblemInstance::Distillability { n, .. }
        | ProblemInstance::StateLhv { n, .. }
        | ProblemInstance::Birkhoff { n, .. }
        | ProblemInstance::ZeroError { n, .. } => *n = v,
        ProblemInstance::QuantumRepresentation { d, .. } => *d = v,
        ProblemInstance::Additivity { d_prime, .. } => *d_prime = v,
        ProblemInstance::Separability { .. } | ProblemInstance::LhvDistribution { .. } => unreachable!(),
    }
    Ok(out)
}

pub fn sweep(inst: &ProblemInstance, n_max: usize, backend: &SweepBackend) -> Result<Vec<SweepEntry>> {
    sweep_parameter(inst)?;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let f = prenex(&encode(&with_parameter(inst, n)?)?);
        let stats = formula_stats(&f);
        let verdict = match backend {
            SweepBackend::Export => SweepVerdict::Exported(export_smt(&f)),
            SweepBackend::Numeric(_) if !f.is_existential() => SweepVerdict::Unknown,
            SweepBackend::Numeric(budget) => match numeric_search(&f, budget)? {
                NumericOutcome::Witness(a) => SweepVerdict::Witness(a),
                NumericOutcome::Approximate { residual, .. } => SweepVerdict::Approximate { residual },
                NumericOutcome::Unknown { .. } => SweepVerdict::Unknown,
            },
        };
        out.push(SweepEntry { n, stats, verdict });
    }
    Ok(out)
}
