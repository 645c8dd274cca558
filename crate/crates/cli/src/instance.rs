//! Instance and witness files.
//!
//! An instance is `{"kind": ..., "params": {...}}`. Every scalar is an exact
//! string (`"3"`, `"-1/2"`), matrices are row-major arrays of `[re, im]`
//! pairs, and words are arrays of 1-based integers.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qdecide_core::{Matrix, QMatrix, Rational};
use qdecide_formula::{Assignment, Formula, Norm, ProblemInstance};
use qdecide_gadgets::bundle::{
    matrix_strs, parse_exact, parse_matrix, parse_real_matrix, rational_str, real_matrix_strs, BundleDoc, MatrixStr,
};
use qdecide_gadgets::{ChannelInstance, PcpInstance, Word};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: String,
    pub params: Value,
}

// built once per run, so the size spread between variants is harmless
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Problem(ProblemInstance),
    Pcp(PcpInstance),
    Mortality(Vec<Matrix<Rational>>),
    Gadget(BundleDoc),
    Threshold(ChannelInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Problem(p) => p.kind(),
            Instance::Pcp(_) => "pcp",
            Instance::Mortality(_) => "mortality",
            Instance::Gadget(_) => "gadget",
            Instance::Threshold(_) => "threshold",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateParams {
    rho: MatrixStr,
    d: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionParams {
    p: MatrixStr,
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelParams {
    choi: MatrixStr,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<usize>,
    /// Schatten index: an integer or `"inf"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_prime: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MortalityParams {
    matrices: Vec<MatrixStr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdParams {
    d: usize,
    chois: Vec<MatrixStr>,
    rho: MatrixStr,
    phi: MatrixStr,
    lambda: String,
}

fn field<T>(v: Option<T>, kind: &str, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("{kind}: missing parameter `{name}`"))
}

fn params<T: for<'de> Deserialize<'de>>(kind: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).with_context(|| format!("invalid parameters for kind `{kind}`"))
}

fn norm_from(v: &Value) -> Result<Norm> {
    match v {
        Value::Number(n) => Ok(Norm::P(n.as_u64().and_then(|p| u32::try_from(p).ok()).ok_or_else(|| anyhow!("bad norm index {n}"))?)),
        Value::String(s) if s == "inf" => Ok(Norm::Infinity),
        Value::String(s) => Ok(Norm::P(s.parse().with_context(|| format!("bad norm index {s:?}"))?)),
        other => bail!("bad norm index {other}"),
    }
}

fn norm_to(p: &Norm) -> Value {
    match p {
        Norm::P(p) => Value::from(*p),
        Norm::Infinity => Value::from("inf"),
    }
}

pub fn parse_instance(file: &InstanceFile) -> Result<Instance> {
    let kind = file.kind.as_str();
    let p = &file.params;
    let q = |m: &MatrixStr| -> Result<QMatrix> { Ok(parse_matrix(m)?) };
    let inst = match kind {
        "separability" | "distillability" | "state-lhv" => {
            let s: StateParams = params(kind, p)?;
            let rho = q(&s.rho)?;
            match kind {
                "separability" => ProblemInstance::Separability { rho, d: s.d, n: s.n, terms: s.terms },
                "distillability" => ProblemInstance::Distillability { rho, d: s.d, n: s.n },
                _ => ProblemInstance::StateLhv { rho, d: s.d, n: s.n, m: field(s.m, kind, "m")? },
            }
        }
        "lhv-distribution" | "quantum-representation" => {
            let s: DistributionParams = params(kind, p)?;
            let dist = parse_real_matrix(&s.p)?;
            if kind == "lhv-distribution" {
                ProblemInstance::LhvDistribution { p: dist, n: s.n, m: s.m }
            } else {
                ProblemInstance::QuantumRepresentation { p: dist, n: s.n, m: s.m, d: field(s.d, kind, "d")? }
            }
        }
        "birkhoff" | "zero-error" | "additivity" => {
            let s: ChannelParams = params(kind, p)?;
            let choi = q(&s.choi)?;
            match kind {
                "birkhoff" => ProblemInstance::Birkhoff { choi, d: s.d, n: field(s.n, kind, "n")?, terms: s.terms },
                "zero-error" => {
                    ProblemInstance::ZeroError { choi, d: s.d, n: field(s.n, kind, "n")?, m: field(s.m, kind, "m")? }
                }
                _ => ProblemInstance::Additivity {
                    choi,
                    d: s.d,
                    p: norm_from(&field(s.p, kind, "p")?)?,
                    d_prime: field(s.d_prime, kind, "d_prime")?,
                },
            }
        }
        "pcp" => {
            let inst: PcpInstance = params(kind, p)?;
            inst.validate()?;
            return Ok(Instance::Pcp(inst));
        }
        "mortality" => {
            let s: MortalityParams = params(kind, p)?;
            let ms = s.matrices.iter().map(|m| parse_real_matrix(m)).collect::<std::result::Result<Vec<_>, _>>()?;
            let n = ms.first().map(|m| m.rows()).ok_or_else(|| anyhow!("mortality: at least one matrix is required"))?;
            if ms.iter().any(|m| m.shape() != (n, n)) {
                bail!("mortality: matrices must be square and of one size");
            }
            return Ok(Instance::Mortality(ms));
        }
        "gadget" => return Ok(Instance::Gadget(params(kind, p)?)),
        "threshold" => {
            let s: ThresholdParams = params(kind, p)?;
            let inst = ChannelInstance {
                d: s.d,
                chois: s.chois.iter().map(q).collect::<Result<_>>()?,
                rho: q(&s.rho)?,
                phi: q(&s.phi)?,
                lambda: parse_exact(&s.lambda)?,
            };
            inst.validate()?;
            return Ok(Instance::Threshold(inst));
        }
        other => bail!("unknown instance kind `{other}`"),
    };
    Ok(Instance::Problem(inst))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("plain data")
}

pub fn instance_file(inst: &Instance) -> InstanceFile {
    let params = match inst {
        Instance::Problem(p) => match p {
            ProblemInstance::Separability { rho, d, n, terms } => {
                to_value(&StateParams { rho: matrix_strs(rho), d: *d, n: *n, m: None, terms: *terms })
            }
            ProblemInstance::Distillability { rho, d, n } => {
                to_value(&StateParams { rho: matrix_strs(rho), d: *d, n: *n, m: None, terms: None })
            }
            ProblemInstance::StateLhv { rho, d, n, m } => {
                to_value(&StateParams { rho: matrix_strs(rho), d: *d, n: *n, m: Some(*m), terms: None })
            }
            ProblemInstance::LhvDistribution { p, n, m } => {
                to_value(&DistributionParams { p: real_matrix_strs(p), n: *n, m: *m, d: None })
            }
            ProblemInstance::QuantumRepresentation { p, n, m, d } => {
                to_value(&DistributionParams { p: real_matrix_strs(p), n: *n, m: *m, d: Some(*d) })
            }
            ProblemInstance::Birkhoff { choi, d, n, terms } => to_value(&ChannelParams {
                choi: matrix_strs(choi),
                d: *d,
                n: Some(*n),
                m: None,
                terms: *terms,
                p: None,
                d_prime: None,
            }),
            ProblemInstance::ZeroError { choi, d, n, m } => to_value(&ChannelParams {
                choi: matrix_strs(choi),
                d: *d,
                n: Some(*n),
                m: Some(*m),
                terms: None,
                p: None,
                d_prime: None,
            }),
            ProblemInstance::Additivity { choi, d, p, d_prime } => to_value(&ChannelParams {
                choi: matrix_strs(choi),
                d: *d,
                n: None,
                m: None,
                terms: None,
                p: Some(norm_to(p)),
                d_prime: Some(*d_prime),
            }),
        },
        Instance::Pcp(p) => to_value(p),
        Instance::Mortality(ms) => to_value(&MortalityParams { matrices: ms.iter().map(real_matrix_strs).collect() }),
        Instance::Gadget(doc) => to_value(doc),
        Instance::Threshold(t) => to_value(&ThresholdParams {
            d: t.d,
            chois: t.chois.iter().map(matrix_strs).collect(),
            rho: matrix_strs(&t.rho),
            phi: matrix_strs(&t.phi),
            lambda: rational_str(&t.lambda),
        }),
    };
    InstanceFile { kind: inst.kind().to_string(), params }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: InstanceFile =
        serde_json::from_str(&text).with_context(|| format!("{} is not an instance file", path.display()))?;
    parse_instance(&file).with_context(|| format!("in {}", path.display()))
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    let text = serde_json::to_string_pretty(&instance_file(inst))? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// A witness: a word for the word problems, exact variable values for the
/// encoded ones. Matrix entries are spread onto the formula's variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Word>,
    /// For threshold problems: `>` rather than `≥`.
    #[serde(default = "yes")]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, MatrixStr>,
}

fn yes() -> bool {
    true
}

impl WitnessFile {
    pub fn word(&self) -> Result<&Word> {
        self.word.as_ref().ok_or_else(|| anyhow!("the witness file needs a `word`"))
    }

    pub fn assignment(&self, f: &Formula) -> Result<Assignment> {
        let mut a = Assignment::new();
        for (name, m) in &self.matrices {
            let var = f.binder(name).ok_or_else(|| anyhow!("the formula has no variable `{name}`"))?.clone();
            a.set_matrix(f, &var, &parse_matrix(m)?)?;
        }
        for (name, v) in &self.values {
            a.set(name.clone(), parse_exact(v)?);
        }
        Ok(a)
    }
}

pub fn read_witness(path: &Path) -> Result<WitnessFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a witness file", path.display()))
}
