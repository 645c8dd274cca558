//! JSON form of a gadget bundle. Exact scalars are strings (`"p/q"`),
//! complex entries are `[re, im]` pairs of such strings, and certified
//! enclosures are `{lo, hi, prec}` with exact dyadic endpoints.
//!
//! Loading rebuilds the gadget from its inputs at the recorded precision and
//! rejects the document unless every derived value matches.

use qdecide_core::scalar::{parse_rational, rational_to_string};
use num_traits::Zero;
use qdecide_core::{Complex, Interval, Matrix, QMatrix, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::prop1::{build_prop1_with, GadgetBundle, Prop1Input};

pub type ComplexStr = [String; 2];

pub fn rational_str(q: &Rational) -> String {
    rational_to_string(q)
}

pub fn parse_exact(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| GadgetError::Format(format!("not an exact rational: {s:?}")))
}

pub fn complex_str(z: &Complex<Rational>) -> ComplexStr {
    [rational_str(&z.re), rational_str(&z.im)]
}

pub fn parse_complex(z: &ComplexStr) -> Result<Complex<Rational>> {
    Ok(Complex::new(parse_exact(&z[0])?, parse_exact(&z[1])?))
}

pub fn parse_vector(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_exact(s)).collect()
}

pub type MatrixStr = Vec<Vec<ComplexStr>>;

pub fn matrix_strs(m: &QMatrix) -> MatrixStr {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| complex_str(&m[(i, j)])).collect()).collect()
}

pub fn real_matrix_strs(m: &Matrix<Rational>) -> MatrixStr {
    matrix_strs(&QMatrix::from_rational(m))
}

pub fn parse_matrix(rows: &[Vec<ComplexStr>]) -> Result<QMatrix> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GadgetError::Format("matrices must be nonempty and rectangular".into()));
    }
    let parsed = rows.iter().map(|r| r.iter().map(parse_complex).collect()).collect::<Result<Vec<Vec<_>>>>()?;
    Ok(QMatrix::from_fn(rows.len(), n, |i, j| parsed[i][j].clone()))
}

/// Rejects nonzero imaginary parts.
pub fn parse_real_matrix(rows: &[Vec<ComplexStr>]) -> Result<Matrix<Rational>> {
    let m = parse_matrix(rows)?;
    if m.iter().any(|z| !z.im.is_zero()) {
        return Err(GadgetError::Format("expected a real matrix".into()));
    }
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].re.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
    pub prec: u32,
}

impl From<&Interval> for IntervalDoc {
    fn from(i: &Interval) -> Self {
        IntervalDoc {
            lo: rational_str(&i.lo().to_rational()),
            hi: rational_str(&i.hi().to_rational()),
            prec: i.precision(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedDoc {
    pub t: String,
    pub eta: Option<String>,
    pub c: String,
    /// Exact `ν` in the form `a + b*sqrt(s)`, for reading only.
    pub nu: String,
    pub nu_enclosure: IntervalDoc,
    pub delta1: IntervalDoc,
    pub delta2: String,
    pub delta: IntervalDoc,
    pub eps: String,
    pub eps_stars: Vec<String>,
    pub lambda_term: IntervalDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub lambda: String,
    pub phi: Vec<ComplexStr>,
    pub matrices: Vec<MatrixStr>,
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub precision: u32,
    /// Absent in a bare input document; checked against the rebuild otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedDoc>,
}

impl BundleDoc {
    pub fn input(&self) -> Result<Prop1Input> {
        Ok(Prop1Input {
            lambda: parse_exact(&self.lambda)?,
            phi: self.phi.iter().map(parse_complex).collect::<Result<_>>()?,
            matrices: self.matrices.iter().map(|m| parse_real_matrix(m)).collect::<Result<_>>()?,
            x: parse_vector(&self.x)?,
            y: parse_vector(&self.y)?,
        })
    }
}

fn derived(b: &GadgetBundle) -> DerivedDoc {
    let p = &b.params;
    let nu_enclosure = qdecide_core::scalar::with_precision(b.precision, || crate::lift::surd_interval(&p.nu));
    DerivedDoc {
        t: rational_str(&p.t),
        eta: p.eta.as_ref().map(rational_str),
        c: rational_str(&p.c),
        nu: p.nu.to_string(),
        nu_enclosure: (&nu_enclosure).into(),
        delta1: (&b.delta1).into(),
        delta2: rational_str(&b.delta2),
        delta: (&b.delta()).into(),
        eps: rational_str(&b.eps),
        eps_stars: b.eps_stars.iter().map(rational_str).collect(),
        lambda_term: (&b.lambda_term).into(),
    }
}

pub fn to_doc(b: &GadgetBundle) -> BundleDoc {
    let i = &b.input;
    BundleDoc {
        lambda: rational_str(&i.lambda),
        phi: i.phi.iter().map(complex_str).collect(),
        matrices: i.matrices.iter().map(real_matrix_strs).collect(),
        x: i.x.iter().map(rational_str).collect(),
        y: i.y.iter().map(rational_str).collect(),
        precision: b.precision,
        derived: Some(derived(b)),
    }
}

/// Rebuilds the bundle and checks any recorded derived values against it.
pub fn from_doc(doc: &BundleDoc) -> Result<GadgetBundle> {
    if doc.precision < 64 {
        return Err(GadgetError::Format(format!("precision {} is below 64 bits", doc.precision)));
    }
    let b = build_prop1_with(doc.input()?, doc.precision)?;
    if let Some(want) = &doc.derived {
        let got = derived(&b);
        if &got != want {
            return Err(GadgetError::Format(mismatch(want, &got)));
        }
    }
    Ok(b)
}

fn mismatch(want: &DerivedDoc, got: &DerivedDoc) -> String {
    let (w, g) = (serde_json::to_value(want).expect("plain data"), serde_json::to_value(got).expect("plain data"));
    let fields: Vec<&str> = g
        .as_object()
        .expect("struct")
        .iter()
        .filter(|(k, v)| w.get(k.as_str()) != Some(v))
        .map(|(k, _)| k.as_str())
        .collect();
    format!("derived values disagree with the rebuilt bundle: {}", fields.join(", "))
}

pub fn to_json(b: &GadgetBundle) -> String {
    serde_json::to_string_pretty(&to_doc(b)).expect("plain data")
}

pub fn from_json(s: &str) -> Result<GadgetBundle> {
    let doc: BundleDoc = serde_json::from_str(s).map_err(|e| GadgetError::Format(e.to_string()))?;
    from_doc(&doc)
}

/// A bare input document with `precision` bits.
pub fn input_doc(input: &Prop1Input, precision: u32) -> BundleDoc {
    BundleDoc {
        lambda: rational_str(&input.lambda),
        phi: input.phi.iter().map(complex_str).collect(),
        matrices: input.matrices.iter().map(real_matrix_strs).collect(),
        x: input.x.iter().map(rational_str).collect(),
        y: input.y.iter().map(rational_str).collect(),
        precision,
        derived: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn sample() -> GadgetBundle {
        let input = Prop1Input {
            lambda: r(3, 4),
            phi: vec![Complex::one(), Complex::new(r(1, 2), r(-1, 3))],
            matrices: vec![Matrix::from_rows(vec![vec![r(1, 1), r(-2, 1)], vec![r(1, 2), Rational::zero()]])],
            x: vec![r(1, 1), r(1, 1)],
            y: vec![r(0, 1), r(-1, 1)],
        };
        build_prop1_with(input, 128).unwrap()
    }

    #[test]
    fn round_trip() {
        let b = sample();
        let json = to_json(&b);
        let back = from_json(&json).unwrap();
        assert_eq!(back.input, b.input);
        assert_eq!(back.eps, b.eps);
        assert_eq!(to_json(&back), json);
    }

    #[test]
    fn tampered_constant_is_rejected() {
        let mut doc = to_doc(&sample());
        doc.derived.as_mut().unwrap().eps = "1/3".into();
        match from_doc(&doc) {
            Err(GadgetError::Format(msg)) => assert!(msg.contains("eps")),
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn bare_input_builds() {
        let b = sample();
        let doc = input_doc(&b.input, 128);
        assert!(!serde_json::to_string(&doc).unwrap().contains("derived"));
        assert_eq!(from_doc(&doc).unwrap().delta2, b.delta2);
        assert!(from_json("{\"lambda\": 0.5}").is_err());
    }
}
