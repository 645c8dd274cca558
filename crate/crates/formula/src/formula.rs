//! Quantified formulas over flattened matrix variables.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use qdecide_core::{CMatrix, Complex, Rational};

use crate::error::{FormulaError, Result};
use crate::poly::{Poly, Var};

/// Relation of an atom's polynomial to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Gt,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub poly: Poly,
    pub rel: Rel,
}

impl Atom {
    pub fn holds(&self, v: &Rational) -> bool {
        match self.rel {
            Rel::Gt => v > &Rational::zero(),
            Rel::Ge => v >= &Rational::zero(),
            Rel::Eq => v.is_zero(),
        }
    }
}

/// Quantifier-free Boolean combination of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    True,
    False,
    Atom(Atom),
    Not(Box<Body>),
    And(Vec<Body>),
    Or(Vec<Body>),
}

impl Body {
    /// Atoms with constant polynomials are decided on the spot.
    pub fn atom(poly: Poly, rel: Rel) -> Body {
        let a = Atom { poly, rel };
        match a.poly.as_constant() {
            Some(c) => Body::from_bool(a.holds(&c)),
            None => Body::Atom(a),
        }
    }

    pub fn from_bool(b: bool) -> Body {
        if b {
            Body::True
        } else {
            Body::False
        }
    }

    pub fn eq(p: Poly) -> Body {
        Body::atom(p, Rel::Eq)
    }

    pub fn ge(p: Poly) -> Body {
        Body::atom(p, Rel::Ge)
    }

    pub fn gt(p: Poly) -> Body {
        Body::atom(p, Rel::Gt)
    }

    pub fn le(p: Poly) -> Body {
        Body::atom(-p, Rel::Ge)
    }

    pub fn lt(p: Poly) -> Body {
        Body::atom(-p, Rel::Gt)
    }

    pub fn ne(p: Poly) -> Body {
        Body::not(Body::eq(p))
    }

    /// `re = 0 ∧ im = 0`.
    pub fn complex_eq(z: Complex<Poly>) -> Body {
        Body::and([Body::eq(z.re), Body::eq(z.im)])
    }

    pub fn not(b: Body) -> Body {
        match b {
            Body::True => Body::False,
            Body::False => Body::True,
            Body::Not(inner) => *inner,
            other => Body::Not(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Body>) -> Body {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Body::True => {}
                Body::False => return Body::False,
                Body::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Body::True,
            1 => out.pop().expect("one element"),
            _ => Body::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Body>) -> Body {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Body::False => {}
                Body::True => return Body::True,
                Body::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Body::False,
            1 => out.pop().expect("one element"),
            _ => Body::Or(out),
        }
    }

    pub fn implies(a: Body, b: Body) -> Body {
        Body::or([Body::not(a), b])
    }

    /// Exact truth value; `None` if some variable is unassigned.
    pub fn eval(&self, x: &impl Fn(Var) -> Option<Rational>) -> Option<bool> {
        Some(match self {
            Body::True => true,
            Body::False => false,
            Body::Atom(a) => a.holds(&a.poly.eval(x)?),
            Body::Not(b) => !b.eval(x)?,
            Body::And(bs) => {
                for b in bs {
                    if !b.eval(x)? {
                        return Some(false);
                    }
                }
                true
            }
            Body::Or(bs) => {
                for b in bs {
                    if b.eval(x)? {
                        return Some(true);
                    }
                }
                false
            }
        })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Body::Atom(a) => out.push(a),
            Body::Not(b) => b.collect_atoms(out),
            Body::And(bs) | Body::Or(bs) => bs.iter().for_each(|b| b.collect_atoms(out)),
            Body::True | Body::False => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atoms().iter().flat_map(|a| a.poly.vars()).collect()
    }

    /// Negation normal form: no `Not` nodes remain; negated atoms are
    /// rewritten (`¬(p > 0)` is `-p ≥ 0`, `¬(p = 0)` is
    /// `p > 0 ∨ -p > 0`).
    pub fn nnf(&self) -> Body {
        self.nnf_signed(false)
    }

    fn nnf_signed(&self, neg: bool) -> Body {
        match (self, neg) {
            (Body::True, n) | (Body::False, n) => Body::from_bool((*self == Body::True) != n),
            (Body::Atom(a), false) => Body::Atom(a.clone()),
            (Body::Atom(a), true) => match a.rel {
                Rel::Gt => Body::ge(-a.poly.clone()),
                Rel::Ge => Body::gt(-a.poly.clone()),
                Rel::Eq => Body::or([Body::gt(a.poly.clone()), Body::gt(-a.poly.clone())]),
            },
            (Body::Not(b), n) => b.nnf_signed(!n),
            (Body::And(bs), false) => Body::and(bs.iter().map(|b| b.nnf_signed(false))),
            (Body::And(bs), true) => Body::or(bs.iter().map(|b| b.nnf_signed(true))),
            (Body::Or(bs), false) => Body::or(bs.iter().map(|b| b.nnf_signed(false))),
            (Body::Or(bs), true) => Body::and(bs.iter().map(|b| b.nnf_signed(true))),
        }
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Body {
        match self {
            Body::True => Body::True,
            Body::False => Body::False,
            Body::Atom(a) => Body::Atom(Atom { poly: a.poly.rename(f), rel: a.rel }),
            Body::Not(b) => Body::Not(Box::new(b.rename(f))),
            Body::And(bs) => Body::And(bs.iter().map(|b| b.rename(f)).collect()),
            Body::Or(bs) => Body::Or(bs.iter().map(|b| b.rename(f)).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

impl fmt::Display for Quant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quant::Exists => "exists",
            Quant::Forall => "forall",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    /// Schatten `p`-norm; only even `p` is accepted.
    P(u32),
    Infinity,
}

/// Semialgebraic set a matrix variable ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Free,
    Hermitian,
    Psd,
    Density,
    Unitary,
    NormBall(Norm),
    /// Exact rank, by minors.
    Rank(usize),
    /// Rank at most `r`, as a sum of `r` outer products `u_k v_k†`.
    RankAtMost(usize),
    /// Choi matrix `(T ⊗ id)(|Ω⟩⟨Ω|)` of a channel `M_{d_in} → M_{d_out}`,
    /// shape `(d_out·d_in)²`, output index first.
    ChannelChoi { d_in: usize, d_out: usize },
    ProbabilitySimplex,
    NonnegMatrix,
    /// `m` effects of size `d×d` stacked vertically into an `(m·d)×d` block.
    Povm(usize),
}

impl Domain {
    /// Domains whose members are Hermitian (blockwise for POVMs); their
    /// symbolic view reads the upper triangle only.
    pub fn is_hermitian_type(&self) -> bool {
        matches!(
            self,
            Domain::Hermitian
                | Domain::Psd
                | Domain::Density
                | Domain::NormBall(_)
                | Domain::ChannelChoi { .. }
                | Domain::Povm(_)
        )
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Free => write!(f, "free"),
            Domain::Hermitian => write!(f, "hermitian"),
            Domain::Psd => write!(f, "psd"),
            Domain::Density => write!(f, "density"),
            Domain::Unitary => write!(f, "unitary"),
            Domain::NormBall(Norm::P(p)) => write!(f, "normball:{p}"),
            Domain::NormBall(Norm::Infinity) => write!(f, "normball:inf"),
            Domain::Rank(r) => write!(f, "rank:{r}"),
            Domain::RankAtMost(r) => write!(f, "rankatmost:{r}"),
            Domain::ChannelChoi { d_in, d_out } => write!(f, "choi:{d_in}:{d_out}"),
            Domain::ProbabilitySimplex => write!(f, "simplex"),
            Domain::NonnegMatrix => write!(f, "nonneg"),
            Domain::Povm(m) => write!(f, "povm:{m}"),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Domain> {
        let bad = || FormulaError::Parse(format!("unknown domain tag `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok()).ok_or_else(bad);
        Ok(match parts[0] {
            "free" => Domain::Free,
            "hermitian" => Domain::Hermitian,
            "psd" => Domain::Psd,
            "density" => Domain::Density,
            "unitary" => Domain::Unitary,
            "normball" if parts.get(1) == Some(&"inf") => Domain::NormBall(Norm::Infinity),
            "normball" => Domain::NormBall(Norm::P(num(1)? as u32)),
            "rank" => Domain::Rank(num(1)?),
            "rankatmost" => Domain::RankAtMost(num(1)?),
            "choi" => Domain::ChannelChoi { d_in: num(1)?, d_out: num(2)? },
            "simplex" => Domain::ProbabilitySimplex,
            "nonneg" => Domain::NonnegMatrix,
            "povm" => Domain::Povm(num(1)?),
            _ => return Err(bad()),
        })
    }
}

/// A matrix variable and its flattening onto real variables.
///
/// Complex entries `(i, j)` use `ids[2(i·cols+j)]` (real part) and the next
/// id (imaginary part); real entries use `ids[i·cols+j]`. A rank-at-most-`r`
/// variable carries `r` pairs `(u_k, v_k)` of complex vectors in `aux`,
/// `u_k` of length `rows` then `v_k` of length `cols`, re/im interleaved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixVar {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub field: FieldKind,
    pub domain: Domain,
    pub ids: Vec<Var>,
    pub aux: Vec<Var>,
}

impl MatrixVar {
    pub fn all_ids(&self) -> impl Iterator<Item = Var> + '_ {
        self.ids.iter().chain(&self.aux).copied()
    }

    /// Number of real variables, auxiliaries included.
    pub fn real_count(&self) -> usize {
        self.ids.len() + self.aux.len()
    }

    fn raw(&self, i: usize, j: usize) -> Complex<Poly> {
        let k = i * self.cols + j;
        match self.field {
            FieldKind::Real => Complex::real(Poly::var(self.ids[k])),
            FieldKind::Complex => Complex::new(Poly::var(self.ids[2 * k]), Poly::var(self.ids[2 * k + 1])),
        }
    }

    /// Every entry read from its own variables.
    pub fn full_view(&self) -> CMatrix<Poly> {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.raw(i, j))
    }

    /// The symbolic matrix used in formulas: for Hermitian-type domains the
    /// diagonal is real and the lower triangle mirrors the upper one (per
    /// block for stacked POVMs); otherwise the full view.
    pub fn view(&self) -> CMatrix<Poly> {
        if !self.domain.is_hermitian_type() {
            return self.full_view();
        }
        let b = self.cols;
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let (blk, r) = (i / b, i % b);
            if r == j {
                Complex::real(self.raw(i, j).re)
            } else if r < j {
                self.raw(i, j)
            } else {
                let z = self.raw(blk * b + j, r);
                Complex::new(z.re, -z.im)
            }
        })
    }

    /// `k`-th block of a stacked variable.
    pub fn block_view(&self, k: usize) -> CMatrix<Poly> {
        let v = self.view();
        let b = self.cols;
        CMatrix::from_fn(b, b, |i, j| v[(k * b + i, j)].clone())
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<Poly> {
        self.view()[(i, j)].clone()
    }

    /// Auxiliary outer-product vectors `(u_k, v_k)` of a rank-at-most variable.
    pub fn outer_factors(&self) -> Vec<(Vec<Complex<Poly>>, Vec<Complex<Poly>>)> {
        let Domain::RankAtMost(r) = self.domain else {
            return Vec::new();
        };
        let stride = 2 * (self.rows + self.cols);
        let c = |k: usize| Complex::new(Poly::var(self.aux[k]), Poly::var(self.aux[k + 1]));
        (0..r)
            .map(|k| {
                let base = k * stride;
                let u = (0..self.rows).map(|i| c(base + 2 * i)).collect();
                let v = (0..self.cols).map(|j| c(base + 2 * self.rows + 2 * j)).collect();
                (u, v)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub quant: Quant,
    pub var: MatrixVar,
}

/// `Q₁ X₁ ∈ S₁ … Q_n X_n ∈ S_n : body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    /// Real-variable names, indexed by [`Var`].
    pub var_names: Vec<String>,
    pub binders: Vec<Binder>,
    pub body: Body,
    /// Set once every domain constraint has been moved into the body.
    pub prenex: bool,
}

impl Formula {
    pub fn var_name(&self, v: Var) -> &str {
        &self.var_names[v as usize]
    }

    pub fn is_existential(&self) -> bool {
        self.binders.iter().all(|b| b.quant == Quant::Exists)
    }

    pub fn binder(&self, name: &str) -> Option<&MatrixVar> {
        self.binders.iter().map(|b| &b.var).find(|v| v.name == name)
    }

    /// Every variable in the body is bound.
    pub fn is_closed(&self) -> bool {
        let bound: BTreeSet<Var> = self.binders.iter().flat_map(|b| b.var.all_ids()).collect();
        self.body.vars().is_subset(&bound)
    }
}

/// Allocates flattened variables and records the quantifier prefix.
#[derive(Default, Debug)]
pub struct FormulaBuilder {
    var_names: Vec<String>,
    binders: Vec<Binder>,
}

impl FormulaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn alloc(&mut self, name: String) -> Var {
        self.var_names.push(name);
        (self.var_names.len() - 1) as Var
    }

    pub fn declare(
        &mut self,
        quant: Quant,
        name: &str,
        rows: usize,
        cols: usize,
        field: FieldKind,
        domain: Domain,
    ) -> Result<MatrixVar> {
        validate_domain(rows, cols, field, domain)?;
        if self.binders.iter().any(|b| b.var.name == name) {
            return Err(FormulaError::Usage(format!("variable `{name}` declared twice")));
        }
        let mut ids = Vec::new();
        let scalar = rows == 1 && cols == 1;
        for i in 0..rows {
            for j in 0..cols {
                match field {
                    FieldKind::Real if scalar => ids.push(self.alloc(name.to_string())),
                    FieldKind::Real => ids.push(self.alloc(format!("{name}_{i}_{j}"))),
                    FieldKind::Complex => {
                        ids.push(self.alloc(format!("{name}_re_{i}_{j}")));
                        ids.push(self.alloc(format!("{name}_im_{i}_{j}")));
                    }
                }
            }
        }
        let mut aux = Vec::new();
        if let Domain::RankAtMost(r) = domain {
            for k in 0..r {
                for (tag, len) in [("u", rows), ("v", cols)] {
                    for i in 0..len {
                        aux.push(self.alloc(format!("{name}_{tag}{k}_re_{i}")));
                        aux.push(self.alloc(format!("{name}_{tag}{k}_im_{i}")));
                    }
                }
            }
        }
        let var = MatrixVar { name: name.to_string(), rows, cols, field, domain, ids, aux };
        self.binders.push(Binder { quant, var: var.clone() });
        Ok(var)
    }

    /// A real scalar variable.
    pub fn real(&mut self, quant: Quant, name: &str) -> MatrixVar {
        self.declare(quant, name, 1, 1, FieldKind::Real, Domain::Free).expect("free scalar")
    }

    pub fn finish(self, body: Body) -> Formula {
        let f = Formula { var_names: self.var_names, binders: self.binders, body, prenex: false };
        debug_assert!(f.is_closed(), "formula body uses undeclared variables");
        let all_free = f.binders.iter().all(|b| b.var.domain == Domain::Free);
        Formula { prenex: all_free, ..f }
    }
}

fn validate_domain(rows: usize, cols: usize, field: FieldKind, domain: Domain) -> Result<()> {
    let bad = |why: &str| Err(FormulaError::Usage(format!("{domain} variable of shape {rows}x{cols}: {why}")));
    if rows == 0 || cols == 0 {
        return bad("empty shape");
    }
    match domain {
        Domain::NormBall(Norm::P(p)) if p % 2 == 1 || p == 0 => Err(FormulaError::UnsupportedDomain(format!(
            "Schatten norm ball with p = {p}: only even p and p = infinity are encoded"
        ))),
        Domain::Hermitian | Domain::Psd | Domain::Density | Domain::Unitary | Domain::NormBall(_)
            if rows != cols =>
        {
            bad("must be square")
        }
        Domain::ChannelChoi { d_in, d_out } if rows != d_in * d_out || cols != rows => {
            bad("Choi matrix must be (d_out*d_in) square")
        }
        Domain::Povm(m) if m == 0 || rows != m * cols => bad("POVM block must be (m*d)xd"),
        Domain::ProbabilitySimplex | Domain::NonnegMatrix if field != FieldKind::Real => bad("must be real"),
        _ => Ok(()),
    }
}

/// Exact complex-rational matrix as a constant polynomial matrix.
pub fn constant_matrix(m: &CMatrix<Rational>) -> CMatrix<Poly> {
    m.map(|z| Complex::new(Poly::constant(z.re.clone()), Poly::constant(z.im.clone())))
}

/// `tr[A B]` for polynomial matrices, real part.
pub fn trace_product_re(a: &CMatrix<Poly>, b: &CMatrix<Poly>) -> Poly {
    let n = a.rows();
    let mut acc = Poly::zero();
    for i in 0..n {
        for k in 0..a.cols() {
            let (x, y) = (&a[(i, k)], &b[(k, i)]);
            acc = acc + (&x.re * &y.re) - (&x.im * &y.im);
        }
    }
    acc
}

pub fn poly_identity(n: usize) -> CMatrix<Poly> {
    CMatrix::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_normalize() {
        let x = Poly::var(0);
        assert_eq!(Body::and([Body::True, Body::True]), Body::True);
        assert_eq!(Body::or([Body::False, Body::ge(x.clone())]), Body::ge(x.clone()));
        assert_eq!(Body::eq(Poly::zero()), Body::True);
        assert_eq!(Body::gt(Poly::zero()), Body::False);
        assert_eq!(Body::not(Body::not(Body::gt(x.clone()))), Body::gt(x.clone()));
        let nested = Body::and([Body::and([Body::ge(x.clone()), Body::gt(x.clone())]), Body::eq(x.clone())]);
        assert!(matches!(&nested, Body::And(v) if v.len() == 3));
    }

    #[test]
    fn nnf_preserves_truth() {
        let x = Poly::var(0);
        let b = Body::not(Body::and([Body::eq(x.clone() - Poly::from_i64(1)), Body::gt(x.clone())]));
        let n = b.nnf();
        for v in -3..=3 {
            let val = |_| Some(Rational::from_integer(v.into()));
            assert_eq!(b.eval(&val), n.eval(&val));
        }
        assert!(!format!("{n:?}").contains("Not"));
    }

    #[test]
    fn hermitian_view_mirrors_upper_triangle() {
        let mut fb = FormulaBuilder::new();
        let x = fb.declare(Quant::Exists, "X", 2, 2, FieldKind::Complex, Domain::Psd).unwrap();
        let v = x.view();
        assert_eq!(v[(1, 0)].re, v[(0, 1)].re);
        assert_eq!(v[(1, 0)].im, -v[(0, 1)].im.clone());
        assert!(v[(0, 0)].im.is_zero());
        assert_eq!(x.ids.len(), 8);
    }

    #[test]
    fn odd_norm_ball_rejected() {
        let mut fb = FormulaBuilder::new();
        let e = fb.declare(Quant::Exists, "X", 2, 2, FieldKind::Complex, Domain::NormBall(Norm::P(3)));
        assert!(matches!(e, Err(FormulaError::UnsupportedDomain(_))));
    }

    #[test]
    fn domain_tags_round_trip() {
        for d in [
            Domain::Free,
            Domain::NormBall(Norm::Infinity),
            Domain::NormBall(Norm::P(4)),
            Domain::ChannelChoi { d_in: 2, d_out: 3 },
            Domain::Povm(3),
            Domain::RankAtMost(2),
        ] {
            assert_eq!(d.to_string().parse::<Domain>().unwrap(), d);
        }
    }
}
