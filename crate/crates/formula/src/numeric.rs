//! Heuristic witness search for existential formulas.
//!
//! The body is put in negation normal form and each atom contributes a
//! residual (`p` for `p = 0`, `min(p, 0)` for `p ≥ 0`, `min(p − s, 0)` for
//! `p > 0` with slack `s`); an `Or` takes its best child. Random starts are
//! descended with damped Gauss–Newton steps on the sum of squared residuals.
//! A converged point is rationalized and must pass [`check_witness`]; the
//! search never reports unsatisfiability.

use nalgebra::{DMatrix, DVector};
use qdecide_core::scalar::simplest_between;
use qdecide_core::{Rational, RealField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FormulaError, Result};
use crate::formula::{Body, Formula, Rel};
use crate::poly::CompiledPoly;
use crate::prenex::prenex;
use crate::witness::{check_witness, Assignment};

/// Strict atoms are driven to at least this value, so that every accepted
/// strict inequality holds with slack above 10⁻⁶ before rounding.
const STRICT_SLACK: f64 = 1e-5;
/// Largest residual counted as converged.
const SOLVED: f64 = 1e-9;
/// Largest residual reported as an approximate solution.
const APPROXIMATE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub restarts: usize,
    /// Descent steps per start.
    pub iterations: usize,
    pub seed: u64,
    /// Start points are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Formulas with more real variables than this are only rounded in one
    /// pass, without the coordinate-by-coordinate snapping.
    pub rationalize_limit: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { restarts: 16, iterations: 300, seed: 0, init_scale: 1.0, rationalize_limit: 64 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NumericOutcome {
    /// Exact assignment accepted by [`check_witness`].
    Witness(Assignment),
    /// Converged numerically but no exact rational point was confirmed.
    Approximate { point: Vec<(String, f64)>, residual: f64 },
    Unknown { best_residual: f64 },
}

impl NumericOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, NumericOutcome::Witness(_))
    }

    /// Best residual reached; zero for exact witnesses.
    pub fn residual(&self) -> f64 {
        match self {
            NumericOutcome::Witness(_) => 0.0,
            NumericOutcome::Approximate { residual, .. } => *residual,
            NumericOutcome::Unknown { best_residual } => *best_residual,
        }
    }
}

enum Node {
    True,
    False,
    Atom(usize),
    And(Vec<Node>),
    Or(Vec<Node>),
}

struct Problem {
    atoms: Vec<(CompiledPoly, Rel)>,
    root: Node,
    n: usize,
}

fn residual(rel: Rel, v: f64) -> f64 {
    match rel {
        Rel::Eq => v,
        Rel::Ge => v.min(0.0),
        Rel::Gt => (v - STRICT_SLACK).min(0.0),
    }
}

struct Eval {
    sumsq: f64,
    worst: f64,
    active: Vec<usize>,
    values: Vec<f64>,
}

impl Problem {
    fn new(body: &Body, n: usize) -> Self {
        let mut atoms = Vec::new();
        let root = Self::compile(body, &mut atoms);
        Problem { atoms, root, n }
    }

    fn compile(b: &Body, atoms: &mut Vec<(CompiledPoly, Rel)>) -> Node {
        match b {
            Body::True => Node::True,
            Body::False => Node::False,
            Body::Atom(a) => {
                atoms.push((a.poly.compile(), a.rel));
                Node::Atom(atoms.len() - 1)
            }
            Body::Not(_) => unreachable!("body is in negation normal form"),
            Body::And(bs) => Node::And(bs.iter().map(|b| Self::compile(b, atoms)).collect()),
            Body::Or(bs) => Node::Or(bs.iter().map(|b| Self::compile(b, atoms)).collect()),
        }
    }

    /// Sum of squares and worst residual of the selected atoms.
    fn select(&self, node: &Node, values: &[f64], out: &mut Vec<usize>) -> (f64, f64) {
        match node {
            Node::True => (0.0, 0.0),
            Node::False => (1.0, 1.0),
            Node::Atom(i) => {
                let r = residual(self.atoms[*i].1, values[*i]);
                if r != 0.0 {
                    out.push(*i);
                }
                (r * r, r.abs())
            }
            Node::And(children) => children.iter().fold((0.0, 0.0), |(s, w), c| {
                let (cs, cw) = self.select(c, values, out);
                (s + cs, w.max(cw))
            }),
            Node::Or(children) => {
                let mut best: Option<(f64, f64, Vec<usize>)> = None;
                for c in children {
                    let mut tmp = Vec::new();
                    let (s, w) = self.select(c, values, &mut tmp);
                    if best.as_ref().is_none_or(|b| s < b.0) {
                        best = Some((s, w, tmp));
                    }
                }
                let (s, w, tmp) = best.expect("Or has children");
                out.extend(tmp);
                (s, w)
            }
        }
    }

    fn eval(&self, x: &[f64]) -> Eval {
        let values: Vec<f64> = self.atoms.iter().map(|(p, _)| p.eval(x)).collect();
        let mut active = Vec::new();
        let (sumsq, worst) = self.select(&self.root, &values, &mut active);
        let bad = !sumsq.is_finite();
        Eval {
            sumsq: if bad { f64::INFINITY } else { sumsq },
            worst: if bad { f64::INFINITY } else { worst },
            active,
            values,
        }
    }

    /// Damped Gauss–Newton descent over the coordinates marked free.
    fn descend(&self, x: &mut [f64], free: &[bool], iterations: usize) -> f64 {
        let cols: Vec<usize> = (0..self.n).filter(|&i| free[i]).collect();
        let mut col_of = vec![usize::MAX; self.n];
        for (c, &i) in cols.iter().enumerate() {
            col_of[i] = c;
        }
        let mut cur = self.eval(x);
        let mut mu = 1e-3;
        let mut grad = Vec::new();
        for _ in 0..iterations {
            if cur.worst <= SOLVED * 1e-2 || cols.is_empty() || cur.active.is_empty() {
                break;
            }
            let m = cur.active.len();
            let mut jac = DMatrix::<f64>::zeros(m, cols.len());
            let mut r = DVector::<f64>::zeros(m);
            for (row, &a) in cur.active.iter().enumerate() {
                let (p, rel) = &self.atoms[a];
                p.eval_grad(x, &mut grad);
                r[row] = residual(*rel, cur.values[a]);
                for &(v, d) in &grad {
                    let c = col_of[v as usize];
                    if c != usize::MAX {
                        jac[(row, c)] = d;
                    }
                }
            }
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let g = &jt * &r;
            let mut accepted = false;
            while mu < 1e12 {
                let mut lhs = normal.clone();
                for i in 0..cols.len() {
                    lhs[(i, i)] += mu * (1.0 + normal[(i, i)]);
                }
                let Some(ch) = lhs.cholesky() else {
                    mu *= 10.0;
                    continue;
                };
                let step = ch.solve(&(-&g));
                let mut y = x.to_vec();
                for (c, &i) in cols.iter().enumerate() {
                    y[i] += step[c];
                }
                let next = self.eval(&y);
                if next.sumsq < cur.sumsq {
                    x.copy_from_slice(&y);
                    cur = next;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                break;
            }
        }
        cur.worst
    }
}

fn to_rational(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_default()
}

fn snap(x: f64, tol: f64) -> Rational {
    simplest_between(&to_rational(x - tol), &to_rational(x + tol))
}

fn assignment(f: &Formula, values: &[Rational]) -> Assignment {
    let mut a = Assignment::new();
    for (name, v) in f.var_names.iter().zip(values) {
        a.set(name.clone(), v.clone());
    }
    a
}

fn accepts(f: &Formula, values: &[Rational]) -> bool {
    check_witness(f, &assignment(f, values)).unwrap_or(false)
}

/// Rounds a converged point to an exact witness: first every coordinate at
/// once, then (for small formulas) one coordinate at a time, always taking
/// the simplest nearby rational and re-solving for the remaining ones.
fn rationalize(prob: &Problem, f: &Formula, x: &[f64], budget: &SearchBudget) -> Option<Assignment> {
    for tol in [1e-10, 1e-8, 1e-6] {
        let q: Vec<Rational> = x.iter().map(|&v| snap(v, tol)).collect();
        if accepts(f, &q) {
            return Some(assignment(f, &q));
        }
    }
    if prob.n > budget.rationalize_limit {
        return None;
    }
    let mut x = x.to_vec();
    let mut free = vec![true; prob.n];
    let mut fixed: Vec<Option<Rational>> = vec![None; prob.n];
    const WINDOWS: [f64; 6] = [0.25, 0.05, 1e-2, 1e-3, 1e-4, 1e-6];
    const TRIES: usize = 6;
    while free.iter().any(|&b| b) {
        let mut progressed = false;
        'windows: for w in WINDOWS {
            let mut cands: Vec<(usize, Rational)> =
                (0..prob.n).filter(|&i| free[i]).map(|i| (i, snap(x[i], w))).collect();
            cands.sort_by(|(i, a), (j, b)| {
                a.denom()
                    .cmp(b.denom())
                    .then((x[*i] - a.approx_f64()).abs().total_cmp(&(x[*j] - b.approx_f64()).abs()))
            });
            for (i, q) in cands.into_iter().take(TRIES) {
                let mut y = x.clone();
                y[i] = q.approx_f64();
                free[i] = false;
                if prob.descend(&mut y, &free, budget.iterations) <= SOLVED {
                    x = y;
                    fixed[i] = Some(q);
                    progressed = true;
                    break 'windows;
                }
                free[i] = true;
            }
        }
        if !progressed {
            return None;
        }
    }
    let q: Vec<Rational> = fixed.into_iter().map(|v| v.expect("all fixed")).collect();
    accepts(f, &q).then(|| assignment(f, &q))
}

/// Multistart search for an exact witness of a purely existential formula.
pub fn numeric_search(f: &Formula, budget: &SearchBudget) -> Result<NumericOutcome> {
    if !f.is_existential() {
        return Err(FormulaError::NotExistential);
    }
    let p = prenex(f);
    let n = p.var_names.len();
    let body = p.body.nnf();
    if body == Body::False {
        return Ok(NumericOutcome::Unknown { best_residual: f64::INFINITY });
    }
    let prob = Problem::new(&body, n);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..budget.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(r as u64));
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * budget.init_scale).collect();
        let worst = prob.descend(&mut x, &vec![true; n], budget.iterations);
        if worst <= SOLVED {
            if let Some(a) = rationalize(&prob, &p, &x, budget) {
                return Ok(NumericOutcome::Witness(a));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| worst < *b) {
            best = Some((worst, x));
        }
    }
    let (residual, x) = best.unwrap_or((f64::INFINITY, Vec::new()));
    Ok(if residual <= APPROXIMATE {
        NumericOutcome::Approximate { point: p.var_names.iter().cloned().zip(x).collect(), residual }
    } else {
        NumericOutcome::Unknown { best_residual: residual }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{FormulaBuilder, Quant};
    use crate::poly::Poly;

    #[test]
    fn positive_square_root_of_four() {
        let mut fb = FormulaBuilder::new();
        let x = Poly::var(fb.real(Quant::Exists, "x").ids[0]);
        let f = fb.finish(Body::and([Body::eq(x.pow(2) - Poly::from_i64(4)), Body::gt(x)]));
        let out = numeric_search(&f, &SearchBudget::default()).unwrap();
        let NumericOutcome::Witness(a) = out else { panic!("no witness: {out:?}") };
        assert_eq!(a.get("x"), Some(&Rational::from_integer(2.into())));
    }

    #[test]
    fn negative_square_is_unknown() {
        let mut fb = FormulaBuilder::new();
        let x = Poly::var(fb.real(Quant::Exists, "x").ids[0]);
        let f = fb.finish(Body::lt(x.pow(2)));
        let budget = SearchBudget { restarts: 4, ..SearchBudget::default() };
        assert!(matches!(numeric_search(&f, &budget).unwrap(), NumericOutcome::Unknown { .. }));
    }
}
