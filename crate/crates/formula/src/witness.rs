//! Exact witness checking for existential formulas.

use std::collections::BTreeMap;

use num_traits::Zero;
use qdecide_core::{CMatrix, Complex, Rational};

use crate::error::{FormulaError, Result};
use crate::formula::{Body, Domain, FieldKind, Formula, MatrixVar};
use crate::poly::Var;
use crate::prenex::prenex;

/// Exact values keyed by real-variable name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, Rational>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: Rational) -> &mut Self {
        self.values.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.values.iter()
    }

    /// Assigns every flattened entry of `var` from `m` in `f`'s naming.
    /// A real variable needs real entries.
    pub fn set_matrix(&mut self, f: &Formula, var: &MatrixVar, m: &CMatrix<Rational>) -> Result<&mut Self> {
        if (m.rows(), m.cols()) != (var.rows, var.cols) {
            return Err(FormulaError::InvalidInstance(format!(
                "value for `{}` is {}x{}, expected {}x{}",
                var.name,
                m.rows(),
                m.cols(),
                var.rows,
                var.cols
            )));
        }
        for i in 0..var.rows {
            for j in 0..var.cols {
                let z = &m[(i, j)];
                let k = i * var.cols + j;
                match var.field {
                    FieldKind::Real => {
                        if !z.im.is_zero() {
                            return Err(FormulaError::InvalidInstance(format!(
                                "`{}` is real but entry ({i},{j}) is not",
                                var.name
                            )));
                        }
                        self.set(f.var_name(var.ids[k]), z.re.clone());
                    }
                    FieldKind::Complex => {
                        self.set(f.var_name(var.ids[2 * k]), z.re.clone());
                        self.set(f.var_name(var.ids[2 * k + 1]), z.im.clone());
                    }
                }
            }
        }
        Ok(self)
    }

    /// Assigns a rank-at-most variable together with its outer-product
    /// factors, the matrix being `Σ_k u_k v_k†`.
    pub fn set_factors(
        &mut self,
        f: &Formula,
        var: &MatrixVar,
        factors: &[(Vec<Complex<Rational>>, Vec<Complex<Rational>>)],
    ) -> Result<&mut Self> {
        let Domain::RankAtMost(r) = original_domain(f, var) else {
            return Err(FormulaError::Usage(format!("`{}` has no outer-product factors", var.name)));
        };
        if factors.len() != r || factors.iter().any(|(u, v)| u.len() != var.rows || v.len() != var.cols) {
            return Err(FormulaError::InvalidInstance(format!("factor shapes do not match `{}`", var.name)));
        }
        let m = CMatrix::from_fn(var.rows, var.cols, |i, j| {
            factors.iter().fold(Complex::zero(), |acc, (u, v)| {
                acc + u[i].clone() * Complex::new(v[j].re.clone(), -v[j].im.clone())
            })
        });
        self.set_matrix(f, var, &m)?;
        let mut k = 0;
        for (u, v) in factors {
            for z in u.iter().chain(v) {
                self.set(f.var_name(var.aux[k]), z.re.clone());
                self.set(f.var_name(var.aux[k + 1]), z.im.clone());
                k += 2;
            }
        }
        Ok(self)
    }
}

fn original_domain(f: &Formula, var: &MatrixVar) -> Domain {
    // A relativized binder forgets its domain; auxiliaries only exist for
    // rank-at-most variables, with 2(rows+cols) reals per factor pair.
    match var.domain {
        Domain::Free if !var.aux.is_empty() => Domain::RankAtMost(var.aux.len() / (2 * (var.rows + var.cols))),
        d => f.binder(&var.name).map_or(d, |b| b.domain),
    }
}

/// Exact truth of the body of an existential formula under `x`; `true`
/// certifies satisfiability. Every bound real variable must be assigned.
pub fn check_witness(f: &Formula, x: &Assignment) -> Result<bool> {
    if !f.is_existential() {
        return Err(FormulaError::NotExistential);
    }
    let p = prenex(f);
    let mut values = Vec::with_capacity(p.var_names.len());
    for name in &p.var_names {
        values.push(x.get(name).cloned());
    }
    for b in &p.binders {
        for v in b.var.all_ids() {
            if values[v as usize].is_none() {
                return Err(FormulaError::IncompleteAssignment(p.var_name(v).to_string()));
            }
        }
    }
    p.body
        .eval(&|v| values[v as usize].clone())
        .ok_or_else(|| FormulaError::IncompleteAssignment("unbound variable in body".into()))
}

/// Substitutes the assigned variables into the prenex form of `f` and drops
/// the binders that became fully assigned. Binders may not be partially
/// assigned. Used to check Skolemized witnesses of formulas with `∀` blocks.
pub fn instantiate(f: &Formula, x: &Assignment) -> Result<Formula> {
    let p = prenex(f);
    let values: Vec<Option<Rational>> = p.var_names.iter().map(|n| x.get(n).cloned()).collect();
    let mut binders = Vec::new();
    for b in &p.binders {
        let set = b.var.all_ids().filter(|&v| values[v as usize].is_some()).count();
        if set == 0 {
            binders.push(b.clone());
        } else if set < b.var.real_count() {
            return Err(FormulaError::IncompleteAssignment(format!("part of `{}`", b.var.name)));
        }
    }
    let body = substitute(&p.body, &|v| values[v as usize].clone());
    Ok(Formula { var_names: p.var_names, binders, body, prenex: true })
}

fn substitute(b: &Body, x: &impl Fn(Var) -> Option<Rational>) -> Body {
    match b {
        Body::True | Body::False => b.clone(),
        Body::Atom(a) => Body::atom(a.poly.substitute(x), a.rel),
        Body::Not(inner) => Body::not(substitute(inner, x)),
        Body::And(bs) => Body::and(bs.iter().map(|c| substitute(c, x))),
        Body::Or(bs) => Body::or(bs.iter().map(|c| substitute(c, x))),
    }
}
