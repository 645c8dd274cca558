//! SMT-LIB2 export (logic NRA) and the matching reader.
//!
//! Binder metadata travels in `set-info` lines so that a script written by
//! [`export_smt`] parses back to a structurally equal [`Formula`]:
//!
//! ```text
//! (set-info :qdecide-binder "exists X 2 2 complex psd 8 0")
//! ```
//!
//! gives quantifier, name, shape, field, domain tag, and the number of
//! flattened and auxiliary real variables. Variables are numbered in the
//! order the quantifier lists introduce them.

use std::collections::HashMap;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use qdecide_core::scalar::parse_rational;
use qdecide_core::Rational;

use crate::error::{FormulaError, Result};
use crate::formula::{Atom, Binder, Body, Domain, FieldKind, Formula, MatrixVar, Quant, Rel};
use crate::poly::{Monomial, Poly, Var};

fn numeral(q: &Rational) -> String {
    let abs = q.abs();
    let s = if abs.is_integer() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if q.is_negative() {
        format!("(- {s})")
    } else {
        s
    }
}

fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.chars().next().is_some_and(|c| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "_.~!@$%^&*+-<>=?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn term(m: &Monomial, c: &Rational, names: &[String]) -> String {
    let mut factors: Vec<String> = Vec::new();
    if !c.is_one() || m.is_constant() {
        factors.push(numeral(c));
    }
    for &(v, e) in m.powers() {
        for _ in 0..e {
            factors.push(symbol(&names[v as usize]));
        }
    }
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        format!("(* {})", factors.join(" "))
    }
}

fn sum(terms: Vec<String>) -> String {
    match terms.len() {
        0 => "0".into(),
        1 => terms.into_iter().next().expect("one term"),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

fn atom(a: &Atom, names: &[String]) -> String {
    let mut lhs = Vec::new();
    let mut rhs = Rational::zero();
    for (m, c) in a.poly.terms() {
        if m.is_constant() {
            rhs = -c.clone();
        } else {
            lhs.push(term(m, c, names));
        }
    }
    let op = match a.rel {
        Rel::Gt => ">",
        Rel::Ge => ">=",
        Rel::Eq => "=",
    };
    format!("({op} {} {})", sum(lhs), numeral(&rhs))
}

fn body(b: &Body, names: &[String], out: &mut String) {
    match b {
        Body::True => out.push_str("true"),
        Body::False => out.push_str("false"),
        Body::Atom(a) => out.push_str(&atom(a, names)),
        Body::Not(inner) => {
            out.push_str("(not ");
            body(inner, names, out);
            out.push(')');
        }
        Body::And(bs) | Body::Or(bs) => {
            out.push_str(if matches!(b, Body::And(_)) { "(and" } else { "(or" });
            for x in bs {
                out.push(' ');
                body(x, names, out);
            }
            out.push(')');
        }
    }
}

fn field_tag(f: FieldKind) -> &'static str {
    match f {
        FieldKind::Real => "real",
        FieldKind::Complex => "complex",
    }
}

/// SMT-LIB2 script for `f`: metadata, one `assert` with one nested
/// quantifier per binder, and `check-sat`.
pub fn export_smt(f: &Formula) -> String {
    let mut out = String::new();
    out.push_str("(set-logic NRA)\n");
    writeln!(out, "(set-info :qdecide-prenex {})", f.prenex).expect("string write");
    for b in &f.binders {
        let v = &b.var;
        writeln!(
            out,
            "(set-info :qdecide-binder \"{} {} {} {} {} {} {} {}\")",
            b.quant,
            v.name,
            v.rows,
            v.cols,
            field_tag(v.field),
            v.domain,
            v.ids.len(),
            v.aux.len()
        )
        .expect("string write");
    }
    let mut text = String::new();
    body(&f.body, &f.var_names, &mut text);
    for b in f.binders.iter().rev() {
        let decls: Vec<String> =
            b.var.all_ids().map(|v| format!("({} Real)", symbol(&f.var_names[v as usize]))).collect();
        text = format!("({} ({}) {})", b.quant, decls.join(" "), text);
    }
    writeln!(out, "(assert {text})").expect("string write");
    out.push_str("(check-sat)\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

fn tokenize(s: &str) -> Result<Vec<Sexp>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    while i < chars.len() {
        let c = chars[i];
        match c {
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                i += 1;
            }
            ')' => {
                let done = stack.pop().ok_or_else(|| FormulaError::Parse("unbalanced `)`".into()))?;
                stack
                    .last_mut()
                    .ok_or_else(|| FormulaError::Parse("unbalanced `)`".into()))?
                    .push(Sexp::List(done));
                i += 1;
            }
            '"' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                let s: String = chars[start..i.min(chars.len())].iter().collect();
                stack.last_mut().expect("root").push(Sexp::Str(s));
                i += 1;
            }
            '|' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '|' {
                    i += 1;
                }
                let s: String = chars[start..i.min(chars.len())].iter().collect();
                stack.last_mut().expect("root").push(Sexp::Atom(s));
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"();\"|".contains(chars[i]) {
                    i += 1;
                }
                stack.last_mut().expect("root").push(Sexp::Atom(chars[start..i].iter().collect()));
            }
        }
    }
    if stack.len() != 1 {
        return Err(FormulaError::Parse("unbalanced `(`".into()));
    }
    Ok(stack.pop().expect("root"))
}

struct Reader {
    ids: HashMap<String, Var>,
}

fn perr(msg: impl Into<String>) -> FormulaError {
    FormulaError::Parse(msg.into())
}

impl Reader {
    fn poly(&self, s: &Sexp) -> Result<Poly> {
        match s {
            Sexp::Atom(a) => {
                if let Some(&v) = self.ids.get(a) {
                    return Ok(Poly::var(v));
                }
                parse_rational(a).map(Poly::constant).ok_or_else(|| perr(format!("unknown symbol `{a}`")))
            }
            Sexp::Str(_) => Err(perr("string in arithmetic term")),
            Sexp::List(items) => {
                let (head, args) = items.split_first().ok_or_else(|| perr("empty term"))?;
                let Sexp::Atom(op) = head else {
                    return Err(perr("operator expected"));
                };
                let args: Vec<Poly> = args.iter().map(|a| self.poly(a)).collect::<Result<_>>()?;
                match (op.as_str(), args.len()) {
                    ("-", 1) => Ok(-args[0].clone()),
                    ("-", _) => Ok(args[1..].iter().fold(args[0].clone(), |a, b| a - b.clone())),
                    ("+", _) => Ok(args.into_iter().fold(Poly::zero(), |a, b| a + b)),
                    ("*", _) => Ok(args.into_iter().fold(Poly::one(), |a, b| a * b)),
                    ("/", 2) => {
                        let (p, q) = (args[0].as_constant(), args[1].as_constant());
                        match (p, q) {
                            (Some(p), Some(q)) if !q.is_zero() => Ok(Poly::constant(p / q)),
                            _ => Err(perr("division is only allowed between numerals")),
                        }
                    }
                    _ => Err(perr(format!("unsupported operator `{op}`"))),
                }
            }
        }
    }

    fn body(&mut self, s: &Sexp, binders: &mut Vec<(Quant, Vec<String>)>) -> Result<Body> {
        match s {
            Sexp::Atom(a) if a == "true" => Ok(Body::True),
            Sexp::Atom(a) if a == "false" => Ok(Body::False),
            Sexp::List(items) => {
                let (head, args) = items.split_first().ok_or_else(|| perr("empty formula"))?;
                let Sexp::Atom(op) = head else {
                    return Err(perr("connective expected"));
                };
                match op.as_str() {
                    "exists" | "forall" => {
                        let [Sexp::List(decls), inner] = args else {
                            return Err(perr("malformed quantifier"));
                        };
                        let mut names = Vec::new();
                        for d in decls {
                            match d {
                                Sexp::List(p) if p.len() == 2 => match &p[0] {
                                    Sexp::Atom(n) => {
                                        let id = self.ids.len() as Var;
                                        self.ids.insert(n.clone(), id);
                                        names.push(n.clone());
                                    }
                                    _ => return Err(perr("bad declaration")),
                                },
                                _ => return Err(perr("bad declaration")),
                            }
                        }
                        let q = if op == "exists" { Quant::Exists } else { Quant::Forall };
                        binders.push((q, names));
                        self.body(inner, binders)
                    }
                    "not" => Ok(Body::Not(Box::new(self.body(&args[0], binders)?))),
                    "and" | "or" => {
                        let parts = args.iter().map(|a| self.body(a, binders)).collect::<Result<Vec<_>>>()?;
                        Ok(if op == "and" { Body::And(parts) } else { Body::Or(parts) })
                    }
                    "=" | ">" | ">=" | "<" | "<=" => {
                        let [l, r] = args else {
                            return Err(perr("relation needs two arguments"));
                        };
                        let d = self.poly(l)? - self.poly(r)?;
                        let (poly, rel) = match op.as_str() {
                            "=" => (d, Rel::Eq),
                            ">" => (d, Rel::Gt),
                            ">=" => (d, Rel::Ge),
                            "<" => (-d, Rel::Gt),
                            _ => (-d, Rel::Ge),
                        };
                        Ok(Body::Atom(Atom { poly, rel }))
                    }
                    _ => Err(perr(format!("unsupported connective `{op}`"))),
                }
            }
            _ => Err(perr("formula expected")),
        }
    }
}

struct BinderInfo {
    quant: Quant,
    name: String,
    rows: usize,
    cols: usize,
    field: FieldKind,
    domain: Domain,
    n_ids: usize,
    n_aux: usize,
}

fn binder_info(s: &str) -> Result<BinderInfo> {
    let p: Vec<&str> = s.split_whitespace().collect();
    if p.len() != 8 {
        return Err(perr(format!("bad binder metadata `{s}`")));
    }
    let num = |i: usize| p[i].parse::<usize>().map_err(|_| perr(format!("bad number in `{s}`")));
    Ok(BinderInfo {
        quant: match p[0] {
            "exists" => Quant::Exists,
            "forall" => Quant::Forall,
            _ => return Err(perr("bad quantifier")),
        },
        name: p[1].to_string(),
        rows: num(2)?,
        cols: num(3)?,
        field: match p[4] {
            "real" => FieldKind::Real,
            "complex" => FieldKind::Complex,
            _ => return Err(perr("bad field")),
        },
        domain: p[5].parse()?,
        n_ids: num(6)?,
        n_aux: num(7)?,
    })
}

/// Reads a script produced by [`export_smt`]. Scripts without binder
/// metadata are accepted too; each quantified variable then becomes a free
/// real scalar binder.
pub fn parse_smt(text: &str) -> Result<Formula> {
    let top = tokenize(text)?;
    let mut infos = Vec::new();
    let mut prenex = None;
    let mut asserted = None;
    for cmd in &top {
        let Sexp::List(items) = cmd else {
            return Err(perr("command expected"));
        };
        match items.first() {
            Some(Sexp::Atom(c)) if c == "set-info" => match (items.get(1), items.get(2)) {
                (Some(Sexp::Atom(k)), Some(Sexp::Str(v))) if k == ":qdecide-binder" => infos.push(binder_info(v)?),
                (Some(Sexp::Atom(k)), Some(Sexp::Atom(v))) if k == ":qdecide-prenex" => prenex = Some(v == "true"),
                _ => {}
            },
            Some(Sexp::Atom(c)) if c == "assert" => {
                if asserted.is_some() {
                    return Err(perr("more than one assert"));
                }
                asserted = Some(items.get(1).ok_or_else(|| perr("empty assert"))?.clone());
            }
            Some(Sexp::Atom(c)) if ["set-logic", "check-sat", "exit", "get-model"].contains(&c.as_str()) => {}
            _ => return Err(perr("unsupported command")),
        }
    }
    let asserted = asserted.ok_or_else(|| perr("no assert"))?;
    let mut reader = Reader { ids: HashMap::new() };
    let mut blocks = Vec::new();
    let body = reader.body(&asserted, &mut blocks)?;
    let mut var_names = vec![String::new(); reader.ids.len()];
    for (n, &v) in &reader.ids {
        var_names[v as usize] = n.clone();
    }
    let binders: Vec<Binder> = if infos.is_empty() {
        blocks
            .iter()
            .flat_map(|(q, names)| names.iter().map(move |n| (*q, n)))
            .map(|(quant, n)| Binder {
                quant,
                var: MatrixVar {
                    name: n.clone(),
                    rows: 1,
                    cols: 1,
                    field: FieldKind::Real,
                    domain: Domain::Free,
                    ids: vec![reader.ids[n]],
                    aux: Vec::new(),
                },
            })
            .collect()
    } else {
        if infos.len() != blocks.len() {
            return Err(perr("binder metadata does not match the quantifier structure"));
        }
        infos
            .into_iter()
            .zip(&blocks)
            .map(|(info, (q, names))| {
                if info.quant != *q || names.len() != info.n_ids + info.n_aux {
                    return Err(perr(format!("binder `{}` does not match its metadata", info.name)));
                }
                let ids: Vec<Var> = names.iter().map(|n| reader.ids[n]).collect();
                Ok(Binder {
                    quant: info.quant,
                    var: MatrixVar {
                        name: info.name,
                        rows: info.rows,
                        cols: info.cols,
                        field: info.field,
                        domain: info.domain,
                        ids: ids[..info.n_ids].to_vec(),
                        aux: ids[info.n_ids..].to_vec(),
                    },
                })
            })
            .collect::<Result<_>>()?
    };
    let prenex = prenex.unwrap_or_else(|| binders.iter().all(|b| b.var.domain == Domain::Free));
    Ok(Formula { var_names, binders, body, prenex })
}

/// Integer numerals used by tests and fixtures.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaBuilder;

    #[test]
    fn square_root_of_two() {
        let mut fb = FormulaBuilder::new();
        let x = fb.real(Quant::Exists, "x");
        let xv = Poly::var(x.ids[0]);
        let f = fb.finish(Body::eq(xv.clone() * xv - Poly::from_i64(2)));
        let s = export_smt(&f);
        assert!(s.contains("(assert (exists ((x Real)) (= (* x x) 2)))"), "{s}");
        assert_eq!(parse_smt(&s).unwrap(), f);
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral(&Rational::new((-3).into(), 4.into())), "(- (/ 3 4))");
        assert_eq!(numeral(&int(-5)), "(- 5)");
        assert_eq!(symbol("a b"), "|a b|");
    }

    #[test]
    fn plain_scripts_parse() {
        let f = parse_smt("(set-logic NRA)\n(assert (forall ((y Real)) (exists ((x Real)) (< (* x y) 1))))").unwrap();
        assert_eq!(f.binders.len(), 2);
        assert_eq!(f.binders[0].quant, Quant::Forall);
        assert!(parse_smt("(assert (exists ((x Real)) (> (sin x) 0)))").is_err());
    }
}
