//! Relativization of domain-tagged quantifiers.

use crate::formula::{Body, Domain, Formula, Quant};
use crate::membership::encode_membership;

/// Moves every domain constraint into the body, innermost binder first:
/// `∃X∈S: φ` becomes `∃X: S(X) ∧ φ` and `∀X∈S: φ` becomes
/// `∀X: ¬S(X) ∨ φ`. The quantifier order is unchanged; the result has only
/// free domains and is returned as-is by a second call.
pub fn prenex(f: &Formula) -> Formula {
    if f.prenex {
        return f.clone();
    }
    let mut body = f.body.clone();
    for b in f.binders.iter().rev() {
        let s = encode_membership(&b.var);
        body = match b.quant {
            Quant::Exists => Body::and([s, body]),
            Quant::Forall => Body::implies(s, body),
        };
    }
    let binders = f
        .binders
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.var.domain = Domain::Free;
            b
        })
        .collect();
    Formula { var_names: f.var_names.clone(), binders, body, prenex: true }
}
