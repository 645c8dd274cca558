use std::fmt;

use crate::formula::{Formula, Quant};
use crate::prenex::prenex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub struct FormulaStats {
    pub exists_vars: usize,
    pub forall_vars: usize,
    pub atoms: usize,
    pub max_degree: u32,
    /// Number of changes between ∃ and ∀ along the (non-empty) prefix.
    pub alternations: usize,
}

impl FormulaStats {
    pub fn real_vars(&self) -> usize {
        self.exists_vars + self.forall_vars
    }
}

impl fmt::Display for FormulaStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exists-vars {} forall-vars {} atoms {} max-degree {} alternations {}",
            self.exists_vars, self.forall_vars, self.atoms, self.max_degree, self.alternations
        )
    }
}

/// Counts on the prenex form (computed first when `f` is not prenex).
pub fn formula_stats(f: &Formula) -> FormulaStats {
    let owned;
    let f = if f.prenex {
        f
    } else {
        owned = prenex(f);
        &owned
    };
    let mut s = FormulaStats::default();
    let mut last = None;
    for b in &f.binders {
        let n = b.var.real_count();
        if n == 0 {
            continue;
        }
        match b.quant {
            Quant::Exists => s.exists_vars += n,
            Quant::Forall => s.forall_vars += n,
        }
        if last.is_some_and(|q| q != b.quant) {
            s.alternations += 1;
        }
        last = Some(b.quant);
    }
    let atoms = f.body.atoms();
    s.atoms = atoms.len();
    s.max_degree = atoms.iter().map(|a| a.poly.degree()).max().unwrap_or(0);
    s
}
