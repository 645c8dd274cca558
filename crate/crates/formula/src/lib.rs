//! Quantified semialgebraic formulas over matrix variables.
//!
//! Matrix variables are flattened onto real variables, domain tags are
//! compiled to polynomial (in)equalities, and formulas can be brought into
//! prenex form, measured, exported as SMT-LIB2, checked against exact
//! witnesses, or searched numerically. The [`encoders`] module lowers
//! quantum-information decision problems to such formulas.

pub mod encoders;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod membership;
pub mod numeric;
pub mod poly;
pub mod prenex;
pub mod smt;
pub mod stats;
pub mod sweep;
pub mod witness;

pub use encoders::{encode, Distribution, ProblemInstance};
pub use error::{FormulaError, Result};
pub use formula::{Atom, Binder, Body, Domain, FieldKind, Formula, FormulaBuilder, MatrixVar, Norm, Quant, Rel};
pub use membership::encode_membership;
pub use numeric::{numeric_search, NumericOutcome, SearchBudget};
pub use poly::{Monomial, Poly, Var};
pub use prenex::prenex;
pub use smt::{export_smt, parse_smt};
pub use stats::{formula_stats, FormulaStats};
pub use sweep::{sweep, sweep_parameter, with_parameter, SweepBackend, SweepEntry, SweepVerdict};
pub use witness::{check_witness, instantiate, Assignment};
