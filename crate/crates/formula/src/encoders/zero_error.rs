use qdecide_core::QMatrix;

use super::{apply_natural, check_channel_choi, positive, tensor_power_natural};
use crate::error::Result;
use crate::formula::{trace_product_re, Body, Domain, FieldKind, Formula, FormulaBuilder, Quant};

/// `∃ρ_1 … ρ_m ∈ density(d^n): tr[T^{⊗n}(ρ_i) T^{⊗n}(ρ_j)] = 0` for `i < j`.
/// Variables `rho_{i}`.
pub fn encode_zero_error(choi: &QMatrix, d: usize, n: usize, m: usize) -> Result<Formula> {
    positive("d", d)?;
    positive("n", n)?;
    positive("m", m)?;
    check_channel_choi(choi, d)?;
    let nat = tensor_power_natural(choi, d, n);
    let dn = d.pow(n as u32);
    let mut fb = FormulaBuilder::new();
    let mut outputs = Vec::new();
    for i in 0..m {
        let v = fb.declare(Quant::Exists, &format!("rho_{i}"), dn, dn, FieldKind::Complex, Domain::Density)?;
        outputs.push(apply_natural(&nat, &v.view()));
    }
    let mut parts = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            parts.push(Body::eq(trace_product_re(&outputs[i], &outputs[j])));
        }
    }
    Ok(fb.finish(Body::and(parts)))
}
