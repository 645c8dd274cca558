//! Channels `T_i`, a state `ρ` and a target `φ` such that
//! `tr[φ T_{i1}⋯T_{in}(ρ)] = λ + δ εⁿ ⟨x|M_{i1}⋯M_{in}|y⟩` for every word.
//!
//! All `T_i` share one anchor `ψ` and one `ν`; the basis is aligned so that
//! `tr[φ H_{i+2}] = δ₁ x_i`, and `ρ` has coordinates `(1/√d, 0, δ₂ y)`.
//! The block form of the transfer matrices then gives the identity with
//! `λ = (1/d)(1 + ν(1 - dc)/√(d-1))`, `c = tr[ψφ]`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use qdecide_core::channels::{fidelity_overlap, psd_certificate};
use qdecide_core::scalar::with_precision;
use qdecide_core::{
    Alignment, Channel, Complex, CpVerdict, Dyadic, HermitianBasis, IMatrix, Interval, Matrix, QMatrix,
    Rational, RealField, SMatrix, Surd,
};

use crate::error::{GadgetError, Result};
use crate::lift::{block_transfer, certify_cp, eps_star, floor_pow2, nu_in_range, surd_interval};

pub const DEFAULT_PRECISION: u32 = 256;

/// Width below which the two sides of the identity count as equal.
pub fn identity_tolerance() -> Dyadic {
    // 2^-67 < 10^-20
    Dyadic::pow2(-67)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn root(n: usize) -> Surd {
    Surd::sqrt_rational(&int(n as i64)).expect("integer square root")
}

/// The free constants of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetParams {
    /// `t = λd - 1`.
    pub t: Rational,
    /// The slack `η` of the recipe; absent when `t = 0`.
    pub eta: Option<Rational>,
    /// `c = |⟨ψ|φ⟩|²`.
    pub c: Rational,
    pub nu: Surd,
}

/// `(1/d)(1 + ν(1 - dc)/√(d-1))`, exactly.
pub fn lambda_term(d: usize, c: &Rational, nu: &Surd) -> Surd {
    let dq = int(d as i64);
    let one_minus = Surd::from_rational(Rational::one() - dq.clone() * c);
    let inner = Surd::one() + nu.clone() * one_minus / root(d - 1);
    inner * Surd::from_rational(dq.recip())
}

/// `r = 1 - 1/d - (1 - dc)²/(d² - d)`, the squared length left for the
/// alignment direction.
pub fn alignment_residual(d: usize, c: &Rational) -> Rational {
    let dq = int(d as i64);
    let one_minus = Rational::one() - dq.clone() * c;
    Rational::one() - dq.recip() - one_minus.clone() * one_minus / int((d * d - d) as i64)
}

/// Deterministic `(ν, c)` for a threshold `λ ∈ (0, 1)`.
///
/// `t > 0`: `η = (1 - t/(d-1))/2`, `1 - dc = -(d-1)(1-η)`, `ν = -t/(√(d-1)(1-η))`.
/// `t < 0`: `η₀ = min(1/4, (1+t)/2)`, `c = η₀/d`, `ν = t√(d-1)/(1-η₀)`; the
/// cap `(1+t)/2` keeps `|ν| < √(d-1)` for `t ≤ -3/4`, where a fixed `η₀`
/// would leave the interval.
pub fn select_parameters(lambda: &Rational, d: usize) -> Result<GadgetParams> {
    if d < 2 {
        return Err(GadgetError::InvalidInstance("dimension must be at least 2".into()));
    }
    if !lambda.is_positive() || lambda >= &Rational::one() {
        return Err(GadgetError::InfeasibleParameters(format!("λ = {lambda} is not in (0, 1)")));
    }
    let dm1 = int(d as i64 - 1);
    let t = lambda * int(d as i64) - Rational::one();
    let params = match t.cmp(&Rational::zero()) {
        Ordering::Equal => GadgetParams { t, eta: None, c: int(d as i64).recip(), nu: Surd::zero() },
        Ordering::Greater => {
            let eta = (Rational::one() - t.clone() / dm1.clone()) / int(2);
            let keep = Rational::one() - eta.clone();
            let c = (Rational::one() + dm1 * keep.clone()) / int(d as i64);
            let nu = Surd::from_rational(-t.clone() / keep) / root(d - 1);
            GadgetParams { t, eta: Some(eta), c, nu }
        }
        Ordering::Less => {
            let eta = Rational::new(1.into(), 4.into()).min((Rational::one() + t.clone()) / int(2));
            let c = eta.clone() / int(d as i64);
            let nu = root(d - 1) * Surd::from_rational(t.clone() / (Rational::one() - eta.clone()));
            GadgetParams { t, eta: Some(eta), c, nu }
        }
    };
    check_constraints(lambda, d, &params)?;
    Ok(params)
}

/// The four conditions (C1)-(C4), decided exactly.
pub fn check_constraints(lambda: &Rational, d: usize, p: &GadgetParams) -> Result<()> {
    if lambda_term(d, &p.c, &p.nu) != Surd::from_rational(lambda.clone()) {
        return Err(GadgetError::InfeasibleParameters("(C1) the constant term differs from λ".into()));
    }
    if !nu_in_range(&p.nu, d) {
        return Err(GadgetError::InfeasibleParameters(format!("(C2) ν = {} is out of range", p.nu)));
    }
    if p.c.is_negative() || p.c >= Rational::one() {
        return Err(GadgetError::InfeasibleParameters(format!("(C3) c = {} is not in [0, 1)", p.c)));
    }
    if !alignment_residual(d, &p.c).is_positive() {
        return Err(GadgetError::InfeasibleParameters("(C4) the alignment residual is not positive".into()));
    }
    Ok(())
}

/// The exact data the construction starts from.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop1Input {
    pub lambda: Rational,
    /// A nonzero vector; the target is its normalized projector.
    pub phi: Vec<Complex<Rational>>,
    /// Real `(d²-2)×(d²-2)` matrices.
    pub matrices: Vec<Matrix<Rational>>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl Prop1Input {
    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d < 2 {
            return Err(GadgetError::InvalidInstance("φ must have at least two entries".into()));
        }
        let n = d * d - 2;
        if self.matrices.is_empty() {
            return Err(GadgetError::InvalidInstance("at least one matrix is required".into()));
        }
        if self.matrices.iter().any(|m| m.shape() != (n, n)) {
            return Err(GadgetError::InvalidInstance(format!("matrices must be {n}x{n} for d = {d}")));
        }
        if self.x.len() != n || self.y.len() != n {
            return Err(GadgetError::InvalidInstance(format!("x and y must have length {n}")));
        }
        if self.phi.iter().all(Zero::is_zero) {
            return Err(GadgetError::InvalidInstance("φ is the zero vector".into()));
        }
        if self.x.iter().all(Zero::is_zero) || self.y.iter().all(Zero::is_zero) {
            return Err(GadgetError::ZeroVector);
        }
        Ok(())
    }

    /// `⟨x|M_{i1}⋯M_{in}|y⟩` for a word over `1..=k`.
    pub fn block_value(&self, word: &[usize]) -> Rational {
        let row = word.iter().fold(self.x.clone(), |v, &i| self.matrices[i - 1].vec_mul(&v));
        row.iter().zip(&self.y).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }
}

fn norm_sqr(v: &[Complex<Rational>]) -> Rational {
    v.iter().fold(Rational::zero(), |acc, z| acc + z.norm_sqr())
}

/// `|v⟩⟨v| / ⟨v|v⟩`.
pub fn normalized_projector(v: &[Complex<Rational>]) -> QMatrix {
    let n2 = norm_sqr(v).recip();
    qdecide_core::channels::projector(v).map(|z| z.scale(&n2))
}

/// The first standard basis vector not parallel to `v`, orthogonalized
/// against `v`.
pub fn orthogonal_companion(v: &[Complex<Rational>]) -> Vec<Complex<Rational>> {
    let n2 = norm_sqr(v);
    for k in 0..v.len() {
        // e_k - (⟨v|e_k⟩/⟨v|v⟩) v
        let coef = Complex::new(v[k].re.clone(), -v[k].im.clone()).scale(&n2.recip());
        let w: Vec<Complex<Rational>> = (0..v.len())
            .map(|i| {
                let e = if i == k { Complex::one() } else { Complex::zero() };
                e - coef.clone() * v[i].clone()
            })
            .collect();
        if w.iter().any(|z| !z.is_zero()) {
            return w;
        }
    }
    unreachable!("a vector of length ≥ 2 has an orthogonal companion")
}

/// `ψ = |ψ⟩⟨ψ|` with `|ψ⟩ = √c |φ⟩ + √(1-c) |φ⊥⟩`, so `tr[ψφ] = c`.
pub fn anchor_projector(v: &[Complex<Rational>], c: &Rational) -> SMatrix {
    let w = orthogonal_companion(v);
    let (nv, nw) = (norm_sqr(v), norm_sqr(&w));
    let lift = |m: QMatrix| qdecide_core::matrix::lift_complex::<Surd>(&m);
    let pv = lift(normalized_projector(v).map(|z| z.scale(c)));
    let pw = lift(normalized_projector(&w).map(|z| z.scale(&(Rational::one() - c))));
    let cross = Surd::sqrt_rational(&(c * (Rational::one() - c) / (nv * nw))).expect("rational radicand");
    let n = v.len();
    let vw = lift(QMatrix::from_fn(n, n, |i, j| v[i].clone() * Complex::new(w[j].re.clone(), -w[j].im.clone())));
    let sym = vw.clone() + vw.adjoint();
    pv + pw + sym.map(|z| z.scale(&cross))
}

/// The constructed gadget together with everything it was built from.
#[derive(Clone, Debug)]
pub struct GadgetBundle {
    pub input: Prop1Input,
    pub precision: u32,
    pub params: GadgetParams,
    pub phi: QMatrix,
    pub psi: SMatrix,
    pub basis: Arc<HermitianBasis<Interval>>,
    pub delta1: Interval,
    /// A power of two at most `1/(2d‖y‖)`, so that `ρ ⪰ 𝟙/(2d)`.
    pub delta2: Rational,
    /// The common `ε`: half the smallest per-matrix `ε*`.
    pub eps: Rational,
    pub eps_stars: Vec<Rational>,
    pub channels: Vec<Channel<Interval>>,
    pub rho: IMatrix,
    /// Enclosure of the constant term, which must contain `λ`.
    pub lambda_term: Interval,
}

pub fn build_prop1(
    lambda: Rational,
    phi: Vec<Complex<Rational>>,
    matrices: Vec<Matrix<Rational>>,
    x: Vec<Rational>,
    y: Vec<Rational>,
) -> Result<GadgetBundle> {
    build_prop1_with(Prop1Input { lambda, phi, matrices, x, y }, DEFAULT_PRECISION)
}

/// Builds at `precision` bits. Everything except the interval enclosures is
/// independent of the precision.
pub fn build_prop1_with(input: Prop1Input, precision: u32) -> Result<GadgetBundle> {
    input.validate()?;
    with_precision(precision, || build(input, precision))
}

fn delta2_for(y: &[Rational], d: usize) -> Rational {
    with_precision(128, || {
        let y2 = y.iter().fold(Rational::zero(), |acc, v| acc + v * v);
        let b = Interval::from_rational(&y2).sqrt().expect("non-negative");
        let bound = Interval::from_i64(2 * d as i64) * b;
        let q = Dyadic::from_int(1).div_rounded(bound.hi(), 64, qdecide_core::scalar::Round::Down);
        floor_pow2(&q)
    })
}

fn build(input: Prop1Input, precision: u32) -> Result<GadgetBundle> {
    let d = input.dim();
    let params = select_parameters(&input.lambda, d)?;
    let phi = normalized_projector(&input.phi);
    let psi = anchor_projector(&input.phi, &params.c);
    debug_assert_eq!(psi.trace_product_re(&qdecide_core::matrix::lift_complex(&phi)), Surd::from_rational(params.c.clone()));

    let psi_i = psi.map(|z| z.map(surd_interval));
    let phi_i = qdecide_core::matrix::lift_complex::<Interval>(&phi);
    let x_i: Vec<Interval> = input.x.iter().map(Interval::from_rational).collect();
    let basis = HermitianBasis::new(d, Some(&psi_i), Some(Alignment { phi: &phi_i, x: &x_i }))?;
    let delta1 = basis.delta1().cloned().expect("aligned basis");
    let basis = Arc::new(basis);

    let delta2 = delta2_for(&input.y, d);
    let mut coords = vec![Interval::from_i64(d as i64).sqrt().and_then(|r| r.recip()).expect("√d > 0"), Interval::zero()];
    coords.extend(input.y.iter().map(|v| Interval::from_rational(&(v * &delta2))));
    let rho = basis.from_coords(&coords);
    certify_state(&rho)?;

    let eps_stars =
        with_precision(128, || input.matrices.iter().map(|m| eps_star(m, &params.nu, d)).collect::<Result<Vec<_>>>())?;
    let eps = eps_stars.iter().min().expect("nonempty").clone() / int(2);
    let nu_i = surd_interval(&params.nu);
    let eps_i = Interval::from_rational(&eps);
    let mut channels = Vec::with_capacity(input.k());
    for m in &input.matrices {
        let ch = Channel::from_transfer(basis.clone(), block_transfer(&nu_i, &eps_i, &m.map(Interval::from_rational)))?;
        if !ch.is_trace_preserving() {
            return Err(GadgetError::NotCertified("trace preservation".into()));
        }
        certify_cp(&ch)?;
        channels.push(ch);
    }
    let lambda_term = surd_interval(&lambda_term(d, &params.c, &params.nu));
    if !lambda_term.contains_rational(&input.lambda) {
        return Err(GadgetError::NotCertified("the constant term enclosure".into()));
    }
    Ok(GadgetBundle {
        input,
        precision,
        params,
        phi,
        psi,
        basis,
        delta1,
        delta2,
        eps,
        eps_stars,
        channels,
        rho,
        lambda_term,
    })
}

/// Unit trace (enclosed) and certified positive semidefinite.
fn certify_state(rho: &IMatrix) -> Result<()> {
    if !rho.trace().re.contains_rational(&Rational::one()) || !rho.trace().im.contains_zero() {
        return Err(GadgetError::NotCertified("unit trace of ρ".into()));
    }
    match psd_certificate(rho) {
        CpVerdict::CertifiedTrue => Ok(()),
        _ => Err(GadgetError::NotCertified("positivity of ρ".into())),
    }
}

/// One evaluation of both sides of the identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub word: Vec<usize>,
    /// `tr[φ T_{i1}⋯T_{in}(ρ)]` by applying the channels to `d×d` matrices.
    pub lhs: Interval,
    /// `λ + δ εⁿ ⟨x|∏M|y⟩`.
    pub rhs: Interval,
    pub difference: Interval,
    /// `⟨x|∏M|y⟩`, exact.
    pub block: Rational,
}

impl IdentityCheck {
    pub fn holds(&self, tolerance: &Dyadic) -> bool {
        self.difference.contains_zero() && &self.difference.width() <= tolerance
    }
}

impl GadgetBundle {
    pub fn dim(&self) -> usize {
        self.input.dim()
    }

    pub fn k(&self) -> usize {
        self.input.k()
    }

    pub fn lambda(&self) -> &Rational {
        &self.input.lambda
    }

    /// `δ = δ₁δ₂`.
    pub fn delta(&self) -> Interval {
        with_precision(self.precision, || self.delta1.clone() * Interval::from_rational(&self.delta2))
    }

    pub fn check_word(&self, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Err(GadgetError::InvalidInstance("words must be nonempty".into()));
        }
        if let Some(&i) = word.iter().find(|&&i| i == 0 || i > self.k()) {
            return Err(GadgetError::LetterOutOfRange { letter: i, m: self.k() });
        }
        Ok(())
    }

    /// Full path: apply `T_{in}` first, through the Choi matrices.
    pub fn overlap(&self, word: &[usize]) -> Result<Interval> {
        self.check_word(word)?;
        with_precision(self.precision, || {
            let mut state = self.rho.clone();
            for &i in word.iter().rev() {
                state = self.channels[i - 1].apply_via_choi(&state)?;
            }
            let phi = qdecide_core::matrix::lift_complex::<Interval>(&self.phi);
            Ok(fidelity_overlap(&phi, &state)?)
        })
    }

    /// `λ + δ εⁿ b` for a block value `b` of a word of length `n`.
    pub fn block_rhs(&self, n: usize, block: &Rational) -> Interval {
        with_precision(self.precision, || {
            let scale = num_traits::pow(self.eps.clone(), n) * block;
            Interval::from_rational(&self.input.lambda) + self.delta() * Interval::from_rational(&scale)
        })
    }

    /// Rebuilds the same gadget at another precision.
    pub fn at_precision(&self, bits: u32) -> Result<GadgetBundle> {
        build_prop1_with(self.input.clone(), bits)
    }

    /// Lower bound `δ εⁿ / D` on `|overlap - λ|` whenever it is nonzero,
    /// where `D` is a common denominator of every `⟨x|∏M|y⟩` of length `n`.
    pub fn separation(&self, n: usize) -> Interval {
        let den = |q: &Rational| q.denom().clone();
        let lcm = |a: BigInt, b: BigInt| a.lcm(&b);
        let dx = self.input.x.iter().map(den).fold(BigInt::one(), lcm);
        let dy = self.input.y.iter().map(den).fold(BigInt::one(), lcm);
        let dm = self.input.matrices.iter().flat_map(|m| m.iter().map(den)).fold(BigInt::one(), lcm);
        let total = dx * dy * num_traits::pow(dm, n);
        let q = num_traits::pow(self.eps.clone(), n) / Rational::from_integer(total);
        with_precision(self.precision, || self.delta() * Interval::from_rational(&q))
    }
}

pub fn verify_prop1_identity(bundle: &GadgetBundle, word: &[usize]) -> Result<IdentityCheck> {
    let lhs = bundle.overlap(word)?;
    let block = bundle.input.block_value(word);
    let rhs = bundle.block_rhs(word.len(), &block);
    let difference = with_precision(bundle.precision, || lhs.clone() - rhs.clone());
    Ok(IdentityCheck { word: word.to_vec(), lhs, rhs, difference, block })
}
