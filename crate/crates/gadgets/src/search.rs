//! Bounded-depth semi-deciders: Post correspondence, matrix mortality and
//! fidelity-threshold reachability, plus an exhaustive oracle for the last.
//!
//! All searches are breadth-first with children taken in tile order, so
//! the first witness found is shortest and lexicographically smallest among
//! the shortest. `Exhausted` is always qualified by the depth reached.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use qdecide_core::channels::{apply_choi, psd_certificate};
use qdecide_core::matrix::lift_complex;
use qdecide_core::scalar::rational_to_string;
use qdecide_core::{Channel, CpVerdict, HermitianBasis, Interval, Matrix, QMatrix, Rational, RealField, Surd};
use serde::Serialize;

use crate::error::{GadgetError, Result};
use crate::prop1::GadgetBundle;
use crate::words::{PcpInstance, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Witness { word: Word },
    /// No witness of length at most `depth`, up to dedup equivalence.
    Exhausted { depth: usize },
    /// The search was cut short (overhang cap, precision cap) at `depth`.
    BudgetExceeded { depth: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Nodes generated.
    pub nodes: u64,
    /// Nodes dropped because an equivalent one was seen before.
    pub deduplicated: u64,
    /// Nodes dropped because they can no longer reach a witness.
    pub pruned: u64,
    pub max_frontier: usize,
}

/// Both evaluations of a threshold witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub word: Word,
    /// The exact value from the search path (`⟨x|∏M|y⟩` for bundles, the
    /// overlap itself for exact channels).
    pub exact: String,
    /// Full-matrix evaluation of the overlap.
    pub overlap_lo: String,
    pub overlap_hi: String,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub stats: SearchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Word> {
        match &self.verdict {
            Verdict::Witness { word } => Some(word),
            _ => None,
        }
    }
}

fn extend(w: &[usize], i: usize) -> Word {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.extend_from_slice(w);
    v.push(i);
    v
}

// ---------------------------------------------------------------- PCP

/// The unmatched suffix of the longer side; empty means both sides agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Overhang {
    top_longer: bool,
    rest: Vec<usize>,
}

impl Overhang {
    fn empty() -> Self {
        Overhang { top_longer: true, rest: Vec::new() }
    }

    /// Signed length difference `|top| - |bottom|`.
    fn signed_len(&self) -> i64 {
        if self.top_longer {
            self.rest.len() as i64
        } else {
            -(self.rest.len() as i64)
        }
    }

    fn push(&self, tile: &(Word, Word)) -> Option<Overhang> {
        let (longer_add, shorter_add) = if self.top_longer { (&tile.0, &tile.1) } else { (&tile.1, &tile.0) };
        let mut long: Vec<usize> = self.rest.clone();
        long.extend_from_slice(longer_add);
        let short = shorter_add;
        let out = if long.starts_with(short) {
            Overhang { top_longer: self.top_longer, rest: long[short.len()..].to_vec() }
        } else if short.starts_with(&long) {
            Overhang { top_longer: !self.top_longer, rest: short[long.len()..].to_vec() }
        } else {
            return None;
        };
        Some(if out.rest.is_empty() { Overhang::empty() } else { out })
    }
}

/// Breadth-first search over overhang configurations. In Claus mode the
/// words have the shape `1 w k` with `w` over the middle tiles `2..k-1`.
pub fn pcp_search(inst: &PcpInstance, max_overhang: usize, max_depth: usize, claus: bool) -> Result<SearchOutcome> {
    inst.validate()?;
    let k = inst.k();
    let mut stats = SearchStats::default();
    let mut incomplete = false;
    let deltas: Vec<i64> = inst.tiles.iter().map(|(a, b)| a.len() as i64 - b.len() as i64).collect();
    let (max_up, max_down) = (*deltas.iter().max().unwrap(), -*deltas.iter().min().unwrap());

    let found = |word: Word, stats: SearchStats| -> Result<SearchOutcome> {
        assert!(inst.is_solution(&word)?, "PCP witness failed re-validation");
        Ok(SearchOutcome { verdict: Verdict::Witness { word }, stats, certificate: None })
    };

    let mut visited: HashSet<Overhang> = HashSet::new();
    let mut frontier: Vec<(Overhang, Word)> = vec![(Overhang::empty(), Vec::new())];
    for depth in 1..=max_depth {
        let mut next = Vec::new();
        for (state, word) in &frontier {
            let tiles: Vec<usize> = match (claus, word.is_empty()) {
                (false, _) => (1..=k).collect(),
                (true, true) => vec![1],
                (true, false) => (2..=k).collect(),
            };
            for i in tiles {
                stats.nodes += 1;
                let child_word = extend(word, i);
                let Some(child) = state.push(&inst.tiles[i - 1]) else {
                    stats.pruned += 1;
                    continue;
                };
                let closes = if claus { i == k && (k > 1 || depth == 1) } else { true };
                if child.rest.is_empty() && closes {
                    return found(child_word, stats);
                }
                if claus && (i == k || k == 1) {
                    // the closing tile may only appear last
                    continue;
                }
                // the length gap changes by at most max_down (max_up) per tile
                let remaining = (max_depth - depth) as i64;
                let gap = child.signed_len();
                if (gap > 0 && gap > remaining * max_down) || (gap < 0 && -gap > remaining * max_up) {
                    stats.pruned += 1;
                    continue;
                }
                if child.rest.len() > max_overhang {
                    incomplete = true;
                    stats.pruned += 1;
                    continue;
                }
                if !visited.insert(child.clone()) {
                    stats.deduplicated += 1;
                    continue;
                }
                next.push((child, child_word));
            }
        }
        stats.max_frontier = stats.max_frontier.max(next.len());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let verdict = if incomplete {
        Verdict::BudgetExceeded { depth: max_depth }
    } else {
        Verdict::Exhausted { depth: max_depth }
    };
    Ok(SearchOutcome { verdict, stats, certificate: None })
}

// ---------------------------------------------------------------- mortality

fn check_square_family(ms: &[Matrix<Rational>]) -> Result<usize> {
    let Some(first) = ms.first() else {
        return Err(GadgetError::InvalidInstance("empty matrix family".into()));
    };
    let n = first.rows();
    if n == 0 || ms.iter().any(|m| m.shape() != (n, n)) {
        return Err(GadgetError::InvalidInstance("matrices must be square and of equal size".into()));
    }
    Ok(n)
}

pub fn product(ms: &[Matrix<Rational>], word: &[usize]) -> Matrix<Rational> {
    let n = ms[0].rows();
    word.iter().fold(Matrix::identity(n), |acc, &i| acc.matmul(&ms[i - 1]))
}

/// Breadth-first search for a zero product, with exact dedup of products.
pub fn mortality_search(ms: &[Matrix<Rational>], max_depth: usize) -> Result<SearchOutcome> {
    let n = check_square_family(ms)?;
    let mut stats = SearchStats::default();
    let mut seen: HashSet<Matrix<Rational>> = HashSet::new();
    seen.insert(Matrix::identity(n));
    let mut frontier: Vec<(Matrix<Rational>, Word)> = vec![(Matrix::identity(n), Vec::new())];
    for _ in 1..=max_depth {
        let mut next = Vec::new();
        for (p, word) in &frontier {
            for (i, m) in ms.iter().enumerate() {
                stats.nodes += 1;
                let q = p.matmul(m);
                let w = extend(word, i + 1);
                if q.is_zero() {
                    assert!(product(ms, &w).is_zero(), "mortality witness failed re-validation");
                    return Ok(SearchOutcome { verdict: Verdict::Witness { word: w }, stats, certificate: None });
                }
                if !seen.insert(q.clone()) {
                    stats.deduplicated += 1;
                    continue;
                }
                next.push((q, w));
            }
        }
        stats.max_frontier = stats.max_frontier.max(next.len());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(SearchOutcome { verdict: Verdict::Exhausted { depth: max_depth }, stats, certificate: None })
}

// ---------------------------------------------------------------- thresholds

/// Largest precision tried when re-validating a witness.
pub const MAX_PRECISION: u32 = 4096;

/// Default cap on the number of words the oracle enumerates.
pub const ORACLE_CAP: u128 = 1 << 20;

fn meets(rel: Ordering, strict: bool) -> bool {
    rel == Ordering::Greater || (!strict && rel == Ordering::Equal)
}

/// Relation of a certified overlap to `λ`, using a separation bound `gap`:
/// a nonzero difference is at least `gap`, so an enclosure of `overlap - λ`
/// narrower than `gap` around zero proves equality.
fn relation(overlap: &Interval, lambda: &Rational, gap: Option<&Interval>) -> Option<Ordering> {
    let diff = overlap.clone() - Interval::from_rational_prec(lambda, overlap.precision());
    if diff.lo().signum() == Ordering::Greater {
        return Some(Ordering::Greater);
    }
    if diff.hi().signum() == Ordering::Less {
        return Some(Ordering::Less);
    }
    match gap {
        Some(g) if g.lo().signum() == Ordering::Greater && &diff.mag() < g.lo() => Some(Ordering::Equal),
        _ => None,
    }
}

/// Full-path overlap of `word` and its certified relation to `λ`.
pub fn bundle_relation(bundle: &GadgetBundle, word: &[usize]) -> Result<(Interval, Option<Ordering>)> {
    let overlap = bundle.overlap(word)?;
    let gap = bundle.separation(word.len());
    let rel = qdecide_core::scalar::with_precision(bundle.precision, || relation(&overlap, bundle.lambda(), Some(&gap)));
    Ok((overlap, rel))
}

fn interval_strings(i: &Interval) -> (String, String) {
    (rational_to_string(&i.lo().to_rational()), rational_to_string(&i.hi().to_rational()))
}

/// Iterative deepening over words for a gadget bundle. The search runs on
/// exact forward vectors `xᵀM_{i1}⋯M_{in}`, deduplicated, with the sign of
/// `⟨x|∏M|y⟩` deciding `overlap ≷ λ`. A witness is re-validated on the full
/// channel path; if that stays inconclusive up to [`MAX_PRECISION`] the
/// outcome is `BudgetExceeded`.
pub fn bundle_threshold_search(bundle: &GadgetBundle, strict: bool, max_depth: usize) -> Result<SearchOutcome> {
    let mut stats = SearchStats::default();
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut frontier: Vec<(Vec<Rational>, Word)> = vec![(bundle.input.x.clone(), Vec::new())];
    let y = &bundle.input.y;
    for _ in 1..=max_depth {
        let mut next = Vec::new();
        for (u, word) in &frontier {
            for (i, m) in bundle.input.matrices.iter().enumerate() {
                stats.nodes += 1;
                let v = m.vec_mul(u);
                let w = extend(word, i + 1);
                let b = v.iter().zip(y).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
                if meets(b.cmp(&Rational::zero()), strict) {
                    return revalidate_bundle(bundle, w, b, strict, stats);
                }
                if !seen.insert(v.clone()) {
                    stats.deduplicated += 1;
                    continue;
                }
                next.push((v, w));
            }
        }
        stats.max_frontier = stats.max_frontier.max(next.len());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(SearchOutcome { verdict: Verdict::Exhausted { depth: max_depth }, stats, certificate: None })
}

fn revalidate_bundle(
    bundle: &GadgetBundle,
    word: Word,
    block: Rational,
    strict: bool,
    stats: SearchStats,
) -> Result<SearchOutcome> {
    let mut current: Option<GadgetBundle> = None;
    let mut bits = bundle.precision;
    loop {
        let b = current.as_ref().unwrap_or(bundle);
        let (overlap, rel) = bundle_relation(b, &word)?;
        if rel.is_some_and(|r| meets(r, strict)) {
            let (lo, hi) = interval_strings(&overlap);
            let certificate = Certificate {
                word: word.clone(),
                exact: rational_to_string(&block),
                overlap_lo: lo,
                overlap_hi: hi,
                precision: bits,
            };
            return Ok(SearchOutcome { verdict: Verdict::Witness { word }, stats, certificate: Some(certificate) });
        }
        if rel.is_some() || bits >= MAX_PRECISION {
            // the full path contradicts the shortcut, or cannot separate it
            return Ok(SearchOutcome {
                verdict: Verdict::BudgetExceeded { depth: word.len() },
                stats,
                certificate: None,
            });
        }
        bits *= 2;
        current = Some(bundle.at_precision(bits)?);
    }
}

/// Exact channels, state and target for the general threshold problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelInstance {
    pub d: usize,
    /// Choi matrices `(T⊗id)(|Ω⟩⟨Ω|)`.
    pub chois: Vec<QMatrix>,
    pub rho: QMatrix,
    /// Rank-one projector.
    pub phi: QMatrix,
    pub lambda: Rational,
}

impl ChannelInstance {
    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        let bad = |s: &str| Err(GadgetError::InvalidInstance(s.to_string()));
        if d < 2 {
            return bad("dimension must be at least 2");
        }
        if self.chois.is_empty() {
            return bad("at least one channel is required");
        }
        let inv_d = Rational::new(1.into(), (d as i64).into());
        for c in &self.chois {
            if c.shape() != (d * d, d * d) || !c.is_hermitian() {
                return bad("Choi matrices must be Hermitian d²×d²");
            }
            for i in 0..d {
                for j in 0..d {
                    let s = (0..d).fold(qdecide_core::Complex::<Rational>::zero(), |acc, a| {
                        acc + c[(a * d + i, a * d + j)].clone()
                    });
                    let want = if i == j { inv_d.clone() } else { Rational::zero() };
                    if s != qdecide_core::Complex::real(want) {
                        return bad("a channel is not trace preserving");
                    }
                }
            }
            if psd_certificate(c) != CpVerdict::CertifiedTrue {
                return bad("a channel is not completely positive");
            }
        }
        if self.rho.shape() != (d, d) || qdecide_core::channels::density_verdict(&self.rho) != CpVerdict::CertifiedTrue {
            return bad("ρ is not a density matrix");
        }
        let phi = &self.phi;
        if phi.shape() != (d, d) || !phi.is_hermitian() || phi.matmul(phi) != *phi || !phi.trace().re.is_one() {
            return bad("φ is not a rank-one projector");
        }
        if self.lambda <= Rational::zero() || self.lambda >= Rational::one() {
            return bad("λ must lie in (0, 1)");
        }
        Ok(())
    }

    /// `tr[φ T_{i1}⋯T_{in}(ρ)]` exactly, by applying the Choi matrices.
    pub fn overlap(&self, word: &[usize]) -> Rational {
        let mut state = self.rho.clone();
        for &i in word.iter().rev() {
            state = apply_choi(&self.chois[i - 1], self.d, &state);
        }
        self.phi.trace_product_re(&state)
    }
}

/// Iterative deepening on the transfer-vector path over `ℚ(√·)`: forward
/// vectors `aᵀ T̂_{i1}⋯T̂_{in}` with `a` the coordinates of `φ`, paired with
/// those of `ρ`. Dedup is exact. Witnesses are re-validated by applying the
/// rational Choi matrices to `ρ`.
pub fn threshold_search(inst: &ChannelInstance, strict: bool, max_depth: usize) -> Result<SearchOutcome> {
    inst.validate()?;
    let basis = Arc::new(HermitianBasis::<Surd>::gell_mann(inst.d)?);
    let channels: Vec<Channel<Surd>> = inst
        .chois
        .iter()
        .map(|c| Channel::from_choi(&lift_complex::<Surd>(c), basis.clone()))
        .collect::<qdecide_core::Result<_>>()?;
    let a = basis.real_coords(&lift_complex::<Surd>(&inst.phi));
    let b = basis.real_coords(&lift_complex::<Surd>(&inst.rho));
    let lambda = Surd::from_rational(inst.lambda.clone());

    let mut stats = SearchStats::default();
    let mut seen: HashSet<Vec<Surd>> = HashSet::new();
    let mut frontier: Vec<(Vec<Surd>, Word)> = vec![(a, Vec::new())];
    for _ in 1..=max_depth {
        let mut next = Vec::new();
        for (u, word) in &frontier {
            for (i, ch) in channels.iter().enumerate() {
                stats.nodes += 1;
                let v = ch.transfer().vec_mul(u);
                let w = extend(word, i + 1);
                let value = v.iter().zip(&b).fold(Surd::zero(), |acc, (p, q)| acc + p.clone() * q.clone());
                let rel = (value.clone() - lambda.clone()).sign().expect("exact sign");
                if meets(rel, strict) {
                    let exact = inst.overlap(&w);
                    let ok = meets(exact.cmp(&inst.lambda), strict) && Surd::from_rational(exact.clone()) == value;
                    assert!(ok, "threshold witness failed re-validation");
                    let s = rational_to_string(&exact);
                    let certificate =
                        Certificate { word: w.clone(), exact: s.clone(), overlap_lo: s.clone(), overlap_hi: s, precision: 0 };
                    return Ok(SearchOutcome { verdict: Verdict::Witness { word: w }, stats, certificate: Some(certificate) });
                }
                if !seen.insert(v.clone()) {
                    stats.deduplicated += 1;
                    continue;
                }
                next.push((v, w));
            }
        }
        stats.max_frontier = stats.max_frontier.max(next.len());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(SearchOutcome { verdict: Verdict::Exhausted { depth: max_depth }, stats, certificate: None })
}

// ---------------------------------------------------------------- oracle

#[derive(Clone, Debug)]
pub struct OracleEntry {
    pub word: Word,
    pub overlap: Interval,
    /// `overlap` versus `λ`, when certified.
    pub relation: Option<Ordering>,
}

fn word_count(k: usize, depth: usize) -> u128 {
    (1..=depth).map(|n| (k as u128).saturating_pow(n as u32)).fold(0u128, |a, b| a.saturating_add(b))
}

fn all_words(k: usize, depth: usize, cap: u128) -> Result<Vec<Word>> {
    let words = word_count(k, depth);
    if words > cap {
        return Err(GadgetError::CapExceeded { words, cap });
    }
    Ok((1..=depth).flat_map(|n| crate::words::words_of_length(k, n)).collect())
}

/// Every word of length `1..=depth`, each evaluated from scratch on the
/// full channel path.
pub fn bruteforce_oracle(inst: &ChannelInstance, depth: usize, cap: u128) -> Result<Vec<OracleEntry>> {
    inst.validate()?;
    all_words(inst.chois.len(), depth, cap)?
        .into_iter()
        .map(|word| {
            let v = inst.overlap(&word);
            Ok(OracleEntry { relation: Some(v.cmp(&inst.lambda)), overlap: Interval::from_rational(&v), word })
        })
        .collect()
}

/// The oracle for a gadget bundle: full-path intervals, with equality
/// proved through the separation bound.
pub fn bruteforce_bundle(bundle: &GadgetBundle, depth: usize, cap: u128) -> Result<Vec<OracleEntry>> {
    all_words(bundle.k(), depth, cap)?
        .into_iter()
        .map(|word| {
            let (overlap, relation) = bundle_relation(bundle, &word)?;
            Ok(OracleEntry { word, overlap, relation })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Witness(Word),
    NoWitness,
    /// This word could not be compared with `λ`.
    Undetermined(Word),
}

/// The first entry meeting the threshold, in the oracle's (length, lex)
/// order.
pub fn oracle_verdict(entries: &[OracleEntry], strict: bool) -> OracleVerdict {
    for e in entries {
        match e.relation {
            Some(r) if meets(r, strict) => return OracleVerdict::Witness(e.word.clone()),
            Some(_) => {}
            None => return OracleVerdict::Undetermined(e.word.clone()),
        }
    }
    OracleVerdict::NoWitness
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|v| Rational::from_integer(v.into())).collect()).collect())
    }

    fn sipser() -> PcpInstance {
        // a, b, c -> 1, 2, 3
        PcpInstance::new(3, vec![(vec![2], vec![3, 1]), (vec![1], vec![1, 2]), (vec![3, 1], vec![1]), (vec![1, 2, 3], vec![3])])
            .unwrap()
    }

    #[test]
    fn sipser_dominoes() {
        let out = pcp_search(&sipser(), 16, 8, false).unwrap();
        assert_eq!(out.witness(), Some(&vec![2, 1, 3, 2, 4]));
        let (top, bottom) = sipser().concatenate(&[2, 1, 3, 2, 4]).unwrap();
        assert_eq!(top, vec![1, 2, 3, 1, 1, 1, 2, 3]);
        assert_eq!(top, bottom);
    }

    #[test]
    fn trivial_pcp_instances() {
        let one = PcpInstance::new(1, vec![(vec![1], vec![1])]).unwrap();
        assert_eq!(pcp_search(&one, 4, 3, false).unwrap().witness(), Some(&vec![1]));
        let never = PcpInstance::new(2, vec![(vec![1], vec![1, 2])]).unwrap();
        for depth in [1, 5, 20] {
            assert_eq!(pcp_search(&never, 64, depth, false).unwrap().verdict, Verdict::Exhausted { depth });
        }
    }

    #[test]
    fn claus_shape() {
        // 1·23·11 = 12·31·1
        let inst = PcpInstance::new(3, vec![(vec![1], vec![1, 2]), (vec![2, 3], vec![3, 1]), (vec![1, 1], vec![1])])
            .unwrap();
        let out = pcp_search(&inst, 16, 6, true).unwrap();
        let w = out.witness().expect("solution 1 2 3");
        assert_eq!(w.first(), Some(&1));
        assert_eq!(w.last(), Some(&3));
        assert!(inst.is_solution(w).unwrap());
    }

    #[test]
    fn mortality_examples() {
        let out = mortality_search(&[q(vec![vec![0, 1], vec![0, 0]])], 5).unwrap();
        assert_eq!(out.witness(), Some(&vec![1, 1]));
        let out = mortality_search(&[q(vec![vec![1, 0], vec![0, 1]])], 5).unwrap();
        assert_eq!(out.verdict, Verdict::Exhausted { depth: 5 });
        assert_eq!(out.stats.deduplicated, 1);
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(word_count(2, 3), 14);
        assert_eq!(all_words(2, 3, 100).unwrap().len(), 14);
        assert!(all_words(2, 0, 100).unwrap().is_empty());
        assert!(matches!(all_words(3, 5, 100), Err(GadgetError::CapExceeded { words: 363, cap: 100 })));
    }
}
