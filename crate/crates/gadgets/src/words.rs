//! Words over `{1..m}`, their `m`-adic values, and the Paterson morphism
//! from pairs of words to `3×3` integer matrices.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qdecide_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};

/// Letters are `1..=m`; index words over tiles are `1..=k`.
pub type Word = Vec<usize>;

fn check_letters(w: &[usize], m: usize) -> Result<()> {
    match w.iter().find(|&&a| a == 0 || a > m) {
        Some(&letter) => Err(GadgetError::LetterOutOfRange { letter, m }),
        None => Ok(()),
    }
}

/// `σ(w) = Σ_j w_j m^{|w|-j}`; injective on words over `{1..m}` and
/// `σ(uw) = m^{|w|} σ(u) + σ(w)`.
pub fn sigma(w: &[usize], m: usize) -> Result<BigInt> {
    check_letters(w, m)?;
    let base = BigInt::from(m);
    Ok(w.iter().fold(BigInt::zero(), |acc, &a| acc * &base + BigInt::from(a)))
}

/// `[[m^|u|, 0, 0], [0, m^|w|, 0], [σ(u), σ(w), 1]]`.
pub fn gamma(u: &[usize], w: &[usize], m: usize) -> Result<Matrix<BigInt>> {
    let (su, sw) = (sigma(u, m)?, sigma(w, m)?);
    let base = BigInt::from(m);
    let z = BigInt::zero;
    Ok(Matrix::from_rows(vec![
        vec![num_traits::pow(base.clone(), u.len()), z(), z()],
        vec![z(), num_traits::pow(base, w.len()), z()],
        vec![su, sw, BigInt::one()],
    ]))
}

/// `x = (1, -1, 0)ᵀ`, so that `⟨y|γ(u,w)|x⟩ = σ(u) - σ(w)`.
pub fn paterson_x() -> Vec<BigInt> {
    vec![BigInt::one(), -BigInt::one(), BigInt::zero()]
}

/// `y = (0, 0, 1)`.
pub fn paterson_y() -> Vec<BigInt> {
    vec![BigInt::zero(), BigInt::zero(), BigInt::one()]
}

/// `⟨y|A|x⟩` for integer data.
pub fn bilinear(y: &[BigInt], a: &Matrix<BigInt>, x: &[BigInt]) -> BigInt {
    let ax = a.mul_vec(x);
    y.iter().zip(&ax).fold(BigInt::zero(), |acc, (p, q)| acc + p * q)
}

/// `γ(u,w) ⊗ γ(u,w)`; with `X = x⊗x`, `Y = y⊗y` the pairing is
/// `(σ(u) - σ(w))²`, which vanishes exactly when `u = w`.
pub fn gamma_square(u: &[usize], w: &[usize], m: usize) -> Result<Matrix<BigInt>> {
    let g = gamma(u, w, m)?;
    Ok(g.kron(&g))
}

pub fn paterson_square_vectors() -> (Vec<BigInt>, Vec<BigInt>) {
    let kron = |a: &[BigInt]| -> Vec<BigInt> { a.iter().flat_map(|p| a.iter().map(move |q| p * q)).collect() };
    (kron(&paterson_x()), kron(&paterson_y()))
}

/// Post correspondence instance: tiles `(X_i, Y_i)` of nonempty words over
/// `{1..m}`, indexed `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcpInstance {
    pub m: usize,
    pub tiles: Vec<(Word, Word)>,
    #[serde(default)]
    pub claus: bool,
}

impl PcpInstance {
    pub fn new(m: usize, tiles: Vec<(Word, Word)>) -> Result<Self> {
        let inst = PcpInstance { m, tiles, claus: false };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiles.is_empty() {
            return Err(GadgetError::InvalidInstance("a PCP instance needs at least one tile".into()));
        }
        for (i, (a, b)) in self.tiles.iter().enumerate() {
            if a.is_empty() || b.is_empty() {
                return Err(GadgetError::InvalidInstance(format!("tile {} has an empty word", i + 1)));
            }
            check_letters(a, self.m)?;
            check_letters(b, self.m)?;
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.tiles.len()
    }

    /// `(X(w), Y(w))` for an index word over `1..=k`.
    pub fn concatenate(&self, word: &[usize]) -> Result<(Word, Word)> {
        check_letters(word, self.k())?;
        let mut top = Vec::new();
        let mut bottom = Vec::new();
        for &i in word {
            top.extend_from_slice(&self.tiles[i - 1].0);
            bottom.extend_from_slice(&self.tiles[i - 1].1);
        }
        Ok((top, bottom))
    }

    pub fn is_solution(&self, word: &[usize]) -> Result<bool> {
        let (a, b) = self.concatenate(word)?;
        Ok(!word.is_empty() && a == b)
    }

    /// The tile matrices `γ(X_i, Y_i)`; a word solves the instance iff
    /// `⟨y|γ(X_{i1},Y_{i1})⋯|x⟩ = 0`.
    pub fn paterson_matrices(&self) -> Result<Vec<Matrix<BigInt>>> {
        self.tiles.iter().map(|(a, b)| gamma(a, b, self.m)).collect()
    }
}

/// Words over `{1..k}` of length `n`, lexicographically.
pub fn words_of_length(k: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=k).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}
