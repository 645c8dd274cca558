//! Principal minors of Hermitian matrices.

use crate::error::{CoreError, Result};
use crate::matrix::CMatrix;
use crate::scalar::RealField;

/// All non-empty subsets of `0..n`, ordered by size and then
/// lexicographically within each size.
pub fn index_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    for k in 1..=n {
        combinations(n, k, &mut |s| out.push(s.to_vec()));
    }
    out
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The `2^n - 1` principal minors of a Hermitian matrix, in
/// [`index_subsets`] order. Each is real; the (zero) imaginary part of the
/// determinant is discarded.
pub fn principal_minors<T: RealField>(x: &CMatrix<T>) -> Result<Vec<T>> {
    if !x.is_hermitian() {
        return Err(CoreError::NotHermitian);
    }
    Ok(index_subsets(x.rows())
        .iter()
        .map(|s| x.submatrix(s, s).det().re)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_order() {
        assert_eq!(index_subsets(2), vec![vec![0], vec![1], vec![0, 1]]);
        let s3 = index_subsets(3);
        assert_eq!(s3.len(), 7);
        assert_eq!(s3[3..], [vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]);
        let mut count = 0;
        combinations(5, 0, &mut |s| {
            assert!(s.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
    }
}
