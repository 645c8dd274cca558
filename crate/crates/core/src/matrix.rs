use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::{Complex, Conj, Field, Rational, RealField, Ring};

/// Dense row-major matrix over any ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Complex matrix over a real scalar type.
pub type CMatrix<T> = Matrix<Complex<T>>;

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Rows `ri` and columns `ci`, in the given order.
    pub fn submatrix(&self, ri: &[usize], ci: &[usize]) -> Self {
        Self::from_fn(ri.len(), ci.len(), |i, j| self[(ri[i], ci[j])].clone())
    }

    pub fn column_vector(v: Vec<T>) -> Self {
        let n = v.len();
        Matrix { rows: n, cols: 1, data: v }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// The matrix unit `E_ij`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = T::one();
        m
    }

    pub fn diagonal(d: Vec<T>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    let a = &self.data[i * self.cols + k];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * o.data[k * o.cols + j].clone();
                }
                out.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: o.cols, data: out }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| !v[i].is_zero())
                    .fold(T::zero(), |acc, i| acc + v[i].clone() * self[(i, j)].clone())
            })
            .collect()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    /// Kronecker product, row index `i * o.rows + k`.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |r, c| {
            let (i, k) = (r / o.rows, r % o.rows);
            let (j, l) = (c / o.cols, c % o.cols);
            self[(i, j)].clone() * o[(k, l)].clone()
        })
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => o[(i - self.rows, j - self.cols)].clone(),
                _ => T::zero(),
            }
        })
    }

    /// Characteristic polynomial `det(tI - A)`, coefficients from `t^n` down
    /// to the constant term. Division-free (Berkowitz), so it works over any
    /// commutative ring.
    pub fn charpoly(&self) -> Vec<T> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut p = vec![T::one()];
        for k in 0..n {
            // Leading block A_k (k×k), column c and row r bordering it.
            let a = self[(k, k)].clone();
            let c: Vec<T> = (0..k).map(|i| self[(i, k)].clone()).collect();
            let r: Vec<T> = (0..k).map(|j| self[(k, j)].clone()).collect();
            let mut col = Vec::with_capacity(k + 2);
            col.push(T::one());
            col.push(-a);
            let mut v = c;
            for _ in 0..k {
                let rv = r.iter().zip(&v).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                col.push(-rv);
                v = (0..k)
                    .map(|i| (0..k).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
                    .collect();
            }
            // Lower-triangular Toeplitz (k+2)×(k+1) times p (length k+1).
            let mut q = Vec::with_capacity(k + 2);
            for i in 0..k + 2 {
                let mut acc = T::zero();
                for (j, pj) in p.iter().enumerate().take(i.min(k) + 1) {
                    if i - j < col.len() {
                        acc = acc + col[i - j].clone() * pj.clone();
                    }
                }
                q.push(acc);
            }
            p = q;
        }
        p
    }

    pub fn det(&self) -> T {
        let n = self.rows;
        let p = self.charpoly();
        let c = p[n].clone();
        if n.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }
}

impl<T: Field> Matrix<T> {
    /// Gauss-Jordan inverse with largest-magnitude pivoting; `None` when a
    /// pivot cannot be shown non-zero.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| a[(r, col)].try_inv().is_some())
                .max_by(|&x, &y| {
                    a[(x, col)].magnitude_hint().total_cmp(&a[(y, col)].magnitude_hint())
                })?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].try_inv()?;
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() * p.clone();
                inv[(col, j)] = inv[(col, j)].clone() * p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = a[(col, j)].clone() * f.clone();
                    a[(r, j)] = a[(r, j)].clone() - t;
                    let t = inv[(col, j)].clone() * f.clone();
                    inv[(r, j)] = inv[(r, j)].clone() - t;
                }
            }
        }
        Some(inv)
    }
}

impl<T: Ring + Conj> Matrix<T> {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(Conj::conj)
    }
}

impl<T: Ring> Matrix<Complex<T>> {
    pub fn real_part(&self) -> Matrix<T> {
        self.map(|z| z.re.clone())
    }

    pub fn imag_part(&self) -> Matrix<T> {
        self.map(|z| z.im.clone())
    }

    pub fn from_real(m: &Matrix<T>) -> Self {
        m.map(|x| Complex::real(x.clone()))
    }

    /// Structural Hermiticity: `X[i][j] == conj(X[j][i])` entry by entry.
    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i..self.cols).all(|j| {
                    let a = &self[(i, j)];
                    let b = &self[(j, i)];
                    a.re == b.re && a.im == -b.im.clone()
                })
            })
    }
}

impl<T: RealField> Matrix<Complex<T>> {
    /// `re tr[A B]`, the Hilbert-Schmidt pairing for Hermitian arguments.
    pub fn trace_product_re(&self, o: &Self) -> T {
        assert_eq!(self.shape(), (o.cols, o.rows));
        let mut acc = T::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &o[(k, i)];
                acc = acc + a.re.clone() * b.re.clone() - a.im.clone() * b.im.clone();
            }
        }
        acc
    }

    /// `tr[A B]` for arbitrary complex arguments.
    pub fn trace_product(&self, o: &Self) -> Complex<T> {
        assert_eq!(self.shape(), (o.cols, o.rows));
        let mut acc = Complex::<T>::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * o[(k, i)].clone();
            }
        }
        acc
    }

    /// Frobenius norm squared.
    pub fn frobenius_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }
}

impl Matrix<Complex<Rational>> {
    pub fn from_rational(m: &Matrix<Rational>) -> Self {
        Self::from_real(m)
    }
}

/// Converts the entries of a rational matrix into another real field.
pub fn lift_rational<T: RealField>(m: &Matrix<Rational>) -> Matrix<T> {
    m.map(T::from_rational)
}

/// Converts a complex rational matrix into another real field.
pub fn lift_complex<T: RealField>(m: &CMatrix<Rational>) -> CMatrix<T> {
    m.map(|z| Complex::new(T::from_rational(&z.re), T::from_rational(&z.im)))
}

impl<T: Ring> Add for Matrix<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "add shape mismatch");
        let data = self.data.into_iter().zip(o.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Ring> Sub for Matrix<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "sub shape mismatch");
        let data = self.data.into_iter().zip(o.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Ring> Neg for Matrix<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|a| -a).collect() }
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, o: &Matrix<T>) -> Matrix<T> {
        self.matmul(o)
    }
}

impl<T: Ring> Mul for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, o: Matrix<T>) -> Matrix<T> {
        self.matmul(&o)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?}, ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn charpoly_matches_hand_expansion() {
        // det(tI - A) for [[2,1],[1,1]] is t^2 - 3t + 1.
        let a = qm(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.charpoly(), vec![q(1), q(-3), q(1)]);
        let b = qm(&[&[1, 2, 3], &[0, 4, 5], &[1, 0, 6]]);
        // trace 11, det 1*(24-0) - 2*(0-5) + 3*(0-4) = 22
        let p = b.charpoly();
        assert_eq!(p[1], q(-11));
        assert_eq!(b.det(), q(22));
    }

    #[test]
    fn inverse_round_trip() {
        let a = qm(&[&[0, 2, 1], &[1, 1, 0], &[3, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(3));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn kron_indexing() {
        let a = qm(&[&[1, 2], &[3, 4]]);
        let b = qm(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], q(1));
        assert_eq!(k[(3, 2)], q(4));
        assert_eq!(k[(2, 1)], q(3));
    }
}
