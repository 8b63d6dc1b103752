//! Dense matrices over a generic scalar, plus the two pieces of numerical
//! linear algebra the crate needs: exact rank over a field and largest
//! singular values for floating scalars.

use crate::scalar::Scalar;
use num_traits::Float;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self[(r, c)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        Matrix {
            rows: nr,
            cols: nc,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if *a == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a.clone() * other[(k, c)].clone();
                    out[(r, c)] += add;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].clone() * k.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == T::zero())
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                other[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    m[(ro + r, co + c)] = b[(r, c)].clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    /// Row-echelon rank by Gauss elimination with exact zero tests.
    /// Only sound for exact scalars; the float lane never calls it.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let pivot = (rank..m.rows).find(|&r| m[(r, col)] != T::zero());
            let Some(p) = pivot else { continue };
            for c in 0..m.cols {
                let tmp = m[(p, c)].clone();
                m[(p, c)] = m[(rank, c)].clone();
                m[(rank, c)] = tmp;
            }
            let inv = T::one() / m[(rank, col)].clone();
            for c in 0..m.cols {
                m[(rank, c)] *= inv.clone();
            }
            for r in 0..m.rows {
                if r != rank && m[(r, col)] != T::zero() {
                    let factor = m[(r, col)].clone();
                    for c in 0..m.cols {
                        let sub = factor.clone() * m[(rank, c)].clone();
                        m[(r, c)] -= sub;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse by Gauss-Jordan, None when singular. Exact scalars only.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[(r, col)] != T::zero())?;
            for c in 0..n {
                m.data.swap(pivot * n + c, col * n + c);
                inv.data.swap(pivot * n + c, col * n + c);
            }
            let scale = T::one() / m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] *= scale.clone();
                inv[(col, c)] *= scale.clone();
            }
            for r in 0..n {
                if r != col && m[(r, col)] != T::zero() {
                    let factor = m[(r, col)].clone();
                    for c in 0..n {
                        let s = factor.clone() * m[(col, c)].clone();
                        m[(r, c)] -= s;
                        let s = factor.clone() * inv[(col, c)].clone();
                        inv[(r, c)] -= s;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Basis of the null space {x : self·x = 0}, exact scalars only.
    pub fn null_space(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let mut pivot_col_of_row = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            let pivot = (rank..m.rows).find(|&r| m[(r, col)] != T::zero());
            let Some(p) = pivot else { continue };
            for c in 0..m.cols {
                let tmp = m[(p, c)].clone();
                m[(p, c)] = m[(rank, c)].clone();
                m[(rank, c)] = tmp;
            }
            let inv = T::one() / m[(rank, col)].clone();
            for c in 0..m.cols {
                m[(rank, c)] *= inv.clone();
            }
            for r in 0..m.rows {
                if r != rank && m[(r, col)] != T::zero() {
                    let factor = m[(r, col)].clone();
                    for c in 0..m.cols {
                        let sub = factor.clone() * m[(rank, c)].clone();
                        m[(r, c)] -= sub;
                    }
                }
            }
            pivot_col_of_row.push(col);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        let pivot_cols: std::collections::HashSet<usize> =
            pivot_col_of_row.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![T::zero(); m.cols];
            v[free] = T::one();
            for (row, &pc) in pivot_col_of_row.iter().enumerate() {
                v[pc] = -m[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl<T: Scalar + Float> Matrix<T> {
    /// Largest singular value via Jacobi iteration on AᵀA. Deterministic
    /// sweep order; matrices here are small so convergence is quick.
    pub fn operator_norm(&self) -> T {
        let s = self.transpose().matmul(self);
        let n = s.nrows();
        if n == 0 {
            return T::zero();
        }
        let mut a = s;
        for _ in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off < T::from(1e-26).unwrap() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[(p, q)].abs() <= T::from(1e-300).unwrap() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::from(2.0).unwrap() * a[(p, q)]);
                    let t = {
                        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                    };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut largest = T::zero();
        for i in 0..n {
            if a[(i, i)] > largest {
                largest = a[(i, i)];
            }
        }
        largest.max(T::zero()).sqrt()
    }
}
