//! Dense row-major matrices and the small set of vector helpers the
//! perturbation kernels are built from.
//!
//! Matrices here are small (a handful to a few thousand states), so plain
//! `Vec<T>` storage with explicit loops is used throughout. All arithmetic
//! stays in the element type `T`; nothing is widened behind the caller's
//! back, which is what makes the single-precision pipeline meaningful.

use crate::error::{Error, Result};
use crate::precision::Scalar;

/// Dense row-major matrix: `data[i * cols + j]` holds entry `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// All-ones matrix.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::one(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    c
                )));
            }
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Rank-one matrix `c * r^T`.
    pub fn outer(col: &[T], row: &[T]) -> Self {
        let mut m = Mat::zeros(col.len(), row.len());
        for (i, &ci) in col.iter().enumerate() {
            for (j, &rj) in row.iter().enumerate() {
                m[(i, j)] = ci * rj;
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major view of all entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// `A e`: vector of row sums.
    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |s, &x| s + x))
            .collect()
    }

    /// Entrywise max-norm.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Mat<T>, f: impl Fn(T, T) -> T) -> Mat<T> {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = T::zero();
                for k in 0..self.cols {
                    s = s + self[(i, k)] * other[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    /// `self * x` for a column vector.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T * self` for a row vector.
    pub fn premul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o = *o + xi * self[(i, j)];
            }
        }
        out
    }

    /// In-place rank-one update `self += scale * c * r^T`.
    ///
    /// Rows whose column factor is exactly zero are skipped, so updates with
    /// structurally sparse factors only touch the rows they change.
    pub fn add_rank_one(&mut self, c: &[T], r: &[T], scale: T) {
        assert_eq!(c.len(), self.rows);
        assert_eq!(r.len(), self.cols);
        for (i, &ci) in c.iter().enumerate() {
            if ci == T::zero() {
                continue;
            }
            let f = ci * scale;
            for (rj, m) in r.iter().zip(self.row_mut(i)) {
                *m = *m + f * *rj;
            }
        }
    }

    /// Widen (or narrow) every entry through `f64`.
    pub fn convert<U: Scalar>(&self) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::from_f64(x.to_f64())).collect(),
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.convert()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// All-ones column vector `e`.
pub fn ones_vec<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::one(); n]
}

/// Elementary vector `e_i` (zero-based index).
pub fn basis_vec<T: Scalar>(i: usize, n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

pub fn vec_sum<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |s, &x| s + x)
}

pub fn max_abs_vec<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn sub_vecs<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn convert_vec<T: Scalar, U: Scalar>(a: &[T]) -> Vec<U> {
    a.iter().map(|&x| U::from_f64(x.to_f64())).collect()
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuDecomposition<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuDecomposition<T> {
    /// Factorize a square matrix.
    ///
    /// A pivot of magnitude below `n * ulp(max |a_ij|)` is reported as
    /// [`Error::SingularSystem`]; for `I - P + t u^T` systems that signals
    /// `pi^T t = 0` or `u^T e = 0`.
    pub fn factor(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.n_rows(),
                cols: a.n_cols(),
            });
        }
        let n = a.n_rows();
        let threshold = T::from_usize(n) * T::epsilon() * a.max_abs().max(T::min_positive_value());
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < threshold {
                return Err(Error::SingularSystem {
                    pivot: best.to_f64(),
                    threshold: threshold.to_f64(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let delta = factor * lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - delta;
                }
            }
        }
        Ok(LuDecomposition { lu, perm })
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n_rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution (unit lower triangle)
        for i in 1..n {
            let mut s = x[i];
            for (&l, &xj) in self.lu.row(i)[..i].iter().zip(&x[..i]) {
                s = s - l * xj;
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            let row = self.lu.row(i);
            for (&u, &xj) in row[i + 1..].iter().zip(&x[i + 1..]) {
                s = s - u * xj;
            }
            x[i] = s / row[i];
        }
        x
    }

    pub fn inverse(&self) -> Mat<T> {
        let n = self.lu.n_rows();
        let mut inv = Mat::zeros(n, n);
        for j in 0..n {
            let col = self.solve_vec(&basis_vec(j, n));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Convenience: invert a square matrix, failing on rank deficiency.
pub fn invert<T: Scalar>(a: &Mat<T>) -> Result<Mat<T>> {
    Ok(LuDecomposition::factor(a)?.inverse())
}
