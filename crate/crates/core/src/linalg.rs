//! Small dense matrices and an LU solver.
//!
//! Block sizes stay below a few dozen, so everything is row-major `Vec` storage
//! with straightforward loops.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a factorization is rejected.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// Field element usable as a matrix entry.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }

    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
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
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(alloc::format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "vector length must match columns");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Adds `self · v` into `out`.
    pub fn apply_add(&self, v: &[T], out: &mut [T]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self
                .row(i)
                .iter()
                .zip(v)
                .fold(*o, |acc, (&a, &b)| acc + a * b);
        }
    }

    /// Induced L∞ norm: maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).modulus())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite_value())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == T::zero())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions must agree ({}x{} * {}x{})",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(l, j)];
                }
            }
        }
        out
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl RealMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        self.map(|x| Complex64::new(x, 0.0))
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

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(rhs)
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    factors: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Factors a square matrix. Fails when a pivot falls below
    /// `PIVOT_TOLERANCE · ‖A‖∞`.
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(alloc::format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::Parameter("matrix has non-finite entries".into()));
        }
        let n = a.rows();
        let threshold = PIVOT_TOLERANCE * a.inf_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot_mod) = (col..n)
                .map(|r| (r, lu[(r, col)].modulus()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mod <= threshold || pivot_mod == 0.0 {
                return Err(Error::Singular {
                    pivot: pivot_mod,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                if factor == T::zero() {
                    continue;
                }
                for j in col + 1..n {
                    let v = lu[(col, j)];
                    lu[(r, j)] = lu[(r, j)] - factor * v;
                }
            }
        }
        Ok(Self {
            n,
            factors: lu,
            perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.factors[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.factors[(i, j)] * x[j];
            }
            x[i] = s / self.factors[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.rows(), self.n);
        let mut out = Matrix::zeros(self.n, b.cols());
        let mut col = vec![T::zero(); self.n];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for (i, xi) in x.into_iter().enumerate() {
                out[(i, j)] = xi;
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve(&Matrix::identity(self.n))
    }
}

/// Shorthand for a complex scalar.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_complex_system() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            c64((i + 2 * j) as f64 + if i == j { 4.0 } else { 0.0 }, (i as f64) - (j as f64))
        });
        let x_true = [c64(1.0, -1.0), c64(0.5, 2.0), c64(-3.0, 0.25)];
        let b = a.apply(&x_true);
        let x = Lu::new(&a).unwrap().solve_vec(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn lu_needs_pivoting() {
        let a = RealMatrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let inv = Lu::new(&a).unwrap().inverse();
        assert_eq!(inv, a);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = RealMatrix::from_vec(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(Lu::new(&a), Err(Error::Singular { .. })));
        assert!(matches!(
            Lu::new(&RealMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn inf_norm_is_max_row_sum() {
        let a = ComplexMatrix::from_diagonal(&[c64(2.0, 0.0), c64(0.0, -3.0)]);
        assert_eq!(a.inf_norm(), 3.0);
        let b = RealMatrix::from_vec(2, 2, vec![1.0, -2.0, 0.5, 0.5]).unwrap();
        assert_eq!(b.inf_norm(), 3.0);
    }
}
