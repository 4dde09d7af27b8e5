//! Dense complex matrices.
//!
//! Storage is row-major and entries are addressed 0-based, `a[(i, j)]`.
//! Matrices with more than [`MAX_DIM`] rows or columns are rejected by the
//! structured constructors.

mod eigen;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub use eigen::EighJacobi;

/// Largest admissible number of rows or columns.
pub const MAX_DIM: usize = 5000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

pub(crate) fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(Error::Resource(format!(
            "{rows}x{cols} matrix exceeds the {MAX_DIM}x{MAX_DIM} limit"
        )));
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return domain(format!("{} entries for a {rows}x{cols} matrix", data.len()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return domain("ragged rows");
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let owned: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&owned)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
    }

    /// A 1×1 matrix.
    pub fn scalar(z: Complex64) -> Self {
        ComplexMatrix { rows: 1, cols: 1, data: vec![z] }
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Main diagonal.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// `X ⊗ Y`: entry `((i1,i2),(j1,j2))` is `X[i1,j1]·Y[i2,j2]`.
    pub fn kron(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        check_dims(rows, cols)?;
        let mut out = Self::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let x = self.data[i1 * self.cols + j1];
                if x == ZERO {
                    continue;
                }
                for i2 in 0..other.rows {
                    let dst = (i1 * other.rows + i2) * cols + j1 * other.cols;
                    let src = other.row(i2);
                    for (o, &y) in out.data[dst..dst + other.cols].iter_mut().zip(src) {
                        *o = x * y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Left fold of [`kron`](Self::kron).
    pub fn kron_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Domain("kron_all of an empty list".into()))?;
        rest.iter().try_fold(first.clone(), |acc, x| acc.kron(x))
    }

    /// `X ⊕ Y = diag(X, Y)`.
    pub fn direct_sum(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (rows, cols) = (self.rows + other.rows, self.cols + other.cols);
        check_dims(rows, cols)?;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
        }
        for i in 0..other.rows {
            let dst = (self.rows + i) * cols + self.cols;
            out.data[dst..dst + other.cols].copy_from_slice(other.row(i));
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, &b) in dst.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return domain(format!("vector of length {} for {} columns", v.len(), self.cols));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.shape() != other.shape() {
            return domain(format!("shape mismatch: {:?} vs {:?}", self.shape(), other.shape()));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: Complex64) -> ComplexMatrix {
        self.map(|z| alpha * z)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Hermitian within `1e-12` relative to the largest entry.
    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = 1e-12 * self.max_abs();
        (0..self.rows).all(|i| {
            (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol)
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == ZERO))
    }

    /// Real parts as a row-major `f64` buffer, or `None` if any entry has a
    /// nonzero imaginary part.
    pub(crate) fn real_data(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| self.data.iter().map(|z| z.re).collect())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Householder reduction to tridiagonal form followed by implicit QL.
    pub fn eigh(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian() {
            return domain("eigh needs a Hermitian matrix");
        }
        eigen::eigh_values(self)
    }

    /// Eigenvalues (ascending) and unit eigenvectors (columns) of a Hermitian
    /// matrix by cyclic complex Jacobi rotations.
    pub fn eigh_jacobi(&self) -> Result<EighJacobi> {
        if !self.is_hermitian() {
            return domain("eigh_jacobi needs a Hermitian matrix");
        }
        eigen::eigh_jacobi(self)
    }

    /// Singular values, descending, `min(rows, cols)` of them.
    pub fn svd_values(&self) -> Vec<f64> {
        eigen::svd_values(self)
    }

    /// Spectral norm `σ_1`.
    pub fn norm2(&self) -> f64 {
        self.svd_values().first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `1e-9·σ_1`.
    pub fn rank(&self) -> usize {
        let sv = self.svd_values();
        let Some(&top) = sv.first() else { return 0 };
        sv.iter().filter(|&&s| s > 1e-9 * top).count()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, " ")?;
            for z in self.row(i).iter().take(12) {
                write!(f, " {:.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
