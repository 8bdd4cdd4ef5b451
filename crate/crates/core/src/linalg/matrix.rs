use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix dimension that may be materialized (12 qubits).
pub const MATERIALIZATION_CAP: usize = 4096;

/// Default relative threshold for rejecting non-Hermitian input:
/// `||A - A^H||_2 > HERMITIAN_REJECT * ||A||_2`.
pub const HERMITIAN_REJECT: f64 = 1e-8;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    if dim > MATERIALIZATION_CAP {
        Err(Error::TooLarge {
            dim,
            cap: MATERIALIZATION_CAP,
        })
    } else {
        Ok(())
    }
}

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        check_cap(rows.max(cols))?;
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Real row-major convenience constructor.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        check_cap(inner.nrows().max(inner.ncols()))?;
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { inner })
    }

    /// Internal constructor for results of operations on finite inputs.
    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { inner }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::wrap(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::wrap(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Matrix unit `E_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.inner[(i, j)] = ONE;
        m
    }

    /// Rank-one outer product `x y^H`.
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::wrap(self.inner.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::wrap(&self.inner * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Trace inner product `tr(A^H B)`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(self.shape_error(other));
        }
        Ok(Self::wrap(&self.inner * &other.inner))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::wrap(&self.inner + &other.inner))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::wrap(&self.inner - &other.inner))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            Err(self.shape_error(other))
        } else {
            Ok(())
        }
    }

    fn shape_error(&self, other: &Self) -> Error {
        Error::ShapeMismatch {
            left_rows: self.rows(),
            left_cols: self.cols(),
            right_rows: other.rows(),
            right_cols: other.cols(),
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::try_add`] otherwise.
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

/// Square complex matrix with `H[i][j] == conj(H[j][i])` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    matrix: ComplexMatrix,
}

impl HermitianMatrix {
    /// Symmetrizes `m` into `(m + m^H)/2`, rejecting input whose
    /// anti-Hermitian part exceeds the default relative threshold.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_threshold(m, HERMITIAN_REJECT)
    }

    pub fn with_threshold(m: ComplexMatrix, rel_threshold: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let adj = m.adjoint();
        let asymmetry = super::frobenius_norm(&(&m - &adj));
        let threshold = rel_threshold * super::frobenius_norm(&m);
        if asymmetry > threshold {
            return Err(Error::NotHermitian {
                asymmetry,
                threshold,
            });
        }
        Ok(Self::symmetrize(&m))
    }

    /// Unconditionally symmetrizes; only for matrices Hermitian up to roundoff.
    pub(crate) fn symmetrize(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        let half = Complex64::new(0.5, 0.0);
        let inner = DMatrix::from_fn(n, n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * half);
        Self {
            matrix: ComplexMatrix::wrap(inner),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    /// Rank-one `x x^H`.
    pub fn projector(x: &[Complex64]) -> Self {
        Self::symmetrize(&ComplexMatrix::outer(x, x))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.try_add(&other.matrix)?,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.try_sub(&other.matrix)?,
        })
    }

    /// `U H U^H`, re-symmetrized.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let out = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self::symmetrize(&out))
    }

    /// `tr(H^2)`.
    pub fn purity(&self) -> f64 {
        let f = super::frobenius_norm(&self.matrix);
        f * f
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}
