use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix, ZERO};
use super::{block, from_blocks};
use crate::error::{Error, Result};

const MAP_TOL: f64 = 1e-12;

/// Linear map `M(in_dim) -> M(out_dim)`, stored as the images of the matrix
/// units: `images[i * in_dim + j] = phi(E_ij)`.
///
/// Construction enforces Hermiticity preservation (`phi(E_ij)^H = phi(E_ji)`)
/// and, when flagged, stochasticity (`phi(I) = I`).
#[derive(Debug, Clone, PartialEq)]
pub struct MapOnMatrices {
    in_dim: usize,
    out_dim: usize,
    images: Vec<ComplexMatrix>,
    stochastic: bool,
}

impl MapOnMatrices {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        images: Vec<ComplexMatrix>,
        stochastic: bool,
    ) -> Result<Self> {
        if images.len() != in_dim * in_dim {
            return Err(Error::DimensionMismatch {
                expected: in_dim * in_dim,
                found: images.len(),
            });
        }
        if let Some(bad) = images.iter().find(|m| m.rows() != out_dim || m.cols() != out_dim) {
            return Err(Error::DimensionMismatch {
                expected: out_dim,
                found: bad.rows(),
            });
        }
        for i in 0..in_dim {
            for j in 0..in_dim {
                let diff = images[i * in_dim + j]
                    .adjoint()
                    .max_abs_diff(&images[j * in_dim + i])?;
                if diff > MAP_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "map does not preserve Hermiticity (phi(E_{i}{j})^H differs by {diff:e})"
                    )));
                }
            }
        }
        let map = Self {
            in_dim,
            out_dim,
            images,
            stochastic,
        };
        if stochastic {
            let image_of_identity = map.apply(&ComplexMatrix::identity(in_dim))?;
            let diff = image_of_identity.max_abs_diff(&ComplexMatrix::identity(out_dim))?;
            if diff > MAP_TOL {
                return Err(Error::InvalidArgument(format!(
                    "map flagged stochastic but phi(I) differs from I by {diff:e}"
                )));
            }
        }
        Ok(map)
    }

    /// Tabulates a linear function on the matrix units.
    pub fn from_linear(
        in_dim: usize,
        out_dim: usize,
        stochastic: bool,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let images = (0..in_dim * in_dim)
            .map(|k| f(&ComplexMatrix::unit(in_dim, k / in_dim, k % in_dim)))
            .collect();
        Self::new(in_dim, out_dim, images, stochastic)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_linear(n, n, true, |x| x.clone()).expect("identity map is valid")
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self::from_linear(in_dim, out_dim, false, |_| ComplexMatrix::zeros(out_dim, out_dim))
            .expect("zero map is valid")
    }

    /// Schur-product map `X -> B o X` for Hermitian `B`.
    pub fn schur_map(b: &HermitianMatrix) -> Self {
        let n = b.dim();
        let stochastic = (0..n).all(|i| (b.get(i, i) - Complex64::new(1.0, 0.0)).norm() <= MAP_TOL);
        Self::from_linear(n, n, stochastic, |x| {
            super::schur(b.matrix(), x).expect("shapes agree")
        })
        .expect("Schur maps with Hermitian B preserve Hermiticity")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    /// `phi(E_ij)`.
    pub fn image(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.images[i * self.in_dim + j]
    }

    /// `sum_ij X_ij phi(E_ij)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: x.rows(),
            });
        }
        let mut acc = nalgebra::DMatrix::from_element(self.out_dim, self.out_dim, ZERO);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let c = x.get(i, j);
                if c != ZERO {
                    acc += self.image(i, j).as_dmatrix() * c;
                }
            }
        }
        Ok(ComplexMatrix::wrap(acc))
    }

    /// Image of a Hermitian input (Hermitian by construction).
    pub fn apply_hermitian(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::symmetrize(&self.apply(x.matrix())?))
    }

    /// Adjoint with respect to the trace inner product:
    /// `<phi*(Y), X> = <Y, phi(X)>`.
    pub fn adjoint_apply(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.rows() != self.out_dim || y.cols() != self.out_dim {
            return Err(Error::DimensionMismatch {
                expected: self.out_dim,
                found: y.rows(),
            });
        }
        let n = self.in_dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.image(i, j).inner_product(y)?);
            }
        }
        // (phi*(Y))_ij = <E_ij, phi*(Y)> = <phi(E_ij), Y>
        ComplexMatrix::from_row_major(n, n, entries)
    }
}

/// `sum_ij X_ij phi(E_ij)`.
pub fn apply_map(phi: &MapOnMatrices, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    phi.apply(x)
}

/// Block-wise application: for `X` a `d1 x d1` grid of `in_dim`-sized blocks,
/// returns the grid whose `(i, j)` block is `phi(X^(i,j))`.
pub fn tilde_apply(phi: &MapOnMatrices, x: &HermitianMatrix, d1: usize) -> Result<HermitianMatrix> {
    let d2 = phi.in_dim();
    if d1 == 0 || x.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: x.dim(),
        });
    }
    let mut blocks = Vec::with_capacity(d1 * d1);
    for i in 0..d1 {
        for j in 0..d1 {
            blocks.push(phi.apply(&block(x.matrix(), d2, i, j))?);
        }
    }
    Ok(HermitianMatrix::symmetrize(&from_blocks(&blocks, d1)?))
}
