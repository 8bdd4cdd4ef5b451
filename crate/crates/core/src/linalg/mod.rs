//! Dense complex and Hermitian matrix algebra.
//!
//! Everything else in the crate is built on this module: the three Schatten
//! norms used throughout (`||.||_inf`, `||.||_2`, `||.||_1`), a Hermitian
//! eigensolver, tensor structure (Kronecker products, partial transposes and
//! traces), block decompositions of bipartite matrices, and linear maps on
//! matrices stored by their action on matrix units.

mod dims;
mod io;
mod map;
mod matrix;

pub use dims::DimsProfile;
pub use io::{read_matrix_file, write_matrix_file, MatrixFile};
pub use map::{apply_map, tilde_apply, MapOnMatrices};
pub use matrix::{ComplexMatrix, HermitianMatrix, HERMITIAN_REJECT, MATERIALIZATION_CAP};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use matrix::{check_cap, ZERO};

/// Default relative PSD tolerance: `lambda_min >= -PSD_TOL * max(1, ||H||_inf)`.
pub const PSD_TOL: f64 = 1e-10;

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITER: usize = 10_000;

/// `sqrt(sum |M_ij|^2)`.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.as_dmatrix().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.as_dmatrix().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, decreasing.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `U diag(values) U^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let l = ComplexMatrix::from_diagonal(&diag);
        &(&self.vectors * &l) * &self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

pub fn eigh(h: &HermitianMatrix) -> Result<HermitianEigen> {
    let eig = SymmetricEigen::try_new(h.matrix().as_dmatrix().clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::NotConverged)?;
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix, sorted decreasing.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let m = h.matrix().as_dmatrix();
    let n = h.dim();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        return Ok(values);
    }
    Ok(eigh(h)?.values)
}

/// `lambda_min(H) >= -tol * max(1, ||H||_inf)`.
///
/// A non-converging eigensolve is reported as "not PSD"; callers that need to
/// distinguish the two should use [`eigh`] directly.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> bool {
    match eig_hermitian(h) {
        Ok(v) => psd_from_spectrum(&v, tol),
        Err(_) => false,
    }
}

pub(crate) fn psd_from_spectrum(values: &[f64], tol: f64) -> bool {
    let max = values[0];
    let min = *values.last().unwrap();
    let scale = max.abs().max(min.abs()).max(1.0);
    min >= -tol * scale
}

/// Kronecker product; refuses outputs above the materialization cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    check_cap(rows.max(cols))?;
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    }))
}

/// Kronecker product of Hermitian factors.
pub fn kron_hermitian(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix::symmetrize(&kron(a.matrix(), b.matrix())?))
}

/// Kronecker product of vectors.
pub fn kron_vec(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect()
}

/// Mixed-radix digits of `index` (most significant party first).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn undigits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Partial transpose on every party `k` with `mask[k] == true`.
pub fn partial_transpose_mask(
    h: &HermitianMatrix,
    dims: &DimsProfile,
    mask: &[bool],
) -> Result<HermitianMatrix> {
    let d = h.dim();
    dims.check_matches(d)?;
    if mask.len() != dims.parties() {
        return Err(Error::DimensionMismatch {
            expected: dims.parties(),
            found: mask.len(),
        });
    }
    let ds = dims.dims();
    let m = ds.len();
    let mut ri = vec![0; m];
    let mut ci = vec![0; m];
    let mut r2 = vec![0; m];
    let mut c2 = vec![0; m];
    let mut out = DMatrix::from_element(d, d, ZERO);
    for r in 0..d {
        digits(r, ds, &mut ri);
        for c in 0..d {
            digits(c, ds, &mut ci);
            for k in 0..m {
                (r2[k], c2[k]) = if mask[k] { (ci[k], ri[k]) } else { (ri[k], ci[k]) };
            }
            out[(undigits(&r2, ds), undigits(&c2, ds))] = h.get(r, c);
        }
    }
    // entries are permuted, never combined, so the result is exactly Hermitian
    Ok(HermitianMatrix::symmetrize(&ComplexMatrix::wrap(out)))
}

/// Partial transpose on a single party.
pub fn partial_transpose(
    h: &HermitianMatrix,
    dims: &DimsProfile,
    subsystem: usize,
) -> Result<HermitianMatrix> {
    if subsystem >= dims.parties() {
        return Err(Error::IndexOutOfRange {
            index: subsystem,
            parties: dims.parties(),
        });
    }
    let mut mask = vec![false; dims.parties()];
    mask[subsystem] = true;
    partial_transpose_mask(h, dims, &mask)
}

/// Reduced matrix on the parties listed in `keep` (in increasing order).
pub fn partial_trace(h: &HermitianMatrix, dims: &DimsProfile, keep: &[usize]) -> Result<HermitianMatrix> {
    let d = h.dim();
    dims.check_matches(d)?;
    let ds = dims.dims();
    let m = ds.len();
    for &k in keep {
        if k >= m {
            return Err(Error::IndexOutOfRange { index: k, parties: m });
        }
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("kept parties must be strictly increasing".into()));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| ds[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let mut out = DMatrix::from_element(dk, dk, ZERO);
    let mut ri = vec![0; m];
    let mut ci = vec![0; m];
    let mut rk = vec![0; keep.len()];
    let mut ck = vec![0; keep.len()];
    for r in 0..d {
        digits(r, ds, &mut ri);
        for c in 0..d {
            digits(c, ds, &mut ci);
            let traced_equal = (0..m).all(|k| keep.contains(&k) || ri[k] == ci[k]);
            if !traced_equal {
                continue;
            }
            for (slot, &k) in keep.iter().enumerate() {
                rk[slot] = ri[k];
                ck[slot] = ci[k];
            }
            out[(undigits(&rk, &kept_dims), undigits(&ck, &kept_dims))] += h.get(r, c);
        }
    }
    Ok(HermitianMatrix::symmetrize(&ComplexMatrix::wrap(out)))
}

/// Entrywise (Hadamard/Schur) product.
pub fn schur(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_shape(b)?;
    Ok(ComplexMatrix::wrap(a.as_dmatrix().component_mul(b.as_dmatrix())))
}

fn check_blocks(dim: usize, d1: usize, d2: usize) -> Result<()> {
    if d1 == 0 || d2 == 0 || d1 * d2 != dim {
        Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: dim,
        })
    } else {
        Ok(())
    }
}

/// Block `(i, j)` of size `d2 x d2` from a matrix of `d1 x d1` blocks.
pub fn block(x: &ComplexMatrix, d2: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::wrap(x.as_dmatrix().view((i * d2, j * d2), (d2, d2)).into_owned())
}

/// Assembles a matrix from a row-major grid of equal-size square blocks.
pub fn from_blocks(blocks: &[ComplexMatrix], nb: usize) -> Result<ComplexMatrix> {
    if blocks.len() != nb * nb {
        return Err(Error::DimensionMismatch {
            expected: nb * nb,
            found: blocks.len(),
        });
    }
    let bs = blocks[0].rows();
    check_cap(nb * bs)?;
    let mut out = DMatrix::from_element(nb * bs, nb * bs, ZERO);
    for i in 0..nb {
        for j in 0..nb {
            let b = &blocks[i * nb + j];
            if b.rows() != bs || b.cols() != bs {
                return Err(Error::DimensionMismatch {
                    expected: bs,
                    found: b.rows(),
                });
            }
            out.view_mut((i * bs, j * bs), (bs, bs)).copy_from(b.as_dmatrix());
        }
    }
    Ok(ComplexMatrix::wrap(out))
}

/// Which per-block norm [`block_norm_matrix`] collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockNorm {
    Two,
    Inf,
}

/// `d1 x d1` real matrix of the chosen norms of the `d2 x d2` blocks of `x`.
pub fn block_norm_matrix(
    x: &HermitianMatrix,
    d1: usize,
    d2: usize,
    which: BlockNorm,
) -> Result<DMatrix<f64>> {
    check_blocks(x.dim(), d1, d2)?;
    Ok(DMatrix::from_fn(d1, d1, |i, j| {
        let b = block(x.matrix(), d2, i, j);
        match which {
            BlockNorm::Two => frobenius_norm(&b),
            BlockNorm::Inf => operator_norm(&b),
        }
    }))
}

/// Operator norm of a real matrix.
pub fn real_operator_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// `d1 x d1` matrix of block traces (the unnormalized reduced matrix on the
/// block index).
pub fn block_trace_matrix(x: &HermitianMatrix, d1: usize, d2: usize) -> Result<HermitianMatrix> {
    check_blocks(x.dim(), d1, d2)?;
    let t = ComplexMatrix::from_fn(d1, d1, |i, j| block(x.matrix(), d2, i, j).trace());
    Ok(HermitianMatrix::symmetrize(&t))
}

/// Local unitary on the block index making every off-diagonal block traceless.
///
/// Returns `((U (x) I) X (U (x) I)^H, U)`, where `U` diagonalizes the matrix of
/// block traces.
pub fn tracelessify_offdiag(
    x: &HermitianMatrix,
    d1: usize,
    d2: usize,
) -> Result<(HermitianMatrix, ComplexMatrix)> {
    let t = block_trace_matrix(x, d1, d2)?;
    let scale = frobenius_norm(t.matrix()).max(1.0);
    let off_diag = (0..d1)
        .flat_map(|i| (0..d1).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t.get(i, j).norm())
        .fold(0.0, f64::max);
    let u = if off_diag <= 1e-14 * scale {
        ComplexMatrix::identity(d1)
    } else {
        eigh(&t)?.vectors.adjoint()
    };
    let lifted = kron(&u, &ComplexMatrix::identity(d2))?;
    Ok((x.conjugate_by(&lifted)?, u))
}
