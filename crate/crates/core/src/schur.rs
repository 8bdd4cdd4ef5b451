//! 2->inf induced norms of Schur-product maps `X -> B o X`.
//!
//! For unit `x`, `||B o x x^H||_2^2 = y^T C y` with `y_i = |x_i|^2` and
//! `C_ij = |B_ij|^2`, so the norm is `sqrt(max y^T C y)` over the probability
//! simplex. The maximum is found exactly by enumerating faces of the simplex.
//! [`oracle_two_inf_norm`] is an independent lower bound by direct ascent.
//!
//! The module also carries the majorization checks for separable ensembles
//! and doubly stochastic Schur maps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, frobenius_norm, is_psd, kron_vec, schur, ComplexMatrix, HermitianMatrix,
    MATERIALIZATION_CAP, PSD_TOL,
};
use crate::sampling;

/// Largest `n` handled by exact face enumeration.
pub const SIMPLEX_QP_CAP: usize = 16;

const FEASIBLE_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-12;
const MAJORIZATION_TOL: f64 = 1e-9;

pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexQpResult {
    pub value: f64,
    pub maximizer: Vec<f64>,
    pub support: Vec<usize>,
}

fn quad_form(c: &DMatrix<f64>, y: &[f64]) -> f64 {
    let y = DVector::from_column_slice(y);
    y.dot(&(c * &y))
}

/// Maximizes `y^T C y` over the probability simplex.
///
/// Every nonempty support `S` is tried: the stationarity system
/// `C_S y_S = lambda 1, sum y_S = 1` is solved and kept when `y_S >= 0`.
/// Faces whose system is singular are skipped; their maximum is reached on
/// a smaller face. Ties go to the lexicographically smallest support.
pub fn simplex_qp_max(c: &DMatrix<f64>) -> Result<SimplexQpResult> {
    let n = c.nrows();
    if n == 0 || c.ncols() != n {
        return Err(Error::InvalidArgument("C must be a nonempty square matrix".into()));
    }
    if n > SIMPLEX_QP_CAP {
        return Err(Error::SolverCap { n, cap: SIMPLEX_QP_CAP });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = c.amax().max(1.0);
    if (0..n).any(|i| (0..n).any(|j| (c[(i, j)] - c[(j, i)]).abs() > 1e-12 * scale)) {
        return Err(Error::InvalidArgument("C must be symmetric".into()));
    }

    let mut best: Option<SimplexQpResult> = None;
    for mask in 1u32..(1u32 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let Some(y) = face_stationary_point(c, &s) else {
            continue;
        };
        let value = quad_form(c, &y);
        let support: Vec<usize> = (0..n).filter(|&i| y[i] > 0.0).collect();
        let better = match &best {
            None => true,
            Some(b) => {
                value > b.value + TIE_TOL
                    || (value >= b.value - TIE_TOL && support < b.support)
            }
        };
        if better {
            best = Some(SimplexQpResult {
                value,
                maximizer: y,
                support,
            });
        }
    }
    Ok(best.expect("vertices are always feasible"))
}

fn face_stationary_point(c: &DMatrix<f64>, s: &[usize]) -> Option<Vec<f64>> {
    let n = c.nrows();
    let k = s.len();
    let mut y = vec![0.0; n];
    if k == 1 {
        y[s[0]] = 1.0;
        return Some(y);
    }
    // [[C_S, -1], [1^T, 0]] [y; lambda] = [0; 1]
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for (a, &i) in s.iter().enumerate() {
        for (b, &j) in s.iter().enumerate() {
            kkt[(a, b)] = c[(i, j)];
        }
        kkt[(a, k)] = -1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.clone().lu().solve(&rhs)?;
    let residual = (&kkt * &sol - &rhs).amax();
    if !residual.is_finite() || residual > 1e-9 * (1.0 + kkt.amax()) {
        return None;
    }
    if sol.rows(0, k).iter().any(|&v| v < -FEASIBLE_TOL) {
        return None;
    }
    let total: f64 = sol.rows(0, k).iter().map(|v| v.max(0.0)).sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    for (a, &i) in s.iter().enumerate() {
        y[i] = sol[a].max(0.0) / total;
    }
    Some(y)
}

/// `C_ij = |B_ij|^2`.
pub fn modulus_squared(b: &HermitianMatrix) -> DMatrix<f64> {
    let n = b.dim();
    DMatrix::from_fn(n, n, |i, j| b.get(i, j).norm_sqr())
}

/// The raw simplex maximum `max y^T C y` for `C = |B|^2`.
pub fn schur_simplex_value(b: &HermitianMatrix) -> Result<SimplexQpResult> {
    simplex_qp_max(&modulus_squared(b))
}

/// `||phi_B||_{2->inf} = max_{||X||_2 = 1} ||B o X||_inf = sqrt(max y^T C y)`.
pub fn schur_two_inf_norm(b: &HermitianMatrix) -> Result<f64> {
    Ok(schur_simplex_value(b)?.value.sqrt())
}

/// `n x n` matrix with unit diagonal and `eta` everywhere else.
pub fn l_matrix(eta: f64, n: usize) -> HermitianMatrix {
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(if i == j { 1.0 } else { eta }, 0.0)
    });
    HermitianMatrix::new(m).expect("real symmetric")
}

/// `||phi_L||_{2->inf} = sqrt((eta^2 (n - 1) + 1) / n)`, attained at uniform `y`.
pub fn l_matrix_norm(eta: f64, n: usize) -> Result<f64> {
    if eta.is_nan() || eta < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "closed form needs eta >= 1, got {eta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let n = n as f64;
    Ok(((eta * eta * (n - 1.0) + 1.0) / n).sqrt())
}

fn schur_rank_one_norm(b: &HermitianMatrix, x: &[Complex64]) -> f64 {
    let xx = ComplexMatrix::outer(x, x);
    frobenius_norm(&schur(b.matrix(), &xx).expect("shapes agree"))
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
}

/// Lower bound on `||phi_B||_{2->inf}`: the best `||B o x x^H||_2` over
/// seeded restarts of gradient ascent on the unit sphere.
pub fn oracle_two_inf_norm(b: &HermitianMatrix, restarts: usize, seed: u64) -> Result<f64> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let n = b.dim();
    let c = modulus_squared(b);
    let mut best = 0.0f64;
    for k in 0..restarts {
        let mut rng = sampling::sub_rng(seed, k as u64);
        let mut x = sampling::unit_vector(n, &mut rng);
        let mut value = schur_rank_one_norm(b, &x);
        let mut step = 1.0;
        for _ in 0..5000 {
            let y: Vec<f64> = x.iter().map(|z| z.norm_sqr()).collect();
            let cy = &c * DVector::from_vec(y);
            let grad: Vec<Complex64> = x.iter().zip(cy.iter()).map(|(z, g)| z * *g).collect();
            let mut improved = false;
            while step > 1e-12 {
                let mut cand: Vec<Complex64> =
                    x.iter().zip(&grad).map(|(z, g)| z + g * step).collect();
                normalize(&mut cand);
                let v = schur_rank_one_norm(b, &cand);
                if v > value {
                    improved = v - value > 1e-15 * value.max(1.0);
                    x = cand;
                    value = v;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Sampled lower bound `max ||B o X||_inf` over random unit-Frobenius
/// Hermitian `X`; never exceeds the true norm.
pub fn sampled_two_inf_norm(b: &HermitianMatrix, samples: usize, rng: &mut impl Rng) -> Result<f64> {
    let n = b.dim();
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x = sampling::hermitian_on_sphere(n, 1.0, rng);
        let bx = HermitianMatrix::new(schur(b.matrix(), x.matrix())?)?;
        let spec = eig_hermitian(&bx)?;
        best = best.max(spec[0].abs()).max(spec.last().unwrap().abs());
    }
    Ok(best)
}

/// `G_ij = <v_i, v_j>`.
pub fn gram(vectors: &[Vec<Complex64>]) -> Result<HermitianMatrix> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("gram needs at least one vector".into()))?;
    if let Some(bad) = vectors.iter().find(|v| v.len() != first.len()) {
        return Err(Error::DimensionMismatch {
            expected: first.len(),
            found: bad.len(),
        });
    }
    let k = vectors.len();
    let m = ComplexMatrix::from_fn(k, k, |i, j| {
        vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum()
    });
    HermitianMatrix::new(m)
}

/// True iff `u` majorizes `v`: every prefix sum of `u` sorted decreasingly
/// dominates the corresponding prefix of `v`. The shorter vector is padded
/// with zeros.
pub fn majorizes(u: &[f64], v: &[f64]) -> Result<bool> {
    let (su, sv): (f64, f64) = (u.iter().sum(), v.iter().sum());
    if (su - sv).abs() > MAJORIZATION_TOL * su.abs().max(sv.abs()).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "majorization needs equal sums ({su} vs {sv})"
        )));
    }
    let len = u.len().max(v.len());
    let sorted = |w: &[f64]| {
        let mut w = w.to_vec();
        w.resize(len, 0.0);
        w.sort_by(|a, b| b.total_cmp(a));
        w
    };
    let (u, v) = (sorted(u), sorted(v));
    let (mut pu, mut pv) = (0.0, 0.0);
    for k in 0..len {
        pu += u[k];
        pv += v[k];
        if pu < pv - MAJORIZATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unnormalized separable decomposition `R = sum_i (x_i (x) y_i)(x_i (x) y_i)^H`
/// with unit `y_i`; weights live in `||x_i||`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble {
    pairs: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl SeparableEnsemble {
    pub fn new(pairs: Vec<(Vec<Complex64>, Vec<Complex64>)>) -> Result<Self> {
        let (x0, y0) = pairs
            .first()
            .ok_or_else(|| Error::InvalidArgument("ensemble must be nonempty".into()))?;
        let (d1, d2) = (x0.len(), y0.len());
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument("empty local vectors".into()));
        }
        for (x, y) in &pairs {
            if x.len() != d1 || y.len() != d2 {
                return Err(Error::DimensionMismatch {
                    expected: d1 * d2,
                    found: x.len() * y.len(),
                });
            }
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "second factors must be unit vectors (norm {norm})"
                )));
            }
        }
        if d1 * d2 > MATERIALIZATION_CAP {
            return Err(Error::TooLarge {
                dim: d1 * d2,
                cap: MATERIALIZATION_CAP,
            });
        }
        Ok(Self { pairs })
    }

    /// Draws `k` pairs with Gaussian `x` and Haar-random unit `y`.
    pub fn random(k: usize, d1: usize, d2: usize, rng: &mut impl Rng) -> Result<Self> {
        let pairs = (0..k)
            .map(|_| (sampling::complex_vector(d1, rng), sampling::unit_vector(d2, rng)))
            .collect();
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(Vec<Complex64>, Vec<Complex64>)] {
        &self.pairs
    }

    pub fn product_vectors(&self) -> Vec<Vec<Complex64>> {
        self.pairs.iter().map(|(x, y)| kron_vec(x, y)).collect()
    }

    /// `R = sum_i v_i v_i^H`.
    pub fn state(&self) -> HermitianMatrix {
        sum_of_projections(&self.product_vectors())
    }

    /// `tr_2 R = sum_i x_i x_i^H`.
    pub fn marginal(&self) -> HermitianMatrix {
        let xs: Vec<_> = self.pairs.iter().map(|(x, _)| x.clone()).collect();
        sum_of_projections(&xs)
    }
}

fn sum_of_projections(vs: &[Vec<Complex64>]) -> HermitianMatrix {
    let n = vs[0].len();
    let m = ComplexMatrix::from_fn(n, n, |i, j| vs.iter().map(|v| v[i] * v[j].conj()).sum());
    HermitianMatrix::new(m).expect("sum of projections is Hermitian")
}

/// Checks that a separable state is more disordered than its marginal:
/// `eig(tr_2 R)` majorizes `eig(R)`. Along the way verifies the Gram
/// factorization `G = B o H` of the product vectors.
pub fn nielsen_kempe_check(e: &SeparableEnsemble) -> Result<bool> {
    let xs: Vec<_> = e.pairs.iter().map(|(x, _)| x.clone()).collect();
    let ys: Vec<_> = e.pairs.iter().map(|(_, y)| y.clone()).collect();
    let g = gram(&e.product_vectors())?;
    let bh = schur(gram(&ys)?.matrix(), gram(&xs)?.matrix())?;
    let diff = g.matrix().max_abs_diff(&bh)?;
    let scale = bh.as_dmatrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if diff > 1e-12 * scale {
        return Err(Error::Consistency(format!("Gram factorization off by {diff:e}")));
    }
    majorizes(&eig_hermitian(&e.marginal())?, &eig_hermitian(&e.state())?)
}

/// For PSD `B` with unit diagonal, checks that `eig(X)` majorizes `eig(B o X)`.
pub fn ds_schur_majorization_check(b: &HermitianMatrix, x: &HermitianMatrix) -> Result<bool> {
    if b.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: x.dim(),
        });
    }
    if let Some(i) = (0..b.dim()).find(|&i| (b.get(i, i) - Complex64::new(1.0, 0.0)).norm() > 1e-10) {
        return Err(Error::InvalidArgument(format!("B_{i}{i} must equal 1")));
    }
    if !is_psd(b, PSD_TOL) {
        return Err(Error::InvalidArgument("B must be PSD".into()));
    }
    let bx = HermitianMatrix::new(schur(b.matrix(), x.matrix())?)?;
    majorizes(&eig_hermitian(x)?, &eig_hermitian(&bx)?)
}

/// Random PSD matrix with unit diagonal (a correlation matrix).
pub fn random_correlation(n: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let vs: Vec<Vec<Complex64>> = (0..n)
        .map(|_| sampling::unit_vector(n.max(2), rng))
        .collect();
    gram(&vs).expect("nonempty")
}
