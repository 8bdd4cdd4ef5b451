//! The extremal stochastic ball-positive map `tau` and checks around it.
//!
//! `tau: M(d2) -> M(d1)` sends `I` to `I`, two fixed diagonal patterns `Z`
//! and `X` to `mu sigma_z` and `mu sigma_x` (Paulis padded with zeros), and
//! everything orthogonal to `span{I, Z, X}` to zero:
//!
//! ```text
//! tau(M) = (tr M / d2) I + mu tr(Z M) sigma_z + mu tr(X M) sigma_x
//! ```
//!
//! With `mu = a^-1 sqrt(1 - a^2/d2)` the map is exactly on the edge of
//! `G(d2, a)`-positivity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::lambda_bound;
use crate::error::{Error, Result};
use crate::linalg::{
    block_norm_matrix, eigh, frobenius_norm, is_psd, operator_norm, real_operator_norm,
    tilde_apply, tracelessify_offdiag, BlockNorm, ComplexMatrix, HermitianMatrix, MapOnMatrices,
    PSD_TOL,
};
use crate::sampling;

const CHAIN_TOL: f64 = 1e-9;
const DIRECTED_STARTS: u64 = 8;
const DIRECTED_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauMapSpec {
    pub a: f64,
    pub d2: usize,
    pub d1: usize,
    pub mu: f64,
}

impl TauMapSpec {
    /// Parameters with the critical `mu`.
    pub fn new(a: f64, d2: usize, d1: usize) -> Result<Self> {
        if d2 < 4 {
            return Err(Error::InvalidDims(format!("tau needs input dimension >= 4, got {d2}")));
        }
        if d1 < 2 {
            return Err(Error::InvalidDims(format!("tau needs output dimension >= 2, got {d1}")));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidArgument(format!("radius must lie in (0, 1], got {a}")));
        }
        Ok(Self {
            a,
            d2,
            d1,
            mu: critical_mu(a, d2),
        })
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }
}

/// `a^-1 sqrt(1 - a^2/d2)`.
pub fn critical_mu(a: f64, d2: usize) -> f64 {
    (1.0 - a * a / d2 as f64).sqrt() / a
}

fn real_diag(n: usize, entries: &[(usize, f64)]) -> ComplexMatrix {
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for &(i, v) in entries {
        d[i] = Complex64::new(v, 0.0);
    }
    ComplexMatrix::from_diagonal(&d)
}

/// `diag(1/sqrt2, -1/sqrt2, 0, ...)`.
pub fn z_pattern(d2: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real_diag(d2, &[(0, s), (1, -s)])
}

/// `diag(0, 0, -1/sqrt2, 1/sqrt2, 0, ...)`.
pub fn x_pattern(d2: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real_diag(d2, &[(2, -s), (3, s)])
}

pub fn padded_sigma_z(d1: usize) -> ComplexMatrix {
    real_diag(d1, &[(0, 1.0), (1, -1.0)])
}

pub fn padded_sigma_x(d1: usize) -> ComplexMatrix {
    ComplexMatrix::unit(d1, 0, 1)
        .try_add(&ComplexMatrix::unit(d1, 1, 0))
        .expect("same shape")
}

/// `tau` with the critical `mu`.
pub fn build_tau(a: f64, d2: usize, d1: usize) -> Result<MapOnMatrices> {
    build_tau_with_mu(&TauMapSpec::new(a, d2, d1)?)
}

/// `tau` with an explicit `mu`.
pub fn build_tau_with_mu(spec: &TauMapSpec) -> Result<MapOnMatrices> {
    let (d1, d2) = (spec.d1, spec.d2);
    let z = z_pattern(d2);
    let x = x_pattern(d2);
    let sz = padded_sigma_z(d1);
    let sx = padded_sigma_x(d1);
    let id = ComplexMatrix::identity(d1);
    MapOnMatrices::from_linear(d2, d1, true, |m| {
        let cz = z.matmul(m).unwrap().trace() * spec.mu;
        let cx = x.matmul(m).unwrap().trace() * spec.mu;
        let c0 = m.trace() / d2 as f64;
        id.scale(c0)
            .try_add(&sz.scale(cz))
            .unwrap()
            .try_add(&sx.scale(cx))
            .unwrap()
    })
}

/// `Y = (alpha/sqrt d) I + (beta/sqrt 2)(X + iZ)` with
/// `gamma' = sqrt(2/a^2 - 2/d)`, `alpha = (1 + gamma'^2 d)^(-1/2)` and
/// `beta = gamma' sqrt(d) alpha`. Unit Frobenius norm.
pub fn worst_case_input(a: f64, d2: usize) -> Result<ComplexMatrix> {
    if d2 < 4 {
        return Err(Error::InvalidDims(format!("needs dimension >= 4, got {d2}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, 1], got {a}")));
    }
    let d = d2 as f64;
    let gp2 = 2.0 / (a * a) - 2.0 / d;
    let alpha = (1.0 / (1.0 + gp2 * d)).sqrt();
    let beta = (gp2 * d / (1.0 + gp2 * d)).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let xz = x_pattern(d2).try_add(&z_pattern(d2).scale(i))?;
    ComplexMatrix::identity(d2)
        .scale_real(alpha / d.sqrt())
        .try_add(&xz.scale_real(beta * std::f64::consts::FRAC_1_SQRT_2))
}

/// `||phi(Y)||_inf / ||Y||_2`.
pub fn achieved_ratio(phi: &MapOnMatrices, y: &ComplexMatrix) -> Result<f64> {
    let norm = frobenius_norm(y);
    if norm == 0.0 {
        return Err(Error::InvalidArgument("ratio undefined for the zero matrix".into()));
    }
    Ok(operator_norm(&phi.apply(y)?) / norm)
}

fn require_stochastic(phi: &MapOnMatrices) -> Result<()> {
    if phi.is_stochastic() && phi.in_dim() > 0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("map must be stochastic".into()))
    }
}

fn min_eig_of_image(phi: &MapOnMatrices, delta: &HermitianMatrix) -> Result<f64> {
    let x = HermitianMatrix::identity(phi.in_dim()).try_add(delta)?;
    Ok(eigh(&phi.apply_hermitian(&x)?)?.min())
}

/// A perturbation `Delta` with `||Delta||_2 = a` and the smallest eigenvalue
/// it produces in `phi(I + Delta)`.
#[derive(Debug, Clone)]
pub struct DirectedProbe {
    pub delta: HermitianMatrix,
    pub min_eigenvalue: f64,
}

/// Searches for the radius-`a` perturbation that drives `phi(I + Delta)`
/// furthest below zero.
///
/// Alternates `v <- top eigenvector of phi(D)`, `D <- traceless part of
/// phi*(v v^H)` to maximize `s = ||phi(D)||_inf` over unit traceless `D`,
/// then mixes in the identity: `Delta = a(-cos t I/sqrt d - sin t D)` with
/// `tan t = s sqrt d` gives `lambda_min = 1 - a sqrt(1/d + s^2)`.
pub fn directed_violation_search(phi: &MapOnMatrices, a: f64, seed: u64) -> Result<DirectedProbe> {
    require_stochastic(phi)?;
    let n = phi.in_dim();
    let nf = n as f64;
    let mut best: Option<(f64, HermitianMatrix)> = None;
    for start in 0..DIRECTED_STARTS {
        let mut rng = sampling::sub_rng(seed, start);
        let mut d = sampling::traceless_hermitian_unit(n, &mut rng);
        for _ in 0..DIRECTED_ITERS {
            let eig = eigh(&phi.apply_hermitian(&d)?)?;
            if -eig.min() > eig.max() {
                d = d.scale(-1.0);
                continue;
            }
            let v: Vec<Complex64> = eig.vectors.as_dmatrix().column(0).iter().copied().collect();
            let pulled = HermitianMatrix::symmetrize(&phi.adjoint_apply(&ComplexMatrix::outer(&v, &v))?);
            let traceless = pulled.try_sub(&HermitianMatrix::identity(n).scale(pulled.trace() / nf))?;
            let norm = frobenius_norm(traceless.matrix());
            if norm < 1e-300 {
                break;
            }
            let next = traceless.scale(1.0 / norm);
            let step = frobenius_norm(next.try_sub(&d)?.matrix());
            d = next;
            if step < 1e-13 {
                break;
            }
        }
        let eig = eigh(&phi.apply_hermitian(&d)?)?;
        if -eig.min() > eig.max() {
            d = d.scale(-1.0);
        }
        let s = eig.max().max(-eig.min());
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, d));
        }
    }
    let (s, d) = best.expect("at least one start");
    let theta = (s * nf.sqrt()).atan();
    let delta = HermitianMatrix::identity(n)
        .scale(-theta.cos() / nf.sqrt())
        .try_sub(&d.scale(theta.sin()))?
        .scale(a);
    let min_eigenvalue = min_eig_of_image(phi, &delta)?;
    Ok(DirectedProbe {
        delta,
        min_eigenvalue,
    })
}

/// Sampling check of `G(d, a)`-positivity: `phi(I + Delta)` must be PSD for
/// `samples` seeded `Delta` uniform on the radius-`a` Hermitian sphere and
/// for the perturbation from [`directed_violation_search`].
///
/// A `false` is a proof of non-positivity; a `true` is evidence only.
pub fn ball_positivity_check(phi: &MapOnMatrices, a: f64, samples: usize, seed: u64) -> Result<bool> {
    Ok(find_ball_violation(phi, a, samples, seed)?.is_none())
}

/// The first violating `Delta`, if any, from the same search as
/// [`ball_positivity_check`].
pub fn find_ball_violation(
    phi: &MapOnMatrices,
    a: f64,
    samples: usize,
    seed: u64,
) -> Result<Option<HermitianMatrix>> {
    require_stochastic(phi)?;
    let n = phi.in_dim();
    let id = HermitianMatrix::identity(n);
    let probe = directed_violation_search(phi, a, seed)?;
    if !is_psd(&phi.apply_hermitian(&id.try_add(&probe.delta)?)?, PSD_TOL) {
        return Ok(Some(probe.delta));
    }
    let mut rng = sampling::sub_rng(seed, u64::MAX);
    for _ in 0..samples {
        let delta = sampling::hermitian_on_sphere(n, a, &mut rng);
        if !is_psd(&phi.apply_hermitian(&id.try_add(&delta)?)?, PSD_TOL) {
            return Ok(Some(delta));
        }
    }
    Ok(None)
}

/// The three operator norms in
/// `||tilde phi(A')||_inf <= ||Phi^inf||_inf <= ||M||_inf`, where `A'` is
/// `A` with traceless off-diagonal blocks, `Phi^inf` collects the block
/// operator norms of `tilde phi(A')` and `M` has `a^-1 ||A'_ii||_2` on the
/// diagonal and `lambda ||A'_ij||_2` off it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockChain {
    pub lifted: f64,
    pub block_norms: f64,
    pub entrywise_bound: f64,
}

impl BlockChain {
    pub fn holds(&self) -> bool {
        self.lifted <= self.block_norms + CHAIN_TOL && self.block_norms <= self.entrywise_bound + CHAIN_TOL
    }
}

pub fn block_chain(phi: &MapOnMatrices, a_mat: &HermitianMatrix, a: f64) -> Result<BlockChain> {
    let (d2, d1) = (phi.in_dim(), phi.out_dim());
    if a_mat.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: a_mat.dim(),
        });
    }
    let (traceless, _) = tracelessify_offdiag(a_mat, d1, d2)?;
    let lifted = tilde_apply(phi, &traceless, d1)?;
    let phi_inf = block_norm_matrix(&lifted, d1, d1, BlockNorm::Inf)?;
    let two = block_norm_matrix(&traceless, d1, d2, BlockNorm::Two)?;
    let lambda = lambda_bound(a, d2)?;
    let m = nalgebra::DMatrix::from_fn(d1, d1, |i, j| {
        if i == j {
            two[(i, j)] / a
        } else {
            lambda * two[(i, j)]
        }
    });
    Ok(BlockChain {
        lifted: operator_norm(lifted.matrix()),
        block_norms: real_operator_norm(&phi_inf),
        entrywise_bound: real_operator_norm(&m),
    })
}

/// True iff every link of [`block_chain`] holds within `1e-9`.
pub fn block_chain_check(phi: &MapOnMatrices, a_mat: &HermitianMatrix, a: f64) -> Result<bool> {
    Ok(block_chain(phi, a_mat, a)?.holds())
}
