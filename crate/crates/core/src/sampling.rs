//! Seeded random matrices and vectors.
//!
//! Every sampler takes an explicit RNG. [`rng`] and [`sub_rng`] derive
//! ChaCha streams from a 64-bit seed so that independent sample sets never
//! overlap and results do not depend on evaluation order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ComplexMatrix, HermitianMatrix};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`.
pub fn sub_rng(seed: u64, stream: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex Gaussian with `E|z|^2 = 1`.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(normal(rng) * s, normal(rng) * s)
}

pub fn complex_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Haar-random unit vector.
pub fn unit_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v = complex_vector(n, rng);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn complex_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Standard Gaussian coefficients on an orthonormal basis of the Hermitian
/// matrices (equivalently, a GUE sample).
pub fn hermitian(n: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = complex_matrix(n, n, rng);
    // (G + G^H)/2 has N(0,1/2) diagonal; rescale by sqrt(2) for unit variance
    // along every basis direction.
    HermitianMatrix::new(g.try_add(&g.adjoint()).unwrap().scale_real(std::f64::consts::FRAC_1_SQRT_2))
        .expect("symmetric by construction")
}

/// Uniform on the Frobenius sphere of radius `r` in the Hermitian matrices.
pub fn hermitian_on_sphere(n: usize, r: f64, rng: &mut impl Rng) -> HermitianMatrix {
    let h = hermitian(n, rng);
    let norm = crate::linalg::frobenius_norm(h.matrix());
    h.scale(r / norm)
}

/// Uniform on the unit Frobenius sphere of traceless Hermitian matrices.
pub fn traceless_hermitian_unit(n: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let h = hermitian(n, rng);
    let shift = h.trace() / n as f64;
    let t = h.try_sub(&HermitianMatrix::identity(n).scale(shift)).unwrap();
    let norm = crate::linalg::frobenius_norm(t.matrix());
    t.scale(1.0 / norm)
}

/// Random full-rank density matrix `G G^H / tr(G G^H)`.
pub fn density_matrix(n: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = complex_matrix(n, n, rng);
    let w = HermitianMatrix::new(&g * &g.adjoint()).expect("Wishart is Hermitian");
    let t = w.trace();
    w.scale(1.0 / t)
}

/// Random PSD matrix of the given rank.
pub fn psd(n: usize, rank: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = complex_matrix(n, rank.max(1), rng);
    HermitianMatrix::new(&g * &g.adjoint()).expect("Wishart is Hermitian")
}

/// Uniform point on the probability simplex.
pub fn simplex_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
