//! Coefficients of symmetry of the separable and maximally-entangled hulls,
//! with explicit convex decompositions, and the inner-ball figures that
//! follow from John's theorem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, is_psd, kron, kron_vec, partial_trace, ComplexMatrix, DimsProfile, HermitianMatrix,
    PSD_TOL,
};

/// Largest total dimension for which witnesses are materialized; a witness
/// holds up to `d - 1` dense `d x d` states.
pub const WITNESS_DIM_CAP: usize = 128;

const UNIT_TOL: f64 = 1e-10;

/// `target = sum_i weights[i] * states[i]`, with every state a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexWitness {
    pub weights: Vec<f64>,
    pub states: Vec<HermitianMatrix>,
    pub target: HermitianMatrix,
}

impl ConvexWitness {
    pub fn new(weights: Vec<f64>, states: Vec<HermitianMatrix>, target: HermitianMatrix) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        for s in &states {
            if s.dim() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    found: s.dim(),
                });
            }
            if (s.trace() - 1.0).abs() > 1e-12 || !is_psd(s, PSD_TOL) {
                return Err(Error::InvalidArgument("witness states must be density matrices".into()));
            }
        }
        Ok(Self {
            weights,
            states,
            target,
        })
    }

    pub fn combination(&self) -> HermitianMatrix {
        self.states
            .iter()
            .zip(&self.weights)
            .fold(HermitianMatrix::zeros(self.target.dim()), |acc, (s, &w)| {
                acc.try_add(&s.scale(w)).expect("equal dims")
            })
    }

    /// Largest entrywise deviation of the combination from the target.
    pub fn reconstruction_error(&self) -> f64 {
        self.combination()
            .matrix()
            .max_abs_diff(self.target.matrix())
            .expect("equal dims")
    }
}

fn check_unit(v: &[Complex64]) -> Result<()> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!("expected a unit vector, norm is {norm}")));
    }
    Ok(())
}

/// Orthonormal basis whose first element is `v`, built from the Householder
/// reflection taking `e_1` to `v` (up to phase).
pub fn complete_basis(v: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    check_unit(v)?;
    let n = v.len();
    let phase = if v[0].norm() > 0.0 {
        v[0] / v[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    // u = phase e_1 - v; H = I - 2 u u^H / |u|^2 maps phase e_1 to v
    let mut u: Vec<Complex64> = v.iter().map(|z| -z).collect();
    u[0] += phase;
    let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let mut basis = Vec::with_capacity(n);
    basis.push(v.to_vec());
    for k in 1..n {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        col[k] = Complex64::new(1.0, 0.0);
        if unorm2 > 1e-300 {
            let coef = u[k].conj() * 2.0 / unorm2;
            for (c, ui) in col.iter_mut().zip(&u) {
                *c -= ui * coef;
            }
        }
        basis.push(col);
    }
    Ok(basis)
}

fn product_state(dims: &[usize], bases: &[Vec<Vec<Complex64>>], index: usize) -> HermitianMatrix {
    let mut rest = index;
    let mut picks = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        picks[k] = rest % dims[k];
        rest /= dims[k];
    }
    let v = picks
        .iter()
        .zip(bases)
        .fold(vec![Complex64::new(1.0, 0.0)], |acc, (&p, b)| kron_vec(&acc, &b[p]));
    HermitianMatrix::projector(&v)
}

fn witness_dim(dims: &DimsProfile) -> Result<usize> {
    let d = dims.dim()?;
    if d > WITNESS_DIM_CAP {
        return Err(Error::TooLarge {
            dim: d,
            cap: WITNESS_DIM_CAP,
        });
    }
    Ok(d)
}

/// Writes `(I - pi)/(d - 1)`, `pi` the product projector of `local_vectors`,
/// as the uniform mixture of the other `d - 1` product projectors of the
/// completed local bases.
pub fn sep_symmetry_witness(dims: &DimsProfile, local_vectors: &[Vec<Complex64>]) -> Result<ConvexWitness> {
    if local_vectors.len() != dims.parties() {
        return Err(Error::DimensionMismatch {
            expected: dims.parties(),
            found: local_vectors.len(),
        });
    }
    for (v, &dk) in local_vectors.iter().zip(dims.dims()) {
        if v.len() != dk {
            return Err(Error::DimensionMismatch {
                expected: dk,
                found: v.len(),
            });
        }
    }
    let d = witness_dim(dims)?;
    let bases = local_vectors
        .iter()
        .map(|v| complete_basis(v))
        .collect::<Result<Vec<_>>>()?;
    let states: Vec<_> = (1..d).map(|i| product_state(dims.dims(), &bases, i)).collect();
    let pi = product_state(dims.dims(), &bases, 0);
    let target = HermitianMatrix::identity(d).try_sub(&pi)?.scale(1.0 / (d - 1) as f64);
    ConvexWitness::new(vec![1.0 / (d - 1) as f64; d - 1], states, target)
}

/// Coefficient of symmetry of the separable states about `I/d`: `1/(d - 1)`.
pub fn sep_symmetry_coefficient(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    Ok(1.0 / (d - 1) as f64)
}

/// The reflection `(1 + alpha) I/d - alpha pi` of a pure state `pi`
/// through `I/d`, scaled by `alpha`.
pub fn reflected_point(pi: &HermitianMatrix, alpha: f64) -> Result<HermitianMatrix> {
    let d = pi.dim();
    HermitianMatrix::identity(d)
        .scale((1.0 + alpha) / d as f64)
        .try_sub(&pi.scale(alpha))
}

/// Smallest eigenvalues of the reflected point at the coefficient of
/// symmetry and at a factor `factor` above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criticality {
    pub at_critical: f64,
    pub above: f64,
}

pub fn criticality(pi: &HermitianMatrix, factor: f64) -> Result<Criticality> {
    let alpha = sep_symmetry_coefficient(pi.dim())?;
    Ok(Criticality {
        at_critical: eigh(&reflected_point(pi, alpha)?)?.min(),
        above: eigh(&reflected_point(pi, factor * alpha)?)?.min(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JohnFigures {
    /// `sqrt(alpha / D) = (1/d) sqrt(1/(d - 1))` with `D = d^2`.
    pub shrink: f64,
    /// `shrink * covering_ball = d^(-3/2)`; an upper bound on the inscribed
    /// ball this route yields, not an axis length.
    pub inner_ball_bound: f64,
    /// Radius `sqrt((d - 1)/d)` of the ball around `I/d` through the pure states.
    pub covering_ball: f64,
}

pub fn john_ball_figures(d: usize) -> Result<JohnFigures> {
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    let df = d as f64;
    let shrink = (1.0 / (df - 1.0)).sqrt() / df;
    let covering_ball = ((df - 1.0) / df).sqrt();
    Ok(JohnFigures {
        shrink,
        inner_ball_bound: shrink * covering_ball,
        covering_ball,
    })
}

/// The `n^2` unitaries `P^k S^l`, indexed `k n + l`, with
/// `P = diag(w^j)`, `w = exp(2 pi i/n)` and `S` the cyclic shift
/// `S_ij = 1` iff `j = i + 1 mod n`.
pub fn unitary_basis(n: usize) -> Result<Vec<ComplexMatrix>> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let w = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            // (P^k S^l)_ij = w^(k i) [j = i + l mod n]
            out.push(ComplexMatrix::from_fn(n, n, |i, j| {
                if j == (i + l) % n {
                    if k == 0 {
                        one
                    } else {
                        w((k * i) % n)
                    }
                } else {
                    zero
                }
            }));
        }
    }
    Ok(out)
}

/// `(1/sqrt n) sum_i e_i (x) e_i`.
pub fn maximally_entangled(n: usize) -> Vec<Complex64> {
    let s = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    (0..n * n).map(|k| if k / n == k % n { s } else { Complex64::new(0.0, 0.0) }).collect()
}

/// Writes `(I - pi)/(n^2 - 1)`, `pi` the maximally entangled projector, as the
/// uniform mixture of `(I (x) U_i) pi (I (x) U_i)^H` over the non-identity
/// elements of [`unitary_basis`].
pub fn mes_symmetry_witness(n: usize) -> Result<ConvexWitness> {
    let dims = DimsProfile::uniform(n, 2)?;
    let d = witness_dim(&dims)?;
    let psi = maximally_entangled(n);
    let pi = HermitianMatrix::projector(&psi);
    let id = ComplexMatrix::identity(n);
    let mut states = Vec::with_capacity(d - 1);
    for u in unitary_basis(n)?.iter().skip(1) {
        states.push(pi.conjugate_by(&kron(&id, u)?)?);
    }
    let target = HermitianMatrix::identity(d).try_sub(&pi)?.scale(1.0 / (d - 1) as f64);
    ConvexWitness::new(vec![1.0 / (d - 1) as f64; d - 1], states, target)
}

/// Both single-party marginals of a bipartite `n x n` state.
pub fn marginals(rho: &HermitianMatrix, n: usize) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let dims = DimsProfile::uniform(n, 2)?;
    Ok((partial_trace(rho, &dims, &[0])?, partial_trace(rho, &dims, &[1])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::normalized_radius;
    use crate::sampling;

    fn e(n: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn basis_completion() {
        let mut r = sampling::rng(60);
        for n in 1..6 {
            for v in [sampling::unit_vector(n, &mut r), e(n, 0), e(n, n - 1)] {
                let b = complete_basis(&v).unwrap();
                assert_eq!(b[0], v);
                for i in 0..n {
                    for j in 0..n {
                        let ip: Complex64 = b[i].iter().zip(&b[j]).map(|(x, y)| x.conj() * y).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - want).norm() < 1e-14);
                    }
                }
            }
        }
        assert!(complete_basis(&[Complex64::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn sep_witness_two_qubits() {
        let dims = DimsProfile::qubits(2).unwrap();
        let w = sep_symmetry_witness(&dims, &[e(2, 0), e(2, 0)]).unwrap();
        assert_eq!(w.states.len(), 3);
        let want = HermitianMatrix::from_real_diagonal(&[0.0, 1.0, 1.0, 1.0]).scale(1.0 / 3.0);
        assert!(w.target.matrix().max_abs_diff(want.matrix()).unwrap() < 1e-15);
        assert!(w.reconstruction_error() < 1e-12);
    }

    #[test]
    fn sep_witness_single_party_and_random() {
        let mut r = sampling::rng(61);
        let v = sampling::unit_vector(2, &mut r);
        let w = sep_symmetry_witness(&DimsProfile::new(vec![2]).unwrap(), std::slice::from_ref(&v)).unwrap();
        assert_eq!(w.states.len(), 1);
        let orth = HermitianMatrix::identity(2).try_sub(&HermitianMatrix::projector(&v)).unwrap();
        assert!(w.target.matrix().max_abs_diff(orth.matrix()).unwrap() < 1e-14);

        let dims = DimsProfile::qubits(3).unwrap();
        let vs: Vec<_> = (0..3).map(|_| sampling::unit_vector(2, &mut r)).collect();
        let w = sep_symmetry_witness(&dims, &vs).unwrap();
        assert_eq!(w.states.len(), 7);
        assert!(w.reconstruction_error() < 1e-13);

        for ds in [vec![3, 3], vec![2, 3], vec![9]] {
            let dims = DimsProfile::new(ds.clone()).unwrap();
            let vs: Vec<_> = ds.iter().map(|&n| sampling::unit_vector(n, &mut r)).collect();
            assert!(sep_symmetry_witness(&dims, &vs).unwrap().reconstruction_error() < 1e-12);
        }
    }

    #[test]
    fn sep_witness_rejections() {
        let dims = DimsProfile::qubits(2).unwrap();
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(sep_symmetry_witness(&dims, &[bad, e(2, 0)]).is_err());
        assert!(sep_symmetry_witness(&dims, &[e(2, 0)]).is_err());
        let big = DimsProfile::qubits(8).unwrap();
        let vs = vec![e(2, 0); 8];
        assert!(matches!(sep_symmetry_witness(&big, &vs), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn coefficients() {
        assert!((sep_symmetry_coefficient(4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sep_symmetry_coefficient(2).unwrap(), 1.0);
        assert!((sep_symmetry_coefficient(8).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert!(sep_symmetry_coefficient(1).is_err());
    }

    #[test]
    fn coefficient_is_critical() {
        let mut r = sampling::rng(62);
        for d in 2..=9 {
            let pi = HermitianMatrix::projector(&sampling::unit_vector(d, &mut r));
            let c = criticality(&pi, 1.05).unwrap();
            assert!(c.at_critical.abs() < 1e-12, "d={d}");
            assert!(c.above < -1e-6);
            // closed form: (1 + alpha)/d - alpha
            let alpha = 1.05 / (d - 1) as f64;
            assert!((c.above - ((1.0 + alpha) / d as f64 - alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn john_figures() {
        let f = john_ball_figures(4).unwrap();
        assert!((f.shrink - 1.0 / (4.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((f.covering_ball - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((f.inner_ball_bound - 0.125).abs() < 1e-15);
        assert!((john_ball_figures(2).unwrap().covering_ball - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        for d in 2..40 {
            let f = john_ball_figures(d).unwrap();
            assert!((f.inner_ball_bound - (d as f64).powf(-1.5)).abs() < 1e-15);
            // the ball bound from the radius recursion is the stronger statement
            assert!(normalized_radius(1.0, d).unwrap() > f.inner_ball_bound);
        }
    }

    #[test]
    fn unitary_basis_properties() {
        for n in 2..=5 {
            let us = unitary_basis(n).unwrap();
            assert_eq!(us.len(), n * n);
            assert_eq!(us[0], ComplexMatrix::identity(n));
            for (i, u) in us.iter().enumerate() {
                let uu = u.adjoint().matmul(u).unwrap();
                assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)).unwrap() < 1e-12);
                for v in &us[i + 1..] {
                    assert!(u.inner_product(v).unwrap().norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let us = unitary_basis(2).unwrap();
        let z = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).into_matrix();
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(us[1].max_abs_diff(&x).unwrap() < 1e-15);
        assert!(us[2].max_abs_diff(&z).unwrap() < 1e-15);
        assert!(us[3].max_abs_diff(&z.matmul(&x).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn qutrit_basis_gram() {
        let us = unitary_basis(3).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let g = us[i].inner_product(&us[j]).unwrap();
                let want = if i == j { 3.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_identity() {
        let mut r = sampling::rng(63);
        for n in 2..=4 {
            let x = sampling::complex_matrix(n, n, &mut r);
            let mut acc = ComplexMatrix::zeros(n, n);
            for u in unitary_basis(n).unwrap() {
                acc = acc.try_add(&u.matmul(&x).unwrap().matmul(&u.adjoint()).unwrap()).unwrap();
            }
            let lhs = acc.scale_real(1.0 / n as f64);
            let rhs = ComplexMatrix::identity(n).scale(x.trace());
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-11);
        }
    }

    #[test]
    fn mes_witness() {
        for n in 2..=3 {
            let w = mes_symmetry_witness(n).unwrap();
            assert_eq!(w.states.len(), n * n - 1);
            assert!(w.reconstruction_error() < 1e-12);
            let mixed = HermitianMatrix::identity(n).scale(1.0 / n as f64);
            for s in &w.states {
                let (a, b) = marginals(s, n).unwrap();
                assert!(a.matrix().max_abs_diff(mixed.matrix()).unwrap() < 1e-12);
                assert!(b.matrix().max_abs_diff(mixed.matrix()).unwrap() < 1e-12);
            }
        }
        assert!(matches!(mes_symmetry_witness(12), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn witness_validation() {
        let s = HermitianMatrix::identity(2).scale(0.5);
        assert!(ConvexWitness::new(vec![0.5], vec![s.clone()], s.clone()).is_err());
        assert!(ConvexWitness::new(vec![1.0], vec![HermitianMatrix::identity(2)], s.clone()).is_err());
        assert!(ConvexWitness::new(vec![1.0, 0.0], vec![s.clone()], s).is_err());
    }
}
