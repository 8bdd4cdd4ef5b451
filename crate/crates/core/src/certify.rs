//! Separability certificates from the ball bounds.
//!
//! A state is certified separable when its distance from the (normalized)
//! identity is within the separable-ball radius for its dimension profile.
//! [`ppt_all_cuts`] is a necessary condition and is used to falsify-test
//! the certificates, never to issue them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{log_normalized_radius, normalized_radius, recursion_log_radius, recursion_radius};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, frobenius_norm, is_psd, partial_transpose_mask, psd_from_spectrum, DimsProfile,
    HermitianMatrix, PSD_TOL,
};

/// Distances within this fraction of the bound count as on the ball.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Allowed deviation of `tr rho` from one.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Separable,
    Inconclusive,
    NotPsd,
    NotNormalized,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separable => "separable",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotPsd => "not_psd",
            Verdict::NotNormalized => "not_normalized",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    #[serde(rename = "bound")]
    pub bound_used: f64,
    pub measured: f64,
    /// `bound - measured`, clamped to zero inside the boundary band.
    pub margin: f64,
    /// Set when `|bound - measured| <= BOUNDARY_BAND * bound`.
    pub boundary: bool,
    pub dims: DimsProfile,
}

impl Certificate {
    fn compare(bound: f64, measured: f64, dims: &DimsProfile) -> Self {
        let margin = bound - measured;
        let band = BOUNDARY_BAND * bound.abs();
        let boundary = margin.abs() <= band;
        let verdict = if margin >= -band {
            Verdict::Separable
        } else {
            Verdict::Inconclusive
        };
        Self {
            verdict,
            bound_used: bound,
            measured,
            margin: if boundary { margin.max(0.0) } else { margin },
            boundary,
            dims: dims.clone(),
        }
    }

    fn rejected(verdict: Verdict, bound: f64, measured: f64, dims: &DimsProfile) -> Self {
        Self {
            verdict,
            bound_used: bound,
            measured,
            margin: bound - measured,
            boundary: false,
            dims: dims.clone(),
        }
    }

    pub fn is_separable(&self) -> bool {
        self.verdict == Verdict::Separable
    }
}

fn check_state(rho: &HermitianMatrix) -> Result<()> {
    let t = rho.trace();
    if (t - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotNormalized { trace: t });
    }
    let spec = eig_hermitian(rho)?;
    if !psd_from_spectrum(&spec, PSD_TOL) {
        return Err(Error::NotPsd {
            min_eigenvalue: *spec.last().unwrap(),
        });
    }
    Ok(())
}

/// Smallest `||Delta||_2` over scalings `rho = alpha (I + Delta)`:
/// `sqrt(d - 1/tr(rho^2))`, attained at `alpha = tr(rho^2)`.
pub fn mu(rho: &HermitianMatrix) -> Result<f64> {
    check_state(rho)?;
    let d = rho.dim() as f64;
    Ok((d - 1.0 / rho.purity()).max(0.0).sqrt())
}

/// Tests `||X - I||_2` against the recursion radius for `dims`.
pub fn certify_unnormalized(x: &HermitianMatrix, dims: &DimsProfile) -> Result<Certificate> {
    dims.check_matches(x.dim())?;
    let bound = recursion_radius(dims)?;
    let delta = x.try_sub(&HermitianMatrix::identity(x.dim()))?;
    Ok(Certificate::compare(bound, frobenius_norm(delta.matrix()), dims))
}

/// Tests `||rho - I/d||_2 <= a / sqrt(d (d - a^2))` with `a` the recursion
/// radius for `dims`.
pub fn certify_normalized(rho: &HermitianMatrix, dims: &DimsProfile) -> Result<Certificate> {
    dims.check_matches(rho.dim())?;
    certify_normalized_with_radius(rho, dims, recursion_radius(dims)?)
}

/// [`certify_normalized`] against an explicit unnormalized radius `a`.
pub fn certify_normalized_with_radius(
    rho: &HermitianMatrix,
    dims: &DimsProfile,
    a: f64,
) -> Result<Certificate> {
    let d = rho.dim();
    dims.check_matches(d)?;
    let bound = normalized_radius(a, d)?;
    let centered = rho.try_sub(&HermitianMatrix::identity(d).scale(1.0 / d as f64))?;
    let measured = frobenius_norm(centered.matrix());
    Ok(match check_state(rho) {
        Ok(()) => Certificate::compare(bound, measured, dims),
        Err(Error::NotNormalized { .. }) => {
            Certificate::rejected(Verdict::NotNormalized, bound, measured, dims)
        }
        Err(Error::NotPsd { .. }) => Certificate::rejected(Verdict::NotPsd, bound, measured, dims),
        Err(e) => return Err(e),
    })
}

/// Largest `eps` for which `eps |psi><psi| + (1 - eps) I/d` lies in the
/// normalized separable ball: `b / sqrt((d - 1)(d - b^2))`, `b` the recursion
/// radius.
pub fn pseudopure_bound(dims: &DimsProfile) -> Result<f64> {
    Ok(log_pseudopure_bound(recursion_log_radius(dims)?, dims.ln_dim())?.exp())
}

/// `ln` of the pseudopure bound for an unnormalized radius `exp(ln_b)` in
/// dimension `exp(ln_d)`.
pub fn log_pseudopure_bound(ln_b: f64, ln_d: f64) -> Result<f64> {
    // ln(d - 1) = ln d + ln(1 - 1/d)
    let ln_dm1 = ln_d + (-(-ln_d).exp()).ln_1p();
    // b/sqrt((d-1)(d-b^2)) = [b/sqrt(d(d-b^2))] * sqrt(d/(d-1))
    Ok(log_normalized_radius(ln_b, ln_d)? + 0.5 * (ln_d - ln_dm1))
}

/// The slightly more conservative form `(b/d) sqrt((d - 1)/(d - b^2))`.
pub fn pseudopure_bound_displayed(dims: &DimsProfile) -> Result<f64> {
    let ln_b = recursion_log_radius(dims)?;
    let ln_d = dims.ln_dim();
    let ln_dm1 = ln_d + (-(-ln_d).exp()).ln_1p();
    let ln_d_minus_b2 = ln_d + (-(2.0 * ln_b - ln_d).exp()).ln_1p();
    Ok((ln_b - ln_d + 0.5 * (ln_dm1 - ln_d_minus_b2)).exp())
}

/// Certifies the pseudopure family `eps |psi><psi| + (1 - eps) I/d` without
/// materializing it; valid for any pure `psi`.
pub fn certify_pseudopure(eps: f64, dims: &DimsProfile) -> Result<Certificate> {
    certify_pseudopure_with_log_radius(eps, dims, recursion_log_radius(dims)?)
}

/// [`certify_pseudopure`] against the unnormalized radius `exp(ln_b)`.
pub fn certify_pseudopure_with_log_radius(eps: f64, dims: &DimsProfile, ln_b: f64) -> Result<Certificate> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps must lie in [0, 1], got {eps}")));
    }
    let bound = log_pseudopure_bound(ln_b, dims.ln_dim())?.exp();
    Ok(Certificate::compare(bound, eps, dims))
}

/// True iff the partial transpose across every bipartition is PSD.
///
/// Cuts are enumerated as the nonempty subsets of parties `1..m` (party 0
/// stays on the untransposed side), `2^(m-1) - 1` in total.
pub fn ppt_all_cuts(rho: &HermitianMatrix, dims: &DimsProfile) -> Result<bool> {
    dims.materializable_dim()?;
    dims.check_matches(rho.dim())?;
    let m = dims.parties();
    for subset in 1..(1usize << (m - 1)) {
        let mask: Vec<bool> = (0..m)
            .map(|k| k > 0 && subset & (1 << (k - 1)) != 0)
            .collect();
        if !is_psd(&partial_transpose_mask(rho, dims, &mask)?, PSD_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::linalg::kron_hermitian;
    use crate::sampling;

    fn bell() -> HermitianMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        HermitianMatrix::projector(&[Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)])
    }

    fn werner(eps: f64) -> HermitianMatrix {
        bell()
            .scale(eps)
            .try_add(&HermitianMatrix::identity(4).scale((1.0 - eps) / 4.0))
            .unwrap()
    }

    fn q(m: usize) -> DimsProfile {
        DimsProfile::qubits(m).unwrap()
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&HermitianMatrix::identity(3).scale(1.0 / 3.0)).unwrap(), 0.0);
        let mut r = sampling::rng(30);
        let p2 = HermitianMatrix::projector(&sampling::unit_vector(2, &mut r));
        assert!((mu(&p2).unwrap() - 1.0).abs() < 1e-12);
        let p4 = HermitianMatrix::projector(&sampling::unit_vector(4, &mut r));
        assert!((mu(&p4).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!(matches!(mu(&HermitianMatrix::identity(2)), Err(Error::NotNormalized { .. })));
        let bad = HermitianMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(mu(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn mu_is_the_minimizing_scaling() {
        // ||rho/alpha - I||_2 over a grid of alpha never drops below mu
        let mut r = sampling::rng(31);
        let rho = sampling::density_matrix(4, &mut r);
        let m = mu(&rho).unwrap();
        for k in 1..400 {
            let alpha = k as f64 / 800.0;
            let delta = rho.scale(1.0 / alpha).try_sub(&HermitianMatrix::identity(4)).unwrap();
            assert!(frobenius_norm(delta.matrix()) >= m - 1e-12);
        }
        let at_opt = rho
            .scale(1.0 / rho.purity())
            .try_sub(&HermitianMatrix::identity(4))
            .unwrap();
        assert!((frobenius_norm(at_opt.matrix()) - m).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_examples() {
        let d = q(3);
        let c = certify_unnormalized(&HermitianMatrix::identity(8), &d).unwrap();
        assert!(c.is_separable());
        assert_eq!(c.margin, c.bound_used);

        let mut r = sampling::rng(32);
        let a = recursion_radius(&d).unwrap();
        let x = HermitianMatrix::identity(8)
            .try_add(&sampling::traceless_hermitian_unit(8, &mut r).scale(a))
            .unwrap();
        let c = certify_unnormalized(&x, &d).unwrap();
        assert!(c.is_separable() && c.margin.abs() < 1e-12);

        let x = HermitianMatrix::identity(8)
            .try_add(&sampling::traceless_hermitian_unit(8, &mut r).scale(1.01 * a))
            .unwrap();
        assert_eq!(certify_unnormalized(&x, &d).unwrap().verdict, Verdict::Inconclusive);
        assert!(certify_unnormalized(&HermitianMatrix::identity(4), &d).is_err());
    }

    #[test]
    fn normalized_examples() {
        let d = q(3);
        let c = certify_normalized(&HermitianMatrix::identity(8).scale(0.125), &d).unwrap();
        assert!(c.is_separable() && c.measured == 0.0);

        let c = certify_normalized(&werner(0.25), &q(2)).unwrap();
        assert!(c.is_separable());
        assert!((c.measured - 0.25 * 0.75f64.sqrt()).abs() < 1e-12);
        assert!((c.bound_used - 1.0 / 12f64.sqrt()).abs() < 1e-15);

        let c = certify_normalized(&werner(0.40), &q(2)).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!((c.measured - 0.3464102).abs() < 1e-7);

        let c = certify_normalized(&HermitianMatrix::identity(4), &q(2)).unwrap();
        assert_eq!(c.verdict, Verdict::NotNormalized);
        let c = certify_normalized(&HermitianMatrix::from_real_diagonal(&[0.6, 0.6, 0.6, -0.8]), &q(2)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPsd);
    }

    #[test]
    fn boundary_band() {
        let d = q(2);
        let x = HermitianMatrix::from_real_diagonal(&[1.0 + 0.5, 1.0 - 0.5, 1.0 + 0.5, 1.0 - 0.5]);
        // ||X - I||_2 = 1 = bound exactly
        let c = certify_unnormalized(&x, &d).unwrap();
        assert!(c.is_separable() && c.boundary && c.margin >= 0.0);
        let x = HermitianMatrix::from_real_diagonal(&[1.5 + 4e-10, 0.5, 1.5, 0.5]);
        let c = certify_unnormalized(&x, &d).unwrap();
        assert!(c.is_separable() && c.boundary && c.margin == 0.0);
        let x = HermitianMatrix::from_real_diagonal(&[1.5 + 1e-8, 0.5, 1.5, 0.5]);
        assert_eq!(certify_unnormalized(&x, &d).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn certificate_json_shape() {
        let c = certify_normalized(&werner(0.25), &q(2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["verdict"], "separable");
        for key in ["bound", "measured", "margin"] {
            assert!(v[key].is_f64(), "{key}");
        }
        assert_eq!(serde_json::from_value::<Certificate>(v).unwrap(), c);
    }

    #[test]
    fn pseudopure_examples() {
        let eta = 3.746e-5;
        let eps = |m: usize| eta * m as f64 / 2f64.powi(m as i32);
        assert!(certify_pseudopure(0.0, &q(5)).unwrap().is_separable());
        assert!(certify_pseudopure(eps(35), &q(35)).unwrap().is_separable());
        assert_eq!(certify_pseudopure(eps(36), &q(36)).unwrap().verdict, Verdict::Inconclusive);
        let r36 = recursion_radius(&q(36)).unwrap();
        assert!((r36 - 1.1721e-3).abs() < 5e-7);
        assert!(certify_pseudopure(1.5, &q(2)).is_err());
    }

    #[test]
    fn pseudopure_agrees_with_materialized_state() {
        let mut r = sampling::rng(33);
        for (dims, n) in [(q(2), 4), (q(3), 8), (DimsProfile::new(vec![2, 3]).unwrap(), 6)] {
            let b = pseudopure_bound(&dims).unwrap();
            for scale in [0.5, 0.999, 1.001, 2.0, 0.0] {
                let eps = (b * scale).min(1.0);
                let psi = sampling::unit_vector(n, &mut r);
                let rho = HermitianMatrix::projector(&psi)
                    .scale(eps)
                    .try_add(&HermitianMatrix::identity(n).scale((1.0 - eps) / n as f64))
                    .unwrap();
                let direct = certify_normalized(&rho, &dims).unwrap();
                let family = certify_pseudopure(eps, &dims).unwrap();
                assert_eq!(direct.verdict, family.verdict, "{dims} scale={scale}");
            }
            let shown = pseudopure_bound_displayed(&dims).unwrap();
            assert!(shown <= b);
            assert!((shown / b - (n as f64 - 1.0) / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn ppt_examples() {
        let mut r = sampling::rng(34);
        let a = sampling::density_matrix(2, &mut r);
        let b = sampling::density_matrix(3, &mut r);
        let prod = kron_hermitian(&a, &b).unwrap();
        assert!(ppt_all_cuts(&prod, &DimsProfile::new(vec![2, 3]).unwrap()).unwrap());
        assert!(!ppt_all_cuts(&bell(), &q(2)).unwrap());
        // entanglement across the (1 | 0 2) cut only shows up on a mixed subset
        let ghz_like = kron_hermitian(&bell(), &HermitianMatrix::identity(2).scale(0.5)).unwrap();
        assert!(!ppt_all_cuts(&ghz_like, &q(3)).unwrap());
        let big = HermitianMatrix::identity(2);
        assert!(ppt_all_cuts(&big, &DimsProfile::uniform(2, 13).unwrap()).is_err());
    }

    #[test]
    fn certified_boundary_samples_are_ppt() {
        let d = q(2);
        let a = recursion_radius(&d).unwrap();
        let mut r = sampling::rng(35);
        let mut certified = 0;
        for _ in 0..200 {
            let delta = sampling::hermitian_on_sphere(4, a * (1.0 - 1e-12), &mut r);
            let x = HermitianMatrix::identity(4).try_add(&delta).unwrap();
            if certify_unnormalized(&x, &d).unwrap().is_separable() {
                certified += 1;
                assert!(ppt_all_cuts(&x, &d).unwrap());
            }
        }
        assert_eq!(certified, 200);
    }

    #[test]
    fn three_way_equivalence() {
        let mut r = sampling::rng(36);
        let mut checked = 0;
        for &d in &[2usize, 3, 4, 8] {
            for &a in &[0.3, 0.7, 1.0] {
                for _ in 0..42 {
                    let t: f64 = rand::Rng::random(&mut r);
                    let sigma = sampling::density_matrix(d, &mut r);
                    let rho = sigma
                        .scale(t * t)
                        .try_add(&HermitianMatrix::identity(d).scale((1.0 - t * t) / d as f64))
                        .unwrap();
                    let df = d as f64;
                    let s1 = mu(&rho).unwrap() - a;
                    let s2 = rho.purity() - 1.0 / (df - a * a);
                    let centered = rho.try_sub(&HermitianMatrix::identity(d).scale(1.0 / df)).unwrap();
                    let s3 = frobenius_norm(centered.matrix()) - normalized_radius(a, d).unwrap();
                    if [s1, s2, s3].iter().any(|s| s.abs() <= BOUNDARY_BAND) {
                        continue;
                    }
                    assert_eq!(s1 <= 0.0, s2 <= 0.0);
                    assert_eq!(s2 <= 0.0, s3 <= 0.0);
                    checked += 1;
                }
            }
        }
        assert!(checked >= 500);
    }

    #[test]
    fn smaller_radius_accepts_fewer_states() {
        let d = q(2);
        let mut r = sampling::rng(37);
        let (big, small) = (1.0, 0.6);
        let mut strictly = 0;
        for _ in 0..300 {
            let t: f64 = rand::Rng::random(&mut r);
            let rho = sampling::density_matrix(4, &mut r)
                .scale(t)
                .try_add(&HermitianMatrix::identity(4).scale((1.0 - t) / 4.0))
                .unwrap();
            let at_small = certify_normalized_with_radius(&rho, &d, small).unwrap().is_separable();
            let at_big = certify_normalized_with_radius(&rho, &d, big).unwrap().is_separable();
            assert!(!at_small || at_big);
            strictly += (at_big && !at_small) as usize;
        }
        assert!(strictly > 0);
    }
}
