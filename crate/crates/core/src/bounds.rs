//! Radii of separable balls around the identity.
//!
//! The central quantity is the radius `a_m` of a Frobenius-norm ball around
//! the (unnormalized) identity that contains only separable matrices for a
//! system with local dimensions `d_1, ..., d_m`. It is built one party at a
//! time from the bipartite base case `a_2 = 1`:
//!
//! ```text
//! a_n = a_{n-1} * sqrt( d_n / (2 (1 - a_{n-1}^2 / (d_1 ... d_{n-1})) (d_n - 1) + 1) )
//! ```
//!
//! For `m` parties of equal dimension `d0` the recursion has the closed form
//! `r_m = sqrt(d0^m / ((2 d0 - 1)^(m-2) (d0^2 - 1) + 1))`.
//!
//! Everything here is evaluated in the log domain so that hundreds of parties
//! neither overflow nor underflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DimsProfile;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// `ln(exp(x) + 1)` without overflow.
fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// The cone generated by `{I + Delta : ||Delta||_2 <= a}` in `N x N` Hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallConeParams {
    dim: usize,
    radius: f64,
}

impl BallConeParams {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim < 1 {
            return Err(invalid("cone dimension must be positive"));
        }
        let max = ((dim * (dim - 1)) as f64).sqrt();
        if !(radius > 0.0 && radius <= max) {
            return Err(invalid(format!(
                "radius {radius} outside (0, sqrt(N(N-1))] = (0, {max}]"
            )));
        }
        if radius > 1.0 {
            log::warn!("ball-cone radius {radius} > 1: I + Delta need not be PSD");
        }
        Ok(Self { dim, radius })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Log-domain radii `ln a_2, ..., ln a_m` of the recursion over `dims`,
/// folding parties left to right.
pub fn recursion_log_radii(dims: &DimsProfile) -> Result<Vec<f64>> {
    let ds = dims.dims();
    if ds.len() < 2 {
        return Err(invalid(
            "the radius recursion needs at least two parties (its base case is bipartite)",
        ));
    }
    let mut ln_a = 0.0;
    let mut ln_prev_dim = (ds[0] as f64).ln() + (ds[1] as f64).ln();
    let mut out = Vec::with_capacity(ds.len() - 1);
    out.push(ln_a);
    for &d in &ds[2..] {
        let d = d as f64;
        let ratio = (2.0 * ln_a - ln_prev_dim).exp();
        let denom = 2.0 * (1.0 - ratio) * (d - 1.0) + 1.0;
        ln_a += 0.5 * (d.ln() - denom.ln());
        ln_prev_dim += d.ln();
        out.push(ln_a);
    }
    Ok(out)
}

/// `ln a_m` for the full profile.
pub fn recursion_log_radius(dims: &DimsProfile) -> Result<f64> {
    Ok(*recursion_log_radii(dims)?.last().expect("at least one radius"))
}

/// Separable-ball radius `a_m` around the unnormalized identity.
pub fn recursion_radius(dims: &DimsProfile) -> Result<f64> {
    Ok(recursion_log_radius(dims)?.exp())
}

fn check_homogeneous_args(d0: usize, m: usize) -> Result<()> {
    if d0 < 2 {
        return Err(invalid(format!("local dimension must be >= 2, got {d0}")));
    }
    if m < 2 {
        return Err(invalid(format!("need at least two parties, got {m}")));
    }
    Ok(())
}

/// `ln r_m` for `m` parties of dimension `d0`.
pub fn closed_form_log_radius(d0: usize, m: usize) -> Result<f64> {
    check_homogeneous_args(d0, m)?;
    let d = d0 as f64;
    let ln_big = (m - 2) as f64 * (2.0 * d - 1.0).ln() + (d * d - 1.0).ln();
    Ok(0.5 * (m as f64 * d.ln() - ln_1p_exp(ln_big)))
}

/// `r_m = sqrt(d0^m / ((2 d0 - 1)^(m-2) (d0^2 - 1) + 1))`.
pub fn closed_form_radius(d0: usize, m: usize) -> Result<f64> {
    Ok(closed_form_log_radius(d0, m)?.exp())
}

/// Asymptotic exponent for qubits, `r_m ~ sqrt(3) * 2^(-gamma m)`:
/// `gamma = (ln 3 / ln 2 - 1) / 2`.
pub fn qubit_asymptotic_exponent() -> f64 {
    0.5 * (3f64.ln() / 2f64.ln() - 1.0)
}

/// Radius from the weaker, explicitly solvable recursion:
/// `(d0 / (2 d0 - 1))^(m/2 - 1)`.
pub fn weak_radius(d0: usize, m: usize) -> Result<f64> {
    check_homogeneous_args(d0, m)?;
    let d = d0 as f64;
    Ok((d / (2.0 * d - 1.0)).powf(m as f64 / 2.0 - 1.0))
}

/// Weaker recursion for a heterogeneous profile: the product over parties
/// `n >= 3` of `sqrt(d_n / (2 d_n - 1))`.
pub fn weak_radius_dims(dims: &DimsProfile) -> Result<f64> {
    let ds = dims.dims();
    if ds.len() < 2 {
        return Err(invalid("need at least two parties"));
    }
    let ln: f64 = ds[2..]
        .iter()
        .map(|&d| {
            let d = d as f64;
            0.5 * (d / (2.0 * d - 1.0)).ln()
        })
        .sum();
    Ok(ln.exp())
}

/// The earlier `(1/2)^(m/2 - 1)` radius, kept as a comparison baseline.
pub fn gb03_baseline(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(invalid(format!("need at least two parties, got {m}")));
    }
    Ok(0.5f64.powf(m as f64 / 2.0 - 1.0))
}

/// Log-domain form of [`normalized_radius`] taking `ln a` and `ln d`.
pub fn log_normalized_radius(ln_a: f64, ln_d: f64) -> Result<f64> {
    // d - a^2 = d (1 - a^2/d)
    let ratio = (2.0 * ln_a - ln_d).exp();
    if ratio >= 1.0 {
        return Err(invalid("a^2 >= d: normalized radius undefined"));
    }
    Ok(ln_a - ln_d - 0.5 * (-ratio).ln_1p())
}

/// Converts an unnormalized radius `a` around `I` into the radius
/// `a / sqrt(d (d - a^2))` around `I/d` in the unit-trace slice.
pub fn normalized_radius(a: f64, d: usize) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(invalid(format!("radius must be positive, got {a}")));
    }
    if d < 1 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(log_normalized_radius(a.ln(), (d as f64).ln())?.exp())
}

/// `ln` of the normalized qubit radius `sqrt(3^(m+1) / (3^m + 3)) * 6^(-m/2)`.
pub fn qubit_log_normalized_radius(m: usize) -> Result<f64> {
    if m < 1 {
        return Err(invalid("need at least one qubit"));
    }
    let mf = m as f64;
    let ln3 = 3f64.ln();
    // ln(3^m + 3) = m ln 3 + ln(1 + 3^(1-m))
    let ln_den = mf * ln3 + (3f64.powf(1.0 - mf)).ln_1p();
    Ok(0.5 * ((mf + 1.0) * ln3 - ln_den) - 0.5 * mf * 6f64.ln())
}

pub fn qubit_normalized_radius(m: usize) -> Result<f64> {
    Ok(qubit_log_normalized_radius(m)?.exp())
}

/// Upper bound on the 2->inf norm of the block-wise lift of a stochastic
/// ball-positive map: `a^-1 sqrt((2 (1 - a^2/d2) (d1 - 1) + 1) / d1)`.
///
/// Its reciprocal is the radius gained by tensoring one more party.
pub fn gamma_bound(d1: usize, d2: usize, a: f64) -> Result<f64> {
    if d1 < 1 || d2 < 1 {
        return Err(invalid("dimensions must be positive"));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid(format!("radius must lie in (0, 1], got {a}")));
    }
    if a <= 1.0 / d2 as f64 {
        return Err(Error::PremiseViolated(format!(
            "gamma bound requires a > 1/d2 (a = {a}, d2 = {d2})"
        )));
    }
    let (d1, d2) = (d1 as f64, d2 as f64);
    Ok(((2.0 * (1.0 - a * a / d2) * (d1 - 1.0) + 1.0) / d1).sqrt() / a)
}

/// Bound on the 2->inf norm over traceless inputs:
/// `a^-1 sqrt(2 (1 - a^2/d2))`.
pub fn lambda_bound(a: f64, d2: usize) -> Result<f64> {
    let d = d2 as f64;
    if !(a > 0.0 && a * a <= d) {
        return Err(invalid(format!("radius must lie in (0, sqrt(d2)], got {a}")));
    }
    Ok((2.0 * (1.0 - a * a / d)).max(0.0).sqrt() / a)
}

/// Bound on the 2->inf norm over all inputs: `sqrt(2/a^2 - 1/d2)`.
pub fn lambdaprime_bound(a: f64, d2: usize) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || d2 < 1 {
        return Err(invalid(format!("radius must be positive, got {a}")));
    }
    Ok((2.0 / (a * a) - 1.0 / d2 as f64).sqrt())
}

/// Which bound produced a [`RadiusReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    Recursion,
    ClosedForm,
    Weak,
    Gb03Baseline,
}

impl RadiusMethod {
    pub const ALL: [RadiusMethod; 4] = [
        RadiusMethod::Recursion,
        RadiusMethod::ClosedForm,
        RadiusMethod::Weak,
        RadiusMethod::Gb03Baseline,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub dims: DimsProfile,
    pub method: RadiusMethod,
    pub unnormalized_radius: f64,
    pub normalized_radius: f64,
    /// Natural log of the normalized radius (finite even when it underflows).
    pub ln_normalized_radius: f64,
}

/// Radius for `dims` by the chosen method. The closed form requires equal
/// local dimensions.
pub fn radius_report(dims: &DimsProfile, method: RadiusMethod) -> Result<RadiusReport> {
    let m = dims.parties();
    let ln_a = match method {
        RadiusMethod::Recursion => recursion_log_radius(dims)?,
        RadiusMethod::ClosedForm => {
            let d0 = dims
                .homogeneous()
                .ok_or_else(|| invalid("closed form needs equal local dimensions"))?;
            closed_form_log_radius(d0, m)?
        }
        RadiusMethod::Weak => weak_radius_dims(dims)?.ln(),
        RadiusMethod::Gb03Baseline => gb03_baseline(m)?.ln(),
    };
    let ln_norm = log_normalized_radius(ln_a, dims.ln_dim())?;
    Ok(RadiusReport {
        dims: dims.clone(),
        method,
        unnormalized_radius: ln_a.exp(),
        normalized_radius: ln_norm.exp(),
        ln_normalized_radius: ln_norm,
    })
}
