//! Thermal and pseudopure states of `m` spin-1/2 nuclei and the qubit counts
//! below which the ball bounds certify them separable.
//!
//! A single spin at polarization `eta` is `diag((1 + eta)/2, (1 - eta)/2)`;
//! the thermal state is its `m`-fold tensor power. Pseudopure preparation
//! yields `eps |0><0| + (1 - eps) I/d` with `eps = eta m / 2^m`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{gb03_baseline, log_normalized_radius, recursion_log_radii, recursion_log_radius};
use crate::certify::{certify_pseudopure_with_log_radius, BOUNDARY_BAND};
use crate::error::{Error, Result};
use crate::linalg::{kron_hermitian, DimsProfile, HermitianMatrix, MATERIALIZATION_CAP};

/// Polarization `beta mu B` of a proton at `T = 300 K` in an `11 T` field.
pub const DEFAULT_ETA: f64 = 3.746e-5;

/// Largest qubit count the threshold scans visit.
pub const SCAN_CAP: usize = 500;

const ETA_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmrParams {
    pub eta: f64,
    pub m: usize,
}

impl NmrParams {
    pub fn new(eta: f64, m: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::InvalidArgument(format!("eta must lie in [0, 1), got {eta}")));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one qubit".into()));
        }
        if eta > ETA_WARN {
            log::warn!("eta = {eta} is outside the small-polarization regime");
        }
        Ok(Self { eta, m })
    }

    pub fn dims(&self) -> DimsProfile {
        DimsProfile::qubits(self.m).expect("m >= 1")
    }
}

/// `m`-fold tensor power of `diag((1 + eta)/2, (1 - eta)/2)`.
pub fn thermal_state(p: &NmrParams) -> Result<HermitianMatrix> {
    if p.m >= usize::BITS as usize || 1usize << p.m > MATERIALIZATION_CAP {
        return Err(Error::TooLarge {
            dim: 1usize.checked_shl(p.m as u32).unwrap_or(usize::MAX),
            cap: MATERIALIZATION_CAP,
        });
    }
    let one = HermitianMatrix::from_real_diagonal(&[(1.0 + p.eta) / 2.0, (1.0 - p.eta) / 2.0]);
    let mut rho = one.clone();
    for _ in 1..p.m {
        rho = kron_hermitian(&rho, &one)?;
    }
    Ok(rho)
}

/// `ln ||rho_thermal - I/d||_2` with `||.||_2^2 = ((1 + eta^2)^m - 1) / 2^m`.
/// Minus infinity at `eta = 0`.
pub fn log_thermal_deviation_norm(p: &NmrParams) -> f64 {
    let m = p.m as f64;
    let growth = (m * (p.eta * p.eta).ln_1p()).exp_m1();
    0.5 * (growth.ln() - m * std::f64::consts::LN_2)
}

pub fn thermal_deviation_norm(p: &NmrParams) -> f64 {
    log_thermal_deviation_norm(p).exp()
}

/// Small-`eta` form `sqrt(m eta^2 / 2^m)`.
pub fn thermal_deviation_approx(p: &NmrParams) -> f64 {
    let m = p.m as f64;
    (0.5 * (m.ln() + 2.0 * p.eta.ln() - m * std::f64::consts::LN_2)).exp()
}

/// `eps = eta m / 2^m`.
pub fn pseudopure_epsilon(p: &NmrParams) -> f64 {
    p.eta * p.m as f64 * 0.5f64.powi(p.m as i32)
}

/// `eps |0...0><0...0| + (1 - eps) I/d`.
pub fn pseudopure_state(p: &NmrParams) -> Result<HermitianMatrix> {
    let d = p.dims().materializable_dim()?;
    let eps = pseudopure_epsilon(p);
    let mut diag = vec![(1.0 - eps) / d as f64; d];
    diag[0] += eps;
    Ok(HermitianMatrix::from_real_diagonal(&diag))
}

/// Separable-ball radius used by the threshold scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// The radius recursion (closed form for qubits).
    Recursion,
    /// The earlier `(1/2)^(m/2 - 1)` radius.
    Gb03,
}

impl Baseline {
    pub fn log_radius(self, m: usize) -> Result<f64> {
        match self {
            Baseline::Recursion => recursion_log_radius(&DimsProfile::qubits(m)?),
            Baseline::Gb03 => Ok(gb03_baseline(m)?.ln()),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Baseline::Recursion => "recursion",
            Baseline::Gb03 => "gb03",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Thermal,
    Pseudopure,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Thermal => "thermal",
            Mode::Pseudopure => "pseudopure",
        })
    }
}

/// Distance from `I/d` and the certified bound at one qubit count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub m: usize,
    pub measured: f64,
    pub bound: f64,
    pub certified: bool,
}

impl ScanPoint {
    /// `bound / measured - 1`; positive when certified.
    pub fn relative_margin(&self) -> f64 {
        self.bound / self.measured - 1.0
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

/// Evaluates one qubit count in the chosen mode.
pub fn scan_point(mode: Mode, eta: f64, m: usize, baseline: Baseline) -> Result<ScanPoint> {
    scan_point_at(mode, eta, m, baseline.log_radius(m)?)
}

fn scan_point_at(mode: Mode, eta: f64, m: usize, ln_b: f64) -> Result<ScanPoint> {
    let p = NmrParams::new(eta, m)?;
    let dims = p.dims();
    match mode {
        Mode::Pseudopure => {
            let cert = certify_pseudopure_with_log_radius(pseudopure_epsilon(&p), &dims, ln_b)?;
            Ok(ScanPoint {
                m,
                measured: cert.measured,
                bound: cert.bound_used,
                certified: cert.is_separable(),
            })
        }
        Mode::Thermal => {
            let ln_measured = log_thermal_deviation_norm(&p);
            let ln_bound = log_normalized_radius(ln_b, dims.ln_dim())?;
            Ok(ScanPoint {
                m,
                measured: ln_measured.exp(),
                bound: ln_bound.exp(),
                certified: ln_measured <= ln_bound + BOUNDARY_BAND.ln_1p(),
            })
        }
    }
}

/// Largest `m` in `2..=500` whose state is certified separable.
pub fn threshold(mode: Mode, eta: f64, baseline: Baseline) -> Result<usize> {
    check_eta(eta)?;
    let ln_radii = match baseline {
        Baseline::Recursion => recursion_log_radii(&DimsProfile::qubits(SCAN_CAP)?)?,
        Baseline::Gb03 => (2..=SCAN_CAP).map(|m| baseline.log_radius(m)).collect::<Result<_>>()?,
    };
    let mut best = None;
    for (m, &ln_b) in (2..=SCAN_CAP).zip(&ln_radii) {
        if scan_point_at(mode, eta, m, ln_b)?.certified {
            best = Some(m);
        }
    }
    match best {
        Some(SCAN_CAP) => Err(Error::ScanCapReached { cap: SCAN_CAP }),
        Some(m) => Ok(m),
        None => Err(Error::InvalidArgument(format!(
            "no qubit count in 2..={SCAN_CAP} is certified at eta = {eta}"
        ))),
    }
}

/// Largest qubit count at which pseudopure states are certified separable.
pub fn pseudopure_threshold(eta: f64) -> Result<usize> {
    threshold(Mode::Pseudopure, eta, Baseline::Recursion)
}

/// Largest qubit count at which the thermal state is certified separable.
pub fn thermal_threshold(eta: f64) -> Result<usize> {
    threshold(Mode::Thermal, eta, Baseline::Recursion)
}

/// The threshold together with the scan points on either side of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mode: Mode,
    pub baseline: Baseline,
    pub eta: f64,
    pub threshold: usize,
    pub at_threshold: ScanPoint,
    pub first_uncertified: ScanPoint,
}

pub fn threshold_report(mode: Mode, eta: f64, baseline: Baseline) -> Result<ThresholdReport> {
    let t = threshold(mode, eta, baseline)?;
    Ok(ThresholdReport {
        mode,
        baseline,
        eta,
        threshold: t,
        at_threshold: scan_point(mode, eta, t, baseline)?,
        first_uncertified: scan_point(mode, eta, t + 1, baseline)?,
    })
}

/// Qubits needed before a balanced bipartition of a thermal state can be
/// entangled by the bipartite ball: `1/eta`.
pub fn bipartite_qubit_requirement(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(1.0 / eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{closed_form_radius, normalized_radius};
    use crate::certify::{certify_normalized, certify_pseudopure};
    use crate::linalg::frobenius_norm;

    fn params(eta: f64, m: usize) -> NmrParams {
        NmrParams::new(eta, m).unwrap()
    }

    #[test]
    fn thermal_state_examples() {
        let rho = thermal_state(&params(0.0, 1)).unwrap();
        assert_eq!(rho, HermitianMatrix::identity(2).scale(0.5));
        let rho = thermal_state(&params(0.1, 2)).unwrap();
        let want = HermitianMatrix::from_real_diagonal(&[0.3025, 0.2475, 0.2475, 0.2025]);
        assert!(rho.matrix().max_abs_diff(want.matrix()).unwrap() < 1e-15);
        for m in 1..=12 {
            assert!((thermal_state(&params(0.3, m)).unwrap().trace() - 1.0).abs() < 1e-13);
        }
        assert!(matches!(thermal_state(&params(0.1, 13)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(thermal_deviation_norm(&params(0.0, 5)), 0.0);
        assert!((thermal_deviation_norm(&params(0.1, 1)) - 0.005f64.sqrt()).abs() < 1e-15);
        let v = thermal_deviation_norm(&params(DEFAULT_ETA, 17));
        assert!((v / 4.2664e-7 - 1.0).abs() < 1e-4);
        let approx = thermal_deviation_approx(&params(DEFAULT_ETA, 17));
        assert!((v / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn deviation_matches_materialized() {
        for m in 1..=10 {
            for eta in [DEFAULT_ETA, 0.01, 0.3] {
                let p = params(eta, m);
                let d = 1usize << m;
                let centered = thermal_state(&p)
                    .unwrap()
                    .try_sub(&HermitianMatrix::identity(d).scale(1.0 / d as f64))
                    .unwrap();
                let direct = frobenius_norm(centered.matrix());
                assert!((direct - thermal_deviation_norm(&p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        assert!((pseudopure_epsilon(&params(DEFAULT_ETA, 1)) - DEFAULT_ETA / 2.0).abs() < 1e-20);
        let e36 = pseudopure_epsilon(&params(DEFAULT_ETA, 36));
        assert!((e36 * 2f64.powi(36) - 1.3486e-3).abs() < 1e-7);
        for m in 2..60 {
            assert!(pseudopure_epsilon(&params(DEFAULT_ETA, m + 1)) < pseudopure_epsilon(&params(DEFAULT_ETA, m)));
        }
    }

    #[test]
    fn pseudopure_thresholds() {
        assert_eq!(pseudopure_threshold(DEFAULT_ETA).unwrap(), 35);
        assert_eq!(threshold(Mode::Pseudopure, DEFAULT_ETA, Baseline::Gb03).unwrap(), 22);
        assert!(pseudopure_threshold(10.0 * DEFAULT_ETA).unwrap() < 35);
    }

    #[test]
    fn thermal_thresholds() {
        assert_eq!(thermal_threshold(DEFAULT_ETA).unwrap(), 16);
        assert_eq!(threshold(Mode::Thermal, DEFAULT_ETA, Baseline::Gb03).unwrap(), 13);
        let r = threshold_report(Mode::Thermal, DEFAULT_ETA, Baseline::Recursion).unwrap();
        assert!(r.first_uncertified.relative_margin() < -0.01);
        assert!((r.first_uncertified.bound / 4.2100e-7 - 1.0).abs() < 1e-4);
        assert!(matches!(thermal_threshold(1e-150), Err(Error::ScanCapReached { cap: 500 })));
    }

    #[test]
    fn thermal_boundary_agrees_with_approximations() {
        // both sides of the m = 17 comparison within 1% of their small-eta forms
        let p = params(DEFAULT_ETA, 17);
        let exact = thermal_deviation_norm(&p);
        assert!((thermal_deviation_approx(&p) / exact - 1.0).abs() < 0.01);
        let a = closed_form_radius(2, 17).unwrap();
        let d = 1usize << 17;
        let loose = a / d as f64;
        assert!((loose / normalized_radius(a, d).unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn thresholds_nonincreasing_in_eta() {
        let etas = [1e-5, 3.746e-5, 1e-4, 1e-3, 1e-2];
        for mode in [Mode::Thermal, Mode::Pseudopure] {
            let ts: Vec<usize> = etas.iter().map(|&e| threshold(mode, e, Baseline::Recursion).unwrap()).collect();
            assert!(ts.windows(2).all(|w| w[0] >= w[1]), "{mode}: {ts:?}");
        }
    }

    #[test]
    fn thresholds_are_reproducible() {
        let a = threshold_report(Mode::Thermal, DEFAULT_ETA, Baseline::Recursion).unwrap();
        let b = threshold_report(Mode::Thermal, DEFAULT_ETA, Baseline::Recursion).unwrap();
        assert_eq!(a.at_threshold.measured.to_bits(), b.at_threshold.measured.to_bits());
        assert_eq!(a.at_threshold.bound.to_bits(), b.at_threshold.bound.to_bits());
    }

    #[test]
    fn materialized_pseudopure_agrees() {
        for m in 2..=10 {
            for k in 0..20 {
                let eta = 0.05 * k as f64 + 0.001;
                let p = params(eta, m);
                let direct = certify_normalized(&pseudopure_state(&p).unwrap(), &p.dims()).unwrap();
                let family = certify_pseudopure(pseudopure_epsilon(&p), &p.dims()).unwrap();
                assert_eq!(direct.verdict, family.verdict, "m={m} eta={eta}");
            }
        }
    }

    #[test]
    fn bipartite_requirement() {
        assert!((bipartite_qubit_requirement(DEFAULT_ETA).unwrap() - 26695.1).abs() < 0.05);
        assert_eq!(bipartite_qubit_requirement(0.5).unwrap(), 2.0);
        assert!((bipartite_qubit_requirement(1e-3).unwrap() - 1000.0).abs() < 1e-9);
        assert!(bipartite_qubit_requirement(0.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(NmrParams::new(-0.1, 2).is_err());
        assert!(NmrParams::new(1.0, 2).is_err());
        assert!(NmrParams::new(0.1, 0).is_err());
    }
}
