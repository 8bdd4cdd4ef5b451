//! Seeded invariant suite behind the `verify` command.
//!
//! Each property runs against its own sub-stream of the configured seed, so
//! results do not depend on which other properties ran or in what order.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    closed_form_radius, lambda_bound, lambdaprime_bound, normalized_radius, qubit_asymptotic_exponent,
    qubit_normalized_radius, recursion_radius,
};
use crate::certify::{certify_unnormalized, mu, ppt_all_cuts, BOUNDARY_BAND};
use crate::extremal::{
    achieved_ratio, ball_positivity_check, block_chain_check, build_tau, build_tau_with_mu, critical_mu,
    find_ball_violation, worst_case_input, TauMapSpec,
};
use crate::geometry::{criticality, mes_symmetry_witness, sep_symmetry_witness};
use crate::linalg::{frobenius_norm, operator_norm, DimsProfile, HermitianMatrix};
use crate::nmr::{scan_point, threshold, Baseline, Mode, DEFAULT_ETA};
use crate::schur::{
    ds_schur_majorization_check, l_matrix, l_matrix_norm, nielsen_kempe_check, oracle_two_inf_norm,
    random_correlation, schur_simplex_value, SeparableEnsemble, DEFAULT_RESTARTS,
};
use crate::{sampling, Error};

/// Samples drawn by the heavy ball-positivity properties.
pub const HEAVY_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    /// Everything except the 10^4-sample positivity checks.
    Fast,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "fast" => Ok(Self::Fast),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    /// Empty on success; the first counterexample otherwise.
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

type Outcome = std::result::Result<(), String>;

struct Property {
    name: &'static str,
    heavy: bool,
    run: fn(u64) -> Outcome,
}

const PROPERTIES: &[Property] = &[
    Property { name: "bounds.base_case", heavy: false, run: base_case },
    Property { name: "bounds.tripartite_qubits", heavy: false, run: tripartite },
    Property { name: "bounds.closed_form_solves_recursion", heavy: false, run: closed_form_identity },
    Property { name: "bounds.qubit_exponent", heavy: false, run: exponent },
    Property { name: "bounds.normalized_qubit_ball", heavy: false, run: normalized_qubits },
    Property { name: "bounds.radius_decreases_with_parties", heavy: false, run: monotone },
    Property { name: "bounds.lambda_ordering", heavy: false, run: lambda_ordering },
    Property { name: "nmr.pseudopure_threshold", heavy: false, run: pseudopure_thresholds },
    Property { name: "nmr.thermal_threshold", heavy: false, run: thermal_thresholds },
    Property { name: "schur.l_matrix_norm", heavy: false, run: l_matrix_property },
    Property { name: "schur.nielsen_kempe", heavy: false, run: nielsen_kempe },
    Property { name: "schur.ds_majorization", heavy: false, run: ds_majorization },
    Property { name: "certify.boundary_is_ppt", heavy: false, run: boundary_ppt },
    Property { name: "certify.scaling_equivalence", heavy: false, run: scaling_equivalence },
    Property { name: "geometry.witnesses_reconstruct", heavy: false, run: witnesses },
    Property { name: "geometry.reflection_criticality", heavy: false, run: reflection_criticality },
    Property { name: "extremal.tau_attains_lambdaprime", heavy: false, run: tau_attains },
    Property { name: "extremal.inflated_tau_violates", heavy: false, run: inflated_violates },
    Property { name: "extremal.traceless_ratio_within_lambda", heavy: false, run: traceless_ratio },
    Property { name: "extremal.block_chain", heavy: false, run: block_chain_property },
    Property { name: "extremal.critical_tau_ball_positive", heavy: true, run: critical_positive },
];

/// Names of the properties `suite` runs, in order.
pub fn property_names(suite: Suite) -> Vec<&'static str> {
    selected(suite).map(|p| p.name).collect()
}

fn selected(suite: Suite) -> impl Iterator<Item = &'static Property> {
    PROPERTIES.iter().filter(move |p| suite == Suite::All || !p.heavy)
}

/// Runs `suite` with `seed`; properties run on scoped threads.
pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let props: Vec<(usize, &Property)> = PROPERTIES
        .iter()
        .enumerate()
        .filter(|(_, p)| suite == Suite::All || !p.heavy)
        .collect();
    let results = std::thread::scope(|s| {
        let handles: Vec<_> = props
            .iter()
            .map(|&(i, p)| {
                let sub = sub_seed(seed, i as u64);
                s.spawn(move || {
                    let start = Instant::now();
                    let outcome = (p.run)(sub);
                    (outcome, start.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&props)
            .map(|(h, (_, p))| {
                let (outcome, elapsed) = h
                    .join()
                    .unwrap_or_else(|_| (Err("property panicked".into()), Duration::ZERO));
                PropertyResult {
                    name: p.name.to_string(),
                    passed: outcome.is_ok(),
                    detail: outcome.err().unwrap_or_default(),
                    elapsed,
                }
            })
            .collect()
    });
    SuiteReport { suite, seed, results }
}

/// Runs a single property by name.
pub fn run_property(name: &str, seed: u64) -> crate::Result<PropertyResult> {
    let (i, p) = PROPERTIES
        .iter()
        .enumerate()
        .find(|(_, p)| p.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no property named {name:?}")))?;
    let start = Instant::now();
    let outcome = (p.run)(sub_seed(seed, i as u64));
    Ok(PropertyResult {
        name: p.name.to_string(),
        passed: outcome.is_ok(),
        detail: outcome.err().unwrap_or_default(),
        elapsed: start.elapsed(),
    })
}

fn sub_seed(seed: u64, index: u64) -> u64 {
    sampling::sub_rng(seed, index).random()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dims(d: &[usize]) -> std::result::Result<DimsProfile, String> {
    lib(DimsProfile::new(d.to_vec()))
}

fn base_case(_: u64) -> Outcome {
    let r = lib(recursion_radius(&dims(&[2, 2])?))?;
    check((r - 1.0).abs() <= 1e-15, || format!("r(2,2) = {r}"))
}

fn tripartite(_: u64) -> Outcome {
    let r = lib(recursion_radius(&dims(&[2, 2, 2])?))?;
    check((r - 0.8f64.sqrt()).abs() <= 1e-12, || format!("r(2,2,2) = {r}"))
}

fn closed_form_identity(_: u64) -> Outcome {
    for d0 in 2..=6 {
        for m in 2..=12 {
            let rec = lib(recursion_radius(&lib(DimsProfile::uniform(d0, m))?))?;
            let closed = lib(closed_form_radius(d0, m))?;
            check((rec - closed).abs() <= 1e-12 * closed, || {
                format!("d0={d0} m={m}: recursion {rec}, closed form {closed}")
            })?;
        }
    }
    Ok(())
}

fn exponent(_: u64) -> Outcome {
    let g = qubit_asymptotic_exponent();
    check((g - 0.29248125).abs() <= 1e-7, || format!("gamma = {g}"))?;
    let scaled = [10, 20, 30]
        .iter()
        .map(|&m| Ok(lib(closed_form_radius(2, m))? * 2f64.powf(g * m as f64)))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    check(
        scaled.windows(2).all(|w| w[0] < w[1]) && scaled[2] < 3f64.sqrt(),
        || format!("r_m 2^(gamma m) at m = 10, 20, 30: {scaled:?}"),
    )
}

fn normalized_qubits(_: u64) -> Outcome {
    for m in 2..=12 {
        let got = lib(qubit_normalized_radius(m))?;
        let want = lib(closed_form_radius(2, m))? / 2f64.powi(m as i32);
        check((got - want).abs() <= 1e-12, || format!("m={m}: {got} vs {want}"))?;
    }
    Ok(())
}

fn monotone(_: u64) -> Outcome {
    for d0 in 2..=5 {
        let mut prev = f64::INFINITY;
        for m in 2..=40 {
            let r = lib(recursion_radius(&lib(DimsProfile::uniform(d0, m))?))?;
            check(r < prev, || format!("d0={d0} m={m}: {r} >= {prev}"))?;
            prev = r;
        }
    }
    Ok(())
}

fn lambda_ordering(_: u64) -> Outcome {
    for &a in &[0.3, 0.6, 1.0] {
        for d2 in [2, 4, 6, 9] {
            let l = lib(lambda_bound(a, d2))?;
            let lp = lib(lambdaprime_bound(a, d2))?;
            check(lp >= l, || format!("a={a} d2={d2}: lambda' {lp} < lambda {l}"))?;
        }
    }
    Ok(())
}

fn nmr_threshold_pair(mode: Mode, want: usize, want_gb03: usize) -> Outcome {
    for (baseline, expect) in [(Baseline::Recursion, want), (Baseline::Gb03, want_gb03)] {
        let t = lib(threshold(mode, DEFAULT_ETA, baseline))?;
        check(t == expect, || format!("{mode} / {baseline}: threshold {t}, expected {expect}"))?;
    }
    Ok(())
}

fn pseudopure_thresholds(_: u64) -> Outcome {
    nmr_threshold_pair(Mode::Pseudopure, 35, 22)
}

fn thermal_thresholds(_: u64) -> Outcome {
    nmr_threshold_pair(Mode::Thermal, 16, 13)?;
    for m in [16, 17] {
        let p = lib(scan_point(Mode::Thermal, DEFAULT_ETA, m, Baseline::Recursion))?;
        check(p.relative_margin().abs() >= 0.01, || {
            format!("m={m}: relative margin {} below 1%", p.relative_margin())
        })?;
    }
    Ok(())
}

fn l_matrix_property(seed: u64) -> Outcome {
    for &eta in &[1.5, 2.0, 3.0] {
        for n in 2..=8 {
            let b = l_matrix(eta, n);
            let want = lib(l_matrix_norm(eta, n))?;
            let qp = lib(schur_simplex_value(&b))?;
            let got = qp.value.sqrt();
            check((got - want).abs() <= 1e-10, || format!("eta={eta} n={n}: {got} vs {want}"))?;
            let uniform = 1.0 / n as f64;
            check(qp.maximizer.iter().all(|y| (y - uniform).abs() <= 1e-10), || {
                format!("eta={eta} n={n}: maximizer {:?} not uniform", qp.maximizer)
            })?;
            let oracle = lib(oracle_two_inf_norm(&b, DEFAULT_RESTARTS, seed))?;
            check((oracle - want).abs() <= 1e-6, || format!("eta={eta} n={n}: oracle {oracle} vs {want}"))?;
        }
    }
    Ok(())
}

fn nielsen_kempe(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for i in 0..50 {
        let k = 1 + r.random_range(0..8);
        let e = lib(SeparableEnsemble::random(k, 3, 3, &mut r))?;
        check(lib(nielsen_kempe_check(&e))?, || format!("ensemble {i} (k={k}) violates majorization"))?;
    }
    Ok(())
}

fn ds_majorization(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for i in 0..100 {
        let n = 2 + i % 5;
        let b = random_correlation(n, &mut r);
        let x = sampling::hermitian(n, &mut r);
        check(lib(ds_schur_majorization_check(&b, &x))?, || format!("pair {i} (n={n}) violates majorization"))?;
    }
    Ok(())
}

fn boundary_ppt(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for shape in [&[2, 2][..], &[2, 2, 2][..]] {
        let d = dims(shape)?;
        let n = lib(d.dim())?;
        let a = lib(recursion_radius(&d))?;
        for i in 0..200 {
            let delta = sampling::hermitian_on_sphere(n, a * (1.0 - 1e-12), &mut r);
            let x = lib(HermitianMatrix::identity(n).try_add(&delta))?;
            check(lib(certify_unnormalized(&x, &d))?.is_separable(), || {
                format!("{d}: boundary sample {i} not certified")
            })?;
            check(lib(ppt_all_cuts(&x, &d))?, || format!("{d}: certified sample {i} fails PPT"))?;
        }
    }
    Ok(())
}

fn scaling_equivalence(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    let mut checked = 0;
    for &d in &[2usize, 3, 4, 8] {
        for &a in &[0.3, 0.7, 1.0] {
            for _ in 0..42 {
                let t: f64 = r.random();
                let rho = lib(sampling::density_matrix(d, &mut r)
                    .scale(t * t)
                    .try_add(&HermitianMatrix::identity(d).scale((1.0 - t * t) / d as f64)))?;
                let df = d as f64;
                let s1 = lib(mu(&rho))? - a;
                let s2 = rho.purity() - 1.0 / (df - a * a);
                let centered = lib(rho.try_sub(&HermitianMatrix::identity(d).scale(1.0 / df)))?;
                let s3 = frobenius_norm(centered.matrix()) - lib(normalized_radius(a, d))?;
                if [s1, s2, s3].iter().any(|s| s.abs() <= BOUNDARY_BAND) {
                    continue;
                }
                check(s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0 || s1 > 0.0 && s2 > 0.0 && s3 > 0.0, || {
                    format!("d={d} a={a}: scaling, purity and ball tests disagree")
                })?;
                checked += 1;
            }
        }
    }
    check(checked >= 500, || format!("only {checked} decisive samples"))
}

fn witnesses(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for shape in [&[2][..], &[3], &[9], &[2, 2], &[2, 3], &[3, 3], &[2, 2, 2]] {
        let d = dims(shape)?;
        let vs: Vec<Vec<Complex64>> = shape.iter().map(|&k| sampling::unit_vector(k, &mut r)).collect();
        let err = lib(sep_symmetry_witness(&d, &vs))?.reconstruction_error();
        check(err <= 1e-12, || format!("separable witness {d}: error {err:e}"))?;
    }
    for n in 2..=3 {
        let err = lib(mes_symmetry_witness(n))?.reconstruction_error();
        check(err <= 1e-12, || format!("entangled witness n={n}: error {err:e}"))?;
    }
    Ok(())
}

fn reflection_criticality(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for d in 2..=9 {
        let pi = HermitianMatrix::projector(&sampling::unit_vector(d, &mut r));
        let c = lib(criticality(&pi, 1.05))?;
        check(c.at_critical >= -1e-12 && c.above < 0.0, || {
            format!("d={d}: min eigenvalue {} at 1/(d-1), {} 5% above", c.at_critical, c.above)
        })?;
    }
    Ok(())
}

const TAU_GRID_A: [f64; 3] = [0.3, 0.6, 1.0];
const TAU_GRID_D2: [usize; 3] = [4, 6, 9];

fn tau_attains(_: u64) -> Outcome {
    for &a in &TAU_GRID_A {
        for d2 in TAU_GRID_D2 {
            let tau = lib(build_tau(a, d2, 2))?;
            let got = lib(achieved_ratio(&tau, &lib(worst_case_input(a, d2))?))?;
            let want = lib(lambdaprime_bound(a, d2))?;
            check((got - want).abs() <= 1e-9, || {
                format!("a={a} d2={d2}: achieved {got:.9}, lambda' {want:.9}")
            })?;
        }
    }
    Ok(())
}

fn inflated_violates(seed: u64) -> Outcome {
    for &a in &TAU_GRID_A {
        for d2 in TAU_GRID_D2 {
            let spec = lib(TauMapSpec::new(a, d2, 2))?;
            let tau = lib(build_tau_with_mu(&spec.with_mu(1.05 * critical_mu(a, d2))))?;
            check(lib(find_ball_violation(&tau, a, 0, seed))?.is_some(), || {
                format!("a={a} d2={d2}: no violation found at 1.05 mu")
            })?;
        }
    }
    Ok(())
}

fn traceless_ratio(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for &a in &TAU_GRID_A {
        for d2 in TAU_GRID_D2 {
            let tau = lib(build_tau(a, d2, 2))?;
            let lambda = lib(lambda_bound(a, d2))?;
            for _ in 0..1000 / (TAU_GRID_A.len() * TAU_GRID_D2.len()) + 1 {
                let x = sampling::traceless_hermitian_unit(d2, &mut r);
                let ratio = operator_norm(lib(tau.apply_hermitian(&x))?.matrix()) / frobenius_norm(x.matrix());
                check(ratio <= lambda + 1e-9, || format!("a={a} d2={d2}: ratio {ratio} > lambda {lambda}"))?;
            }
        }
    }
    Ok(())
}

fn block_chain_property(seed: u64) -> Outcome {
    let mut r = sampling::rng(seed);
    for &a in &[0.6, 1.0] {
        for (d1, d2) in [(2, 4), (3, 4)] {
            let tau = lib(build_tau(a, d2, d1))?;
            for i in 0..20 {
                let m = sampling::hermitian(d1 * d2, &mut r);
                check(lib(block_chain_check(&tau, &m, a))?, || {
                    format!("a={a} d1={d1} d2={d2}: chain broken on sample {i}")
                })?;
            }
        }
    }
    Ok(())
}

fn critical_positive(seed: u64) -> Outcome {
    for (k, (a, d2)) in [(1.0, 4), (0.6, 6)].into_iter().enumerate() {
        let tau = lib(build_tau(a, d2, 2))?;
        let sub = sub_seed(seed, k as u64);
        check(lib(ball_positivity_check(&tau, a, HEAVY_SAMPLES, sub))?, || {
            format!("a={a} d2={d2}: critical map not ball-positive")
        })?;
    }
    Ok(())
}
