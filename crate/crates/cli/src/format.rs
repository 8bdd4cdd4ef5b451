use num_complex::Complex64;
use sepball::bounds::RadiusMethod;
use sepball::linalg::HermitianMatrix;

/// `x` to 9 significant digits; scientific outside `[1e-4, 1e9)`.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        format!("{:.*}", (8 - mag) as usize, x)
    } else {
        format!("{x:.8e}")
    }
}

pub fn method_name(m: RadiusMethod) -> &'static str {
    match m {
        RadiusMethod::Recursion => "recursion",
        RadiusMethod::ClosedForm => "closed-form",
        RadiusMethod::Weak => "weak",
        RadiusMethod::Gb03Baseline => "gb03",
    }
}

/// `|00> + |11>` over `sqrt 2`, as a projector.
pub fn bell() -> HermitianMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    HermitianMatrix::projector(&[s, z, z, s])
}
