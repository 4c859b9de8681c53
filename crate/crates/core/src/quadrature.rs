//! Adaptive Simpson quadrature.

/// Absolute/relative stopping tolerances for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

/// Tolerance used for every integrated quantity of the model.
pub const MODEL_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-12);

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]`.
///
/// The target error is `max(abs, rel * |I|)` where `|I|` is estimated from a
/// 17-point composite Simpson pass; that budget is split in half at every
/// bisection and a Richardson correction is added to accepted panels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -adaptive_simpson(f, b, a, tol);
    }

    // coarse magnitude estimate for the relative target
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut coarse = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        coarse += w * f(a + k as f64 * h);
    }
    coarse *= h / 3.0;
    let eps = tol.abs.max(tol.rel * libm::fabs(coarse));

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, eps, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let v = adaptive_simpson(|t| 1.0 + t + t * t + t * t * t, 0.0, 2.0, MODEL_TOLERANCE);
        let exact = 2.0 + 2.0 + 8.0 / 3.0 + 4.0;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = adaptive_simpson(libm::sin, 0.0, core::f64::consts::PI, MODEL_TOLERANCE);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty_ranges() {
        assert_eq!(adaptive_simpson(|t| t, 1.0, 1.0, MODEL_TOLERANCE), 0.0);
        let v = adaptive_simpson(|t| t, 1.0, 0.0, MODEL_TOLERANCE);
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn gaussian_mass() {
        let pdf = |z: f64| libm::exp(-0.5 * z * z) / (2.0 * core::f64::consts::PI).sqrt();
        let v = adaptive_simpson(pdf, -12.0, 12.0, Tolerance::new(1e-14, 1e-12));
        assert!((v - 1.0).abs() < 1e-11);
    }
}
