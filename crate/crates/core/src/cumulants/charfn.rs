//! Characteristic function of the centred quadratic form and the bounds
//! controlling it.

use num_complex::Complex64;

use crate::error::domain;
use crate::Result;

/// `log phi_{theta_hat - theta}(u) = sum_l [-1/2 log(1 - 2 i lambda_l u) - i lambda_l u]`
/// with principal logarithms (each factor has real part 1, so the sum is
/// continuous in `u`). `theta = sum lambda_l` is removed term by term.
pub fn log_char_fn_centered(eigenvalues: &[f64], u: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &l in eigenvalues {
        let z = Complex64::new(1.0, -2.0 * l * u);
        acc += -0.5 * z.ln() - Complex64::new(0.0, l * u);
    }
    acc
}

/// `phi_{theta_hat - theta}(u) = e^{-i theta u} prod_l (1 - 2 i lambda_l u)^{-1/2}`.
pub fn char_fn(eigenvalues: &[f64], theta: f64, u: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, -theta * u);
    for &l in eigenvalues {
        acc += -0.5 * Complex64::new(1.0, -2.0 * l * u).ln();
    }
    acc.exp()
}

/// `|phi(u)| = prod_l (1 + 4 u^2 lambda_l^2)^{-1/4}`.
pub fn char_fn_modulus(eigenvalues: &[f64], u: f64) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .map(|&l| libm::log1p(4.0 * u * u * l * l))
        .sum();
    libm::exp(-0.25 * s)
}

/// `max |lambda| / sqrt(mu_2)`.
pub fn alpha_bar(eigenvalues: &[f64]) -> f64 {
    let mu2: f64 = eigenvalues.iter().map(|l| l * l).sum();
    let max = eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(libm::fabs(*l)));
    if mu2 == 0.0 {
        return 0.0;
    }
    max / libm::sqrt(mu2)
}

/// `-v^2 log(1 - sqrt(2) |v| alpha_bar)`, bounding
/// `|log phi_{theta_hat - theta}(v / sqrt(2 mu_2)) + v^2 / 2|` for
/// `|v| < 1 / (sqrt(2) alpha_bar)`.
pub fn char_fn_expansion_bound(eigenvalues: &[f64], v: f64) -> Result<f64> {
    let a = alpha_bar(eigenvalues);
    let x = core::f64::consts::SQRT_2 * libm::fabs(v) * a;
    if x >= 1.0 {
        return Err(domain!(
            "|v| = {} must be below 1/(sqrt(2) alpha) = {}",
            libm::fabs(v),
            1.0 / (core::f64::consts::SQRT_2 * a)
        ));
    }
    Ok(-v * v * libm::log1p(-x))
}

/// Upper bound `(p/2)^{p/4} (1 + mu_2 u^2)^{-p/4}` for `|phi(u)|`, available
/// when `p >= 2` and `max lambda^2 <= mu_2 / (2p)`. At `p = 1` the bound is
/// below 1 at `u = 0`, so it is never returned there.
pub fn char_fn_tail_bound(eigenvalues: &[f64], p: u32, u: f64) -> Option<f64> {
    let mu2: f64 = eigenvalues.iter().map(|l| l * l).sum();
    let max2 = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l * l));
    let pf = p as f64;
    if p < 2 || max2 > mu2 / (2.0 * pf) {
        return None;
    }
    Some(libm::pow(pf / 2.0, pf / 4.0) * libm::pow(1.0 + mu2 * u * u, -pf / 4.0))
}
