//! Second-order Edgeworth-type densities of the standardized estimator.
//!
//! Every variant has the form `phi(z; S) [1 + a1 h1 + a2 h2 + a3 h3](z; S)`
//! with Hermite polynomials `h1 = z/S`, `h2 = (z^2 - S)/S^2`,
//! `h3 = (z^3 - 3 S z)/S^3`; the positive-part variants are truncated at zero
//! and renormalized. Distribution functions are closed form through
//! `int_{-inf}^x h_{r} phi = -h_{r-1}(x) phi(x)`.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Gaussian with the conditional variance, skewness from the conditional
    /// third cumulant.
    ConditionalP3n,
    /// As `ConditionalP3n` but centred on the limit variance with a second
    /// Hermite correction.
    ConditionalTilde,
    /// Limit variance and expected third cumulant (a signed measure).
    UnconditionalStar,
    /// Positive part of `UnconditionalStar`, renormalized.
    UnconditionalPlus,
    /// Positive part of the drift-corrected expansion, renormalized.
    DriftCirc,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::ConditionalP3n,
        Variant::ConditionalTilde,
        Variant::UnconditionalStar,
        Variant::UnconditionalPlus,
        Variant::DriftCirc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::ConditionalP3n => "conditional_p3n",
            Variant::ConditionalTilde => "conditional_tilde",
            Variant::UnconditionalStar => "unconditional_star",
            Variant::UnconditionalPlus => "unconditional_plus",
            Variant::DriftCirc => "drift_circ",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn is_positive_part(self) -> bool {
        matches!(self, Variant::UnconditionalPlus | Variant::DriftCirc)
    }
}

/// Inputs of the expansions. `variance` is `lambda_bar_2` for
/// `conditional_p3n` and the limit variance `c` otherwise; `lambda3` is the
/// (expected) normalized third cumulant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityParams {
    pub variance: f64,
    pub lambda3: f64,
    pub b_n: f64,
    /// Conditional `lambda_bar_2`, used by `conditional_tilde`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bar2: Option<f64>,
    /// Drift constant, used by `drift_circ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift_a: Option<f64>,
}

impl DensityParams {
    pub fn new(variance: f64, lambda3: f64, b_n: f64) -> Self {
        Self {
            variance,
            lambda3,
            b_n,
            lambda_bar2: None,
            drift_a: None,
        }
    }

    /// Poisson regime with `b_n = 1/n`: expected `lambda_bar_3 = 12 kappa`.
    pub fn poisson(c: f64, kappa: f64, drift_a: f64, n: f64) -> Self {
        Self {
            variance: c,
            lambda3: 12.0 * kappa,
            b_n: 1.0 / n,
            lambda_bar2: None,
            drift_a: Some(drift_a),
        }
    }

    pub fn with_lambda_bar2(mut self, l2: f64) -> Self {
        self.lambda_bar2 = Some(l2);
        self
    }

    pub fn with_drift(mut self, a: f64) -> Self {
        self.drift_a = Some(a);
        self
    }
}

/// `phi(z; s)`, the centred Gaussian density of variance `s`.
#[inline]
pub fn gaussian_pdf(z: f64, s: f64) -> f64 {
    libm::exp(-0.5 * z * z / s) / libm::sqrt(2.0 * PI * s)
}

/// Centred Gaussian distribution function of variance `s`.
#[inline]
pub fn gaussian_cdf(x: f64, s: f64) -> f64 {
    0.5 * libm::erfc(-x / (SQRT_2 * libm::sqrt(s)))
}

/// `h_r(z; s)` for `r` in `{2, 3}`.
pub fn hermite(r: u32, z: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain!(
            "Hermite variance parameter must be positive, got {s}"
        ));
    }
    match r {
        2 => Ok((z * z - s) / (s * s)),
        3 => Ok((z * z * z - 3.0 * s * z) / (s * s * s)),
        _ => Err(Error::Unsupported(alloc::format!(
            "Hermite polynomial of order {r}, only 2 and 3 are available"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthDensity {
    pub variant: Variant,
    pub params: DensityParams,
    /// Variance `S` of the Gaussian kernel.
    pub kernel_variance: f64,
    /// `(a1, a2, a3)` multiplying `h1, h2, h3`.
    pub coefficients: [f64; 3],
    /// Mass of the positive part; 1 for signed variants.
    pub normalization: f64,
    /// Intervals where the correction factor is negative (positive-part
    /// variants only; infinite ends allowed).
    negative: Vec<(f64, f64)>,
}

impl EdgeworthDensity {
    pub fn new(variant: Variant, params: DensityParams) -> Result<Self> {
        let DensityParams {
            variance,
            lambda3,
            b_n,
            lambda_bar2,
            drift_a,
        } = params;
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(domain!(
                "variance parameter must be positive, got {variance}"
            ));
        }
        if !(b_n > 0.0 && b_n.is_finite()) {
            return Err(domain!("b_n must be positive, got {b_n}"));
        }
        if !lambda3.is_finite() {
            return Err(domain!("third cumulant parameter must be finite"));
        }
        let sb = libm::sqrt(b_n);
        let a3 = sb * lambda3 / 6.0;
        let coefficients = match variant {
            Variant::ConditionalP3n | Variant::UnconditionalStar | Variant::UnconditionalPlus => {
                [0.0, 0.0, a3]
            }
            Variant::ConditionalTilde => {
                let l2 =
                    lambda_bar2.ok_or_else(|| domain!("conditional_tilde needs lambda_bar2"))?;
                [0.0, 0.5 * (l2 - variance), a3]
            }
            Variant::DriftCirc => {
                let a = drift_a.ok_or_else(|| domain!("drift_circ needs the drift constant"))?;
                [sb * a, 0.0, a3]
            }
        };
        let mut d = Self {
            variant,
            params,
            kernel_variance: variance,
            coefficients,
            normalization: 1.0,
            negative: Vec::new(),
        };
        if variant.is_positive_part() {
            d.negative = d.negative_regions();
            let lost: f64 = d
                .negative
                .iter()
                .map(|&(l, r)| d.signed_cdf(r) - d.signed_cdf(l))
                .sum();
            d.normalization = 1.0 - lost;
        }
        Ok(d)
    }

    /// Power-basis coefficients of the correction factor `1 + sum a_r h_r`.
    fn factor_polynomial(&self) -> [f64; 4] {
        let s = self.kernel_variance;
        let [a1, a2, a3] = self.coefficients;
        [
            1.0 - a2 / s,
            a1 / s - 3.0 * a3 / (s * s),
            a2 / (s * s),
            a3 / (s * s * s),
        ]
    }

    /// The correction factor `1 + a1 h1 + a2 h2 + a3 h3` at `z`.
    #[inline]
    pub fn factor(&self, z: f64) -> f64 {
        let [c0, c1, c2, c3] = self.factor_polynomial();
        c0 + z * (c1 + z * (c2 + z * c3))
    }

    fn negative_regions(&self) -> Vec<(f64, f64)> {
        let roots = real_roots(self.factor_polynomial());
        let mut edges = Vec::with_capacity(roots.len() + 2);
        edges.push(f64::NEG_INFINITY);
        edges.extend(roots.iter().copied());
        edges.push(f64::INFINITY);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in edges.windows(2) {
            let probe = match (w[0].is_finite(), w[1].is_finite()) {
                (true, true) => 0.5 * (w[0] + w[1]),
                (false, true) => w[1] - 1.0 - libm::fabs(w[1]),
                (true, false) => w[0] + 1.0 + libm::fabs(w[0]),
                (false, false) => 0.0,
            };
            if self.factor(probe) < 0.0 {
                match out.last_mut() {
                    Some(last) if last.1 == w[0] => last.1 = w[1],
                    _ => out.push((w[0], w[1])),
                }
            }
        }
        out
    }

    fn signed_cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let s = self.kernel_variance;
        let [a1, a2, a3] = self.coefficients;
        let h2 = (x * x - s) / (s * s);
        gaussian_cdf(x, s) - gaussian_pdf(x, s) * (a1 + a2 * x / s + a3 * h2)
    }

    fn signed_density(&self, z: f64) -> f64 {
        gaussian_pdf(z, self.kernel_variance) * self.factor(z)
    }

    pub fn density(&self, z: f64) -> f64 {
        let p = self.signed_density(z);
        if self.variant.is_positive_part() {
            p.max(0.0) / self.normalization
        } else {
            p
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let f = self.signed_cdf(x);
        if !self.variant.is_positive_part() {
            return f;
        }
        let mut lost = 0.0;
        for &(l, r) in &self.negative {
            if l >= x {
                break;
            }
            lost += self.signed_cdf(r.min(x)) - self.signed_cdf(l);
        }
        ((f - lost) / self.normalization).clamp(0.0, 1.0)
    }

    /// `int e^{iuz} p(z) dz` of the signed expansion:
    /// `e^{-S u^2 / 2} [1 + a1 (iu) + a2 (iu)^2 + a3 (iu)^3]`.
    pub fn fourier(&self, u: f64) -> Complex64 {
        let [a1, a2, a3] = self.coefficients;
        let iu = Complex64::new(0.0, u);
        let poly = Complex64::new(1.0, 0.0) + iu * (a1 + iu * (a2 + iu * a3));
        poly * libm::exp(-0.5 * self.kernel_variance * u * u)
    }

    pub fn negative_regions_of_factor(&self) -> &[(f64, f64)] {
        &self.negative
    }
}

/// `e^{-lambda_bar_2 u^2 / 2} [1 + (b^{1/2}/6) lambda_bar_3 (iu)^3]`.
pub fn fourier_side(params: &DensityParams, u: f64) -> Complex64 {
    let a3 = libm::sqrt(params.b_n) * params.lambda3 / 6.0;
    let iu = Complex64::new(0.0, u);
    (Complex64::new(1.0, 0.0) + a3 * iu * iu * iu) * libm::exp(-0.5 * params.variance * u * u)
}

/// Real roots, ascending, of `c0 + c1 z + c2 z^2 + c3 z^3`, located by
/// bisection on the monotone pieces between critical points.
pub fn real_roots(c: [f64; 4]) -> Vec<f64> {
    let eval = |z: f64| c[0] + z * (c[1] + z * (c[2] + z * c[3]));
    let scale = c.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
    if scale == 0.0 {
        return Vec::new();
    }
    let degree = (0..4).rev().find(|&k| c[k] != 0.0).unwrap_or(0);
    if degree == 0 {
        return Vec::new();
    }
    // Cauchy bound on the root moduli
    let lead = libm::fabs(c[degree]);
    let bound = 1.0
        + (0..degree)
            .map(|k| libm::fabs(c[k]) / lead)
            .fold(0.0, f64::max);

    let mut breaks = Vec::with_capacity(4);
    breaks.push(-bound);
    // critical points: roots of c1 + 2 c2 z + 3 c3 z^2
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    if qa != 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc > 0.0 {
            let sq = libm::sqrt(disc);
            let q = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
            let mut r = [q / qa, if q != 0.0 { qc / q } else { 0.0 }];
            r.sort_by(f64::total_cmp);
            breaks.extend(r.iter().copied().filter(|x| libm::fabs(*x) < bound));
        }
    } else if qb != 0.0 {
        let r = -qc / qb;
        if libm::fabs(r) < bound {
            breaks.push(r);
        }
    }
    breaks.push(bound);

    let mut roots: Vec<f64> = Vec::with_capacity(3);
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (eval(lo), eval(hi));
        if flo == 0.0 {
            push_root(&mut roots, lo);
            continue;
        }
        if (flo < 0.0) == (fhi < 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = eval(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        push_root(&mut roots, 0.5 * (lo + hi));
    }
    if eval(bound) == 0.0 {
        push_root(&mut roots, bound);
    }
    roots
}

fn push_root(roots: &mut Vec<f64>, r: f64) {
    if roots.last() != Some(&r) {
        roots.push(r);
    }
}
