//! Deterministic coefficient curves of the bivariate diffusion and the
//! integrated quantities `v`, `v1`, `v2` built from them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid};
use crate::quadrature::{adaptive_simpson, MODEL_TOLERANCE};
use crate::Result;

/// Number of points used to check curve invariants on `[0, T]`.
const CHECK_GRID: usize = 1024;

/// A deterministic function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    Constant {
        value: f64,
    },
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `mean + amplitude * sin(2 pi frequency t + phase)`
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Linear interpolation between `(t, value)` knots, flat outside them.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl Default for Curve {
    fn default() -> Self {
        Curve::Constant { value: 0.0 }
    }
}

impl Curve {
    pub const fn constant(value: f64) -> Self {
        Curve::Constant { value }
    }

    pub const fn linear(intercept: f64, slope: f64) -> Self {
        Curve::Linear { intercept, slope }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Linear { intercept, slope } => intercept + slope * t,
            Curve::Sinusoidal {
                mean,
                amplitude,
                frequency,
                phase,
            } => mean + amplitude * libm::sin(2.0 * PI * frequency * t + phase),
            Curve::PiecewiseLinear { knots } => piecewise(knots, t),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Curve::Constant { value } => Some(*value),
            _ => None,
        }
    }

    /// An upper bound of `|f|` on `[0, horizon]`, exact for every variant but
    /// the sinusoid (where `|mean| + |amplitude|` is used).
    pub fn sup_abs(&self, horizon: f64) -> f64 {
        match self {
            Curve::Constant { value } => libm::fabs(*value),
            Curve::Linear { intercept, slope } => {
                libm::fabs(*intercept).max(libm::fabs(intercept + slope * horizon))
            }
            Curve::Sinusoidal {
                mean, amplitude, ..
            } => libm::fabs(*mean) + libm::fabs(*amplitude),
            Curve::PiecewiseLinear { knots } => {
                knots.iter().fold(0.0f64, |m, &(_, v)| m.max(libm::fabs(v)))
            }
        }
    }

    fn validate_shape(&self) -> Result<()> {
        if let Curve::PiecewiseLinear { knots } = self {
            if knots.is_empty() {
                return Err(invalid!("piecewise-linear curve needs at least one knot"));
            }
            for w in knots.windows(2) {
                if !(w[1].0 > w[0].0) {
                    return Err(invalid!(
                        "piecewise-linear knots must have strictly increasing times, got {} then {}",
                        w[0].0,
                        w[1].0
                    ));
                }
            }
        }
        Ok(())
    }

    /// Evaluation points used for invariant checks: a uniform grid plus knots.
    fn check_points(&self, horizon: f64) -> impl Iterator<Item = f64> + '_ {
        let grid = (0..=CHECK_GRID).map(move |k| horizon * k as f64 / CHECK_GRID as f64);
        let knots: &[(f64, f64)] = match self {
            Curve::PiecewiseLinear { knots } => knots,
            _ => &[],
        };
        grid.chain(
            knots
                .iter()
                .map(|&(t, _)| t)
                .filter(move |t| (0.0..=horizon).contains(t)),
        )
    }
}

fn piecewise(knots: &[(f64, f64)], t: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let k = knots.partition_point(|&(s, _)| s <= t);
    let (t0, v0) = knots[k - 1];
    let (t1, v1) = knots[k];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Deterministic drift structure
/// `d beta_i = b0_i dt + b_i1 dB_1 + b_i2 dB_2`, `beta_i(0) = beta0_i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSpec {
    #[serde(default)]
    pub beta0_1: f64,
    #[serde(default)]
    pub beta0_2: f64,
    #[serde(default)]
    pub beta_bv_1: Curve,
    #[serde(default)]
    pub beta_bv_2: Curve,
    /// `beta_diff[i][j]` multiplies `dB_{j+1}` in the dynamics of `beta_{i+1}`.
    #[serde(default)]
    pub beta_diff: [[Curve; 2]; 2],
}

impl DriftSpec {
    /// Constant deterministic drifts `beta_1 = b1`, `beta_2 = b2`.
    pub fn constant(b1: f64, b2: f64) -> Self {
        Self {
            beta0_1: b1,
            beta0_2: b2,
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        let zero = |c: &Curve| c.as_constant() == Some(0.0);
        self.beta0_1 == 0.0
            && self.beta0_2 == 0.0
            && zero(&self.beta_bv_1)
            && zero(&self.beta_bv_2)
            && self.beta_diff.iter().flatten().all(zero)
    }

    fn curves(&self) -> impl Iterator<Item = &Curve> {
        [&self.beta_bv_1, &self.beta_bv_2]
            .into_iter()
            .chain(self.beta_diff.iter().flatten())
    }
}

/// Integrands built from the coefficient curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    /// `rho sigma1 sigma2`
    Cross,
    /// `sigma1^2`
    Var1,
    /// `sigma2^2`
    Var2,
    Sigma1,
    Sigma2,
    Rho,
    Sigma1Rho,
    Sigma2Rho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Constants {
    sigma1: f64,
    sigma2: f64,
    rho: f64,
}

/// The diffusion `dX_i = beta_i dt + sigma_i dB_i`, `d<B_1, B_2> = rho dt` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpecDef", into = "ModelSpecDef")]
pub struct ModelSpec {
    horizon: f64,
    sigma1: Curve,
    sigma2: Curve,
    rho: Curve,
    drift: Option<DriftSpec>,
    constants: Option<Constants>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpecDef {
    horizon: f64,
    sigma1: Curve,
    sigma2: Curve,
    rho: Curve,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift: Option<DriftSpec>,
}

impl TryFrom<ModelSpecDef> for ModelSpec {
    type Error = crate::Error;

    fn try_from(d: ModelSpecDef) -> Result<Self> {
        let mut m = ModelSpec::new(d.horizon, d.sigma1, d.sigma2, d.rho)?;
        if let Some(drift) = d.drift {
            m = m.with_drift(drift)?;
        }
        Ok(m)
    }
}

impl From<ModelSpec> for ModelSpecDef {
    fn from(m: ModelSpec) -> Self {
        ModelSpecDef {
            horizon: m.horizon,
            sigma1: m.sigma1,
            sigma2: m.sigma2,
            rho: m.rho,
            drift: m.drift,
        }
    }
}

impl ModelSpec {
    /// Builds a drift-free model, checking `T > 0`, `sigma_i > 0` and
    /// `|rho| <= 1` on an evaluation grid.
    pub fn new(horizon: f64, sigma1: Curve, sigma2: Curve, rho: Curve) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid!(
                "horizon must be positive and finite, got {horizon}"
            ));
        }
        for (name, curve) in [("sigma1", &sigma1), ("sigma2", &sigma2), ("rho", &rho)] {
            curve.validate_shape()?;
            for t in curve.check_points(horizon) {
                let v = curve.eval(t);
                let ok = match name {
                    "rho" => v.is_finite() && libm::fabs(v) <= 1.0,
                    _ => v.is_finite() && v > 0.0,
                };
                if !ok {
                    return Err(invalid!("{name}({t}) = {v} violates its range"));
                }
            }
        }
        let constants = match (
            sigma1.as_constant(),
            sigma2.as_constant(),
            rho.as_constant(),
        ) {
            (Some(sigma1), Some(sigma2), Some(rho)) => Some(Constants {
                sigma1,
                sigma2,
                rho,
            }),
            _ => None,
        };
        Ok(Self {
            horizon,
            sigma1,
            sigma2,
            rho,
            drift: None,
            constants,
        })
    }

    /// Constant volatilities and correlation.
    pub fn constant(horizon: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        Self::new(
            horizon,
            Curve::constant(sigma1),
            Curve::constant(sigma2),
            Curve::constant(rho),
        )
    }

    pub fn with_drift(mut self, drift: DriftSpec) -> Result<Self> {
        for c in drift.curves() {
            c.validate_shape()?;
            if c.check_points(self.horizon).any(|t| !c.eval(t).is_finite()) {
                return Err(invalid!("drift coefficient curve is not finite on [0, T]"));
            }
        }
        if !(drift.beta0_1.is_finite() && drift.beta0_2.is_finite()) {
            return Err(invalid!("initial drift levels must be finite"));
        }
        self.drift = Some(drift);
        Ok(self)
    }

    pub fn without_drift(&self) -> Self {
        Self {
            drift: None,
            ..self.clone()
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn sigma1(&self) -> &Curve {
        &self.sigma1
    }
    pub fn sigma2(&self) -> &Curve {
        &self.sigma2
    }
    pub fn rho(&self) -> &Curve {
        &self.rho
    }
    pub fn drift(&self) -> Option<&DriftSpec> {
        self.drift.as_ref()
    }

    /// `h(t) = sigma1(t) sigma2(t) rho(t)`
    #[inline]
    pub fn h(&self, t: f64) -> f64 {
        self.sigma1.eval(t) * self.sigma2.eval(t) * self.rho.eval(t)
    }

    /// Upper bound of `max(sigma1, sigma2)` over `[0, T]`.
    pub fn sup_sigma(&self) -> f64 {
        self.sigma1
            .sup_abs(self.horizon)
            .max(self.sigma2.sup_abs(self.horizon))
    }

    #[inline]
    pub fn integrand(&self, kind: Integrand, t: f64) -> f64 {
        match kind {
            Integrand::Cross => self.h(t),
            Integrand::Var1 => {
                let s = self.sigma1.eval(t);
                s * s
            }
            Integrand::Var2 => {
                let s = self.sigma2.eval(t);
                s * s
            }
            Integrand::Sigma1 => self.sigma1.eval(t),
            Integrand::Sigma2 => self.sigma2.eval(t),
            Integrand::Rho => self.rho.eval(t),
            Integrand::Sigma1Rho => self.sigma1.eval(t) * self.rho.eval(t),
            Integrand::Sigma2Rho => self.sigma2.eval(t) * self.rho.eval(t),
        }
    }

    /// Integral of `kind` over `(a, b]` without range checks.
    #[inline]
    pub fn integral(&self, kind: Integrand, a: f64, b: f64) -> f64 {
        if let Some(c) = self.constants {
            let level = match kind {
                Integrand::Cross => c.rho * c.sigma1 * c.sigma2,
                Integrand::Var1 => c.sigma1 * c.sigma1,
                Integrand::Var2 => c.sigma2 * c.sigma2,
                Integrand::Sigma1 => c.sigma1,
                Integrand::Sigma2 => c.sigma2,
                Integrand::Rho => c.rho,
                Integrand::Sigma1Rho => c.sigma1 * c.rho,
                Integrand::Sigma2Rho => c.sigma2 * c.rho,
            };
            return level * (b - a);
        }
        adaptive_simpson(|t| self.integrand(kind, t), a, b, MODEL_TOLERANCE)
    }

    /// `(v1, v, v2)` over `(a, b]`, unchecked.
    #[inline]
    pub fn cell_moments(&self, a: f64, b: f64) -> [f64; 3] {
        [
            self.integral(Integrand::Var1, a, b),
            self.integral(Integrand::Cross, a, b),
            self.integral(Integrand::Var2, a, b),
        ]
    }

    fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        let slack = 1e-12 * self.horizon;
        if !(a >= -slack && b <= self.horizon + slack && a <= b) {
            return Err(domain!(
                "interval ({a}, {b}] is not contained in [0, {}]",
                self.horizon
            ));
        }
        Ok(())
    }

    /// `v(S) = int_S rho sigma1 sigma2 dt`
    pub fn integrated_v(&self, a: f64, b: f64) -> Result<f64> {
        self.check_interval(a, b)?;
        Ok(self.integral(Integrand::Cross, a, b))
    }

    /// `v1(S) = int_S sigma1^2 dt`
    pub fn integrated_v1(&self, a: f64, b: f64) -> Result<f64> {
        self.check_interval(a, b)?;
        Ok(self.integral(Integrand::Var1, a, b))
    }

    /// `v2(S) = int_S sigma2^2 dt`
    pub fn integrated_v2(&self, a: f64, b: f64) -> Result<f64> {
        self.check_interval(a, b)?;
        Ok(self.integral(Integrand::Var2, a, b))
    }

    /// The covariation `theta = v([0, T])`.
    pub fn theta(&self) -> f64 {
        self.integral(Integrand::Cross, 0.0, self.horizon)
    }

    /// `(E beta_1(t), E beta_2(t))` under the deterministic-coefficient drift law.
    pub fn drift_mean(&self, t: f64) -> (f64, f64) {
        match &self.drift {
            None => (0.0, 0.0),
            Some(d) => (
                d.beta0_1 + integrate_curve(&d.beta_bv_1, t),
                d.beta0_2 + integrate_curve(&d.beta_bv_2, t),
            ),
        }
    }

    /// `E[beta_1(t) beta_2(t)]`: product of means plus the Ito covariance
    /// `int_0^t [b11 b21 + b12 b22 + (b11 b22 + b12 b21) rho] ds`.
    pub fn drift_cross_moment(&self, t: f64) -> f64 {
        let Some(d) = &self.drift else {
            return 0.0;
        };
        let (m1, m2) = self.drift_mean(t);
        let [[b11, b12], [b21, b22]] = &d.beta_diff;
        let noiseless = [b11, b12, b21, b22]
            .iter()
            .all(|c| c.as_constant() == Some(0.0));
        let cov = if noiseless || t == 0.0 {
            0.0
        } else {
            adaptive_simpson(
                |s| {
                    let (e11, e12, e21, e22) = (b11.eval(s), b12.eval(s), b21.eval(s), b22.eval(s));
                    e11 * e21 + e12 * e22 + (e11 * e22 + e12 * e21) * self.rho.eval(s)
                },
                0.0,
                t,
                MODEL_TOLERANCE,
            )
        };
        m1 * m2 + cov
    }
}

fn integrate_curve(c: &Curve, t: f64) -> f64 {
    match c.as_constant() {
        Some(v) => v * t,
        None => adaptive_simpson(|s| c.eval(s), 0.0, t, MODEL_TOLERANCE),
    }
}
