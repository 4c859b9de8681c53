//! Constants of the Poisson sampling regime, the limit measures of the
//! scaled interval occupation measures, and the Poisson-process identities
//! used as Monte Carlo oracles.

use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid};
use crate::model::ModelSpec;
use crate::quadrature::{adaptive_simpson, MODEL_TOLERANCE};
use crate::sampling::{Partition, SamplingScheme};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// Limit variance of `sqrt(n)(theta_hat - theta)`.
    pub c: f64,
    /// Third-cumulant constant.
    pub kappa: f64,
    /// Drift constant (0 without drift).
    #[serde(rename = "A")]
    pub a: f64,
    pub p1: f64,
    pub p2: f64,
}

impl AsymptoticConstants {
    pub fn compute(model: &ModelSpec, p1: f64, p2: f64) -> Result<Self> {
        Ok(Self {
            c: compute_c(model, p1, p2)?,
            kappa: compute_kappa(model, p1, p2)?,
            a: compute_a(model, p1, p2)?,
            p1,
            p2,
        })
    }
}

fn check_rates(p1: f64, p2: f64) -> Result<()> {
    if !(p1 > 0.0 && p2 > 0.0 && p1.is_finite() && p2.is_finite()) {
        return Err(domain!(
            "intensity factors must be positive, got p1={p1}, p2={p2}"
        ));
    }
    Ok(())
}

fn integrate(model: &ModelSpec, f: impl Fn(f64) -> f64) -> f64 {
    adaptive_simpson(f, 0.0, model.horizon(), MODEL_TOLERANCE)
}

/// `(2/p1 + 2/p2) int s1^2 s2^2 (1 + rho^2) - 2/(p1 + p2) int h^2`.
pub fn compute_c(model: &ModelSpec, p1: f64, p2: f64) -> Result<f64> {
    check_rates(p1, p2)?;
    let quartic = integrate(model, |t| {
        let (s1, s2, r) = (
            model.sigma1().eval(t),
            model.sigma2().eval(t),
            model.rho().eval(t),
        );
        s1 * s1 * s2 * s2 * (1.0 + r * r)
    });
    let h2 = integrate(model, |t| model.h(t) * model.h(t));
    Ok((2.0 / p1 + 2.0 / p2) * quartic - 2.0 / (p1 + p2) * h2)
}

/// `(1/p1^2 + 1/p2^2) int h^3 + (3 p1^2 + 2 p1 p2 + 3 p2^2)/(p1^2 p2^2) int s1^2 s2^2 h`.
pub fn compute_kappa(model: &ModelSpec, p1: f64, p2: f64) -> Result<f64> {
    check_rates(p1, p2)?;
    let h3 = integrate(model, |t| {
        let h = model.h(t);
        h * h * h
    });
    let mixed = integrate(model, |t| {
        let (s1, s2) = (model.sigma1().eval(t), model.sigma2().eval(t));
        s1 * s1 * s2 * s2 * model.h(t)
    });
    let q = p1 * p1 * p2 * p2;
    Ok((1.0 / (p1 * p1) + 1.0 / (p2 * p2)) * h3
        + (3.0 * p1 * p1 + 2.0 * p1 * p2 + 3.0 * p2 * p2) / q * mixed)
}

/// Integrand of the drift constant:
/// `s1 (b21 + b22 rho) + s2 (b11 rho + b12) + 2 E[beta1 beta2]`.
fn drift_integrand(model: &ModelSpec, t: f64) -> f64 {
    let Some(d) = model.drift() else {
        return 0.0;
    };
    let [[b11, b12], [b21, b22]] = &d.beta_diff;
    let (s1, s2, r) = (
        model.sigma1().eval(t),
        model.sigma2().eval(t),
        model.rho().eval(t),
    );
    s1 * (b21.eval(t) + b22.eval(t) * r)
        + s2 * (b11.eval(t) * r + b12.eval(t))
        + 2.0 * model.drift_cross_moment(t)
}

/// `(1/p1 + 1/p2) int [s1 (b21 + b22 rho) + s2 (b11 rho + b12) + 2 E(beta1 beta2)] dt`,
/// zero for drift-free models.
pub fn compute_a(model: &ModelSpec, p1: f64, p2: f64) -> Result<f64> {
    check_rates(p1, p2)?;
    if model.drift().is_none_or(|d| d.is_zero()) {
        return Ok(0.0);
    }
    Ok((1.0 / p1 + 1.0 / p2) * integrate(model, |t| drift_integrand(model, t)))
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub replicates: u64,
}

/// Lebesgue densities of the limit measures under Poisson sampling with
/// intensities `n p1`, `n p2` and `b_n = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitMeasures {
    pub p1: f64,
    pub p2: f64,
    /// `n sum_I |I|^2`
    pub v_i: f64,
    /// `n sum_J |J|^2`
    pub v_j: f64,
    /// `n sum |I ∩ J|^2`
    pub v_i_cap_j: f64,
    /// `n sum K |I| |J|`
    pub v_i_j: f64,
    /// `n^2 sum_I |I| |J(I)|^2`
    pub v_i_j_j: f64,
    /// `n^2 sum_J |J| |I(J)|^2`
    pub v_i_i_j: f64,
    /// `n^2 sum |I(J)| |J(I)| |I ∩ J|`, known only by simulation.
    pub nu: Option<Estimate>,
}

pub fn poisson_limit_measures(p1: f64, p2: f64) -> Result<LimitMeasures> {
    check_rates(p1, p2)?;
    let triple = 6.0 / (p1 * p1) + 8.0 / (p1 * p2) + 6.0 / (p2 * p2);
    Ok(LimitMeasures {
        p1,
        p2,
        v_i: 2.0 / p1,
        v_j: 2.0 / p2,
        v_i_cap_j: 2.0 / (p1 + p2),
        v_i_j: 2.0 / p1 + 2.0 / p2,
        v_i_j_j: triple,
        v_i_i_j: triple,
        nu: None,
    })
}

impl LimitMeasures {
    /// `int s1^2 s2^2 dV^{I,J} + int h^2 d(V^I + V^J - V^{I∩J})`.
    pub fn c(&self, model: &ModelSpec) -> f64 {
        let quartic = integrate(model, |t| {
            let (s1, s2) = (model.sigma1().eval(t), model.sigma2().eval(t));
            s1 * s1 * s2 * s2
        });
        let h2 = integrate(model, |t| model.h(t) * model.h(t));
        self.v_i_j * quartic + (self.v_i + self.v_j - self.v_i_cap_j) * h2
    }

    /// `1/2 int [...] dV^{I,J}` with the drift integrand.
    pub fn drift_a(&self, model: &ModelSpec) -> f64 {
        if model.drift().is_none() {
            return 0.0;
        }
        0.5 * self.v_i_j * integrate(model, |t| drift_integrand(model, t))
    }
}

/// `sum_k lambda^k / (k! (k+2)) = lambda^{-2} (lambda e^lambda - e^lambda + 1)`.
pub fn lemma_a1(lambda: f64) -> f64 {
    (lambda * libm::exp(lambda) - libm::expm1(lambda)) / (lambda * lambda)
}

/// Expected sum of squared gaps of a rate-`lambda` Poisson process on an
/// interval of length `len`: `2 (len lambda - 1 + e^{-len lambda}) / lambda^2`.
pub fn lemma_a2(lambda: f64, len: f64) -> f64 {
    let x = len * lambda;
    2.0 * (x + libm::expm1(-x)) / (lambda * lambda)
}

/// `E[zeta sum_J |J|^2] = (6 l1 + 4 l2) / (l1^2 (l1 + l2)^2)` with
/// `zeta ~ Exp(l1)` cut by a rate-`l2` process.
pub fn lemma_a3(l1: f64, l2: f64) -> f64 {
    (6.0 * l1 + 4.0 * l2) / (l1 * l1 * (l1 + l2) * (l1 + l2))
}

/// `E sum_J |J| K(I, J)` for `I = [a, b]` in `[0, T]`.
pub fn lemma_a4_cover(lambda: f64, a: f64, b: f64, horizon: f64) -> f64 {
    (b - a) + 2.0 / lambda - (libm::exp(-lambda * a) + libm::exp(-lambda * (horizon - b))) / lambda
}

/// `E sum_J |J \ I| |J ∩ I|` for `I = [a, b]` in `[0, T]`.
pub fn lemma_a4_product(lambda: f64, a: f64, b: f64, horizon: f64) -> f64 {
    -libm::expm1(-lambda * (b - a))
        * (2.0 - libm::exp(-lambda * a) - libm::exp(-lambda * (horizon - b)))
        / (lambda * lambda)
}

/// Limit factor `2` of `lambda sum_I int_{I x I} h`.
pub const LEMMA_A5_FACTOR: f64 = 2.0;

/// `6/p1^2 + 8/(p1 p2) + 6/p2^2`.
pub fn lemma_a7(p1: f64, p2: f64) -> f64 {
    6.0 / (p1 * p1) + 8.0 / (p1 * p2) + 6.0 / (p2 * p2)
}

/// Evaluates a named closed form: `A1 [lambda]`, `A2 [lambda, len]`,
/// `A3 [l1, l2]`, `A4a`/`A4b [lambda, a, b, T]`, `A5 []`, `A7 [p1, p2]`.
pub fn lemma_oracle(name: &str, params: &[f64]) -> Result<f64> {
    let need = |k: usize| -> Result<()> {
        if params.len() != k {
            return Err(invalid!(
                "{name} takes {k} parameters, got {}",
                params.len()
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid!("{name} parameters must be finite"));
        }
        Ok(())
    };
    match name {
        "A1" => need(1).map(|_| lemma_a1(params[0])),
        "A2" => need(2).map(|_| lemma_a2(params[0], params[1])),
        "A3" => need(2).map(|_| lemma_a3(params[0], params[1])),
        "A4a" => need(4).map(|_| lemma_a4_cover(params[0], params[1], params[2], params[3])),
        "A4b" => need(4).map(|_| lemma_a4_product(params[0], params[1], params[2], params[3])),
        "A5" => need(0).map(|_| LEMMA_A5_FACTOR),
        "A7" => need(2).map(|_| lemma_a7(params[0], params[1])),
        _ => Err(domain!("unknown lemma oracle {name:?}")),
    }
}

/// Points of a rate-`lambda` Poisson process on `(lo, hi)`, in order.
fn poisson_points<R: Rng + ?Sized>(
    lambda: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
    out: &mut alloc::vec::Vec<f64>,
) {
    out.clear();
    let mut t = lo;
    loop {
        let e: f64 = rng.sample(Exp1);
        t += e / lambda;
        if t >= hi {
            break;
        }
        out.push(t);
    }
}

/// `int_a^b sin(pi s / T) ds`.
fn sine_mass(a: f64, b: f64, horizon: f64) -> f64 {
    let w = PI / horizon;
    (libm::cos(w * a) - libm::cos(w * b)) / w
}

/// One random experiment per identity; [`LemmaExperiment::sample`] draws the
/// quantity whose mean (exactly, or in the limit) is [`LemmaExperiment::target`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", deny_unknown_fields)]
pub enum LemmaExperiment {
    /// `e^lambda / (K + 2)` with `K ~ Poisson(lambda)`.
    A1 {
        lambda: f64,
    },
    /// Sum of squared gaps on `[0, len]`.
    A2 {
        lambda: f64,
        len: f64,
    },
    A3 {
        lambda1: f64,
        lambda2: f64,
    },
    A4Cover {
        lambda: f64,
        a: f64,
        b: f64,
        horizon: f64,
    },
    A4Product {
        lambda: f64,
        a: f64,
        b: f64,
        horizon: f64,
    },
    /// `lambda sum_I (int_I f)^2` with `f(s) = sin(pi s / T)`; limit
    /// `2 int f^2 = T`.
    A5 {
        lambda: f64,
        horizon: f64,
    },
    /// `n^2 sum_I int_I f (int_{J(I)} f)^2`; limit `lemma_a7 * int f^3`.
    A7 {
        n: f64,
        p1: f64,
        p2: f64,
        horizon: f64,
    },
    /// `n^2 sum_{I,J} |I(J)| |J(I)| |I ∩ J| / T`, whose limit is `nu(p1, p2)`.
    A8 {
        n: f64,
        p1: f64,
        p2: f64,
        horizon: f64,
    },
    /// `n sum_I |I|^2 / T` over a rate-`n p1` process; limit `2 / p1`.
    MeasureI {
        n: f64,
        p1: f64,
        horizon: f64,
    },
}

impl LemmaExperiment {
    pub fn name(&self) -> &'static str {
        match self {
            LemmaExperiment::A1 { .. } => "A1",
            LemmaExperiment::A2 { .. } => "A2",
            LemmaExperiment::A3 { .. } => "A3",
            LemmaExperiment::A4Cover { .. } => "A4a",
            LemmaExperiment::A4Product { .. } => "A4b",
            LemmaExperiment::A5 { .. } => "A5",
            LemmaExperiment::A7 { .. } => "A7",
            LemmaExperiment::A8 { .. } => "A8",
            LemmaExperiment::MeasureI { .. } => "measure_I",
        }
    }

    /// The standard configurations checked by `validate-lemmas`.
    pub fn standard_set() -> [LemmaExperiment; 8] {
        [
            LemmaExperiment::A1 { lambda: 1.5 },
            LemmaExperiment::A2 {
                lambda: 1.0,
                len: 1.0,
            },
            LemmaExperiment::A3 {
                lambda1: 1.0,
                lambda2: 2.0,
            },
            LemmaExperiment::A4Cover {
                lambda: 3.0,
                a: 0.3,
                b: 0.7,
                horizon: 1.0,
            },
            LemmaExperiment::A4Product {
                lambda: 3.0,
                a: 0.3,
                b: 0.7,
                horizon: 1.0,
            },
            LemmaExperiment::A5 {
                lambda: 1000.0,
                horizon: 1.0,
            },
            LemmaExperiment::A7 {
                n: 500.0,
                p1: 1.0,
                p2: 2.0,
                horizon: 1.0,
            },
            LemmaExperiment::MeasureI {
                n: 10_000.0,
                p1: 1.0,
                horizon: 1.0,
            },
        ]
    }

    /// The closed-form mean or limit; `None` for the constant known only by
    /// simulation.
    pub fn target(&self) -> Option<f64> {
        match *self {
            LemmaExperiment::A1 { lambda } => Some(lemma_a1(lambda)),
            LemmaExperiment::A2 { lambda, len } => Some(lemma_a2(lambda, len)),
            LemmaExperiment::A3 { lambda1, lambda2 } => Some(lemma_a3(lambda1, lambda2)),
            LemmaExperiment::A4Cover {
                lambda,
                a,
                b,
                horizon,
            } => Some(lemma_a4_cover(lambda, a, b, horizon)),
            LemmaExperiment::A4Product {
                lambda,
                a,
                b,
                horizon,
            } => Some(lemma_a4_product(lambda, a, b, horizon)),
            // 2 int_0^T sin^2(pi s / T) ds = T
            LemmaExperiment::A5 { horizon, .. } => Some(LEMMA_A5_FACTOR * horizon / 2.0),
            // int_0^T sin^3(pi s / T) ds = 4 T / (3 pi)
            LemmaExperiment::A7 {
                p1, p2, horizon, ..
            } => Some(lemma_a7(p1, p2) * 4.0 * horizon / (3.0 * PI)),
            LemmaExperiment::A8 { .. } => None,
            LemmaExperiment::MeasureI { p1, .. } => Some(2.0 / p1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = match *self {
            LemmaExperiment::A1 { lambda } => positive(lambda) && lambda < 700.0,
            LemmaExperiment::A2 { lambda, len } => positive(lambda) && positive(len),
            LemmaExperiment::A3 { lambda1, lambda2 } => positive(lambda1) && positive(lambda2),
            LemmaExperiment::A4Cover {
                lambda,
                a,
                b,
                horizon,
            }
            | LemmaExperiment::A4Product {
                lambda,
                a,
                b,
                horizon,
            } => positive(lambda) && positive(horizon) && 0.0 <= a && a < b && b <= horizon,
            LemmaExperiment::A5 { lambda, horizon } => positive(lambda) && positive(horizon),
            LemmaExperiment::A7 { n, p1, p2, horizon }
            | LemmaExperiment::A8 { n, p1, p2, horizon } => {
                positive(n) && positive(p1) && positive(p2) && positive(horizon)
            }
            LemmaExperiment::MeasureI { n, p1, horizon } => {
                positive(n) && positive(p1) && positive(horizon)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid!("invalid parameters for lemma experiment {self:?}"))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut pts = alloc::vec::Vec::new();
        match *self {
            LemmaExperiment::A1 { lambda } => {
                let k: f64 = rng.sample(Poisson::new(lambda).expect("validated rate"));
                libm::exp(lambda) / (k + 2.0)
            }
            LemmaExperiment::A2 { lambda, len } => squared_gaps(lambda, 0.0, len, rng, &mut pts),
            LemmaExperiment::A3 { lambda1, lambda2 } => {
                let e: f64 = rng.sample(Exp1);
                let zeta = e / lambda1;
                zeta * squared_gaps(lambda2, 0.0, zeta, rng, &mut pts)
            }
            LemmaExperiment::A4Cover {
                lambda,
                a,
                b,
                horizon,
            } => {
                poisson_points(lambda, 0.0, horizon, rng, &mut pts);
                let left = pts.iter().rev().find(|&&t| t < a).copied().unwrap_or(0.0);
                let right = pts.iter().find(|&&t| t > b).copied().unwrap_or(horizon);
                right - left
            }
            LemmaExperiment::A4Product {
                lambda,
                a,
                b,
                horizon,
            } => {
                poisson_points(lambda, 0.0, horizon, rng, &mut pts);
                let mut s = 0.0;
                let mut prev: f64 = 0.0;
                for &t in pts.iter().chain(core::iter::once(&horizon)) {
                    let inside = (t.min(b) - prev.max(a)).max(0.0);
                    s += (t - prev - inside) * inside;
                    prev = t;
                }
                s
            }
            LemmaExperiment::A5 { lambda, horizon } => {
                poisson_points(lambda, 0.0, horizon, rng, &mut pts);
                let mut s = 0.0;
                let mut prev = 0.0;
                for &t in pts.iter().chain(core::iter::once(&horizon)) {
                    let m = sine_mass(prev, t, horizon);
                    s += m * m;
                    prev = t;
                }
                lambda * s
            }
            LemmaExperiment::A7 { n, p1, p2, horizon } => {
                let scheme = poisson_scheme(n, p1, p2, horizon, rng);
                let idx = scheme.overlaps();
                let (pi1, pi2) = (scheme.pi1(), scheme.pi2());
                let mut s = 0.0;
                for i in 0..pi1.len() {
                    let (a, b) = pi1.interval(i);
                    let r = idx.j_range(i);
                    let ju = sine_mass(pi2.points()[r.start], pi2.points()[r.end], horizon);
                    s += sine_mass(a, b, horizon) * ju * ju;
                }
                n * n * s
            }
            LemmaExperiment::A8 { n, p1, p2, horizon } => {
                let scheme = poisson_scheme(n, p1, p2, horizon, rng);
                let idx = scheme.overlaps();
                let (q1, q2) = (scheme.pi1().points(), scheme.pi2().points());
                let mut s = 0.0;
                for (i, j) in idx.pairs() {
                    let rj = idx.j_range(i);
                    let ri = idx.i_range(j);
                    let j_of_i = q2[rj.end] - q2[rj.start];
                    let i_of_j = q1[ri.end] - q1[ri.start];
                    let cap = q1[i + 1].min(q2[j + 1]) - q1[i].max(q2[j]);
                    s += i_of_j * j_of_i * cap;
                }
                n * n * s / horizon
            }
            LemmaExperiment::MeasureI { n, p1, horizon } => {
                n * squared_gaps(n * p1, 0.0, horizon, rng, &mut pts) / horizon
            }
        }
    }
}

fn squared_gaps<R: Rng + ?Sized>(
    lambda: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
    pts: &mut alloc::vec::Vec<f64>,
) -> f64 {
    poisson_points(lambda, lo, hi, rng, pts);
    let mut s = 0.0;
    let mut prev = lo;
    for &t in pts.iter().chain(core::iter::once(&hi)) {
        s += (t - prev) * (t - prev);
        prev = t;
    }
    s
}

fn poisson_scheme<R: Rng + ?Sized>(
    n: f64,
    p1: f64,
    p2: f64,
    horizon: f64,
    rng: &mut R,
) -> SamplingScheme {
    let pi1 = Partition::poisson(n * p1, horizon, rng).expect("validated rate");
    let pi2 = Partition::poisson(n * p2, horizon, rng).expect("validated rate");
    SamplingScheme::new(pi1, pi2).expect("common horizon")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curve, DriftSpec};

    fn unit(rho: f64) -> ModelSpec {
        ModelSpec::constant(1.0, 1.0, 1.0, rho).unwrap()
    }

    #[test]
    fn c_examples() {
        assert!((compute_c(&unit(0.0), 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((compute_c(&unit(1.0), 1.0, 1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!((compute_c(&unit(0.5), 1.0, 1.0).unwrap() - 4.75).abs() < 1e-12);
        let scaled = ModelSpec::constant(1.0, 3.0, 1.0, 0.4).unwrap();
        let base = compute_c(&unit(0.4), 1.0, 2.0).unwrap();
        assert!((compute_c(&scaled, 1.0, 2.0).unwrap() - 9.0 * base).abs() < 1e-10);
        assert!(compute_c(&unit(0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(compute_kappa(&unit(0.0), 1.0, 1.0).unwrap(), 0.0);
        assert!((compute_kappa(&unit(1.0), 1.0, 1.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((compute_kappa(&unit(0.5), 1.0, 1.0).unwrap() - 4.25).abs() < 1e-12);
        let k = compute_kappa(&unit(0.3), 1.0, 2.0).unwrap();
        assert!((compute_kappa(&unit(-0.3), 1.0, 2.0).unwrap() + k).abs() < 1e-14);
    }

    #[test]
    fn drift_constant_examples() {
        assert_eq!(compute_a(&unit(0.5), 1.0, 1.0).unwrap(), 0.0);
        let m = ModelSpec::constant(1.0, 1.7, 0.6, 0.2)
            .unwrap()
            .with_drift(DriftSpec::constant(1.0, 1.0))
            .unwrap();
        assert!((compute_a(&m, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        let mut d = DriftSpec::default();
        d.beta_diff[0][1] = Curve::constant(0.7);
        let m = unit(0.0).with_drift(d).unwrap();
        assert!((compute_a(&m, 1.0, 1.0).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn limit_measure_examples() {
        let lm = poisson_limit_measures(1.0, 1.0).unwrap();
        assert_eq!(lm.v_i_j, 4.0);
        assert_eq!(lm.v_i_cap_j, 1.0);
        assert_eq!(lm.v_i_j_j, 20.0);
        assert!((lm.c(&unit(0.5)) - 4.75).abs() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        assert!(
            (lemma_oracle("A2", &[1.0, 1.0]).unwrap() - 2.0 / core::f64::consts::E).abs() < 1e-15
        );
        assert!((lemma_oracle("A2", &[1.0, 1.0]).unwrap() - 0.735_759).abs() < 1e-6);
        assert_eq!(lemma_oracle("A3", &[1.0, 1.0]).unwrap(), 2.5);
        assert!((lemma_oracle("A4a", &[2.0, 0.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(lemma_oracle("A9", &[]).is_err());
        assert!(lemma_oracle("A2", &[1.0]).is_err());
        // series definition of A1
        let lambda: f64 = 1.3;
        let mut term = 1.0;
        let mut series = 0.0;
        for k in 0..60 {
            if k > 0 {
                term *= lambda / k as f64;
            }
            series += term / (k as f64 + 2.0);
        }
        assert!((lemma_a1(lambda) - series).abs() < 1e-14);
    }
}
