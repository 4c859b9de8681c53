//! Exact Gaussian simulation of the observations and an Euler scheme for
//! paths with drift.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, invalid};
use crate::model::{Integrand, ModelSpec};
use crate::rng::{stream, Stream};
use crate::sampling::SamplingScheme;
use crate::{Error, Result};

const JITTER: f64 = 1e-15;

/// Observations of both series at their own sampling times, `X_0 = (0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedPath {
    pub times1: Vec<f64>,
    pub values1: Vec<f64>,
    pub times2: Vec<f64>,
    pub values2: Vec<f64>,
}

impl ObservedPath {
    pub fn new(
        times1: Vec<f64>,
        values1: Vec<f64>,
        times2: Vec<f64>,
        values2: Vec<f64>,
    ) -> Result<Self> {
        if times1.len() != values1.len() || times2.len() != values2.len() {
            return Err(invalid!("times and values differ in length"));
        }
        if times1.len() < 2 || times2.len() < 2 {
            return Err(invalid!("each series needs at least two observations"));
        }
        for t in [&times1, &times2] {
            if t.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid!("observation times must be strictly increasing"));
            }
        }
        Ok(Self {
            times1,
            values1,
            times2,
            values2,
        })
    }

    pub fn increments1(&self) -> Vec<f64> {
        diff(&self.values1)
    }

    pub fn increments2(&self) -> Vec<f64> {
        diff(&self.values2)
    }

    /// The path observed only at the (coarser) times of `scheme`, whose
    /// breakpoints must all be observation times of `self`.
    pub fn restrict(&self, scheme: &SamplingScheme) -> Result<Self> {
        let pick = |times: &[f64], values: &[f64], wanted: &[f64]| -> Result<Vec<f64>> {
            wanted
                .iter()
                .map(|t| {
                    times
                        .binary_search_by(|s| s.total_cmp(t))
                        .map(|k| values[k])
                        .map_err(|_| domain!("time {t} is not an observation time"))
                })
                .collect()
        };
        Ok(Self {
            values1: pick(&self.times1, &self.values1, scheme.pi1().points())?,
            values2: pick(&self.times2, &self.values2, scheme.pi2().points())?,
            times1: scheme.pi1().points().to_vec(),
            times2: scheme.pi2().points().to_vec(),
        })
    }

    /// Swaps the roles of the two series.
    pub fn swapped(&self) -> Self {
        Self {
            times1: self.times2.clone(),
            values1: self.values2.clone(),
            times2: self.times1.clone(),
            values2: self.values1.clone(),
        }
    }
}

fn diff(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Lower Cholesky factor of `[[v1, v], [v, v2]]`, retried once with a tiny
/// diagonal jitter.
fn cholesky2(cell: usize, start: f64, end: f64, m: [f64; 3]) -> Result<[f64; 3]> {
    let attempt = |v1: f64, v: f64, v2: f64| {
        if !(v1 > 0.0) {
            return None;
        }
        let l11 = libm::sqrt(v1);
        let l21 = v / l11;
        let d = v2 - l21 * l21;
        (d >= 0.0).then(|| [l11, l21, libm::sqrt(d)])
    };
    let [v1, v, v2] = m;
    attempt(v1, v, v2)
        .or_else(|| attempt(v1 + JITTER, v, v2 + JITTER))
        .ok_or(Error::NotPositiveDefinite {
            cell,
            start,
            end,
            v1,
            v,
            v2,
        })
}

fn observe(
    scheme: &SamplingScheme,
    x: &[[f64; 2]],
    pos1: &[usize],
    pos2: &[usize],
) -> ObservedPath {
    ObservedPath {
        times1: scheme.pi1().points().to_vec(),
        values1: pos1.iter().map(|&k| x[k][0]).collect(),
        times2: scheme.pi2().points().to_vec(),
        values2: pos2.iter().map(|&k| x[k][1]).collect(),
    }
}

/// Draws the observations of a drift-free model exactly: on every cell of the
/// merged grid the increment pair is Gaussian with covariance
/// `[[v1, v], [v, v2]]` of that cell.
pub fn simulate_exact(
    model: &ModelSpec,
    scheme: &SamplingScheme,
    seed: u64,
) -> Result<ObservedPath> {
    if model.drift().is_some_and(|d| !d.is_zero()) {
        return Err(invalid!("exact simulation requires a drift-free model"));
    }
    check_horizon(model, scheme)?;
    let grid = scheme.merged_grid();
    let pts = grid.points();
    let mut rng = stream(seed, Stream::Path);
    let mut x = Vec::with_capacity(pts.len());
    let (mut x1, mut x2) = (0.0, 0.0);
    x.push([x1, x2]);
    for (k, w) in pts.windows(2).enumerate() {
        let [l11, l21, l22] = cholesky2(k, w[0], w[1], model.cell_moments(w[0], w[1]))?;
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        x1 += l11 * z1;
        x2 += l21 * z1 + l22 * z2;
        x.push([x1, x2]);
    }
    Ok(observe(scheme, &x, grid.positions1(), grid.positions2()))
}

fn check_horizon(model: &ModelSpec, scheme: &SamplingScheme) -> Result<()> {
    if scheme.horizon() != model.horizon() {
        return Err(invalid!(
            "scheme ends at {} but the model horizon is {}",
            scheme.horizon(),
            model.horizon()
        ));
    }
    Ok(())
}

/// Joint increments over one Euler step: the martingale parts
/// `M_i = int sigma_i dB_i` and the Brownian increments `dB_1`, `dB_2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepNoise {
    pub m1: f64,
    pub m2: f64,
    pub db1: f64,
    pub db2: f64,
}

impl core::ops::Add for StepNoise {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            m1: self.m1 + o.m1,
            m2: self.m2 + o.m2,
            db1: self.db1 + o.db1,
            db2: self.db2 + o.db2,
        }
    }
}

/// Draws [`StepNoise`] for consecutive steps of `times`. The martingale parts
/// use `main` exactly as [`simulate_exact`] does; the Brownian parts are
/// completed from `aux` only when `brownian` is set.
pub fn draw_step_noise<R: Rng + ?Sized, S: Rng + ?Sized>(
    model: &ModelSpec,
    times: &[f64],
    brownian: bool,
    main: &mut R,
    aux: &mut S,
) -> Result<Vec<StepNoise>> {
    let mut out = Vec::with_capacity(times.len().saturating_sub(1));
    for (k, w) in times.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let m = model.cell_moments(a, b);
        let [l11, l21, l22] = cholesky2(k, a, b, m)?;
        let z1: f64 = main.sample(StandardNormal);
        let z2: f64 = main.sample(StandardNormal);
        let mut noise = StepNoise {
            m1: l11 * z1,
            m2: l21 * z1 + l22 * z2,
            ..StepNoise::default()
        };
        if brownian {
            let cov = joint_covariance(model, a, b, m);
            let l = cholesky_clamped(&cov);
            let z3: f64 = aux.sample(StandardNormal);
            let z4: f64 = aux.sample(StandardNormal);
            // rows 0 and 1 of `l` reproduce (l11, l21, l22) up to rounding
            let z = [z1, z2, z3, z4];
            noise.db1 = (0..4).map(|c| l[2][c] * z[c]).sum();
            noise.db2 = (0..4).map(|c| l[3][c] * z[c]).sum();
        }
        out.push(noise);
    }
    Ok(out)
}

fn joint_covariance(model: &ModelSpec, a: f64, b: f64, m: [f64; 3]) -> [[f64; 4]; 4] {
    let [v1, v, v2] = m;
    let h = b - a;
    let s1 = model.integral(Integrand::Sigma1, a, b);
    let s2 = model.integral(Integrand::Sigma2, a, b);
    let s1r = model.integral(Integrand::Sigma1Rho, a, b);
    let s2r = model.integral(Integrand::Sigma2Rho, a, b);
    let r = model.integral(Integrand::Rho, a, b);
    [
        [v1, v, s1, s1r],
        [v, v2, s2r, s2],
        [s1, s2r, h, r],
        [s1r, s2, r, h],
    ]
}

/// Cholesky factor with vanishing pivots set to zero (the joint law is
/// singular whenever the coefficients are constant on the step).
fn cholesky_clamped(a: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                l[i][i] = if s > 1e-10 * a[i][i] {
                    libm::sqrt(s)
                } else {
                    0.0
                };
            } else if l[j][j] > 0.0 {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

/// Left-point Euler recursion for `X` and the drifts over `times`, driven by
/// `noise`. Returns `X` at every time, starting from `(0, 0)`.
pub fn euler_drift(model: &ModelSpec, times: &[f64], noise: &[StepNoise]) -> Vec<[f64; 2]> {
    let drift = model.drift().cloned().unwrap_or_default();
    let [[b11, b12], [b21, b22]] = &drift.beta_diff;
    let (mut beta1, mut beta2) = (drift.beta0_1, drift.beta0_2);
    let (mut x1, mut x2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(times.len());
    out.push([x1, x2]);
    for (w, e) in times.windows(2).zip(noise) {
        let (t, h) = (w[0], w[1] - w[0]);
        x1 += beta1 * h + e.m1;
        x2 += beta2 * h + e.m2;
        beta1 += drift.beta_bv_1.eval(t) * h + b11.eval(t) * e.db1 + b12.eval(t) * e.db2;
        beta2 += drift.beta_bv_2.eval(t) * h + b21.eval(t) * e.db1 + b22.eval(t) * e.db2;
        out.push([x1, x2]);
    }
    out
}

/// Splits every cell of `points` into `substeps` equal steps.
pub fn subdivide(points: &[f64], substeps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((points.len() - 1) * substeps + 1);
    out.push(points[0]);
    for w in points.windows(2) {
        for s in 1..substeps {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / substeps as f64);
        }
        out.push(w[1]);
    }
    out
}

/// Euler simulation on the merged grid refined `substeps` times per cell,
/// with the martingale increments of every step drawn exactly.
pub fn simulate_with_drift(
    model: &ModelSpec,
    scheme: &SamplingScheme,
    substeps: usize,
    seed: u64,
) -> Result<ObservedPath> {
    if substeps == 0 {
        return Err(invalid!("substeps must be at least 1"));
    }
    check_horizon(model, scheme)?;
    let grid = scheme.merged_grid();
    let times = subdivide(grid.points(), substeps);
    let brownian = model.drift().is_some_and(|d| {
        d.beta_diff
            .iter()
            .flatten()
            .any(|c| c.as_constant() != Some(0.0))
    });
    let noise = draw_step_noise(
        model,
        &times,
        brownian,
        &mut stream(seed, Stream::Path),
        &mut stream(seed, Stream::DriftNoise),
    )?;
    let x = euler_drift(model, &times, &noise);
    let pos = |p: &[usize]| p.iter().map(|&k| k * substeps).collect::<Vec<_>>();
    Ok(observe(
        scheme,
        &x,
        &pos(grid.positions1()),
        &pos(grid.positions2()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curve, DriftSpec};
    use crate::sampling::Partition;

    #[test]
    fn perfect_correlation_gives_equal_increments() {
        let m = ModelSpec::constant(1.0, 1.3, 1.3, 1.0).unwrap();
        let s = SamplingScheme::synchronous(Partition::uniform(50, 1.0).unwrap());
        let p = simulate_exact(&m, &s, 11).unwrap();
        for (a, b) in p.values1.iter().zip(&p.values2) {
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn zero_drift_matches_exact_simulation_bitwise() {
        let m = ModelSpec::new(
            1.0,
            Curve::linear(1.0, 0.5),
            Curve::constant(0.7),
            Curve::constant(0.4),
        )
        .unwrap();
        let s = SamplingScheme::poisson(30, 1.0, 1.5, 1.0, 5).unwrap();
        let exact = simulate_exact(&m, &s, 77).unwrap();
        let md = m.clone().with_drift(DriftSpec::default()).unwrap();
        let euler = simulate_with_drift(&md, &s, 1, 77).unwrap();
        assert_eq!(exact, euler);
    }

    #[test]
    fn observed_path_shape() {
        let m = ModelSpec::constant(1.0, 1.0, 1.0, 0.5).unwrap();
        let s = SamplingScheme::poisson(40, 1.0, 1.0, 1.0, 1).unwrap();
        let p = simulate_exact(&m, &s, 2).unwrap();
        assert_eq!(p.times1, s.pi1().points());
        assert_eq!(p.values2.len(), s.pi2().points().len());
        assert_eq!(p.values1[0], 0.0);
        assert_eq!(p.values2[0], 0.0);
    }

    #[test]
    fn drift_model_is_rejected_by_exact_simulation() {
        let m = ModelSpec::constant(1.0, 1.0, 1.0, 0.0)
            .unwrap()
            .with_drift(DriftSpec::constant(1.0, 0.0))
            .unwrap();
        let s = SamplingScheme::synchronous(Partition::uniform(3, 1.0).unwrap());
        assert!(simulate_exact(&m, &s, 0).is_err());
        assert!(simulate_with_drift(&m, &s, 0, 0).is_err());
    }

    #[test]
    fn brownian_parts_have_the_right_covariance() {
        // sigma1 = 2 constant so dB1 = M1 / 2 exactly
        let m = ModelSpec::constant(1.0, 2.0, 1.0, 0.6).unwrap();
        let times = [0.0, 0.25, 0.5];
        let noise = draw_step_noise(
            &m,
            &times,
            true,
            &mut stream(1, Stream::Path),
            &mut stream(1, Stream::DriftNoise),
        )
        .unwrap();
        for e in noise {
            assert!((e.db1 - e.m1 / 2.0).abs() < 1e-12);
            assert!((e.db2 - e.m2).abs() < 1e-12);
        }
    }

    #[test]
    fn subdivision() {
        assert_eq!(
            subdivide(&[0.0, 1.0, 2.0], 2),
            alloc::vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(subdivide(&[0.0, 1.0], 1), alloc::vec![0.0, 1.0]);
    }
}
