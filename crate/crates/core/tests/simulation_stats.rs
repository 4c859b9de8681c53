mod common;

use common::smooth_model;
use hycov_core::model::Integrand;
use hycov_core::rng::{derive_seed, stream, Stream};
use hycov_core::simulate::{draw_step_noise, euler_drift, StepNoise};
use hycov_core::{
    hy_estimate, simulate_exact, simulate_with_drift, Curve, DriftSpec, ModelSpec, Partition,
    SamplingScheme,
};
use proptest::prelude::*;

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn within(xs: &[f64], target: f64, k: f64) -> bool {
    let (m, se) = mean_se(xs);
    (m - target).abs() <= k * se
}

fn varying_model() -> ModelSpec {
    ModelSpec::new(
        1.0,
        Curve::linear(1.0, 1.0),
        Curve::Sinusoidal {
            mean: 1.2,
            amplitude: 0.4,
            frequency: 1.0,
            phase: 0.3,
        },
        Curve::linear(0.6, -0.5),
    )
    .unwrap()
}

#[test]
fn uncorrelated_cell_increments() {
    let m = ModelSpec::constant(1.0, 1.0, 2.0, 0.0).unwrap();
    let cells = 100_000;
    let s = SamplingScheme::synchronous(Partition::uniform(cells, 1.0).unwrap());
    let p = simulate_exact(&m, &s, 5).unwrap();
    let (d1, d2) = (p.increments1(), p.increments2());
    let n = cells as f64;
    let (m1, m2) = (d1.iter().sum::<f64>() / n, d2.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in d1.iter().zip(&d2) {
        sxy += (a - m1) * (b - m2);
        sxx += (a - m1).powi(2);
        syy += (b - m2).powi(2);
    }
    let r = sxy / (sxx * syy).sqrt();
    assert!(r.abs() < 3.0 / n.sqrt(), "correlation {r}");
}

#[test]
fn terminal_law_matches_integrated_covariance() {
    let m = varying_model();
    let s = SamplingScheme::synchronous(Partition::uniform(8, 1.0).unwrap());
    let reps = 10_000u64;
    let (mut a, mut c, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..reps {
        let p = simulate_exact(&m, &s, derive_seed(101, r)).unwrap();
        let (x1, x2) = (*p.values1.last().unwrap(), *p.values2.last().unwrap());
        a.push(x1 * x1);
        c.push(x1 * x2);
        b.push(x2 * x2);
    }
    let v1 = m.integrated_v1(0.0, 1.0).unwrap();
    let v = m.integrated_v(0.0, 1.0).unwrap();
    let v2 = m.integrated_v2(0.0, 1.0).unwrap();
    assert!(within(&a, v1, 3.0), "{:?} vs {v1}", mean_se(&a));
    assert!(within(&c, v, 3.0), "{:?} vs {v}", mean_se(&c));
    assert!(within(&b, v2, 3.0), "{:?} vs {v2}", mean_se(&b));
}

#[test]
fn constant_drift_shifts_the_mean() {
    let bt = 1.5;
    let m = ModelSpec::constant(1.0, 1.0, 1.0, 0.3)
        .unwrap()
        .with_drift(DriftSpec::constant(bt, 0.0))
        .unwrap();
    let s = SamplingScheme::poisson(50, 1.0, 1.0, 1.0, 3).unwrap();
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    for r in 0..10_000 {
        let p = simulate_with_drift(&m, &s, 4, derive_seed(202, r)).unwrap();
        x1.push(*p.values1.last().unwrap());
        x2.push(*p.values2.last().unwrap());
    }
    assert!(within(&x1, bt, 3.0), "{:?}", mean_se(&x1));
    assert!(within(&x2, 0.0, 3.0), "{:?}", mean_se(&x2));
}

#[test]
fn zero_drift_with_one_substep_is_exact_simulation() {
    let m = varying_model();
    let s = SamplingScheme::poisson(40, 1.0, 2.0, 1.0, 9).unwrap();
    let zero = m.clone().with_drift(DriftSpec::default()).unwrap();
    for seed in 0..5 {
        assert_eq!(
            simulate_with_drift(&zero, &s, 1, seed).unwrap(),
            simulate_exact(&m, &s, seed).unwrap()
        );
    }
}

fn coarsen(noise: &[StepNoise], factor: usize) -> Vec<StepNoise> {
    noise
        .chunks(factor)
        .map(|c| c.iter().copied().fold(StepNoise::default(), |a, b| a + b))
        .collect()
}

#[test]
fn euler_error_decreases_under_halving() {
    let drift = DriftSpec {
        beta0_1: 1.0,
        beta0_2: -0.5,
        beta_bv_1: Curve::linear(0.5, 1.0),
        beta_bv_2: Curve::constant(-1.0),
        beta_diff: [
            [Curve::constant(2.0), Curve::linear(0.0, 1.0)],
            [Curve::constant(0.5), Curve::constant(1.5)],
        ],
    };
    let m = varying_model().with_drift(drift).unwrap();
    let fine = 256;
    let times: Vec<f64> = (0..=fine).map(|k| k as f64 / fine as f64).collect();
    let levels = [2usize, 4, 8, 16, 32];
    let mut mse = vec![0.0; levels.len()];
    let reps = 2000;
    for r in 0..reps {
        let noise = draw_step_noise(
            &m,
            &times,
            true,
            &mut stream(derive_seed(303, r), Stream::Path),
            &mut stream(derive_seed(303, r), Stream::DriftNoise),
        )
        .unwrap();
        let reference = *euler_drift(&m, &times, &noise).last().unwrap();
        for (k, &steps) in levels.iter().enumerate() {
            let factor = fine / steps;
            let coarse_times: Vec<f64> = times.iter().step_by(factor).copied().collect();
            let x = *euler_drift(&m, &coarse_times, &coarsen(&noise, factor))
                .last()
                .unwrap();
            mse[k] += ((x[0] - reference[0]).powi(2) + (x[1] - reference[1]).powi(2)) / reps as f64;
        }
    }
    for w in mse.windows(2) {
        assert!(w[0] / w[1] >= 1.5, "mean-square errors {mse:?}");
    }
}

#[test]
fn estimator_is_unbiased_on_a_fixed_scheme() {
    let m = varying_model();
    let s = SamplingScheme::poisson(30, 1.0, 0.5, 1.0, 17).unwrap();
    let xs: Vec<f64> = (0..10_000)
        .map(|r| {
            let p = simulate_exact(&m, &s, derive_seed(404, r)).unwrap();
            hy_estimate(&p, &s).unwrap().theta_hat
        })
        .collect();
    assert!(
        within(&xs, m.theta(), 3.0),
        "{:?} vs {}",
        mean_se(&xs),
        m.theta()
    );
}

#[test]
fn poisson_interior_count() {
    for seed in [1u64, 2, 3, 4, 5] {
        let mut rng = stream(seed, Stream::FirstGrid);
        let p = Partition::poisson(1000.0, 1.0, &mut rng).unwrap();
        let interior = (p.len() - 1) as f64;
        assert!(
            (interior - 1000.0).abs() <= 4.0 * 1000f64.sqrt(),
            "{interior}"
        );
    }
}

#[test]
fn tiny_rate_gives_one_interval() {
    for seed in 0..50u64 {
        let s = SamplingScheme::poisson(1, 1e-4, 1e-4, 1.0, seed).unwrap();
        assert_eq!(s.pi1().points(), &[0.0, 1.0]);
        assert_eq!(s.pi2().points(), &[0.0, 1.0]);
    }
}

#[test]
fn poisson_gaps_are_exponential() {
    let rate = 10_000.0;
    let mut rng = stream(77, Stream::FirstGrid);
    let p = Partition::poisson(rate, 1.0, &mut rng).unwrap();
    // interior gaps only; the last one is censored at the horizon
    let pts = p.points();
    let mut gaps: Vec<f64> = pts[..pts.len() - 1]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len() as f64;
    let d = gaps
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let f = 1.0 - (-rate * g).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0f64, f64::max);
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d} over {n} gaps");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integrals_are_additive(model in smooth_model(), a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let mut t = [a, b, c];
        t.sort_by(f64::total_cmp);
        let [a, b, c] = t;
        for kind in [Integrand::Var1, Integrand::Cross, Integrand::Var2] {
            let whole = model.integral(kind, a, c);
            let parts = model.integral(kind, a, b) + model.integral(kind, b, c);
            prop_assert!((whole - parts).abs() < 1e-9);
        }
    }

    #[test]
    fn cauchy_schwarz(model in smooth_model(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (a, b) = (a.min(b), a.max(b));
        let [v1, v, v2] = model.cell_moments(a, b);
        prop_assert!(v * v <= v1 * v2 * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn theta_is_the_sum_over_any_partition(model in smooth_model(), mut cuts in prop::collection::vec(0.0f64..1.0, 0..30)) {
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let total: f64 = cuts.windows(2).map(|w| model.integrated_v(w[0], w[1]).unwrap()).sum();
        prop_assert!((total - model.theta()).abs() < 1e-9);
    }
}
