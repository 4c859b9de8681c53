mod common;

use common::{correlation_curve, positive_curve, smooth_model};
use hycov_core::asymptotics::{
    compute_a, compute_c, compute_kappa, lemma_a2, lemma_oracle, poisson_limit_measures,
    LemmaExperiment,
};
use hycov_core::rng::{derive_seed, stream, Stream};
use hycov_core::{Curve, DriftSpec, ModelSpec};
use proptest::prelude::*;

fn constant(s1: f64, s2: f64, rho: f64) -> ModelSpec {
    ModelSpec::constant(1.0, s1, s2, rho).unwrap()
}

#[test]
fn variance_constant_examples() {
    assert!((compute_c(&constant(1.0, 1.0, 0.0), 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
    assert!((compute_c(&constant(1.0, 1.0, 1.0), 1.0, 1.0).unwrap() - 7.0).abs() < 1e-12);
    // (2 + 2) * 1.25 - 1 * 0.25
    assert!((compute_c(&constant(1.0, 1.0, 0.5), 1.0, 1.0).unwrap() - 4.75).abs() < 1e-12);
}

#[test]
fn third_cumulant_constant_examples() {
    assert_eq!(
        compute_kappa(&constant(1.0, 1.0, 0.0), 1.0, 1.0).unwrap(),
        0.0
    );
    assert!((compute_kappa(&constant(1.0, 1.0, 1.0), 1.0, 1.0).unwrap() - 10.0).abs() < 1e-12);
    assert!((compute_kappa(&constant(1.0, 1.0, 0.5), 1.0, 1.0).unwrap() - 4.25).abs() < 1e-12);
}

#[test]
fn drift_constant_examples() {
    let m = constant(1.3, 0.7, 0.4);
    assert_eq!(compute_a(&m, 1.0, 1.0).unwrap(), 0.0);
    let zero = m.clone().with_drift(DriftSpec::default()).unwrap();
    assert_eq!(compute_a(&zero, 1.0, 1.0).unwrap(), 0.0);
    let ones = m.clone().with_drift(DriftSpec::constant(1.0, 1.0)).unwrap();
    assert!((compute_a(&ones, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
    let twos = m.with_drift(DriftSpec::constant(2.0, 2.0)).unwrap();
    assert!((compute_a(&twos, 1.0, 1.0).unwrap() - 16.0).abs() < 1e-12);

    let c = 0.8;
    let mut d = DriftSpec::default();
    d.beta_diff[0][1] = Curve::constant(c);
    let m = ModelSpec::constant(1.0, 1.9, 1.0, 0.0)
        .unwrap()
        .with_drift(d)
        .unwrap();
    assert!((compute_a(&m, 1.0, 1.0).unwrap() - 2.0 * c).abs() < 1e-12);
}

#[test]
fn rates_must_be_positive() {
    let m = constant(1.0, 1.0, 0.5);
    for (p1, p2) in [
        (0.0, 1.0),
        (1.0, -1.0),
        (f64::NAN, 1.0),
        (1.0, f64::INFINITY),
    ] {
        assert!(matches!(
            compute_c(&m, p1, p2),
            Err(hycov_core::Error::Domain(_))
        ));
        assert!(compute_kappa(&m, p1, p2).is_err());
        assert!(compute_a(&m, p1, p2).is_err());
        assert!(poisson_limit_measures(p1, p2).is_err());
    }
}

#[test]
fn limit_measure_examples() {
    let v = poisson_limit_measures(1.0, 1.0).unwrap();
    assert_eq!(v.v_i_j, 4.0);
    assert_eq!(v.v_i_cap_j, 1.0);
    assert_eq!((v.v_i, v.v_j), (2.0, 2.0));
    assert_eq!(v.v_i_j_j, 20.0);
    let v = poisson_limit_measures(1.0, 2.0).unwrap();
    assert_eq!(
        (v.v_i, v.v_j, v.v_i_cap_j, v.v_i_j),
        (2.0, 1.0, 2.0 / 3.0, 3.0)
    );
    assert_eq!(v.v_i_j_j, 6.0 + 4.0 + 1.5);
}

#[test]
fn lemma_oracle_examples() {
    let a2 = lemma_oracle("A2", &[1.0, 1.0]).unwrap();
    assert!((a2 - 2.0 / std::f64::consts::E).abs() < 1e-15);
    assert!((a2 - 0.735_759).abs() < 1e-6);
    assert!((lemma_oracle("A3", &[1.0, 1.0]).unwrap() - 2.5).abs() < 1e-15);
    for lambda in [0.5, 1.0, 7.0] {
        let full = lemma_oracle("A4a", &[lambda, 0.0, 2.0, 2.0]).unwrap();
        assert!((full - 2.0).abs() < 1e-14);
        assert!(lemma_oracle("A4b", &[lambda, 0.0, 2.0, 2.0]).unwrap().abs() < 1e-15);
    }
    // sum_k lambda^k / (k! (k + 2)) by direct summation
    for lambda in [0.1f64, 1.0, 4.0] {
        let mut term = 1.0;
        let mut series = 0.0;
        for k in 0..80 {
            if k > 0 {
                term *= lambda / k as f64;
            }
            series += term / (k as f64 + 2.0);
        }
        assert!((lemma_oracle("A1", &[lambda]).unwrap() - series).abs() < 1e-12 * series);
    }
    assert_eq!(lemma_oracle("A7", &[1.0, 1.0]).unwrap(), 20.0);
    assert!(matches!(
        lemma_oracle("A9", &[1.0]),
        Err(hycov_core::Error::Domain(_))
    ));
    assert!(lemma_oracle("A2", &[1.0]).is_err());
}

#[test]
fn squared_gaps_of_the_unit_process_scale_like_two_over_rate() {
    let (n, p1) = (10_000.0, 1.0);
    let e = LemmaExperiment::MeasureI {
        n,
        p1,
        horizon: 1.0,
    };
    let reps = 2000u64;
    let xs: Vec<f64> = (0..reps)
        .map(|r| e.sample(&mut stream(derive_seed(55, r), Stream::Auxiliary)))
        .collect();
    let m = xs.iter().sum::<f64>() / reps as f64;
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let se = sd / (reps as f64).sqrt();
    assert!((m - 2.0 / p1).abs() <= 3.0 * se, "{m} +- {se}");
    // the finite-n mean differs from the limit by 2 / (n p1)
    assert!((n * lemma_a2(n * p1, 1.0) - 2.0 / p1).abs() < 2.1 / n);
}

fn scale(c: &Curve, s: f64) -> Curve {
    match c.clone() {
        Curve::Constant { value } => Curve::constant(s * value),
        Curve::Linear { intercept, slope } => Curve::linear(s * intercept, s * slope),
        Curve::Sinusoidal {
            mean,
            amplitude,
            frequency,
            phase,
        } => Curve::Sinusoidal {
            mean: s * mean,
            amplitude: s * amplitude,
            frequency,
            phase,
        },
        Curve::PiecewiseLinear { knots } => Curve::PiecewiseLinear {
            knots: knots.into_iter().map(|(t, v)| (t, s * v)).collect(),
        },
    }
}

fn drift() -> impl Strategy<Value = DriftSpec> {
    let curve = || {
        prop_oneof![
            (-2.0f64..2.0).prop_map(Curve::constant),
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Curve::linear(a, b))
        ]
    };
    (
        -3.0f64..3.0,
        -3.0f64..3.0,
        curve(),
        curve(),
        curve(),
        curve(),
        curve(),
        curve(),
    )
        .prop_map(|(b1, b2, bv1, bv2, d11, d12, d21, d22)| DriftSpec {
            beta0_1: b1,
            beta0_2: b2,
            beta_bv_1: bv1,
            beta_bv_2: bv2,
            beta_diff: [[d11, d12], [d21, d22]],
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn variance_constant_from_limit_measures(model in smooth_model(), p1 in 0.2f64..5.0, p2 in 0.2f64..5.0) {
        let direct = compute_c(&model, p1, p2).unwrap();
        let measures = poisson_limit_measures(p1, p2).unwrap().c(&model);
        prop_assert!((direct - measures).abs() < 1e-10 * direct.abs().max(1.0), "{} vs {}", direct, measures);
        prop_assert!(direct > 0.0);
    }

    #[test]
    fn drift_constant_from_limit_measures(
        s1 in positive_curve(),
        s2 in positive_curve(),
        r in correlation_curve(),
        d in drift(),
        p1 in 0.2f64..5.0,
        p2 in 0.2f64..5.0,
    ) {
        let m = ModelSpec::new(1.0, s1, s2, r).unwrap().with_drift(d).unwrap();
        let direct = compute_a(&m, p1, p2).unwrap();
        let measures = poisson_limit_measures(p1, p2).unwrap().drift_a(&m);
        prop_assert!((direct - measures).abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn variance_constant_is_quadratic_in_scale(model in smooth_model(), s in 0.2f64..4.0, p1 in 0.2f64..5.0, p2 in 0.2f64..5.0) {
        let scaled = ModelSpec::new(1.0, scale(model.sigma1(), s), model.sigma2().clone(), model.rho().clone()).unwrap();
        let (c0, c1) = (compute_c(&model, p1, p2).unwrap(), compute_c(&scaled, p1, p2).unwrap());
        prop_assert!((c1 - s * s * c0).abs() < 1e-9 * c1.abs().max(1.0));
    }

    #[test]
    fn kappa_is_odd_in_rho(s1 in positive_curve(), s2 in positive_curve(), r in -0.95f64..0.95, p1 in 0.2f64..5.0, p2 in 0.2f64..5.0) {
        let plus = ModelSpec::new(1.0, s1.clone(), s2.clone(), Curve::constant(r)).unwrap();
        let minus = ModelSpec::new(1.0, s1, s2, Curve::constant(-r)).unwrap();
        let (k1, k2) = (compute_kappa(&plus, p1, p2).unwrap(), compute_kappa(&minus, p1, p2).unwrap());
        prop_assert!((k1 + k2).abs() < 1e-12 * k1.abs().max(1.0));
    }
}
