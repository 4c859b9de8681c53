#![allow(dead_code)]

use hycov_core::model::Curve;
use hycov_core::{ModelSpec, Partition, SamplingScheme};
use proptest::prelude::*;

pub fn positive_curve() -> impl Strategy<Value = Curve> {
    prop_oneof![
        (0.3f64..2.5).prop_map(Curve::constant),
        (0.5f64..2.0, -0.4f64..0.4).prop_map(|(a, b)| Curve::linear(a, b)),
        (0.6f64..2.0, 0.0f64..0.5, 0.2f64..3.0, 0.0f64..6.3).prop_map(|(m, a, f, p)| {
            Curve::Sinusoidal {
                mean: m,
                amplitude: a * m,
                frequency: f,
                phase: p,
            }
        }),
    ]
}

pub fn correlation_curve() -> impl Strategy<Value = Curve> {
    prop_oneof![
        (-0.95f64..0.95).prop_map(Curve::constant),
        (-0.6f64..0.6, -0.3f64..0.3).prop_map(|(a, b)| Curve::linear(a, b)),
        (-0.6f64..0.6, 0.0f64..0.3, 0.2f64..3.0, 0.0f64..6.3).prop_map(|(m, a, f, p)| {
            Curve::Sinusoidal {
                mean: m,
                amplitude: a,
                frequency: f,
                phase: p,
            }
        }),
    ]
}

/// Smooth coefficients on `[0, 1]`.
pub fn smooth_model() -> impl Strategy<Value = ModelSpec> {
    (positive_curve(), positive_curve(), correlation_curve())
        .prop_map(|(s1, s2, r)| ModelSpec::new(1.0, s1, s2, r).expect("valid model"))
}

fn partition_from(mut interior: Vec<f64>) -> Partition {
    interior.retain(|t| *t > 1e-9 && *t < 1.0 - 1e-9);
    interior.sort_by(f64::total_cmp);
    interior.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut pts = vec![0.0];
    pts.extend(interior);
    pts.push(1.0);
    Partition::new(pts).expect("valid partition")
}

/// Schemes on `[0, 1]` with at most `max` intervals per side: Poisson draws,
/// shared breakpoints, one long interval against a fine grid, tiny cells and
/// synchronous grids.
pub fn scheme(max: usize) -> impl Strategy<Value = SamplingScheme> {
    let pts = move || prop::collection::vec(0.0f64..1.0, 0..max);
    prop_oneof![
        (
            1u64..(max as u64 / 2).max(2),
            0.3f64..2.0,
            0.3f64..2.0,
            any::<u64>()
        )
            .prop_filter_map("too many points", move |(n, p1, p2, seed)| {
                let s = SamplingScheme::poisson(n, p1, p2, 1.0, seed).ok()?;
                (s.pi1().len() <= max && s.pi2().len() <= max).then_some(s)
            }),
        (pts(), pts())
            .prop_map(|(a, b)| SamplingScheme::new(partition_from(a), partition_from(b)).unwrap()),
        (pts(), prop::collection::vec(any::<bool>(), max), pts()).prop_map(move |(a, keep, b)| {
            let mut shared: Vec<f64> = a
                .iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(t, _)| *t)
                .collect();
            shared.extend(b);
            shared.truncate(max - 1);
            SamplingScheme::new(partition_from(a), partition_from(shared)).unwrap()
        }),
        (1usize..max, 0.01f64..0.99).prop_map(|(n, c)| {
            let fine = Partition::uniform(n, 1.0).unwrap();
            let coarse = partition_from(vec![c]);
            SamplingScheme::new(coarse, fine).unwrap()
        }),
        (pts(), 0.0f64..0.98, 1usize..8).prop_map(move |(a, at, k)| {
            let cluster: Vec<f64> = (0..k).map(|j| at + 1e-4 * (j + 1) as f64).collect();
            SamplingScheme::new(partition_from(a), partition_from(cluster)).unwrap()
        }),
        (1usize..max)
            .prop_map(|n| SamplingScheme::synchronous(Partition::uniform(n, 1.0).unwrap())),
    ]
}

pub fn overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
