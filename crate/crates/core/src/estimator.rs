//! The Hayashi-Yoshida estimator and the synchronous realized covariance.

use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::sampling::{OverlapIndex, SamplingScheme};
use crate::simulate::ObservedPath;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    /// Number of overlapping interval pairs.
    pub n_terms: usize,
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_alignment(obs: &ObservedPath, scheme: &SamplingScheme) -> Result<()> {
    if obs.times1 != scheme.pi1().points() || obs.times2 != scheme.pi2().points() {
        return Err(domain!(
            "observation times do not match the sampling scheme"
        ));
    }
    Ok(())
}

/// `sum_{i,j} dX1(I^i) dX2(J^j) 1(I^i meets J^j)`.
pub fn hy_estimate(obs: &ObservedPath, scheme: &SamplingScheme) -> Result<EstimateResult> {
    check_alignment(obs, scheme)?;
    Ok(hy_with_index(obs, &scheme.overlaps()))
}

/// As [`hy_estimate`] with a prebuilt overlap index and no alignment check.
pub fn hy_with_index(obs: &ObservedPath, idx: &OverlapIndex) -> EstimateResult {
    let v1 = &obs.values1;
    let v2 = &obs.values2;
    let mut total = CompensatedSum::default();
    for i in 0..idx.n1() {
        let r = idx.j_range(i);
        // telescoping sum of the overlapping second-series increments
        let partial = v2[r.end] - v2[r.start];
        total.add((v1[i + 1] - v1[i]) * partial);
    }
    EstimateResult {
        theta_hat: total.value(),
        n_terms: idx.count(),
    }
}

/// `sum_i dX1(I^i) dX2(I^i)` for series observed at common times.
pub fn sync_estimate(obs: &ObservedPath) -> Result<f64> {
    if obs.times1 != obs.times2 {
        return Err(domain!(
            "synchronous estimate needs identical observation times"
        ));
    }
    let mut total = CompensatedSum::default();
    for (a, b) in obs.values1.windows(2).zip(obs.values2.windows(2)) {
        total.add((a[1] - a[0]) * (b[1] - b[0]));
    }
    Ok(total.value())
}
