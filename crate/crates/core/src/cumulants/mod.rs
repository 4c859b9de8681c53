//! Finite-sample cumulants of the estimator, computed three ways: traces of
//! matrix powers, interval sums and chain sums.

mod chains;
mod charfn;
mod intervals;
mod moments;
mod quadform;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use chains::{mu2_chains, mu3_chains};
pub use charfn::{
    alpha_bar, char_fn, char_fn_expansion_bound, char_fn_modulus, char_fn_tail_bound,
    log_char_fn_centered,
};
pub use intervals::{mu2_intervals, mu3_intervals};
pub use moments::IntervalMoments;
pub use quadform::{GaussianQuadForm, MAX_DENSE_DIM};

use crate::error::domain;
use crate::model::ModelSpec;
use crate::sampling::SamplingScheme;
use crate::Result;

pub(crate) fn ipow(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * x)
}

/// `(lambda_bar_2, lambda_bar_3) = (2 mu_2 / b, 8 mu_3 / b^2)`.
pub fn normalized_cumulants(mu2: f64, mu3: f64, b_n: f64) -> Result<(f64, f64)> {
    if !(b_n > 0.0) {
        return Err(domain!("normalization b_n must be positive, got {b_n}"));
    }
    Ok((2.0 * mu2 / b_n, 8.0 * mu3 / (b_n * b_n)))
}

/// `r`-th cumulant of `b^{-1/2}(theta_hat - theta)` from `mu_r`:
/// `2^{r-1} (r-1)! b^{-r/2} mu_r`.
pub fn standardized_cumulant(r: u32, mu_r: f64, b_n: f64) -> f64 {
    let fact: f64 = (1..r).map(|k| k as f64).product();
    ipow(2.0, r - 1) * fact * libm::pow(b_n, -(r as f64) / 2.0) * mu_r
}

/// `c_r alpha^{r-2} lambda_bar_2` with `c_r = 2^{r-2} (r-1)!`.
pub fn cumulant_bound(r: u32, alpha_n: f64, lambda_bar2: f64) -> f64 {
    let fact: f64 = (1..r).map(|k| k as f64).product();
    ipow(2.0, r - 2) * fact * ipow(alpha_n, r - 2) * lambda_bar2
}

/// One quantity computed by every engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineValues {
    /// `None` when the dense trace engine was skipped.
    pub trace: Option<f64>,
    pub intervals: f64,
    pub chains: f64,
}

impl EngineValues {
    /// Largest pairwise relative difference.
    pub fn max_relative_gap(&self) -> f64 {
        let mut vals: Vec<f64> = alloc::vec![self.intervals, self.chains];
        vals.extend(self.trace);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        if scale == 0.0 {
            return 0.0;
        }
        let mut gap = 0.0f64;
        for a in &vals {
            for b in &vals {
                gap = gap.max(libm::fabs(a - b));
            }
        }
        gap / scale
    }
}

/// A computed value next to the bound it must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

impl BoundCheck {
    pub fn new(value: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            slack: bound - value,
        }
    }

    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantReport {
    pub n1: usize,
    pub n2: usize,
    pub overlaps: usize,
    /// Integrated covariation of the model over `[0, T]`.
    pub theta: f64,
    /// `tr[Sigma A]`, when the dense engine ran.
    pub theta_trace: Option<f64>,
    pub mu2: EngineValues,
    pub mu3: EngineValues,
    pub mu4: Option<f64>,
    pub eigenvalues: Option<Vec<f64>>,
    pub lambda_bar2: f64,
    pub lambda_bar3: f64,
    pub r_n: f64,
    pub sigma_sup: f64,
    pub alpha_n: f64,
    pub b_n: f64,
    /// `max lambda^2` against `3 sigma^4 r_n^2`.
    pub eigen_bound: Option<BoundCheck>,
    /// `|kappa_r|` against `c_r alpha_n^{r-2} lambda_bar_2` for `r = 3, 4`.
    pub cumulant_bounds: Vec<(u32, BoundCheck)>,
}

impl CumulantReport {
    pub fn max_engine_gap(&self) -> f64 {
        self.mu2.max_relative_gap().max(self.mu3.max_relative_gap())
    }

    pub fn bounds_hold(&self) -> bool {
        self.eigen_bound.is_none_or(|b| b.holds())
            && self.cumulant_bounds.iter().all(|(_, b)| b.holds())
    }
}

/// Runs the interval and chain engines and, when `dense` is set and the
/// dimension allows it, the trace engine with the eigenvalue bounds.
pub fn cumulant_report(
    model: &ModelSpec,
    scheme: &SamplingScheme,
    b_n: f64,
    dense: bool,
) -> Result<CumulantReport> {
    let m = IntervalMoments::new(model, scheme)?;
    let mu2 = EngineValues {
        trace: None,
        intervals: mu2_intervals(&m),
        chains: mu2_chains(&m),
    };
    let mu3 = EngineValues {
        trace: None,
        intervals: mu3_intervals(&m),
        chains: mu3_chains(&m),
    };
    let (lambda_bar2, lambda_bar3) = normalized_cumulants(mu2.intervals, mu3.intervals, b_n)?;
    let r_n = scheme.mesh();
    let sigma_sup = model.sup_sigma();
    let alpha_n = libm::sqrt(3.0) * sigma_sup * sigma_sup * r_n / libm::sqrt(b_n);

    let mut report = CumulantReport {
        n1: m.n1(),
        n2: m.n2(),
        overlaps: m.index.count(),
        theta: model.theta(),
        theta_trace: None,
        mu2,
        mu3,
        mu4: None,
        eigenvalues: None,
        lambda_bar2,
        lambda_bar3,
        r_n,
        sigma_sup,
        alpha_n,
        b_n,
        eigen_bound: None,
        cumulant_bounds: Vec::new(),
    };
    let k3 = standardized_cumulant(3, mu3.intervals, b_n);
    report.cumulant_bounds.push((
        3,
        BoundCheck::new(libm::fabs(k3), cumulant_bound(3, alpha_n, lambda_bar2)),
    ));

    if dense && m.n1() + m.n2() <= MAX_DENSE_DIM {
        let qf = GaussianQuadForm::new(&m)?;
        report.theta_trace = Some(qf.mu_k_trace(1)?);
        report.mu2.trace = Some(qf.mu_k_trace(2)?);
        report.mu3.trace = Some(qf.mu_k_trace(3)?);
        let mu4 = qf.mu_k_trace(4)?;
        report.mu4 = Some(mu4);
        let k4 = standardized_cumulant(4, mu4, b_n);
        report.cumulant_bounds.push((
            4,
            BoundCheck::new(libm::fabs(k4), cumulant_bound(4, alpha_n, lambda_bar2)),
        ));
        let eig = qf.eigenvalues()?;
        let max2 = eig.iter().fold(0.0f64, |acc, l| acc.max(l * l));
        let s4 = ipow(sigma_sup, 4);
        report.eigen_bound = Some(BoundCheck::new(max2, 3.0 * s4 * r_n * r_n));
        report.eigenvalues = Some(eig);
    }
    Ok(report)
}
