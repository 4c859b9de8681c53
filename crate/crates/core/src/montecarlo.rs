//! Replicated simulation experiments: the per-replicate kernel and the
//! deterministic reductions over its outcomes.
//!
//! Replicates only depend on the master seed and their index, so any
//! scheduler can produce them; [`Experiment::summarize`] must then see them
//! in index order for bit-identical results.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticConstants, Estimate};
use crate::cumulants::{cumulant_report, mu2_intervals, mu3_intervals, IntervalMoments};
use crate::edgeworth::{gaussian_cdf, DensityParams, EdgeworthDensity, Variant};
use crate::error::{domain, invalid};
use crate::estimator::{hy_with_index, CompensatedSum};
use crate::model::ModelSpec;
use crate::rng::derive_seed;
use crate::sampling::{OverlapIndex, Partition, SamplingScheme};
use crate::simulate::{simulate_exact, simulate_with_drift, ObservedPath};
use crate::Result;

/// How each replicate obtains its sampling scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingSpec {
    /// Fresh Poisson arrivals with intensities `n p1`, `n p2` per replicate.
    Poisson { n: u64, p1: f64, p2: f64 },
    /// One uniform scheme shared by all replicates.
    Uniform { n1: usize, n2: usize },
    /// One explicit scheme shared by all replicates.
    Fixed { scheme: SamplingScheme },
}

fn default_true() -> bool {
    true
}

fn default_substeps() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub sampling: SamplingSpec,
    pub replicates: usize,
    pub seed: u64,
    /// Expansions compared with the empirical distribution, besides the
    /// Gaussian limit.
    #[serde(default)]
    pub densities: Vec<Variant>,
    /// Use the model drift when it has one.
    #[serde(default = "default_true")]
    pub drift: bool,
    /// Euler substeps per merged-grid cell when the drift is on.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Normalization `b_n`; defaults to `1/n` (Poisson) or `T / max(N1, N2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_n: Option<f64>,
    /// Compute `mu_2`, `mu_3` of every replicate scheme.
    #[serde(default)]
    pub cumulants: bool,
    /// Exponent `a` of the event `A_n(a)`; requires `cumulants`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_a: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, sampling: SamplingSpec, replicates: usize, seed: u64) -> Self {
        Self {
            model,
            sampling,
            replicates,
            seed,
            densities: Vec::new(),
            drift: true,
            substeps: default_substeps(),
            b_n: None,
            cumulants: false,
            event_a: None,
        }
    }
}

/// What one replicate produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub index: u64,
    pub theta_hat: f64,
    /// `b_n^{-1/2} (theta_hat - theta)`.
    pub x: f64,
    pub n1: usize,
    pub n2: usize,
    pub r_n: f64,
    pub mu2: Option<f64>,
    pub mu3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub se_mean: f64,
    pub variance: f64,
    pub se_variance: f64,
    /// Third central moment.
    pub third: f64,
    pub se_third: f64,
    pub skewness: f64,
}

/// Mean, variance and third central moment with delta-method standard
/// errors. With fewer than two samples the errors are infinite.
pub fn sample_moments(xs: &[f64]) -> Result<SampleMoments> {
    if xs.is_empty() {
        return Err(domain!("no samples"));
    }
    let n = xs.len() as f64;
    let mut s = CompensatedSum::default();
    for &x in xs {
        s.add(x);
    }
    let mean = s.value() / n;
    let mut m = [
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    ];
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m[0].add(d2);
        m[1].add(d2 * d);
        m[2].add(d2 * d2);
        m[3].add(d2 * d2 * d);
        m[4].add(d2 * d2 * d2);
    }
    let [m2, m3, m4, _, m6] = m.map(|c| c.value() / n);
    let (se_mean, se_variance, se_third) = if xs.len() < 2 {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        let var3 = m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2 * m2 * m2;
        (
            libm::sqrt(m2 / n),
            libm::sqrt((m4 - m2 * m2).max(0.0) / n),
            libm::sqrt(var3.max(0.0) / n),
        )
    };
    let skewness = if m2 > 0.0 {
        m3 / libm::pow(m2, 1.5)
    } else {
        0.0
    };
    Ok(SampleMoments {
        count: xs.len(),
        mean,
        se_mean,
        variance: m2,
        se_variance,
        third: m3,
        se_third,
        skewness,
    })
}

/// Mean of `xs` with its standard error.
pub fn estimate(xs: &[f64]) -> Result<Estimate> {
    let m = sample_moments(xs)?;
    Ok(Estimate {
        mean: m.mean,
        se: m.se_mean,
        replicates: xs.len() as u64,
    })
}

/// `sup_k |F_R(x_k) - F(x_k)|` over the sample points, with the right-continuous
/// empirical distribution function `F_R`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(domain!("no samples"));
    }
    let mut sorted = samples.to_owned();
    sorted.sort_by(f64::total_cmp);
    Ok(ks_distance_sorted(&sorted, cdf))
}

/// [`ks_distance`] for samples already in ascending order.
pub fn ks_distance_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut k = 0;
    while k < sorted.len() {
        let x = sorted[k];
        while k < sorted.len() && sorted[k] == x {
            k += 1;
        }
        d = d.max(libm::fabs(k as f64 / n - cdf(x)));
    }
    d
}

/// A distribution the standardized statistic is compared with.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Gaussian { variance: f64 },
    Expansion(EdgeworthDensity),
}

impl Reference {
    pub fn name(&self) -> &'static str {
        match self {
            Reference::Gaussian { .. } => "gaussian",
            Reference::Expansion(d) => d.variant.name(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Reference::Gaussian { variance } => gaussian_cdf(x, *variance),
            Reference::Expansion(d) => d.cdf(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEntry {
    pub reference: String,
    pub distance: f64,
}

/// Scheme cumulants across replicates against their Poisson limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantConvergence {
    /// `lambda_bar_2 = 2 mu_2 / b_n`.
    pub lambda_bar2: Estimate,
    /// `mu_3 / b_n^2`.
    pub scaled_mu3: Estimate,
    pub target_lambda_bar2: Option<f64>,
    /// `3 kappa / 2`.
    pub target_scaled_mu3: Option<f64>,
    pub relative_gap_lambda_bar2: Option<f64>,
    pub relative_gap_scaled_mu3: Option<f64>,
}

/// Frequency of `A_n(a) = {(lambda_bar_2 - c)^2 <= b^{2a-1}, r_n <= b^a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventFrequency {
    pub a: f64,
    pub replicates: usize,
    pub outside: usize,
    pub complement_frequency: f64,
    /// Replicates failing only the mesh condition.
    pub mesh_failures: usize,
    /// Replicates failing only the variance condition.
    pub variance_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub replicates: usize,
    pub seed: u64,
    pub b_n: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<AsymptoticConstants>,
    /// Variance and third cumulant the statistic should have to first order.
    pub expected_variance: f64,
    pub expected_third: f64,
    pub theta_hat: Estimate,
    pub moments: SampleMoments,
    pub ks: Vec<KsEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulants: Option<CumulantConvergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<EventFrequency>,
}

impl ExperimentResult {
    pub fn ks_for(&self, reference: &str) -> Option<f64> {
        self.ks
            .iter()
            .find(|e| e.reference == reference)
            .map(|e| e.distance)
    }
}

struct FixedScheme {
    scheme: SamplingScheme,
    index: OverlapIndex,
    mu2: f64,
    mu3: f64,
}

/// A validated configuration with everything shared by the replicates
/// precomputed.
pub struct Experiment {
    config: ExperimentConfig,
    model: ModelSpec,
    theta: f64,
    b_n: f64,
    constants: Option<AsymptoticConstants>,
    fixed: Option<FixedScheme>,
    references: Vec<Reference>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        if config.replicates == 0 {
            return Err(invalid!("replicates must be at least 1"));
        }
        if config.substeps == 0 {
            return Err(invalid!("substeps must be at least 1"));
        }
        let model = if config.drift {
            config.model.clone()
        } else {
            config.model.without_drift()
        };
        let horizon = model.horizon();
        let (fixed, constants, default_b) = match &config.sampling {
            SamplingSpec::Poisson { n, p1, p2 } => {
                if *n == 0 {
                    return Err(invalid!("n must be at least 1"));
                }
                let constants = AsymptoticConstants::compute(&model, *p1, *p2)?;
                (None, Some(constants), 1.0 / *n as f64)
            }
            SamplingSpec::Uniform { n1, n2 } => {
                let scheme = SamplingScheme::new(
                    Partition::uniform(*n1, horizon)?,
                    Partition::uniform(*n2, horizon)?,
                )?;
                (Some(scheme), None, horizon / (*n1).max(*n2) as f64)
            }
            SamplingSpec::Fixed { scheme } => {
                if scheme.horizon() != horizon {
                    return Err(invalid!(
                        "scheme horizon {} differs from the model horizon {horizon}",
                        scheme.horizon()
                    ));
                }
                let n = scheme.pi1().len().max(scheme.pi2().len());
                (Some(scheme.clone()), None, horizon / n as f64)
            }
        };
        let b_n = config.b_n.unwrap_or(default_b);
        if !(b_n > 0.0 && b_n.is_finite()) {
            return Err(domain!("b_n must be positive, got {b_n}"));
        }
        if let Some(a) = config.event_a {
            if !config.cumulants || constants.is_none() {
                return Err(invalid!(
                    "event_a needs Poisson sampling with cumulants enabled"
                ));
            }
            if !(a > 0.0 && a < 1.0) {
                return Err(domain!("event exponent must lie in (0, 1), got {a}"));
            }
        }
        let fixed = match fixed {
            Some(scheme) => {
                let report = cumulant_report(&model, &scheme, b_n, false)?;
                let index = scheme.overlaps();
                Some(FixedScheme {
                    scheme,
                    index,
                    mu2: report.mu2.intervals,
                    mu3: report.mu3.intervals,
                })
            }
            None => None,
        };
        let mut references = Vec::with_capacity(config.densities.len() + 1);
        let params = match (&constants, &fixed) {
            (Some(k), _) => DensityParams {
                variance: k.c,
                lambda3: 12.0 * k.kappa,
                b_n,
                lambda_bar2: None,
                drift_a: Some(k.a),
            },
            (None, Some(f)) => {
                let (l2, l3) = crate::cumulants::normalized_cumulants(f.mu2, f.mu3, b_n)?;
                DensityParams::new(l2, l3, b_n)
            }
            (None, None) => unreachable!(),
        };
        references.push(Reference::Gaussian {
            variance: params.variance,
        });
        for &v in &config.densities {
            let allowed = match v {
                Variant::ConditionalP3n => fixed.is_some(),
                Variant::ConditionalTilde => false,
                _ => constants.is_some(),
            };
            if !allowed {
                return Err(invalid!(
                    "density {} cannot be compared under this sampling mode",
                    v.name()
                ));
            }
            references.push(Reference::Expansion(EdgeworthDensity::new(v, params)?));
        }
        let theta = model.theta();
        Ok(Self {
            config,
            model,
            theta,
            b_n,
            constants,
            fixed,
            references,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn b_n(&self) -> f64 {
        self.b_n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn constants(&self) -> Option<&AsymptoticConstants> {
        self.constants.as_ref()
    }

    pub fn references(&self) -> &[Reference] {
        &self.references
    }

    /// The scheme replicate `index` samples on.
    pub fn scheme(&self, index: u64) -> Result<SamplingScheme> {
        match (&self.config.sampling, &self.fixed) {
            (SamplingSpec::Poisson { n, p1, p2 }, _) => SamplingScheme::poisson(
                *n,
                *p1,
                *p2,
                self.model.horizon(),
                derive_seed(self.config.seed, index),
            ),
            (_, Some(f)) => Ok(f.scheme.clone()),
            _ => unreachable!(),
        }
    }

    fn path_on(&self, scheme: &SamplingScheme, seed: u64) -> Result<ObservedPath> {
        if self.model.drift().is_some() {
            simulate_with_drift(&self.model, scheme, self.config.substeps, seed)
        } else {
            simulate_exact(&self.model, scheme, seed)
        }
    }

    /// The scheme and observations of replicate `index`.
    pub fn observe(&self, index: u64) -> Result<(SamplingScheme, ObservedPath)> {
        let scheme = self.scheme(index)?;
        let path = self.path_on(&scheme, derive_seed(self.config.seed, index))?;
        Ok((scheme, path))
    }

    pub fn replicate(&self, index: u64) -> Result<ReplicateOutcome> {
        let seed = derive_seed(self.config.seed, index);
        let owned;
        let (scheme, idx_owned, idx_ref): (
            &SamplingScheme,
            Option<OverlapIndex>,
            Option<&OverlapIndex>,
        ) = match &self.fixed {
            Some(f) => (&f.scheme, None, Some(&f.index)),
            None => {
                owned = self.scheme(index)?;
                let idx = owned.overlaps();
                (&owned, Some(idx), None)
            }
        };
        let idx = idx_ref.or(idx_owned.as_ref()).expect("an overlap index");
        let path = self.path_on(scheme, seed)?;
        let theta_hat = hy_with_index(&path, idx).theta_hat;
        let (mu2, mu3) = if self.config.cumulants && self.fixed.is_none() {
            let m = IntervalMoments::new(&self.model, scheme)?;
            (Some(mu2_intervals(&m)), Some(mu3_intervals(&m)))
        } else {
            (None, None)
        };
        Ok(ReplicateOutcome {
            index,
            theta_hat,
            x: (theta_hat - self.theta) / libm::sqrt(self.b_n),
            n1: scheme.pi1().len(),
            n2: scheme.pi2().len(),
            r_n: scheme.mesh(),
            mu2,
            mu3,
        })
    }

    /// Reduces the outcomes, which must be those of replicates `0..R` in order.
    pub fn summarize(&self, outcomes: &[ReplicateOutcome]) -> Result<ExperimentResult> {
        if outcomes.len() != self.config.replicates
            || outcomes
                .iter()
                .enumerate()
                .any(|(k, o)| o.index != k as u64)
        {
            return Err(invalid!(
                "outcomes must be replicates 0..{} in order",
                self.config.replicates
            ));
        }
        let b = self.b_n;
        let xs: Vec<f64> = outcomes.iter().map(|o| o.x).collect();
        let hats: Vec<f64> = outcomes.iter().map(|o| o.theta_hat).collect();
        let moments = sample_moments(&xs)?;
        let mut sorted = xs;
        sorted.sort_by(f64::total_cmp);
        let ks = self
            .references
            .iter()
            .map(|r| KsEntry {
                reference: r.name().into(),
                distance: ks_distance_sorted(&sorted, |x| r.cdf(x)),
            })
            .collect();

        let (expected_variance, expected_third) = match (&self.constants, &self.fixed) {
            (Some(k), _) => (k.c, libm::sqrt(b) * 12.0 * k.kappa),
            (None, Some(f)) => (2.0 * f.mu2 / b, 8.0 * f.mu3 / (b * libm::sqrt(b))),
            (None, None) => unreachable!(),
        };

        let cumulants = if !self.config.cumulants {
            None
        } else if let Some(f) = &self.fixed {
            let point = |v: f64| Estimate {
                mean: v,
                se: 0.0,
                replicates: outcomes.len() as u64,
            };
            Some(CumulantConvergence {
                lambda_bar2: point(2.0 * f.mu2 / b),
                scaled_mu3: point(f.mu3 / (b * b)),
                target_lambda_bar2: None,
                target_scaled_mu3: None,
                relative_gap_lambda_bar2: None,
                relative_gap_scaled_mu3: None,
            })
        } else {
            let l2: Vec<f64> = outcomes
                .iter()
                .map(|o| 2.0 * o.mu2.unwrap_or(f64::NAN) / b)
                .collect();
            let s3: Vec<f64> = outcomes
                .iter()
                .map(|o| o.mu3.unwrap_or(f64::NAN) / (b * b))
                .collect();
            let lambda_bar2 = estimate(&l2)?;
            let scaled_mu3 = estimate(&s3)?;
            let k = self.constants.as_ref();
            let t2 = k.map(|k| k.c);
            let t3 = k.map(|k| 1.5 * k.kappa);
            let gap = |m: f64, t: Option<f64>| {
                t.filter(|t| *t != 0.0)
                    .map(|t| libm::fabs(m - t) / libm::fabs(t))
            };
            Some(CumulantConvergence {
                lambda_bar2,
                scaled_mu3,
                target_lambda_bar2: t2,
                target_scaled_mu3: t3,
                relative_gap_lambda_bar2: gap(lambda_bar2.mean, t2),
                relative_gap_scaled_mu3: gap(scaled_mu3.mean, t3),
            })
        };

        let event = match (self.config.event_a, &self.constants) {
            (Some(a), Some(k)) => Some(event_frequency(outcomes, a, b, k.c)),
            _ => None,
        };

        Ok(ExperimentResult {
            replicates: outcomes.len(),
            seed: self.config.seed,
            b_n: b,
            theta: self.theta,
            constants: self.constants,
            expected_variance,
            expected_third,
            theta_hat: estimate(&hats)?,
            moments,
            ks,
            cumulants,
            event,
        })
    }

    /// Runs every replicate on the current thread.
    pub fn run_sequential(&self) -> Result<(ExperimentResult, Vec<ReplicateOutcome>)> {
        let outcomes = (0..self.config.replicates as u64)
            .map(|i| self.replicate(i))
            .collect::<Result<Vec<_>>>()?;
        Ok((self.summarize(&outcomes)?, outcomes))
    }
}

fn event_frequency(outcomes: &[ReplicateOutcome], a: f64, b: f64, c: f64) -> EventFrequency {
    let var_tol = libm::pow(b, 2.0 * a - 1.0);
    let mesh_tol = libm::pow(b, a);
    let (mut outside, mut mesh_failures, mut variance_failures) = (0, 0, 0);
    for o in outcomes {
        let l2 = 2.0 * o.mu2.unwrap_or(f64::NAN) / b;
        let var_ok = (l2 - c) * (l2 - c) <= var_tol;
        let mesh_ok = o.r_n <= mesh_tol;
        if !(var_ok && mesh_ok) {
            outside += 1;
            if var_ok {
                mesh_failures += 1;
            }
            if mesh_ok {
                variance_failures += 1;
            }
        }
    }
    EventFrequency {
        a,
        replicates: outcomes.len(),
        outside,
        complement_frequency: outside as f64 / outcomes.len() as f64,
        mesh_failures,
        variance_failures,
    }
}
