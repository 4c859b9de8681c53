//! Numerical core for the Hayashi-Yoshida covariation estimator.
//!
//! The crate is `no_std` (it only needs `alloc`) and covers everything that is
//! pure computation: the diffusion model and its integrated quantities, the
//! asynchronous sampling schemes, exact simulation, the estimator itself, its
//! finite-sample cumulants (three independent engines), the Edgeworth-type
//! expansion densities, the Poisson-regime constants and the per-replicate
//! Monte Carlo kernel. Parallel orchestration, file formats and the CLI live
//! in the companion `hycov` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymptotics;
pub mod cumulants;
pub mod edgeworth;
pub mod estimator;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod simulate;

mod error;

pub use error::{Error, Result};

pub use asymptotics::{AsymptoticConstants, LimitMeasures};
pub use cumulants::{CumulantReport, GaussianQuadForm, IntervalMoments};
pub use edgeworth::{DensityParams, EdgeworthDensity, Variant};
pub use estimator::{hy_estimate, sync_estimate, EstimateResult};
pub use model::{Curve, DriftSpec, ModelSpec};
pub use montecarlo::{
    Experiment, ExperimentConfig, ExperimentResult, ReplicateOutcome, SamplingSpec,
};
pub use sampling::{OverlapIndex, Partition, SamplingScheme};
pub use simulate::{simulate_exact, simulate_with_drift, ObservedPath};
