//! Parallel execution. Replicates are mapped in parallel and collected in
//! index order, so results do not depend on the number of workers.

use hycov_core::asymptotics::{Estimate, LemmaExperiment};
use hycov_core::montecarlo::{estimate, Experiment, ExperimentResult, ReplicateOutcome};
use hycov_core::rng::{derive_seed, replicate_stream, Stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Consistency(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_experiment(exp: &Experiment) -> CliResult<(ExperimentResult, Vec<ReplicateOutcome>)> {
    let outcomes = (0..exp.config().replicates as u64)
        .into_par_iter()
        .map(|i| exp.replicate(i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((exp.summarize(&outcomes)?, outcomes))
}

const LEMMA_BLOCK: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub experiment: LemmaExperiment,
    pub target: Option<f64>,
    pub estimate: Estimate,
    /// `(mean - target) / se`.
    pub z: Option<f64>,
    /// Within three standard errors of the target.
    pub passed: Option<bool>,
}

/// Draws `replicates` samples of experiment number `slot`, in blocks with
/// their own streams.
pub fn lemma_samples(l: &LemmaExperiment, replicates: usize, seed: u64, slot: u64) -> Vec<f64> {
    let base = derive_seed(seed, slot);
    let blocks = replicates.div_ceil(LEMMA_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = replicate_stream(base, b as u64, Stream::Auxiliary);
            let len = LEMMA_BLOCK.min(replicates - b * LEMMA_BLOCK);
            (0..len).map(|_| l.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

pub fn check_lemma(
    l: &LemmaExperiment,
    replicates: usize,
    seed: u64,
    slot: u64,
) -> CliResult<LemmaCheck> {
    l.validate()?;
    let xs = lemma_samples(l, replicates, seed, slot);
    let est = estimate(&xs)?;
    let target = l.target();
    let z = target.map(|t| (est.mean - t) / est.se);
    Ok(LemmaCheck {
        name: l.name().to_string(),
        experiment: *l,
        target,
        estimate: est,
        z,
        passed: z.map(|z| z.abs() <= 3.0),
    })
}

pub fn validate_lemmas(
    list: &[LemmaExperiment],
    replicates: usize,
    seed: u64,
) -> CliResult<Vec<LemmaCheck>> {
    list.iter()
        .enumerate()
        .map(|(k, l)| check_lemma(l, replicates, seed, k as u64))
        .collect()
}
