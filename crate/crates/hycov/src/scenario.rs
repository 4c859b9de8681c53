//! Scenario files: one JSON document describing the model, the sampling
//! design, the experiment and where results go.

use std::path::{Path, PathBuf};

use hycov_core::asymptotics::LemmaExperiment;
use hycov_core::montecarlo::{Experiment, ExperimentConfig, SamplingSpec};
use hycov_core::{ModelSpec, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn default_replicates() -> usize {
    1000
}

fn default_lemma_replicates() -> usize {
    100_000
}

fn default_true() -> bool {
    true
}

fn default_substeps() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub densities: Vec<Variant>,
    #[serde(default = "default_true")]
    pub drift: bool,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_n: Option<f64>,
    #[serde(default)]
    pub cumulants: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_a: Option<f64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            replicates: default_replicates(),
            densities: Vec::new(),
            drift: true,
            substeps: default_substeps(),
            b_n: None,
            cumulants: false,
            event_a: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Default destination of the command output (stdout when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Sorted statistics with their ECDF and reference CDFs, written by
    /// `experiment`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecdf_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSection {
    #[serde(default = "default_lemma_replicates")]
    pub replicates: usize,
    #[serde(default = "standard_lemmas")]
    pub experiments: Vec<LemmaExperiment>,
}

impl Default for LemmaSection {
    fn default() -> Self {
        Self {
            replicates: default_lemma_replicates(),
            experiments: standard_lemmas(),
        }
    }
}

/// The closed-form checks plus the simulated constant `nu`.
pub fn standard_lemmas() -> Vec<LemmaExperiment> {
    let mut v = LemmaExperiment::standard_set().to_vec();
    v.push(LemmaExperiment::A8 {
        n: 500.0,
        p1: 1.0,
        p2: 2.0,
        horizon: 1.0,
    });
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelSpec,
    pub sampling: SamplingSpec,
    pub seed: u64,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub lemmas: LemmaSection,
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        Experiment::new(self.experiment_config(None))?;
        if self.lemmas.replicates == 0 {
            return Err(CliError::config("lemmas.replicates must be at least 1"));
        }
        for l in &self.lemmas.experiments {
            l.validate()?;
        }
        Ok(())
    }

    pub fn experiment_config(&self, seed: Option<u64>) -> ExperimentConfig {
        let e = &self.experiment;
        ExperimentConfig {
            model: self.model.clone(),
            sampling: self.sampling.clone(),
            replicates: e.replicates,
            seed: seed.unwrap_or(self.seed),
            densities: e.densities.clone(),
            drift: e.drift,
            substeps: e.substeps,
            b_n: e.b_n,
            cumulants: e.cumulants,
            event_a: e.event_a,
        }
    }

    pub fn experiment(&self, seed: Option<u64>) -> CliResult<Experiment> {
        Ok(Experiment::new(self.experiment_config(seed))?)
    }
}
