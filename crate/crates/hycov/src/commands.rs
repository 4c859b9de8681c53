//! The subcommands as functions from a scenario to the text they emit.

use std::path::Path;

use hycov_core::asymptotics::{poisson_limit_measures, AsymptoticConstants, LimitMeasures};
use hycov_core::cumulants::{cumulant_report, CumulantReport};
use hycov_core::edgeworth::{DensityParams, EdgeworthDensity, Variant};
use hycov_core::estimator::hy_estimate;
use hycov_core::montecarlo::{Experiment, ReplicateOutcome, SamplingSpec};
use hycov_core::ObservedPath;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::run::{run_experiment, validate_lemmas, with_threads};
use crate::scenario::Scenario;

/// Relative tolerance for the agreement of the cumulant engines.
pub const ENGINE_TOLERANCE: f64 = 1e-9;

/// What a command produced, and whether it found an inconsistency. The
/// output is written either way.
#[derive(Debug)]
pub struct CommandOutput {
    pub body: String,
    pub failure: Option<CliError>,
}

impl CommandOutput {
    fn ok(body: String) -> Self {
        Self {
            body,
            failure: None,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Consistency(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Consistency(e.to_string()))
}

/// Observations of replicate 0 as `time,series,value` rows.
pub fn cmd_simulate(scenario: &Scenario, seed: Option<u64>) -> CliResult<CommandOutput> {
    let (_, path) = scenario.experiment(seed)?.observe(0)?;
    Ok(CommandOutput::ok(path_csv(&path)?))
}

pub fn path_csv(path: &ObservedPath) -> CliResult<String> {
    let series = |k: u8, t: &[f64], v: &[f64]| {
        t.iter()
            .zip(v)
            .map(move |(t, v)| vec![t.to_string(), k.to_string(), v.to_string()])
            .collect::<Vec<_>>()
    };
    let mut rows = series(1, &path.times1, &path.values1);
    rows.extend(series(2, &path.times2, &path.values2));
    csv_string(&["time", "series", "value"], rows.into_iter())
}

/// Reads a `time,series,value` file as written by `simulate`.
pub fn read_path_csv(text: &str) -> CliResult<ObservedPath> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["time", "series", "value"] {
        return Err(CliError::config("expected header time,series,value"));
    }
    let (mut t1, mut v1, mut t2, mut v2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| -> CliResult<f64> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("not a number: {:?}", &rec[k])))
        };
        let (t, v) = (num(0)?, num(2)?);
        match rec[1].trim() {
            "1" => {
                t1.push(t);
                v1.push(v);
            }
            "2" => {
                t2.push(t);
                v2.push(v);
            }
            s => {
                return Err(CliError::config(format!(
                    "series must be 1 or 2, got {s:?}"
                )))
            }
        }
    }
    Ok(ObservedPath::new(t1, v1, t2, v2)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub theta_hat: f64,
    pub n_terms: usize,
    pub theta: f64,
    pub b_n: f64,
    /// `b_n^{-1/2} (theta_hat - theta)`.
    pub x: f64,
    pub n1: usize,
    pub n2: usize,
}

/// The estimate on `input`, or on replicate 0 when no file is given.
pub fn cmd_estimate(
    scenario: &Scenario,
    seed: Option<u64>,
    input: Option<&Path>,
) -> CliResult<CommandOutput> {
    let exp = scenario.experiment(seed)?;
    let path = match input {
        Some(p) => read_path_csv(&std::fs::read_to_string(p)?)?,
        None => exp.observe(0)?.1,
    };
    let scheme = hycov_core::SamplingScheme::new(
        hycov_core::Partition::new(path.times1.clone())?,
        hycov_core::Partition::new(path.times2.clone())?,
    )?;
    let est = hy_estimate(&path, &scheme)?;
    let report = EstimateReport {
        theta_hat: est.theta_hat,
        n_terms: est.n_terms,
        theta: exp.theta(),
        b_n: exp.b_n(),
        x: (est.theta_hat - exp.theta()) / exp.b_n().sqrt(),
        n1: scheme.pi1().len(),
        n2: scheme.pi2().len(),
    };
    Ok(CommandOutput::ok(to_json(&report)?))
}

/// All cumulant engines and bounds on the scheme of replicate 0.
pub fn cumulants_of(scenario: &Scenario, seed: Option<u64>) -> CliResult<CumulantReport> {
    let exp = scenario.experiment(seed)?;
    let scheme = exp.scheme(0)?;
    Ok(cumulant_report(exp.model(), &scheme, exp.b_n(), true)?)
}

pub fn cmd_cumulants(scenario: &Scenario, seed: Option<u64>) -> CliResult<CommandOutput> {
    let report = cumulants_of(scenario, seed)?;
    let body = to_json(&report)?;
    let gap = report.max_engine_gap();
    let failure = if gap > ENGINE_TOLERANCE {
        Some(CliError::Consistency(format!(
            "cumulant engines differ by {gap:e} (relative)"
        )))
    } else if !report.bounds_hold() {
        Some(CliError::Consistency(
            "an eigenvalue or cumulant bound is violated".into(),
        ))
    } else {
        None
    };
    Ok(CommandOutput { body, failure })
}

/// `lo:hi:steps`, `steps` equally spaced points including both ends.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::config(format!("grid must be lo:hi:steps, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(bad());
    }
    Ok(match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
            .collect(),
    })
}

/// Parameters of `variant` under the scenario. Unconditional variants use the
/// Poisson constants; conditional ones the cumulants of replicate 0's scheme.
pub fn density_params(exp: &Experiment, variant: Variant) -> CliResult<DensityParams> {
    let b = exp.b_n();
    let conditional = || -> CliResult<(f64, f64)> {
        let r = cumulant_report(exp.model(), &exp.scheme(0)?, b, false)?;
        Ok((r.lambda_bar2, r.lambda_bar3))
    };
    let constants = exp.constants().copied();
    let need = |k: Option<AsymptoticConstants>| {
        k.ok_or_else(|| CliError::config(format!("{} needs Poisson sampling", variant.name())))
    };
    Ok(match variant {
        Variant::ConditionalP3n => {
            let (l2, l3) = conditional()?;
            DensityParams::new(l2, l3, b)
        }
        Variant::ConditionalTilde => {
            let k = need(constants)?;
            let (l2, l3) = conditional()?;
            DensityParams::new(k.c, l3, b).with_lambda_bar2(l2)
        }
        _ => {
            let k = need(constants)?;
            DensityParams::new(k.c, 12.0 * k.kappa, b).with_drift(k.a)
        }
    })
}

pub fn cmd_density(
    scenario: &Scenario,
    seed: Option<u64>,
    variant: &str,
    grid: &str,
) -> CliResult<CommandOutput> {
    let v = Variant::from_name(variant).ok_or_else(|| {
        let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
        CliError::config(format!(
            "unknown variant {variant:?}; expected one of {}",
            names.join(", ")
        ))
    })?;
    let zs = parse_grid(grid)?;
    let exp = scenario.experiment(seed)?;
    let d = EdgeworthDensity::new(v, density_params(&exp, v)?)?;
    let rows = zs.iter().map(|&z| {
        vec![
            z.to_string(),
            d.density(z).to_string(),
            d.cdf(z).to_string(),
        ]
    });
    Ok(CommandOutput::ok(csv_string(
        &["z", "density", "cdf"],
        rows,
    )?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: AsymptoticConstants,
    pub limit_measures: LimitMeasures,
    /// `c` recomputed from the limit measures.
    pub c_from_measures: f64,
}

pub fn constants_of(scenario: &Scenario) -> CliResult<ConstantsReport> {
    let SamplingSpec::Poisson { p1, p2, .. } = scenario.sampling else {
        return Err(CliError::config("constants need Poisson sampling"));
    };
    let model = if scenario.experiment.drift {
        scenario.model.clone()
    } else {
        scenario.model.without_drift()
    };
    let constants = AsymptoticConstants::compute(&model, p1, p2)?;
    let limit_measures = poisson_limit_measures(p1, p2)?;
    Ok(ConstantsReport {
        constants,
        c_from_measures: limit_measures.c(&model),
        limit_measures,
    })
}

pub fn cmd_constants(scenario: &Scenario) -> CliResult<CommandOutput> {
    Ok(CommandOutput::ok(to_json(&constants_of(scenario)?)?))
}

/// Sorted statistics with the ECDF and every reference CDF.
pub fn ecdf_csv(exp: &Experiment, outcomes: &[ReplicateOutcome]) -> CliResult<String> {
    let mut xs: Vec<f64> = outcomes.iter().map(|o| o.x).collect();
    xs.sort_by(f64::total_cmp);
    let refs = exp.references();
    let mut header = vec!["x".to_string(), "ecdf".to_string()];
    header.extend(refs.iter().map(|r| format!("{}_cdf", r.name())));
    let n = xs.len() as f64;
    let rows = xs.iter().enumerate().map(|(k, &x)| {
        let mut row = vec![x.to_string(), ((k + 1) as f64 / n).to_string()];
        row.extend(refs.iter().map(|r| r.cdf(x).to_string()));
        row
    });
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(&header, rows)
}

pub fn cmd_experiment(
    scenario: &Scenario,
    seed: Option<u64>,
    threads: Option<usize>,
) -> CliResult<CommandOutput> {
    let exp = scenario.experiment(seed)?;
    let (result, outcomes) = with_threads(threads, || run_experiment(&exp))??;
    if let Some(p) = &scenario.output.ecdf_csv {
        std::fs::write(p, ecdf_csv(&exp, &outcomes)?)?;
    }
    Ok(CommandOutput::ok(to_json(&result)?))
}

pub fn cmd_validate_lemmas(
    scenario: &Scenario,
    seed: Option<u64>,
    threads: Option<usize>,
) -> CliResult<CommandOutput> {
    let l = &scenario.lemmas;
    let checks = with_threads(threads, || {
        validate_lemmas(&l.experiments, l.replicates, seed.unwrap_or(scenario.seed))
    })??;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c.passed == Some(false))
        .map(|c| c.name.as_str())
        .collect();
    let failure = (!failed.is_empty()).then(|| {
        CliError::Consistency(format!("outside 3 standard errors: {}", failed.join(", ")))
    });
    Ok(CommandOutput {
        body: to_json(&checks)?,
        failure,
    })
}
