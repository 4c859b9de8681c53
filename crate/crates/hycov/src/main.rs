use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hycov::commands::{
    cmd_constants, cmd_cumulants, cmd_density, cmd_estimate, cmd_experiment, cmd_simulate,
    cmd_validate_lemmas, CommandOutput,
};
use hycov::{CliResult, Scenario};

/// Hayashi-Yoshida covariation: simulation, cumulants, expansions and
/// Monte Carlo experiments.
#[derive(Parser)]
#[command(name = "hycov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; defaults to the scenario's output path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel commands.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one observation set as time,series,value CSV.
    Simulate(Common),
    /// Hayashi-Yoshida estimate on a simulated or given path.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// A time,series,value CSV to estimate on instead of simulating.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exact cumulants from every engine, with the bound checks.
    Cumulants(Common),
    /// Evaluate an expansion density and its CDF on a grid.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "unconditional_plus")]
        variant: String,
        /// lo:hi:steps
        #[arg(long, default_value = "-6:6:121", allow_hyphen_values = true)]
        grid: String,
    },
    /// Poisson-regime constants and limit measures.
    Constants(Common),
    /// Replicated experiment with KS distances and cumulant summaries.
    Experiment(Common),
    /// Monte Carlo checks of the Poisson-process identities.
    ValidateLemmas(Common),
}

fn execute(cli: Cli) -> CliResult<()> {
    let (common, output) = match &cli.command {
        Command::Simulate(c) => (c, run(c, |s| cmd_simulate(s, c.seed))?),
        Command::Estimate { common: c, input } => {
            (c, run(c, |s| cmd_estimate(s, c.seed, input.as_deref()))?)
        }
        Command::Cumulants(c) => (c, run(c, |s| cmd_cumulants(s, c.seed))?),
        Command::Density {
            common: c,
            variant,
            grid,
        } => (c, run(c, |s| cmd_density(s, c.seed, variant, grid))?),
        Command::Constants(c) => (c, run(c, cmd_constants)?),
        Command::Experiment(c) => (c, run(c, |s| cmd_experiment(s, c.seed, c.threads))?),
        Command::ValidateLemmas(c) => (c, run(c, |s| cmd_validate_lemmas(s, c.seed, c.threads))?),
    };
    let (scenario_out, out) = output;
    match common.out.clone().or(scenario_out) {
        Some(p) => std::fs::write(p, &out.body)?,
        None => std::io::stdout().write_all(out.body.as_bytes())?,
    }
    out.failure.map_or(Ok(()), Err)
}

fn run(
    common: &Common,
    f: impl FnOnce(&Scenario) -> CliResult<CommandOutput>,
) -> CliResult<(Option<PathBuf>, CommandOutput)> {
    let scenario = Scenario::load(&common.scenario)?;
    let out = f(&scenario)?;
    Ok((scenario.output.path.clone(), out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hycov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
