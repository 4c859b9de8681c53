//! Scenario files, parallel Monte Carlo experiments and the command-line
//! front end over `hycov-core`.

pub mod commands;
pub mod error;
pub mod run;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use scenario::Scenario;
