//! Front end for `tlsqle-core`: JSON run configs, sweeps, and plot-ready
//! CSV/JSON tables.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_for, Command, OutputFormat, RunSpec};
pub use error::CliError;
pub use run::{compute, run, Overrides, RunReport};

/// Thread count: `TLSQLE_JOBS` wins over `--jobs`; `None` leaves rayon's default.
pub fn resolve_jobs(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, CliError> {
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("TLSQLE_JOBS must be a positive integer (got {v:?})"))),
        },
        None => match flag {
            Some(0) => Err(CliError::Usage(String::from("--jobs must be positive"))),
            other => Ok(other),
        },
    }
}
