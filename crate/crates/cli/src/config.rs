//! JSON run configuration.
//!
//! Keys are strict: any unknown key, at any level, is a parse error naming it.
//! Parameters are stored as given and validated on parse; they are
//! normalized only when a run starts.

use serde::{Deserialize, Serialize};
use tlsqle_core::{validate_params, IntegrationConfig, ModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Steady,
    Spectrum,
    Sweep,
    TimeDomain,
    HpCheck,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::TimeDomain => "timedomain",
            Command::HpCheck => "hpcheck",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    AlphaIn,
    Omega,
    Theta,
}

/// Evenly spaced points `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        tlsqle_core::spectrum::linspace(self.start, self.stop, self.count)
    }

    fn check(&self, what: &str) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Usage(format!("{what}: start and stop must be finite")));
        }
        if self.count == 0 {
            return Err(CliError::Usage(format!("{what}: count must be at least 1")));
        }
        if self.count > 1 && self.start == self.stop {
            return Err(CliError::Usage(format!("{what}: start equals stop")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn range(&self) -> Range {
        Range {
            start: self.start,
            stop: self.stop,
            count: self.count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Range>,
}

/// Estimator settings for the `timedomain` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeDomainSettings {
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_segment")]
    pub segment_length: usize,
    #[serde(default = "default_overlap")]
    pub overlap: f64,
    /// Raw trajectory dump, written next to the results when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_path: Option<String>,
}

impl Default for TimeDomainSettings {
    fn default() -> Self {
        TimeDomainSettings {
            theta: 0.0,
            segment_length: default_segment(),
            overlap: default_overlap(),
            dump_path: None,
        }
    }
}

fn default_segment() -> usize {
    4096
}

fn default_overlap() -> f64 {
    0.5
}

/// Settings for the `hpcheck` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpSettings {
    #[serde(default = "default_js")]
    pub j: Vec<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

impl Default for HpSettings {
    fn default() -> Self {
        HpSettings {
            j: default_js(),
            n_max: default_n_max(),
        }
    }
}

fn default_js() -> Vec<f64> {
    vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0]
}

fn default_n_max() -> usize {
    4
}

/// A complete, validated run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: Command,
    pub params: ModelParams<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_axis: Option<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<Grids>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationConfig<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timedomain: Option<TimeDomainSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<HpSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub output_format: OutputFormat,
}

/// `RunSpec` with the command optional, as it may be supplied on the command line.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    command: Option<Command>,
    params: ModelParams<f64>,
    #[serde(default)]
    sweep_axis: Option<SweepAxis>,
    #[serde(default)]
    grids: Option<Grids>,
    #[serde(default)]
    integration: Option<IntegrationConfig<f64>>,
    #[serde(default)]
    timedomain: Option<TimeDomainSettings>,
    #[serde(default)]
    hp: Option<HpSettings>,
    #[serde(default)]
    output_path: Option<String>,
    #[serde(default)]
    output_format: OutputFormat,
}

/// Parses a config that names its own command.
pub fn parse_config(source: &str) -> Result<RunSpec, CliError> {
    parse_config_for(source, None)
}

/// Parses a config for `subcommand`; a `command` key in the file must agree.
pub fn parse_config_for(source: &str, subcommand: Option<Command>) -> Result<RunSpec, CliError> {
    let raw: RawSpec = serde_json::from_str(source)?;
    let command = match (raw.command, subcommand) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Usage(format!(
                "config is for `{}` but `{}` was requested",
                a.name(),
                b.name()
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(CliError::Usage(String::from("config has no `command` key"))),
    };
    let spec = RunSpec {
        command,
        params: raw.params,
        sweep_axis: raw.sweep_axis,
        grids: raw.grids,
        integration: raw.integration,
        timedomain: raw.timedomain,
        hp: raw.hp,
        output_path: raw.output_path,
        output_format: raw.output_format,
    };
    validate_spec(&spec)?;
    Ok(spec)
}

pub fn validate_spec(spec: &RunSpec) -> Result<(), CliError> {
    validate_params(&spec.params).map_err(CliError::Validation)?;
    if let Some(axis) = &spec.sweep_axis {
        if axis.count < 2 {
            return Err(CliError::Usage(format!("sweep_axis.count must be at least 2 (got {})", axis.count)));
        }
        axis.range().check("sweep_axis")?;
    }
    if let Some(g) = &spec.grids {
        if let Some(r) = &g.omega {
            r.check("grids.omega")?;
        }
        if let Some(r) = &g.theta {
            r.check("grids.theta")?;
        }
    }
    if let Some(cfg) = &spec.integration {
        cfg.validate().map_err(CliError::Validation)?;
    }
    if let Some(td) = &spec.timedomain {
        if !(0.0..1.0).contains(&td.overlap) {
            return Err(CliError::Usage(String::from("timedomain.overlap must lie in [0, 1)")));
        }
        if td.segment_length < 2 || !td.theta.is_finite() {
            return Err(CliError::Usage(String::from(
                "timedomain.segment_length must be at least 2 and theta finite",
            )));
        }
    }
    if let Some(hp) = &spec.hp {
        for &j in &hp.j {
            tlsqle_core::HalfInteger::new(j).map_err(CliError::Validation)?;
        }
    }
    match spec.command {
        Command::TimeDomain if spec.integration.is_none() => {
            Err(CliError::Usage(String::from("timedomain needs an `integration` section")))
        }
        Command::Sweep if spec.sweep_axis.is_none() => {
            Err(CliError::Usage(String::from("sweep needs a `sweep_axis` section")))
        }
        Command::Steady if spec.sweep_axis.is_some_and(|a| a.name != AxisName::AlphaIn) => Err(CliError::Usage(
            String::from("steady only sweeps over alpha_in"),
        )),
        _ => Ok(()),
    }
}

impl RunSpec {
    /// Output path, defaulting to `tlsqle_<command>.<ext>`.
    pub fn output(&self) -> String {
        self.output_path
            .clone()
            .unwrap_or_else(|| format!("tlsqle_{}.{}", self.command.name(), self.output_format.extension()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunSpec serializes")
    }
}
