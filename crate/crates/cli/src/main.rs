use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlsqle_cli::{parse_config_for, resolve_jobs, run, CliError, Command, OutputFormat, Overrides};

#[derive(Parser)]
#[command(name = "tlsqle", version, about = "Driven cavity with a two-level-system bath: steady states, spectra, stochastic checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Steady-state roots, optionally over an alpha_in sweep
    Steady(Common),
    /// Quadrature noise spectrum on an omega x theta grid, plus extrema
    Spectrum(Common),
    /// One-dimensional sweep over alpha_in, omega or theta
    Sweep(Common),
    /// Stochastic integration with Welch estimate and analytic overlay
    Timedomain(Common),
    /// Holstein-Primakoff convergence report
    Hpcheck(Common),
    /// Built-in invariant checks
    Validate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Integration seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; TLSQLE_JOBS takes precedence
    #[arg(long)]
    jobs: Option<usize>,
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let (command, args) = match cli.command {
        Sub::Steady(a) => (Command::Steady, a),
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Timedomain(a) => (Command::TimeDomain, a),
        Sub::Hpcheck(a) => (Command::HpCheck, a),
        Sub::Validate(a) => (Command::Validate, a),
    };

    let env = std::env::var("TLSQLE_JOBS").ok();
    if let Some(n) = resolve_jobs(args.jobs, env.as_deref())? {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let source = match (&args.config, command) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?,
        (None, Command::Validate) => String::from(r#"{"params":{"kappa":1.0,"kappa_n":0.0,"delta":0.0,"alpha_in":{"re":0.0}}}"#),
        (None, _) => return Err(CliError::Usage(String::from("--config <path> is required"))),
    };
    let mut spec = parse_config_for(&source, Some(command))?;
    Overrides {
        out: args.out,
        format: args.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
        seed: args.seed,
    }
    .apply(&mut spec);
    Ok(run(&spec)?.summary)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tlsqle: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
