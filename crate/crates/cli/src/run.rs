//! Executes a [`RunSpec`] and writes its tables.
//!
//! Inputs and outputs are in the physical units of the config; the core is
//! called with parameters normalized to `kappa = 1`. Times in the
//! `integration` section are in units of `1/kappa`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use rayon::prelude::*;
use tlsqle_core::hp_validation::convergence_report;
use tlsqle_core::linear_response::effective_linewidth;
use tlsqle_core::selftest::run_selftest;
use tlsqle_core::spectrum::{quadrature_spectrum, spectrum_extrema, spectrum_grid};
use tlsqle_core::steady_state::{default_root, linear_amplitude, solve_steady_state};
use tlsqle_core::timedomain::{burn_in_time, integrate_linearized, welch_psd, write_dump};
use tlsqle_core::{validate_params, Error, HalfInteger, HpBranch, Params, SteadyState};

use crate::config::{AxisName, Command, OutputFormat, Range, RunSpec};
use crate::error::CliError;
use crate::output::{companion_path, write_atomic, Cell, Table};

/// One produced table; `tag` is `None` for the main output.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub tag: Option<&'static str>,
    pub table: Table,
}

/// What a run left behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Physical-unit view of the normalized parameters.
struct Units {
    params: Params,
    kappa: f64,
}

impl Units {
    fn new(raw: &Params) -> Result<Self, CliError> {
        let params = validate_params(raw).map_err(CliError::Validation)?;
        Ok(Units {
            kappa: params.kappa_unit(),
            params,
        })
    }

    fn with_drive(&self, alpha_in: f64) -> Params {
        self.params.with_drive(Complex::new(alpha_in / self.kappa.sqrt(), 0.0))
    }

    fn stable_alpha(&self, p: &Params) -> Result<Complex<f64>, CliError> {
        let roots = solve_steady_state(p)?;
        match default_root(&roots) {
            Some(r) => Ok(r.alpha),
            None => Err(CliError::Domain(Error::UnstableSteadyState {
                max_real: roots
                    .iter()
                    .map(|r| r.drift_eigenvalues[0].re.max(r.drift_eigenvalues[1].re))
                    .fold(f64::NEG_INFINITY, f64::max),
            })),
        }
    }
}

fn default_omega(u: &Units) -> Range {
    // resonance of the cavity fluctuations sits at ω = -Δ in the pump frame
    let centre = -u.params.delta * u.kappa;
    Range {
        start: centre - 5.0 * u.kappa,
        stop: centre + 5.0 * u.kappa,
        count: 401,
    }
}

fn default_theta() -> Range {
    Range {
        start: 0.0,
        stop: PI * 63.0 / 64.0,
        count: 64,
    }
}

/// Computes every table of `spec` without touching the filesystem.
pub fn compute(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    match spec.command {
        Command::Steady => steady(spec),
        Command::Sweep => sweep(spec),
        Command::Spectrum => spectrum(spec),
        Command::TimeDomain => timedomain(spec),
        Command::HpCheck => hpcheck(spec),
        Command::Validate => Ok(vec![validate()]),
    }
}

/// Computes and writes all outputs.
pub fn run(spec: &RunSpec) -> Result<RunReport, CliError> {
    let main = PathBuf::from(spec.output());
    let products = compute(spec)?;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for product in &products {
        let path = match product.tag {
            None => main.clone(),
            Some(tag) => companion_path(&main, tag, spec.output_format),
        };
        write_atomic(&path, product.table.render(spec.output_format).as_bytes())?;
        summary.push(format!("{} ({} rows)", path.display(), product.table.rows.len()));
        files.push(path);
    }
    if spec.command == Command::Validate {
        let total = products[0].table.rows.len();
        let failed = products[0]
            .table
            .rows
            .iter()
            .filter(|r| r[1] == Cell::Bool(false))
            .count();
        if failed > 0 {
            return Err(CliError::SelfTest { failed, total });
        }
        summary.push(format!("{total} checks passed"));
    }
    Ok(RunReport {
        files,
        summary: summary.join("\n"),
    })
}

fn root_row(drive: f64, r: &SteadyState, kappa: f64) -> Vec<Cell> {
    vec![
        drive.into(),
        r.alpha.re.into(),
        r.alpha.im.into(),
        r.alpha.norm().into(),
        r.alpha.arg().into(),
        r.occupancy_x.into(),
        r.stable.into(),
        (r.residual * kappa).into(),
    ]
}

fn steady(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    let u = Units::new(&spec.params)?;
    let drives: Vec<(f64, Params)> = match &spec.sweep_axis {
        Some(axis) => axis.range().points().into_iter().map(|a| (a, u.with_drive(a))).collect(),
        None => vec![(spec.params.alpha_in.norm(), u.params)],
    };
    let solved: Vec<Result<Vec<SteadyState>, Error>> =
        drives.par_iter().map(|(_, p)| solve_steady_state(p)).collect();
    let mut table = Table::new(&[
        "alpha_in", "re_alpha", "im_alpha", "abs_alpha", "arg_alpha", "x", "stable", "residual",
    ]);
    for ((drive, _), roots) in drives.iter().zip(solved) {
        for r in roots? {
            table.push(root_row(*drive, &r, u.kappa));
        }
    }
    Ok(vec![Product { tag: None, table }])
}

fn sweep(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    let u = Units::new(&spec.params)?;
    let axis = spec.sweep_axis.expect("validated");
    let points = axis.range().points();
    match axis.name {
        AxisName::AlphaIn => {
            let jobs: Vec<(f64, HpBranch)> = points
                .iter()
                .flat_map(|&a| HpBranch::BOTH.map(|b| (a, b)))
                .collect();
            let rows: Vec<Result<Vec<Cell>, Error>> = jobs
                .par_iter()
                .map(|&(a, b)| {
                    let p = u.with_drive(a).with_branch(b);
                    let roots = solve_steady_state(&p)?;
                    let root = default_root(&roots).or(roots.first()).expect("at least one root");
                    let lin = linear_amplitude(&p);
                    Ok(vec![
                        a.into(),
                        b.name().into(),
                        root.alpha.re.into(),
                        root.alpha.im.into(),
                        root.alpha.norm().into(),
                        root.alpha.arg().into(),
                        lin.norm().into(),
                        lin.arg().into(),
                        (effective_linewidth(&p, root.alpha) * u.kappa).into(),
                        root.stable.into(),
                    ])
                })
                .collect();
            let mut table = Table::new(&[
                "alpha_in",
                "branch",
                "re_alpha",
                "im_alpha",
                "abs_alpha",
                "arg_alpha",
                "abs_alpha_linear",
                "arg_alpha_linear",
                "kappa_eff",
                "stable",
            ]);
            for row in rows {
                table.push(row?);
            }
            Ok(vec![Product { tag: None, table }])
        }
        AxisName::Omega | AxisName::Theta => {
            let grids = spec.grids.unwrap_or_default();
            let (omegas, thetas) = if axis.name == AxisName::Omega {
                (points, grids.theta.map_or(vec![0.0], |r| r.points()))
            } else {
                (
                    grids.omega.map_or(vec![-u.params.delta * u.kappa], |r| r.points()),
                    points,
                )
            };
            Ok(vec![Product {
                tag: None,
                table: spectrum_table(&u, &omegas, &thetas)?,
            }])
        }
    }
}

fn spectrum_table(u: &Units, omegas: &[f64], thetas: &[f64]) -> Result<Table, CliError> {
    let alpha = u.stable_alpha(&u.params)?;
    let scaled: Vec<f64> = omegas.iter().map(|w| w / u.kappa).collect();
    let grid = spectrum_grid(&u.params, alpha, &scaled, thetas)?;
    let mut table = Table::new(&["omega", "theta", "spectrum"]);
    for (i, g) in grid.iter().enumerate() {
        let value = g.value.as_ref().map_or(f64::NAN, |s| s / u.kappa);
        table.push(vec![omegas[i / thetas.len()].into(), g.theta.into(), value.into()]);
    }
    Ok(table)
}

fn spectrum(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    let u = Units::new(&spec.params)?;
    let grids = spec.grids.unwrap_or_default();
    let omegas = grids.omega.unwrap_or_else(|| default_omega(&u)).points();
    let thetas = grids.theta.unwrap_or_else(default_theta).points();
    let table = spectrum_table(&u, &omegas, &thetas)?;

    let alpha = u.stable_alpha(&u.params)?;
    let extrema: Vec<Vec<Cell>> = omegas
        .par_iter()
        .map(|&w| match spectrum_extrema(&u.params, alpha, w / u.kappa) {
            Ok(e) => vec![
                w.into(),
                e.theta_min.into(),
                e.theta_max.into(),
                (e.s_min / u.kappa).into(),
                (e.s_max / u.kappa).into(),
                e.phi.into(),
                e.phi_tls.into(),
                e.flat.into(),
                e.contrast().into(),
            ],
            Err(_) => {
                let mut row = vec![Cell::Num(w)];
                row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 6));
                row.push(Cell::Bool(false));
                row.push(Cell::Num(f64::NAN));
                row
            }
        })
        .collect();
    let mut summary = Table::new(&[
        "omega", "theta_min", "theta_max", "s_min", "s_max", "phi", "phi_tls", "flat", "contrast",
    ]);
    for row in extrema {
        summary.push(row);
    }
    Ok(vec![
        Product { tag: None, table },
        Product {
            tag: Some("extrema"),
            table: summary,
        },
    ])
}

fn timedomain(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    let u = Units::new(&spec.params)?;
    let cfg = spec.integration.clone().expect("validated");
    let settings = spec.timedomain.clone().unwrap_or_default();
    let alpha = u.stable_alpha(&u.params)?;
    let ensemble = integrate_linearized(&u.params, alpha, &cfg)?;
    if let Some(path) = &settings.dump_path {
        let mut bytes = Vec::new();
        write_dump(&ensemble, &mut bytes).map_err(|e| CliError::io("encoding dump", e))?;
        write_atomic(Path::new(path), &bytes)?;
    }
    let ensemble = ensemble.discard_before(burn_in_time(&u.params, alpha));
    let psd = welch_psd(&ensemble, settings.theta, settings.segment_length, settings.overlap)?;

    let mut welch = Table::new(&["omega", "theta", "spectrum"]);
    let mut analytic = Table::new(&["omega", "theta", "spectrum"]);
    for s in &psd {
        welch.push(vec![(s.omega * u.kappa).into(), s.theta.into(), (s.value / u.kappa).into()]);
        let exact = quadrature_spectrum(&u.params, alpha, s.omega, s.theta).map_or(f64::NAN, |v| v / u.kappa);
        analytic.push(vec![(s.omega * u.kappa).into(), s.theta.into(), exact.into()]);
    }
    Ok(vec![
        Product { tag: None, table: welch },
        Product {
            tag: Some("analytic"),
            table: analytic,
        },
    ])
}

fn hpcheck(spec: &RunSpec) -> Result<Vec<Product>, CliError> {
    let settings = spec.hp.clone().unwrap_or_default();
    let js: Vec<HalfInteger> = settings
        .j
        .iter()
        .map(|&j| HalfInteger::new(j).map_err(CliError::Validation))
        .collect::<Result<_, _>>()?;
    let rows = convergence_report::<f64>(&js, settings.n_max)?;
    let mut table = Table::new(&["j", "branch", "n_max", "error"]);
    for r in rows {
        table.push(vec![r.j.value().into(), r.branch.name().into(), r.n_max.into(), r.error.into()]);
    }
    Ok(vec![Product { tag: None, table }])
}

fn validate() -> Product {
    let mut table = Table::new(&["check", "passed", "detail"]);
    for c in run_selftest() {
        table.push(vec![c.name.into(), c.passed.into(), c.detail.into()]);
    }
    Product { tag: None, table }
}

/// Command-line overrides applied on top of a parsed spec.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut RunSpec) {
        if let Some(out) = &self.out {
            spec.output_path = Some(out.to_string_lossy().into_owned());
        }
        if let Some(format) = self.format {
            spec.output_format = format;
        }
        if let (Some(seed), Some(cfg)) = (self.seed, spec.integration.as_mut()) {
            cfg.seed = seed;
        }
    }
}
