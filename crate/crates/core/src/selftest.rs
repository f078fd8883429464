//! A quick invariant suite for first-run confidence.
//!
//! Each check is a reduced-statistics version of a library property; the full
//! versions live in the test suites.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hp_validation::{commutator_residuals, hp_map_error, spin_matrices, HalfInteger};
use crate::linear_response::{effective_linewidth, susceptibilities, susceptibility_oracle};
use crate::model::{HpBranch, ModelParams};
use crate::spectrum::{quadrature_spectrum, spectrum_oracle};
use crate::steady_state::{default_root, solve_steady_state};
use crate::timedomain::{integrate_linearized, IntegrationConfig, Scheme};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, worst: f64, tol: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: worst.is_finite() && worst <= tol,
        detail: format!("worst {worst:.3e} (tolerance {tol:.1e})"),
    }
}

fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Random stable operating point with a default steady state.
fn draw(rng: &mut ChaCha8Rng) -> Option<(ModelParams<f64>, Complex<f64>)> {
    let branch = if rng.random_bool(0.5) { HpBranch::Plus } else { HpBranch::Minus };
    let p = ModelParams::new(
        1.0,
        10f64.powf(rng.random_range(-5.0..-2.0)),
        rng.random_range(-25.0..25.0),
        rng.random_range(0.0..30.0),
        branch,
    )
    .with_occupancies(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
    let roots = solve_steady_state(&p).ok()?;
    let root = default_root(&roots)?;
    Some((p, root.alpha))
}

pub fn run_selftest() -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_7e57);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    let base = ModelParams::new(1.0, 1.5e-4, 20.0, 0.0, HpBranch::Minus);
    for b in HpBranch::BOTH {
        for k in 0..200 {
            let p = base.with_branch(b).with_drive(Complex::new(3.5 * k as f64, 0.0));
            match solve_steady_state(&p) {
                Ok(roots) => worst = roots.iter().fold(worst, |w, r| w.max(r.residual)),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    out.push(outcome("steady-state residual", worst, 1e-10));

    let mut chi_worst = 0.0f64;
    let mut spec_worst = 0.0f64;
    let mut period_worst = 0.0f64;
    let mut negative = false;
    let mut drawn = 0;
    while drawn < 200 {
        let Some((p, alpha)) = draw(&mut rng) else { continue };
        let w = rng.random_range(-40.0..40.0);
        let th = rng.random_range(0.0..std::f64::consts::PI);
        let (Ok(a), Ok(b)) = (susceptibilities(&p, alpha, w), susceptibility_oracle(&p, alpha, w)) else {
            continue;
        };
        drawn += 1;
        for (x, y) in [(a.chi_d, b.chi_d), (a.chi_x, b.chi_x), (a.chi_d_tls, b.chi_d_tls), (a.chi_x_tls, b.chi_x_tls)] {
            if x.norm() > 0.0 {
                chi_worst = chi_worst.max(rel(x, y));
            }
        }
        let s = quadrature_spectrum(&p, alpha, w, th).unwrap_or(f64::NAN);
        let o = spectrum_oracle(&p, alpha, w, th).unwrap_or(f64::NAN);
        let shifted = quadrature_spectrum(&p, alpha, w, th + std::f64::consts::PI).unwrap_or(f64::NAN);
        spec_worst = spec_worst.max((s - o).abs() / o.abs());
        period_worst = period_worst.max((s - shifted).abs() / s.abs());
        negative |= s.is_nan() || s < 0.0;
    }
    out.push(outcome("susceptibility oracle", chi_worst, 1e-12));
    out.push(outcome("spectrum oracle", spec_worst, 1e-12));
    out.push(outcome("spectrum period pi", period_worst, 1e-12));
    out.push(CheckOutcome {
        name: "spectrum non-negative",
        passed: !negative,
        detail: String::from(if negative { "negative value found" } else { "all values >= 0" }),
    });

    let alpha = Complex::new(3.0, -7.0);
    let sum = effective_linewidth(&base.with_branch(HpBranch::Minus), alpha)
        + effective_linewidth(&base.with_branch(HpBranch::Plus), alpha);
    out.push(outcome("linewidth symmetry", (sum - 2.0).abs(), 1e-12));

    let mut hp_ratio_dev = 0.0f64;
    let errors: Vec<f64> = [64.0, 128.0, 256.0]
        .iter()
        .map(|&j| hp_map_error::<f64>(HalfInteger::new(j).expect("valid j"), HpBranch::Minus, 4).unwrap_or(f64::NAN))
        .collect();
    for w in errors.windows(2) {
        hp_ratio_dev = hp_ratio_dev.max((w[1] / w[0] - 0.5).abs());
    }
    out.push(outcome("hp error halves with j", hp_ratio_dev, 0.1));
    let comm = spin_matrices::<f64>(HalfInteger::new(32.0).expect("valid j"))
        .map(|s| commutator_residuals(&s).into_iter().fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    out.push(outcome("spin commutators", comm, 1e-13));

    let lin = ModelParams::new(1.0, 0.0, 2.0, 0.0, HpBranch::Minus).with_occupancies(1.0, 0.0);
    let cfg = IntegrationConfig::new(2e-3, 200.0, 8, 11, Scheme::StratonovichMidpoint).recording_every(10);
    let variance = integrate_linearized(&lin, Complex::new(0.0, 0.0), &cfg)
        .map(|e| {
            let e = e.discard_before(10.0);
            let n = (e.n_traj() * e.n_samples()) as f64;
            e.samples.iter().flatten().map(|a| a.norm_sqr()).sum::<f64>() / n
        })
        .unwrap_or(f64::NAN);
    out.push(outcome("thermal variance n + 1/2", (variance - 1.5).abs() / 1.5, 0.1));
    out
}
