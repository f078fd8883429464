//! Stochastic time-domain integration of the cavity Langevin equations.
//!
//! The linearized integrator evolves the c-number fluctuation `a(t)` around a
//! stable steady state with additive noise and serves as a statistical
//! cross-check of the closed-form spectrum. The nonlinear integrator evolves
//! the full field `c(t)` with multiplicative TLS noise; it is a semiclassical
//! approximation that drops operator ordering.
//!
//! Noise is symmetrized: every input contributes independent real and
//! imaginary Gaussian increments of variance `(n + ½) dt / 2`.

mod dump;
mod welch;

pub use dump::{read_dump, write_dump, DUMP_VERSION};
pub use welch::{integrated_power, welch_psd};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_response::effective_linewidth;
use crate::model::{HpBranch, ModelParams};
use crate::real::Real;
use crate::steady_state::{assess_stability, drift_matrix, max_growth_rate, solve_steady_state};

/// `|c|` beyond which a trajectory is reported as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerMaruyama,
    #[default]
    StratonovichMidpoint,
}

/// Time step, length and ensemble size of a stochastic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct IntegrationConfig<T> {
    /// Step in units of `1/kappa`.
    pub dt: T,
    pub t_total: T,
    pub n_traj: usize,
    pub seed: u64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Set to `false` to zero every noise amplitude.
    #[serde(default = "default_true")]
    pub noise: bool,
    /// Keep every `record_every`-th step.
    #[serde(default = "default_one")]
    pub record_every: usize,
    /// Initial field (fluctuation for the linearized run); zero for the
    /// linearized run and the linear steady state for the nonlinear one when absent.
    #[serde(skip)]
    pub initial: Option<Complex<T>>,
}

fn default_true() -> bool {
    true
}

fn default_one() -> usize {
    1
}

impl<T: Real> IntegrationConfig<T> {
    pub fn new(dt: T, t_total: T, n_traj: usize, seed: u64, scheme: Scheme) -> Self {
        IntegrationConfig {
            dt,
            t_total,
            n_traj,
            seed,
            scheme,
            noise: true,
            record_every: 1,
            initial: None,
        }
    }

    pub fn without_noise(mut self) -> Self {
        self.noise = false;
        self
    }

    pub fn recording_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn starting_at(mut self, initial: Complex<T>) -> Self {
        self.initial = Some(initial);
        self
    }

    /// Checks the parameter-independent fields.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::InvalidConfig("dt must be positive and finite"));
        }
        if !(self.t_total.is_finite() && self.t_total >= self.dt) {
            return Err(Error::InvalidConfig("t_total must be finite and at least dt"));
        }
        if self.n_traj == 0 {
            return Err(Error::InvalidConfig("n_traj must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1"));
        }
        if let Some(c) = self.initial {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite("initial"));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the step bound for the given rates.
    pub fn validate_for(&self, params: &ModelParams<T>, kappa_eff: T) -> Result<()> {
        self.validate()?;
        let bound = dt_bound(params, kappa_eff);
        if self.dt > bound * T::lit(1.0 + 1e-12) {
            return Err(Error::StepTooLarge {
                dt: self.dt.to_f64_lossy(),
                bound: bound.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Number of integration steps.
    pub fn steps(&self) -> usize {
        (self.t_total / self.dt).round().to_usize().unwrap_or(0).max(1)
    }
}

/// Largest admissible step: a hundredth of the fastest rate among
/// `|κ_eff|`, `|Δ|` and `κ`.
pub fn dt_bound<T: Real>(params: &ModelParams<T>, kappa_eff: T) -> T {
    let fastest = kappa_eff.abs().max(params.delta.abs()).max(params.kappa);
    T::lit(0.01) / fastest
}

/// Time after which the linearized fluctuations are stationary, `10/κ_eff`.
pub fn burn_in_time<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> T {
    T::lit(10.0) / effective_linewidth(params, alpha)
}

/// Trajectories on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble<T> {
    pub times: Vec<T>,
    /// `samples[k][i]` is trajectory `k` at `times[i]`.
    pub samples: Vec<Vec<Complex<T>>>,
    pub seed_used: u64,
}

impl<T: Real> TrajectoryEnsemble<T> {
    pub fn n_traj(&self) -> usize {
        self.samples.len()
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    /// Spacing of the recorded samples.
    pub fn sample_interval(&self) -> T {
        if self.times.len() < 2 {
            T::zero()
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Drops every sample earlier than `t`.
    pub fn discard_before(mut self, t: T) -> Self {
        let first = self.times.iter().position(|&s| s >= t).unwrap_or(self.times.len());
        self.times.drain(..first);
        for traj in &mut self.samples {
            traj.drain(..first);
        }
        self
    }

    /// Pointwise ensemble mean.
    pub fn mean(&self) -> Vec<Complex<T>> {
        let n = T::from_usize_lossy(self.n_traj().max(1));
        (0..self.n_samples())
            .map(|i| {
                self.samples
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, tr| acc + tr[i])
                    / n
            })
            .collect()
    }
}

/// Increment generator for one trajectory.
struct NoiseSource {
    rng: ChaCha8Rng,
}

impl NoiseSource {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NoiseSource { rng }
    }

    #[inline]
    fn complex<T: Real>(&mut self, std: T) -> Complex<T> {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex::new(T::lit(re), T::lit(im)) * std
    }
}

/// Per-component standard deviation `sqrt((n + ½) dt / 2)` of one input.
fn increment_std<T: Real>(occupancy: T, dt: T, enabled: bool) -> T {
    if enabled {
        ((occupancy + T::lit(0.5)) * dt / T::lit(2.0)).sqrt()
    } else {
        T::zero()
    }
}

/// Routes the TLS increment: HP+ couples to its conjugate.
#[inline]
fn tls_increment<T: Real>(branch: HpBranch, dw: Complex<T>) -> Complex<T> {
    match branch {
        HpBranch::Minus => dw,
        HpBranch::Plus => dw.conj(),
    }
}

/// Integrates the linearized fluctuation equation around `alpha`.
pub fn integrate_linearized<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    cfg: &IntegrationConfig<T>,
) -> Result<TrajectoryEnsemble<T>> {
    let m = drift_matrix(params, alpha);
    let (stable, eig) = assess_stability(&m);
    if !stable {
        return Err(Error::UnstableSteadyState {
            max_real: max_growth_rate(&eig).to_f64_lossy(),
        });
    }
    cfg.validate_for(params, effective_linewidth(params, alpha))?;

    let dt = cfg.dt;
    let sd_in = increment_std(params.n_th, dt, cfg.noise);
    let sd_tls = increment_std(params.n_th_tls, dt, cfg.noise);
    let sqrt_k = params.kappa.sqrt();
    let g_tls = alpha.conj() * (T::lit(2.0) * params.kappa_n.sqrt());
    let start = cfg.initial.unwrap_or_else(|| Complex::new(T::zero(), T::zero()));
    let branch = params.branch;

    run_ensemble(cfg, start, |a, rng| {
        let kick = rng.complex(sd_in) * sqrt_k + g_tls * tls_increment(branch, rng.complex(sd_tls));
        match cfg.scheme {
            Scheme::EulerMaruyama => a + m.apply(a) * dt + kick,
            Scheme::StratonovichMidpoint => {
                let mid = a + (m.apply(a) * dt + kick) / T::lit(2.0);
                a + m.apply(mid) * dt + kick
            }
        }
    })
}

/// Integrates the full c-number Langevin equation
/// `dc = [(iΔ - κ/2 ∓ κ_N|c|²) c + √κ α_in] dt + √κ dW + 2√κ_N c* dW_TLS`
/// (TLS increment conjugated on HP+), Stratonovich, explicit midpoint.
///
/// A trajectory whose `|c|` passes `1e6` stops the run with
/// [`Error::Divergence`], the signature of the HP+ parametric instability.
pub fn integrate_nonlinear_semiclassical<T: Real>(
    params: &ModelParams<T>,
    cfg: &IntegrationConfig<T>,
) -> Result<TrajectoryEnsemble<T>> {
    if cfg.scheme != Scheme::StratonovichMidpoint {
        return Err(Error::InvalidConfig(
            "the nonlinear integrator requires the stratonovich_midpoint scheme",
        ));
    }
    let roots = solve_steady_state(params)?;
    let fastest = roots
        .iter()
        .map(|r| effective_linewidth(params, r.alpha).abs())
        .fold(params.kappa, T::max);
    cfg.validate_for(params, fastest)?;

    let dt = cfg.dt;
    let sd_in = increment_std(params.n_th, dt, cfg.noise);
    let sd_tls = increment_std(params.n_th_tls, dt, cfg.noise);
    let sqrt_k = params.kappa.sqrt();
    let two_sqrt_kn = T::lit(2.0) * params.kappa_n.sqrt();
    let s = params.sign();
    let half_k = params.kappa / T::lit(2.0);
    let drive = params.alpha_in * sqrt_k;
    let branch = params.branch;
    let drift = move |c: Complex<T>| {
        Complex::new(-(half_k + s * params.kappa_n * c.norm_sqr()), params.delta) * c + drive
    };
    let start = cfg
        .initial
        .unwrap_or_else(|| crate::steady_state::linear_amplitude(params));

    run_ensemble(cfg, start, |c, rng| {
        let dw_in = rng.complex(sd_in) * sqrt_k;
        let dw_tls = tls_increment(branch, rng.complex(sd_tls)) * two_sqrt_kn;
        let mid = c + (drift(c) * dt + dw_in + c.conj() * dw_tls) / T::lit(2.0);
        c + drift(mid) * dt + dw_in + mid.conj() * dw_tls
    })
}

fn run_ensemble<T, F>(cfg: &IntegrationConfig<T>, start: Complex<T>, step: F) -> Result<TrajectoryEnsemble<T>>
where
    T: Real,
    F: Fn(Complex<T>, &mut NoiseSource) -> Complex<T> + Sync,
{
    let steps = cfg.steps();
    let every = cfg.record_every;
    let n_records = steps / every + 1;
    let bound = T::lit(DIVERGENCE_BOUND);
    let times: Vec<T> = (0..n_records)
        .map(|k| cfg.dt * T::from_usize_lossy(k * every))
        .collect();

    let samples: Vec<Result<Vec<Complex<T>>>> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|traj| {
            let mut rng = NoiseSource::new(cfg.seed, traj as u64);
            let mut out = Vec::with_capacity(n_records);
            let mut a = start;
            out.push(a);
            for k in 1..=(n_records - 1) * every {
                a = step(a, &mut rng);
                if a.norm().is_nan() || a.norm() > bound {
                    return Err(Error::Divergence {
                        trajectory: traj,
                        time: (cfg.dt * T::from_usize_lossy(k)).to_f64_lossy(),
                    });
                }
                if k % every == 0 {
                    out.push(a);
                }
            }
            Ok(out)
        })
        .collect();

    Ok(TrajectoryEnsemble {
        times,
        samples: samples.into_iter().collect::<Result<_>>()?,
        seed_used: cfg.seed,
    })
}
