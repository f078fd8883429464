use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kappa must be strictly positive (got {0})")]
    NonPositiveKappa(f64),
    #[error("{name} must be non-negative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("{0} is not finite")]
    NonFinite(&'static str),

    #[error("steady-state polishing stalled at residual {residual:e} after {iterations} iterations")]
    RootRefinementFailed { residual: f64, iterations: usize },

    #[error("linear response is singular at omega = {omega} (|AC - |B|^2| = {determinant:e})")]
    SingularResponse { omega: f64, determinant: f64 },

    #[error("trace has no peak above twice its baseline")]
    NoPeak,
    #[error("peak is resolved by only {points} points above half maximum (need 10)")]
    UnresolvedPeak { points: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("steady state is unstable (max Re eigenvalue {max_real})")]
    UnstableSteadyState { max_real: f64 },
    #[error("dt = {dt} exceeds the resolution bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("invalid integration config: {0}")]
    InvalidConfig(&'static str),
    #[error("need at least {needed} samples per trajectory, have {available}")]
    TooFewSamples { needed: usize, available: usize },
    #[error("trajectory {trajectory} diverged (|c| > 1e6) at t = {time}")]
    Divergence { trajectory: usize, time: f64 },

    #[error("j must be a positive half-integer (got {0})")]
    InvalidJ(f64),
    #[error("spin dimension {dimension} exceeds the dense budget of 4097")]
    TooLarge { dimension: usize },
    #[error("n_max = {n_max} exceeds 2j = {two_j}")]
    SubspaceTooLarge { n_max: usize, two_j: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
