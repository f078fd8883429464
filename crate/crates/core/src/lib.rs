//! Driven cavity coupled to a bosonic bath and a two-level-system bath.
//!
//! The TLS bath is described through its Holstein-Primakoff bosonization
//! around the ground state (HP-) or the inverted state (HP+). The crate
//! provides the classical steady state, the linear response and quadrature
//! noise spectrum of the fluctuations, stochastic time-domain integrators that
//! cross-check them, and finite-`j` validation of the bosonization itself.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the crate root fix it to `f64`.

pub mod cubic;
pub mod error;
pub mod hp_validation;
pub mod linalg;
pub mod linear_response;
pub mod model;
pub mod real;
pub mod selftest;
pub mod spectrum;
pub mod steady_state;
pub mod timedomain;

pub use error::{Error, Result};
pub use hp_validation::{HalfInteger, SpinRep, TruncatedBoson};
pub use linear_response::{AbcCoefficients, Susceptibilities};
pub use model::{validate_params, HpBranch, ModelParams};
pub use real::Real;
pub use spectrum::{GridSample, SpectrumExtrema, SpectrumSample};
pub use steady_state::{DriftMatrix, SteadyStateSolution};
pub use timedomain::{IntegrationConfig, Scheme, TrajectoryEnsemble};

pub use num_complex::Complex;

pub type Params = ModelParams<f64>;
pub type Params32 = ModelParams<f32>;
pub type SteadyState = SteadyStateSolution<f64>;
pub type SteadyState32 = SteadyStateSolution<f32>;
pub type Chi = Susceptibilities<f64>;
pub type Sample = SpectrumSample<f64>;
pub type Extrema = SpectrumExtrema<f64>;
pub type Ensemble = TrajectoryEnsemble<f64>;
pub type Integration = IntegrationConfig<f64>;
pub type Spin = SpinRep<f64>;
pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
