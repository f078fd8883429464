//! Frequency-domain response of the linearized fluctuations.
//!
//! Fourier transforming the fluctuation equation and its adjoint gives
//!
//! ```text
//! A a_ω + B a†_{-ω} = √κ a_in,ω + g_T n_T,ω
//! B* a_ω + C a†_{-ω} = √κ a†_in,-ω + g_T* (n_T†)_ω
//! ```
//!
//! with `g_T = 2√κ_N α*`. For HP- the TLS noise `n_T` is `a_in^TLS`, for HP+
//! it is `a_in^TLS†`, so on the HP+ branch `chi_d_tls` multiplies
//! `a^TLS†_{in,-ω}` and `chi_x_tls` multiplies `a^TLS_{in,ω}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::model::ModelParams;
use crate::real::Real;
use crate::steady_state::drift_matrix;

/// Absolute threshold on `|AC - |B|^2|` below which the response is singular.
pub const SINGULAR_DETERMINANT: f64 = 1e-14;

/// The `A`, `B`, `C` coefficients at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcCoefficients<T> {
    pub a_coef: Complex<T>,
    pub b_coef: Complex<T>,
    pub c_coef: Complex<T>,
    pub omega: T,
}

impl<T: Real> AbcCoefficients<T> {
    /// `AC - |B|^2`.
    pub fn determinant(&self) -> Complex<T> {
        self.a_coef * self.c_coef - Complex::from(self.b_coef.norm_sqr())
    }
}

/// The four susceptibilities at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibilities<T> {
    pub chi_d: Complex<T>,
    pub chi_x: Complex<T>,
    pub chi_d_tls: Complex<T>,
    pub chi_x_tls: Complex<T>,
    pub omega: T,
}

/// HP-: `A = -i(ω+Δ) + κ/2 + 2κ_N|α|²`, `B = κ_N α²`,
/// `C = -i(ω-Δ) + κ/2 + 2κ_N|α|²`; HP+ flips every `κ_N` sign.
pub fn abc_coefficients<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
) -> AbcCoefficients<T> {
    let s = params.sign();
    let damping = params.kappa / T::lit(2.0) + s * T::lit(2.0) * params.kappa_n * alpha.norm_sqr();
    AbcCoefficients {
        a_coef: Complex::new(damping, -(omega + params.delta)),
        b_coef: alpha * alpha * (s * params.kappa_n),
        c_coef: Complex::new(damping, -(omega - params.delta)),
        omega,
    }
}

pub fn susceptibilities<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
) -> Result<Susceptibilities<T>> {
    let abc = abc_coefficients(params, alpha, omega);
    let det = abc.determinant();
    if det.norm() < T::lit(SINGULAR_DETERMINANT) {
        return Err(Error::SingularResponse {
            omega: omega.to_f64_lossy(),
            determinant: det.norm().to_f64_lossy(),
        });
    }
    let sqrt_k = params.kappa.sqrt();
    let tls = params.kappa_n.sqrt() * T::lit(2.0);
    let c_over = abc.c_coef / det;
    let b_over = abc.b_coef / det;
    Ok(Susceptibilities {
        chi_d: c_over * sqrt_k,
        chi_x: -b_over * sqrt_k,
        chi_d_tls: alpha.conj() * c_over * tls,
        chi_x_tls: -alpha * b_over * tls,
        omega,
    })
}

/// The same four susceptibilities from a direct solve of the Fourier-domain
/// fluctuation equations `(-iω - M) (a_ω, a†_{-ω})ᵀ = N ξ`, with `M` the drift
/// matrix and `ξ` the bosonic and TLS inputs.
pub fn susceptibility_oracle<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
) -> Result<Susceptibilities<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let m = drift_matrix(params, alpha).entries;
    let iw = Complex::new(T::zero(), omega);
    let system = vec![vec![-iw - m[0][0], -m[0][1]], vec![-m[1][0], -iw - m[1][1]]];
    let sqrt_k = Complex::from(params.kappa.sqrt());
    let g = alpha.conj() * (T::lit(2.0) * params.kappa_n.sqrt());
    // columns: a_in,ω  a†_in,-ω  T_ω  T†_-ω, where T is a^TLS_in for HP- and its adjoint for HP+
    let injection = vec![vec![sqrt_k, zero, g, zero], vec![zero, sqrt_k, zero, g.conj()]];
    let singular = || Error::SingularResponse {
        omega: omega.to_f64_lossy(),
        determinant: 0.0,
    };
    let r = solve_dense(system, injection).ok_or_else(singular)?;
    if !r.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(singular());
    }
    Ok(Susceptibilities {
        chi_d: r[0][0],
        chi_x: r[0][1],
        chi_d_tls: r[0][2],
        chi_x_tls: r[0][3],
        omega,
    })
}

/// Total damping of the linearized fluctuations, `κ ± 4κ_N|α|²` (HP∓).
///
/// Negative past the HP+ parametric instability.
pub fn effective_linewidth<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> T {
    params.kappa + params.sign() * T::lit(4.0) * params.kappa_n * alpha.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HpBranch;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn linear_cavity_coefficients() {
        let p = ModelParams::new(1.0, 0.0, 20.0, 3.0, HpBranch::Minus);
        let abc = abc_coefficients(&p, Complex::new(0.1, 0.2), 0.0);
        assert_eq!(abc.a_coef, Complex::new(0.5, -20.0));
        assert_eq!(abc.b_coef, Complex::new(0.0, 0.0));
        assert_eq!(abc.c_coef, Complex::new(0.5, 20.0));
    }

    #[test]
    fn c_is_conjugate_of_a_at_minus_omega() {
        for b in HpBranch::BOTH {
            let p = ModelParams::new(1.0, 2e-3, 7.0, 3.0, b);
            let alpha = Complex::new(4.0, -9.0);
            for w in [-13.0, -2.5, 0.0, 0.1, 6.0, 40.0] {
                let plus = abc_coefficients(&p, alpha, w);
                let minus = abc_coefficients(&p, alpha, -w);
                assert_eq!(plus.c_coef, minus.a_coef.conj());
            }
        }
    }

    #[test]
    fn linear_limit() {
        let p = ModelParams::new(1.0, 0.0, 20.0, 3.0, HpBranch::Plus);
        for w in [-21.0, -20.0, 0.0, 19.0] {
            let chi = susceptibilities(&p, Complex::new(1.0, 1.0), w).unwrap();
            let lorentz = Complex::new(1.0, 0.0) / Complex::new(0.5, -(w + 20.0));
            assert!(close(chi.chi_d, lorentz, 1e-15));
            assert_eq!(chi.chi_x, Complex::new(0.0, 0.0));
            assert_eq!(chi.chi_d_tls, Complex::new(0.0, 0.0));
            assert_eq!(chi.chi_x_tls, Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn no_pump_no_parametric_response() {
        let p = ModelParams::new(1.0, 0.3, 2.0, 0.0, HpBranch::Minus);
        let chi = susceptibilities(&p, Complex::new(0.0, 0.0), -2.0).unwrap();
        assert_eq!(chi.chi_x, Complex::new(0.0, 0.0));
        assert_eq!(chi.chi_d_tls, Complex::new(0.0, 0.0));
        assert_eq!(chi.chi_x_tls, Complex::new(0.0, 0.0));
        assert!(close(chi.chi_d, Complex::new(2.0, 0.0), 1e-15));
    }

    #[test]
    fn tls_response_is_scaled_bosonic_response() {
        for b in HpBranch::BOTH {
            let p = ModelParams::new(1.0f64, 1.5e-4, 20.0, 700.0, b);
            let alpha = Complex::new(1.2, 35.0);
            for w in [-22.0, -20.0, 3.0] {
                let chi = susceptibilities(&p, alpha, w).unwrap();
                let scale = alpha.conj() * (2.0 * p.kappa_n.sqrt());
                assert!(close(chi.chi_d_tls, chi.chi_d * scale, 1e-14));
                assert!(close(chi.chi_x_tls, chi.chi_x * (alpha * (2.0 * p.kappa_n.sqrt())), 1e-14));
            }
        }
    }

    #[test]
    fn singular_at_threshold() {
        // Δ = 0, HP+ with 2κ_N|α|² = κ/2 - |B| puts a zero of AC-|B|² at ω = 0.
        let kn = 0.01;
        // damping D = 1/2 - 2 kn x, |B| = kn x; D = |B|  =>  x = 1 / (6 kn)
        let x: f64 = 1.0 / (6.0 * kn);
        let p = ModelParams::new(1.0, kn, 0.0, 1.0, HpBranch::Plus);
        let alpha = Complex::new(x.sqrt(), 0.0);
        assert!(matches!(
            susceptibilities(&p, alpha, 0.0),
            Err(Error::SingularResponse { .. })
        ));
    }

    #[test]
    fn oracle_agrees() {
        for b in HpBranch::BOTH {
            let p = ModelParams::new(1.0, 1.5e-4, 20.0, 700.0, b).with_occupancies(1.0, 1.0);
            let alpha = Complex::new(1.19, 34.96);
            for w in [-20.0, -19.5, 0.0, 20.0] {
                let x = susceptibilities(&p, alpha, w).unwrap();
                let y = susceptibility_oracle(&p, alpha, w).unwrap();
                assert!(close(y.chi_d, x.chi_d, 1e-12));
                assert!(close(y.chi_x, x.chi_x, 1e-12));
                assert!(close(y.chi_d_tls, x.chi_d_tls, 1e-12));
                assert!(close(y.chi_x_tls, x.chi_x_tls, 1e-12));
            }
        }
    }

    #[test]
    fn effective_linewidth_symmetry() {
        let alpha = Complex::new(3.0, -4.0);
        let minus = effective_linewidth(&ModelParams::new(1.0f64, 1e-3, 1.0, 0.0, HpBranch::Minus), alpha);
        let plus = effective_linewidth(&ModelParams::new(1.0f64, 1e-3, 1.0, 0.0, HpBranch::Plus), alpha);
        assert!((minus - 1.1).abs() < 1e-15);
        assert!((plus - 0.9).abs() < 1e-15);
        assert_eq!(minus + plus, 2.0);
        assert_eq!(
            effective_linewidth(&ModelParams::new(1.0f64, 1e-3, 1.0, 0.0, HpBranch::Plus), Complex::new(0.0, 0.0)),
            1.0
        );
    }
}
