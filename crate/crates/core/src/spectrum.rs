//! Symmetrized quadrature noise spectrum of the intracavity field.
//!
//! For the quadrature `X^θ_ω = (a†_{-ω} e^{iθ} + a_ω e^{-iθ}) / √2` the
//! symmetrized spectrum `S^θ_ω = ½⟨{X^θ_ω, X^θ_{-ω}}⟩` of the linearized
//! fluctuations is
//!
//! ```text
//! S = ½ [Σ|χ|² + 2|Z| cos(2θ - φ)] (n_th + ½) + ½ [Σ|χ^TLS|² + 2|Z^TLS| cos(2θ - φ^TLS)] (n_th^TLS + ½)
//! Z = χ_d(ω) χ_x(-ω) + χ_d(-ω) χ_x(ω),   φ = Arg Z
//! ```
//!
//! where `Σ|χ|²` sums `|χ_d(±ω)|²` and `|χ_x(±ω)|²`. The angle enters as `2θ`,
//! so `S(θ) = S(θ + π)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::linear_response::{susceptibilities, Susceptibilities};
use crate::model::{HpBranch, ModelParams};
use crate::real::Real;
use crate::steady_state::drift_matrix;

/// One `(ω, θ)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample<T> {
    pub omega: T,
    pub theta: T,
    pub value: T,
}

/// A grid evaluation that may have failed; failures are kept in place.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample<T> {
    pub omega: T,
    pub theta: T,
    pub value: Result<T>,
}

/// θ-extrema of the spectrum at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumExtrema<T> {
    pub theta_min: T,
    pub theta_max: T,
    pub s_min: T,
    pub s_max: T,
    pub phi: T,
    pub phi_tls: T,
    /// No θ-dependence (no parametric term); `phi` is then reported as 0.
    pub flat: bool,
}

impl<T: Real> SpectrumExtrema<T> {
    /// `(s_max - s_min) / (s_max + s_min)`.
    pub fn contrast(&self) -> T {
        (self.s_max - self.s_min) / (self.s_max + self.s_min)
    }
}

/// θ-independent and θ-dependent pieces of the spectrum at one `ω`.
#[derive(Debug, Clone, Copy)]
struct SpectrumTerms<T> {
    /// `½ Σ|χ|² (n + ½)` summed over both baths.
    base: T,
    /// `(n_th + ½) Z`
    bosonic: Complex<T>,
    /// `(n_th^TLS + ½) Z^TLS`
    tls: Complex<T>,
}

impl<T: Real> SpectrumTerms<T> {
    fn new(params: &ModelParams<T>, alpha: Complex<T>, omega: T) -> Result<Self> {
        let at = susceptibilities(params, alpha, omega)?;
        let mirror = susceptibilities(params, alpha, -omega)?;
        Ok(Self::from_pair(params, &at, &mirror))
    }

    fn from_pair(params: &ModelParams<T>, at: &Susceptibilities<T>, mirror: &Susceptibilities<T>) -> Self {
        let half = T::lit(0.5);
        let occ = params.n_th + half;
        let occ_tls = params.n_th_tls + half;
        let sum_b = at.chi_d.norm_sqr()
            + mirror.chi_d.norm_sqr()
            + at.chi_x.norm_sqr()
            + mirror.chi_x.norm_sqr();
        let sum_t = at.chi_d_tls.norm_sqr()
            + mirror.chi_d_tls.norm_sqr()
            + at.chi_x_tls.norm_sqr()
            + mirror.chi_x_tls.norm_sqr();
        let z = at.chi_d * mirror.chi_x + mirror.chi_d * at.chi_x;
        let z_tls = at.chi_d_tls * mirror.chi_x_tls + mirror.chi_d_tls * at.chi_x_tls;
        SpectrumTerms {
            base: half * (sum_b * occ + sum_t * occ_tls),
            bosonic: z * occ,
            tls: z_tls * occ_tls,
        }
    }

    #[inline]
    fn at(&self, theta: T) -> T {
        let two_theta = T::lit(2.0) * theta;
        let rot = Complex::new(two_theta.cos(), -two_theta.sin());
        self.base + ((self.bosonic + self.tls) * rot).re
    }
}

/// Closed-form `S^θ_ω`.
pub fn quadrature_spectrum<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
    theta: T,
) -> Result<T> {
    Ok(SpectrumTerms::new(params, alpha, omega)?.at(theta))
}

/// `S^θ_ω` by a separate route: solve the Fourier-transformed fluctuation
/// equations for `(a_ω, a†_{-ω})` as linear maps of the four noise inputs,
/// build `X^θ_ω`, and contract with the normally ordered thermal correlators.
pub fn spectrum_oracle<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
    theta: T,
) -> Result<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let m = drift_matrix(params, alpha).entries;
    let iw = Complex::new(T::zero(), omega);
    // (-iω - M) (a_ω, a†_{-ω})ᵀ = N ξ
    let system = vec![
        vec![-iw - m[0][0], -m[0][1]],
        vec![-m[1][0], -iw - m[1][1]],
    ];
    let det = system[0][0] * system[1][1] - system[0][1] * system[1][0];
    if det.norm() < T::lit(crate::linear_response::SINGULAR_DETERMINANT) {
        return Err(Error::SingularResponse {
            omega: omega.to_f64_lossy(),
            determinant: det.norm().to_f64_lossy(),
        });
    }

    // ξ = (a_in,ω, a†_in,-ω, a^TLS_in,ω, a^TLS†_in,-ω)
    let sqrt_k = Complex::from(params.kappa.sqrt());
    let g = alpha.conj() * (T::lit(2.0) * params.kappa_n.sqrt());
    let injection = match params.branch {
        HpBranch::Minus => vec![vec![sqrt_k, zero, g, zero], vec![zero, sqrt_k, zero, g.conj()]],
        HpBranch::Plus => vec![vec![sqrt_k, zero, zero, g], vec![zero, sqrt_k, g.conj(), zero]],
    };
    let response = solve_dense(system, injection).ok_or(Error::SingularResponse {
        omega: omega.to_f64_lossy(),
        determinant: 0.0,
    })?;

    let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
    let e_minus = Complex::new(theta.cos(), -theta.sin());
    let u: Vec<Complex<T>> = (0..4)
        .map(|j| (response[0][j] * e_minus + response[1][j] * e_minus.conj()) * inv_sqrt2)
        .collect();

    let one = T::one();
    let (n, nt) = (params.n_th, params.n_th_tls);
    // ⟨ξ_j ξ_k†⟩ and ⟨ξ_j† ξ_k⟩; independent inputs, so both are diagonal
    let anti = [n + one, n, nt + one, nt];
    let normal = [n, n + one, nt, nt + one];
    let mut acc = T::zero();
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                continue;
            }
            acc = acc + (u[j] * u[k].conj()).re * anti[j] + (u[j].conj() * u[k]).re * normal[j];
        }
    }
    Ok(acc / T::lit(2.0))
}

/// Extremal quadratures at frequency `omega`.
pub fn spectrum_extrema<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega: T,
) -> Result<SpectrumExtrema<T>> {
    let terms = SpectrumTerms::new(params, alpha, omega)?;
    Ok(extrema_of_terms(&terms))
}

fn extrema_of_terms<T: Real>(terms: &SpectrumTerms<T>) -> SpectrumExtrema<T> {
    let k1 = terms.bosonic.norm();
    let k2 = terms.tls.norm();
    let tiny = T::lit(1e-15) * terms.base.abs().max(T::min_positive_value());
    let phase = |z: Complex<T>, k: T| if k > tiny { z.arg() } else { T::zero() };
    let phi = phase(terms.bosonic, k1);
    let phi_tls = phase(terms.tls, k2);

    if k1 + k2 <= tiny {
        return SpectrumExtrema {
            theta_min: T::zero(),
            theta_max: T::zero(),
            s_min: terms.base,
            s_max: terms.base,
            phi: T::zero(),
            phi_tls: T::zero(),
            flat: true,
        };
    }

    // both θ-terms oscillate as 2θ, so their sum is one cosine with phasor Z + Z^TLS
    let psi = (terms.bosonic + terms.tls).arg();
    let theta_max = wrap_half_turn(psi / T::lit(2.0));
    let theta_min = wrap_half_turn(theta_max + T::PI() / T::lit(2.0));
    let s_max = terms.at(theta_max);
    let s_min = terms.at(theta_min);
    SpectrumExtrema {
        theta_min,
        theta_max,
        s_min,
        s_max,
        phi,
        phi_tls,
        flat: false,
    }
}

fn wrap_half_turn<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let mut t = theta % pi;
    if t < T::zero() {
        t += pi;
    }
    if t >= pi {
        t -= pi;
    }
    t
}

/// Row-major (`ω` outer, `θ` inner) table of [`quadrature_spectrum`].
pub fn spectrum_grid<T: Real>(
    params: &ModelParams<T>,
    alpha: Complex<T>,
    omega_grid: &[T],
    theta_grid: &[T],
) -> Result<Vec<GridSample<T>>> {
    if omega_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid"));
    }
    if omega_grid.iter().chain(theta_grid).any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite grid value"));
    }
    let rows: Vec<Vec<GridSample<T>>> = omega_grid
        .par_iter()
        .map(|&omega| match SpectrumTerms::new(params, alpha, omega) {
            Ok(terms) => theta_grid
                .iter()
                .map(|&theta| GridSample {
                    omega,
                    theta,
                    value: Ok(terms.at(theta)),
                })
                .collect(),
            Err(e) => theta_grid
                .iter()
                .map(|&theta| GridSample {
                    omega,
                    theta,
                    value: Err(e.clone()),
                })
                .collect(),
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| {
                    let f = T::from_usize_lossy(i) / last;
                    start + (stop - start) * f
                })
                .collect()
        }
    }
}

/// Full width at half maximum of a single peak above the far-detuned floor.
///
/// The floor is the median of the outer 10% of the trace (5% per side); the
/// half-maximum crossings are linearly interpolated.
pub fn fitted_linewidth<T: Real>(trace: &[SpectrumSample<T>]) -> Result<T> {
    let mut pts: Vec<(T, T)> = trace.iter().map(|s| (s.omega, s.value)).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let n = pts.len();
    if n < 3 {
        return Err(Error::UnresolvedPeak { points: n });
    }
    let outer = ((n as f64) * 0.05).round().max(1.0) as usize;
    let mut edge: Vec<T> = pts[..outer]
        .iter()
        .chain(&pts[n - outer..])
        .map(|p| p.1)
        .collect();
    edge.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = edge.len();
    let baseline = if m % 2 == 1 {
        edge[m / 2]
    } else {
        (edge[m / 2 - 1] + edge[m / 2]) / T::lit(2.0)
    };

    let (peak, peak_value) = pts
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, p)| if p.1 > best.1 { (i, p.1) } else { best });
    if peak_value.partial_cmp(&(T::lit(2.0) * baseline)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NoPeak);
    }
    let half = baseline + (peak_value - baseline) / T::lit(2.0);
    let above = pts.iter().filter(|p| p.1 > half).count();
    if above < 10 {
        return Err(Error::UnresolvedPeak { points: above });
    }

    let crossing = |i: usize, j: usize| {
        // linear interpolation of the half level between samples i (above) and j (below)
        let (wa, va) = pts[i];
        let (wb, vb) = pts[j];
        wa + (wb - wa) * (va - half) / (va - vb)
    };
    let left = (0..peak).rev().find(|&i| pts[i].1 <= half);
    let right = (peak + 1..n).find(|&i| pts[i].1 <= half);
    match (left, right) {
        (Some(l), Some(r)) => Ok(crossing(r - 1, r) - crossing(l + 1, l)),
        _ => Err(Error::UnresolvedPeak { points: above }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    fn lorentz_pair(w: f64, delta: f64) -> f64 {
        let chi = |w: f64| 1.0 / (0.25 + (w + delta).powi(2));
        0.5 * (chi(w) + chi(-w))
    }

    #[test]
    fn linear_limit_is_flat_lorentzian() {
        let p = ModelParams::new(1.0, 0.0, 20.0, 700.0, HpBranch::Minus).with_occupancies(1.0, 3.0);
        let alpha = Complex::new(0.5, 34.0);
        for w in [-25.0, -20.0, -19.3, 0.0, 20.0] {
            let expected = lorentz_pair(w, 20.0) * 1.5;
            for th in [0.0, 0.4, 1.3, 2.9] {
                let s = quadrature_spectrum(&p, alpha, w, th).unwrap();
                assert!(close(s, expected, 1e-13), "{s} vs {expected}");
            }
            let ext = spectrum_extrema(&p, alpha, w).unwrap();
            assert!(ext.flat);
            assert_eq!(ext.phi, 0.0);
            assert_eq!(ext.s_min, ext.s_max);
        }
    }

    #[test]
    fn resonant_linear_value() {
        let p = ModelParams::new(1.0, 0.0, 20.0, 0.0, HpBranch::Minus);
        let s = quadrature_spectrum(&p, Complex::new(0.0, 0.0), -20.0, 0.3).unwrap();
        let expected = 0.5 * (4.0 + 1.0 / (1600.0 + 0.25)) * 0.5;
        assert!(close(s, expected, 1e-14));
    }

    #[test]
    fn vacuum_floor() {
        let p = ModelParams::new(1.0, 0.02, 3.0, 0.0, HpBranch::Plus);
        let w = 1.7;
        let s = quadrature_spectrum(&p, Complex::new(0.0, 0.0), w, 1.0).unwrap();
        let chi = |w: f64| 1.0 / (0.25 + (w + 3.0f64).powi(2));
        assert!(close(s, 0.25 * (chi(w) + chi(-w)), 1e-14));
    }

    #[test]
    fn extrema_match_brute_force_with_misaligned_phases() {
        let terms = SpectrumTerms {
            base: 3.0f64,
            bosonic: Complex::from_polar(0.4, 0.3),
            tls: Complex::from_polar(0.7, -2.1),
        };
        let ext = extrema_of_terms(&terms);
        assert!(!ext.flat);
        let (mut best, mut worst) = (f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..100_000 {
            let v = terms.at(std::f64::consts::PI * k as f64 / 100_000.0);
            best = best.max(v);
            worst = worst.min(v);
        }
        assert!(ext.s_max >= best && ext.s_max - best < 1e-9);
        assert!(ext.s_min <= worst && worst - ext.s_min < 1e-9);
        assert!(((ext.theta_min - ext.theta_max).abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((ext.phi - 0.3).abs() < 1e-15 && (ext.phi_tls + 2.1).abs() < 1e-15);
    }

    #[test]
    fn fwhm_of_synthetic_lorentzian() {
        let trace: Vec<SpectrumSample<f64>> = linspace(-10.0, 10.0, 2001)
            .into_iter()
            .map(|w| SpectrumSample {
                omega: w,
                theta: 0.0,
                value: 0.25 / (w * w + 0.25),
            })
            .collect();
        let fwhm = fitted_linewidth(&trace).unwrap();
        assert!((fwhm - 1.0).abs() <= 0.02, "{fwhm}");
    }

    #[test]
    fn fwhm_errors() {
        let flat: Vec<_> = linspace(0.0, 1.0, 50)
            .into_iter()
            .map(|w| SpectrumSample { omega: w, theta: 0.0, value: 1.0 })
            .collect();
        assert_eq!(fitted_linewidth(&flat), Err(Error::NoPeak));
        let spike: Vec<_> = linspace(-10.0, 10.0, 201)
            .into_iter()
            .map(|w: f64| SpectrumSample {
                omega: w,
                theta: 0.0,
                value: 0.01 / (w * w + 0.01) + 0.001,
            })
            .collect();
        assert!(matches!(fitted_linewidth(&spike), Err(Error::UnresolvedPeak { .. })));
    }

    #[test]
    fn grid_rejects_bad_axes() {
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0, HpBranch::Minus);
        let a = Complex::new(0.0, 0.0);
        assert!(spectrum_grid(&p, a, &[], &[0.0]).is_err());
        assert!(spectrum_grid(&p, a, &[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn grid_marks_singular_samples() {
        let kn = 0.01;
        let x: f64 = 1.0 / (6.0 * kn);
        let p = ModelParams::new(1.0, kn, 0.0, 1.0, HpBranch::Plus);
        let grid = spectrum_grid(&p, Complex::new(x.sqrt(), 0.0), &[0.0, 1.0], &[0.0, 0.5]).unwrap();
        assert_eq!(grid.len(), 4);
        assert!(grid[0].value.is_err() && grid[1].value.is_err());
        assert!(grid[2].value.is_ok() && grid[3].value.is_ok());
    }
}
