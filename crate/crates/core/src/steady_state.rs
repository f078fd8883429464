//! Steady-state amplitude of the pumped cavity and linear stability of each
//! root.
//!
//! In the frame rotating at the pump the classical amplitude obeys
//!
//! ```text
//! 0 = i Δ α - (κ/2 + s κ_N |α|²) α + √κ α_in,      s = +1 (HP-), -1 (HP+)
//! ```
//!
//! Taking the squared modulus gives a real cubic in the occupancy `x = |α|²`,
//! `x [(κ/2 + s κ_N x)² + Δ²] = κ |α_in|²`, whose non-negative roots are found
//! in closed form and then polished by Newton on the complex residual above.

use num_complex::Complex;

use crate::cubic::{dedup_relative, real_cubic_roots};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::real::Real;

const MAX_POLISH_ITERATIONS: usize = 100;

/// One root of the steady-state equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSolution<T> {
    /// Intracavity amplitude in the pump frame.
    pub alpha: Complex<T>,
    /// `|alpha|^2`.
    pub occupancy_x: T,
    /// Both drift eigenvalues have strictly negative real part.
    pub stable: bool,
    pub drift_eigenvalues: [Complex<T>; 2],
    /// `|iΔα - (κ/2 ± κ_N|α|²)α + √κ α_in|`.
    pub residual: T,
}

/// Generator of the linearized `(a, a†)` dynamics, `d/dt (a, a†) = M (a, a†)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix<T> {
    pub entries: [[Complex<T>; 2]; 2],
}

impl<T: Real> DriftMatrix<T> {
    pub fn trace(&self) -> Complex<T> {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn determinant(&self) -> Complex<T> {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `M · (a, a*)` for a c-number fluctuation `a`, first component.
    #[inline]
    pub fn apply(&self, a: Complex<T>) -> Complex<T> {
        self.entries[0][0] * a + self.entries[0][1] * a.conj()
    }
}

/// `(c3, c2, c1, c0)` of the occupancy cubic.
pub fn cubic_coefficients<T: Real>(params: &ModelParams<T>) -> [T; 4] {
    let half_k = params.kappa / T::lit(2.0);
    let kn = params.kappa_n;
    [
        kn * kn,
        params.sign() * T::lit(2.0) * half_k * kn,
        half_k * half_k + params.delta * params.delta,
        -params.kappa * params.alpha_in.norm_sqr(),
    ]
}

/// Amplitude of the cavity without the TLS bath, `√κ α_in / (κ/2 - iΔ)`.
pub fn linear_amplitude<T: Real>(params: &ModelParams<T>) -> Complex<T> {
    let denom = Complex::new(params.kappa / T::lit(2.0), -params.delta);
    params.alpha_in * params.kappa.sqrt() / denom
}

/// Residual of the complex steady-state equation at `alpha`.
pub fn steady_state_residual<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> T {
    equation(params, alpha).norm()
}

fn equation<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> Complex<T> {
    let damping = params.kappa / T::lit(2.0) + params.sign() * params.kappa_n * alpha.norm_sqr();
    Complex::new(-damping, params.delta) * alpha + params.alpha_in * params.kappa.sqrt()
}

fn residual_tolerance<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> T {
    let a = alpha.norm();
    let magnitude = params.kappa.sqrt() * params.alpha_in.norm()
        + (params.delta.abs() + params.kappa / T::lit(2.0) + params.kappa_n * a * a) * a;
    T::lit(1e-10).max(T::lit(64.0) * T::epsilon() * magnitude)
}

/// All steady states, ascending in occupancy.
pub fn solve_steady_state<T: Real>(params: &ModelParams<T>) -> Result<Vec<SteadyStateSolution<T>>> {
    let mut occupancies = candidate_occupancies(params);
    occupancies.retain(|x| *x >= T::zero());
    occupancies.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    dedup_relative(&mut occupancies, T::lit(1e-9));

    let half_k = params.kappa / T::lit(2.0);
    let mut out = Vec::with_capacity(occupancies.len());
    for x in occupancies {
        let denom = Complex::new(half_k + params.sign() * params.kappa_n * x, -params.delta);
        if denom.norm() < T::lit(1e-12) {
            // HP+ with vanishing net damping at Δ = 0: α is undefined here.
            continue;
        }
        let seed = params.alpha_in * params.kappa.sqrt() / denom;
        let alpha = polish(params, seed)?;
        let residual = steady_state_residual(params, alpha);
        let (stable, drift_eigenvalues) = assess_stability(&drift_matrix(params, alpha));
        out.push(SteadyStateSolution {
            alpha,
            occupancy_x: alpha.norm_sqr(),
            stable,
            drift_eigenvalues,
            residual,
        });
    }
    out.sort_by(|a, b| a.occupancy_x.partial_cmp(&b.occupancy_x).expect("finite"));
    let mut deduped: Vec<SteadyStateSolution<T>> = Vec::with_capacity(out.len());
    for s in out {
        match deduped.last() {
            Some(prev)
                if (s.occupancy_x - prev.occupancy_x).abs()
                    <= T::lit(1e-9) * s.occupancy_x.max(prev.occupancy_x) => {}
            _ => deduped.push(s),
        }
    }
    Ok(deduped)
}

/// The root an adiabatic turn-on of the drive settles on: the stable one
/// with the smallest occupancy.
pub fn default_root<T: Real>(roots: &[SteadyStateSolution<T>]) -> Option<&SteadyStateSolution<T>> {
    roots.iter().find(|r| r.stable)
}

fn candidate_occupancies<T: Real>(params: &ModelParams<T>) -> Vec<T> {
    let drive = params.kappa * params.alpha_in.norm_sqr();
    let half_k = params.kappa / T::lit(2.0);
    if params.kappa_n == T::zero() {
        return vec![drive / (half_k * half_k + params.delta * params.delta)];
    }
    // In u = κ_N x / κ the cubic is monic and well scaled:
    // u³ + s u² + (1/4 + (Δ/κ)²) u - κ_N |α_in|² / κ² = 0.
    let k = params.kappa;
    let detuning = params.delta / k;
    let forcing = params.kappa_n * params.alpha_in.norm_sqr() / (k * k);
    real_cubic_roots(
        T::one(),
        params.sign(),
        T::lit(0.25) + detuning * detuning,
        -forcing,
    )
    .into_iter()
    .map(|u| {
        // α_in = 0 gives u = 0 up to rounding
        let u = if u.abs() <= T::lit(16.0) * T::epsilon() && forcing == T::zero() {
            T::zero()
        } else {
            u
        };
        u * k / params.kappa_n
    })
    .collect()
}

/// Newton iteration on the complex residual, treating (α, α*) as independent.
/// Its Jacobian is exactly the drift matrix at α.
fn polish<T: Real>(params: &ModelParams<T>, mut alpha: Complex<T>) -> Result<Complex<T>> {
    let mut residual = steady_state_residual(params, alpha);
    for _ in 0..MAX_POLISH_ITERATIONS {
        let tol = residual_tolerance(params, alpha);
        let f = equation(params, alpha);
        let m = drift_matrix(params, alpha).entries;
        let det = m[0][0].norm_sqr() - m[0][1].norm_sqr();
        if det.abs() <= T::epsilon() * m[0][0].norm_sqr() {
            // saddle-node: Newton is singular, keep the closed-form value
            break;
        }
        let step = (m[0][1] * f.conj() - f * m[1][1]) / det;
        let next = alpha + step;
        let next_residual = steady_state_residual(params, next);
        if next_residual >= residual && residual <= tol {
            break;
        }
        alpha = next;
        residual = next_residual;
        if residual <= tol && step.norm() <= T::lit(4.0) * T::epsilon() * alpha.norm() {
            break;
        }
    }
    if residual <= residual_tolerance(params, alpha) {
        Ok(alpha)
    } else {
        Err(Error::RootRefinementFailed {
            residual: residual.to_f64_lossy(),
            iterations: MAX_POLISH_ITERATIONS,
        })
    }
}

/// Drift matrix of the fluctuations around `alpha`.
///
/// HP-: `[[iΔ - κ/2 - 2κ_N|α|², -κ_N α²], [-κ_N α*², -iΔ - κ/2 - 2κ_N|α|²]]`;
/// HP+ flips the sign of every `κ_N` term.
pub fn drift_matrix<T: Real>(params: &ModelParams<T>, alpha: Complex<T>) -> DriftMatrix<T> {
    let s = params.sign();
    let damping = params.kappa / T::lit(2.0) + s * T::lit(2.0) * params.kappa_n * alpha.norm_sqr();
    let parametric = -(alpha * alpha) * (s * params.kappa_n);
    DriftMatrix {
        entries: [
            [Complex::new(-damping, params.delta), parametric],
            [parametric.conj(), Complex::new(-damping, -params.delta)],
        ],
    }
}

/// Eigenvalues of `m` and whether both lie strictly in the left half plane.
pub fn assess_stability<T: Real>(m: &DriftMatrix<T>) -> (bool, [Complex<T>; 2]) {
    let eig = eigenvalues_2x2(m);
    let stable = eig.iter().all(|l| l.re < T::zero());
    (stable, eig)
}

pub(crate) fn eigenvalues_2x2<T: Real>(m: &DriftMatrix<T>) -> [Complex<T>; 2] {
    let half_tr = m.trace() / T::lit(2.0);
    let det = m.determinant();
    let root = (half_tr * half_tr - det).sqrt();
    // pick the sign that avoids cancellation, recover the other from the product
    let (big, other) = if (half_tr.conj() * root).re >= T::zero() {
        (half_tr + root, half_tr - root)
    } else {
        (half_tr - root, half_tr + root)
    };
    let second = if big.norm() > T::zero() { det / big } else { other };
    let mut eig = [big, second];
    eig.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal));
    eig
}

/// Largest real part among the drift eigenvalues.
pub fn max_growth_rate<T: Real>(eig: &[Complex<T>; 2]) -> T {
    eig[0].re.max(eig[1].re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HpBranch;

    fn p(kn: f64, delta: f64, ain: f64, branch: HpBranch) -> ModelParams<f64> {
        ModelParams::new(1.0, kn, delta, ain, branch)
    }

    #[test]
    fn coefficients() {
        assert_eq!(cubic_coefficients(&p(0.0, 0.0, 1.0, HpBranch::Minus)), [0.0, 0.0, 0.25, -1.0]);
        let c = cubic_coefficients(&p(1.5e-4, 20.0, 700.0, HpBranch::Minus));
        assert!((c[0] - 2.25e-8).abs() < 1e-20);
        assert!((c[1] - 1.5e-4).abs() < 1e-18);
        assert_eq!(c[2], 400.25);
        assert_eq!(c[3], -490_000.0);
        let c = cubic_coefficients(&p(1.5e-4, 20.0, 700.0, HpBranch::Plus));
        assert!((c[1] + 1.5e-4).abs() < 1e-18);
    }

    #[test]
    fn linear_resonant_cavity() {
        let roots = solve_steady_state(&p(0.0, 0.0, 1.0, HpBranch::Minus)).unwrap();
        assert_eq!(roots.len(), 1);
        let r = roots[0];
        assert!((r.alpha - Complex::new(2.0, 0.0)).norm() < 1e-12);
        assert!((r.occupancy_x - 4.0).abs() < 1e-12);
        assert!(r.stable);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn zero_drive_has_empty_cavity() {
        for b in HpBranch::BOTH {
            let roots = solve_steady_state(&p(1e-3, 0.0, 0.0, b)).unwrap();
            assert_eq!(roots.len(), 1, "{b}");
            assert_eq!(roots[0].alpha, Complex::new(0.0, 0.0));
            assert!(roots[0].stable);
        }
    }

    #[test]
    fn hp_plus_multistability() {
        // Δ = 0, strong κ_N: x (1/2 - κ_N x)² = α_in² has three positive roots
        // when the drive is small enough.
        let params = p(0.1, 0.0, 0.3, HpBranch::Plus);
        let roots = solve_steady_state(&params).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(r.residual <= 1e-10);
            let x = r.occupancy_x;
            assert!((x * (0.5 - 0.1 * x).powi(2) - 0.09).abs() < 1e-12);
        }
        assert!(roots[0].stable);
        assert!(!roots[2].stable);
        assert_eq!(default_root(&roots).unwrap(), &roots[0]);
    }

    #[test]
    fn drift_limits() {
        for kn in [0.0, 0.3] {
            let params = p(kn, 20.0, 5.0, HpBranch::Minus);
            let alpha = if kn == 0.0 { Complex::new(0.3, -1.2) } else { Complex::new(0.0, 0.0) };
            let m = drift_matrix(&params, alpha).entries;
            assert_eq!(m[0][0], Complex::new(-0.5, 20.0));
            assert_eq!(m[1][1], Complex::new(-0.5, -20.0));
            assert_eq!(m[0][1], Complex::new(0.0, 0.0));
            assert_eq!(m[1][0], Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn drift_conjugate_structure() {
        for b in HpBranch::BOTH {
            let m = drift_matrix(&p(0.2, -3.0, 1.0, b), Complex::new(0.7, -1.1)).entries;
            assert_eq!(m[1][1], m[0][0].conj());
            assert_eq!(m[1][0], m[0][1].conj());
        }
    }

    #[test]
    fn stability_examples() {
        let diag = drift_matrix(&p(0.0, 20.0, 0.0, HpBranch::Minus), Complex::new(0.0, 0.0));
        let (stable, eig) = assess_stability(&diag);
        assert!(stable);
        let mut im: Vec<f64> = eig.iter().map(|l| l.im).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for l in eig {
            assert!((l.re + 0.5).abs() < 1e-14);
        }
        assert!((im[0] + 20.0).abs() < 1e-12 && (im[1] - 20.0).abs() < 1e-12);

        let m = DriftMatrix {
            entries: [
                [Complex::new(-0.4, 0.0), Complex::new(1.0, 0.0)],
                [Complex::new(1.0, 0.0), Complex::new(-0.4, 0.0)],
            ],
        };
        let (stable, eig) = assess_stability(&m);
        assert!(!stable);
        assert!((eig[0] - Complex::new(0.6, 0.0)).norm() < 1e-14);
        assert!((eig[1] - Complex::new(-1.4, 0.0)).norm() < 1e-14);
    }
}
