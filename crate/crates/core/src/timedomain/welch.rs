//! Averaged, Hann-windowed periodogram of a quadrature of the sampled field.

use num_complex::Complex;
use rustfft::FftPlanner;

use super::TrajectoryEnsemble;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectrum::SpectrumSample;

/// Welch estimate of the two-sided spectral density of
/// `X^θ(t) = (a* e^{iθ} + a e^{-iθ}) / √2`, averaged over segments and trajectories.
///
/// A white process of two-sided density `S0` returns `S0`; the frequency axis
/// is ascending and uses the `e^{iωt}` convention of the analytic spectrum.
pub fn welch_psd<T: Real>(
    ensemble: &TrajectoryEnsemble<T>,
    theta: T,
    segment_length: usize,
    overlap_fraction: T,
) -> Result<Vec<SpectrumSample<T>>> {
    let available = ensemble.n_samples();
    if segment_length < 2 || segment_length > available {
        return Err(Error::TooFewSamples {
            needed: segment_length.max(2),
            available,
        });
    }
    if !(overlap_fraction >= T::zero() && overlap_fraction < T::one()) {
        return Err(Error::InvalidConfig("overlap_fraction must lie in [0, 1)"));
    }
    let tau = ensemble.sample_interval();
    let shift = (T::from_usize_lossy(segment_length) * (T::one() - overlap_fraction))
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(1);

    let window = hann(segment_length);
    let window_power = window.iter().fold(T::zero(), |acc, &w| acc + w * w);
    let rot = Complex::new(theta.cos(), -theta.sin());
    let scale = T::lit(2.0).sqrt();

    let fft = FftPlanner::new().plan_fft_inverse(segment_length);
    let mut buffer = vec![Complex::new(T::zero(), T::zero()); segment_length];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    let mut acc = vec![T::zero(); segment_length];
    let mut count = 0usize;

    for traj in &ensemble.samples {
        let mut start = 0;
        while start + segment_length <= available {
            for (i, slot) in buffer.iter_mut().enumerate() {
                // X = √2 Re(a e^{-iθ})
                let x = (traj[start + i] * rot).re * scale;
                *slot = Complex::new(x * window[i], T::zero());
            }
            fft.process_with_scratch(&mut buffer, &mut scratch);
            for (a, v) in acc.iter_mut().zip(&buffer) {
                *a += v.norm_sqr();
            }
            count += 1;
            start += shift;
        }
    }

    let norm = tau / (window_power * T::from_usize_lossy(count));
    let omega_step = T::lit(2.0) * T::PI() / (tau * T::from_usize_lossy(segment_length));
    let half = segment_length / 2;
    let out = (0..segment_length)
        .map(|j| {
            // ascending: bins -L/2 .. L/2-1
            let bin = (j + segment_length - half) % segment_length;
            let signed = j as i64 - half as i64;
            SpectrumSample {
                omega: omega_step * T::lit(signed as f64),
                theta,
                value: acc[bin] * norm,
            }
        })
        .collect();
    Ok(out)
}

/// `∫ S dω / 2π` over a uniformly spaced spectrum.
pub fn integrated_power<T: Real>(psd: &[SpectrumSample<T>]) -> T {
    if psd.len() < 2 {
        return T::zero();
    }
    let step = psd[1].omega - psd[0].omega;
    psd.iter().fold(T::zero(), |acc, s| acc + s.value) * step / (T::lit(2.0) * T::PI())
}

/// Periodic Hann window.
fn hann<T: Real>(n: usize) -> Vec<T> {
    let len = T::from_usize_lossy(n);
    (0..n)
        .map(|i| {
            let phase = T::lit(2.0) * T::PI() * T::from_usize_lossy(i) / len;
            (T::one() - phase.cos()) / T::lit(2.0)
        })
        .collect()
}
