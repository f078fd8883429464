//! Raw binary trajectory dump.
//!
//! Layout, all little endian: `version: u32`, `n_traj: u64`, `n_steps: u64`,
//! `dt: f64`, then `n_steps` rows of `n_traj` `(re, im)` pairs of `f64`.
//! `dt` is the spacing of the recorded rows.

use std::io::{self, Read, Write};

use num_complex::Complex;

use super::TrajectoryEnsemble;
use crate::real::Real;

pub const DUMP_VERSION: u32 = 1;

pub fn write_dump<T: Real, W: Write>(ensemble: &TrajectoryEnsemble<T>, mut out: W) -> io::Result<()> {
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    out.write_all(&(ensemble.n_traj() as u64).to_le_bytes())?;
    out.write_all(&(ensemble.n_samples() as u64).to_le_bytes())?;
    out.write_all(&ensemble.sample_interval().to_f64_lossy().to_le_bytes())?;
    for i in 0..ensemble.n_samples() {
        for traj in &ensemble.samples {
            out.write_all(&traj[i].re.to_f64_lossy().to_le_bytes())?;
            out.write_all(&traj[i].im.to_f64_lossy().to_le_bytes())?;
        }
    }
    out.flush()
}

/// Reads a dump back; times restart at zero.
pub fn read_dump<R: Read>(mut input: R) -> io::Result<TrajectoryEnsemble<f64>> {
    let mut u32buf = [0u8; 4];
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != DUMP_VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported dump version {version}"),
        ));
    }
    let mut next_u64 = |input: &mut R| -> io::Result<u64> {
        input.read_exact(&mut u64buf)?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let n_traj = next_u64(&mut input)? as usize;
    let n_steps = next_u64(&mut input)? as usize;
    let dt = f64::from_bits(next_u64(&mut input)?);

    let mut samples = vec![Vec::with_capacity(n_steps); n_traj];
    let mut pair = [0u8; 16];
    for _ in 0..n_steps {
        for traj in samples.iter_mut() {
            input.read_exact(&mut pair)?;
            let re = f64::from_le_bytes(pair[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(pair[8..].try_into().expect("8 bytes"));
            traj.push(Complex::new(re, im));
        }
    }
    Ok(TrajectoryEnsemble {
        times: (0..n_steps).map(|i| i as f64 * dt).collect(),
        samples,
        seed_used: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let ens = TrajectoryEnsemble {
            times: vec![0.0, 0.25, 0.5],
            samples: vec![
                vec![Complex::new(1.0, -2.0), Complex::new(0.5, 0.0), Complex::new(-1e-300, 7.0)],
                vec![Complex::new(3.0, 4.0), Complex::new(f64::MAX, 1.0), Complex::new(0.0, 0.0)],
            ],
            seed_used: 9,
        };
        let mut bytes = Vec::new();
        write_dump(&ens, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 4 + 8 + 8 + 8 + 3 * 2 * 16);
        assert_eq!(&bytes[..4], &1u32.to_le_bytes());
        // first row holds trajectory 0 then trajectory 1
        assert_eq!(&bytes[28..36], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[44..52], &3.0f64.to_le_bytes());
        let back = read_dump(bytes.as_slice()).unwrap();
        assert_eq!(back.samples, ens.samples);
        assert_eq!(back.times, ens.times);
    }

    #[test]
    fn rejects_unknown_version() {
        let bytes = 2u32.to_le_bytes();
        assert!(read_dump(&bytes[..]).is_err());
    }
}
