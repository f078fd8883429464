//! Finite-`j` checks of the Holstein-Primakoff representations.
//!
//! Spin matrices use the descending basis `|j, j⟩, |j, j-1⟩, …, |j, -j⟩`, so
//! `m` sits at index `j - m`. The boson number state `|n⟩` is identified with
//! `|j, -j+n⟩` for HP- (index `2j - n`) and with `|j, j-n⟩` for HP+ (index `n`).
//! All matrices are dense.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::HpBranch;
use crate::real::Real;

/// Largest spin dimension `2j + 1` handled densely.
pub const MAX_DIMENSION: usize = 4097;

type CMat<T> = DMatrix<Complex<T>>;

/// A positive half-integer stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger(u32);

impl HalfInteger {
    pub fn from_twice(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidJ(0.0));
        }
        Ok(HalfInteger(two_j))
    }

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice >= 1.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64) {
            return Err(Error::InvalidJ(j));
        }
        Ok(HalfInteger(twice as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `2j + 1`.
    pub fn dimension(self) -> usize {
        self.0 as usize + 1
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `Jz`, `J+`, `J-` in some basis.
///
/// `valid_dim` is the leading block on which the algebra is meant to hold;
/// it is the full dimension except for truncated approximations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep<T: Real> {
    pub j: HalfInteger,
    pub jz: CMat<T>,
    pub jplus: CMat<T>,
    pub jminus: CMat<T>,
    pub valid_dim: usize,
}

/// Boson operators on the number states `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBoson<T: Real> {
    pub n_max: usize,
    pub d: CMat<T>,
    pub d_dagger: CMat<T>,
    pub number: CMat<T>,
}

impl<T: Real> TruncatedBoson<T> {
    pub fn new(n_max: usize) -> Self {
        let dim = n_max + 1;
        let d = CMat::from_fn(dim, dim, |r, c| {
            if c == r + 1 {
                re(T::from_usize_lossy(c).sqrt())
            } else {
                zero()
            }
        });
        let d_dagger = adjoint(&d);
        let number = CMat::from_fn(dim, dim, |r, c| if r == c { re(T::from_usize_lossy(r)) } else { zero() });
        TruncatedBoson { n_max, d, d_dagger, number }
    }

    pub fn dimension(&self) -> usize {
        self.n_max + 1
    }

    /// `[d, d†]`; the identity except for `-n_max` in the last diagonal entry.
    pub fn commutator(&self) -> CMat<T> {
        &self.d * &self.d_dagger - &self.d_dagger * &self.d
    }
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(m: &CMat<T>) -> CMat<T> {
    m.transpose().map(|z| z.conj())
}

#[inline]
fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
fn re<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

fn check_dimension(j: HalfInteger) -> Result<()> {
    let dimension = j.dimension();
    if dimension > MAX_DIMENSION {
        return Err(Error::TooLarge { dimension });
    }
    Ok(())
}

/// Standard spin-`j` matrices, `J+|j,m⟩ = √(j(j+1) - m(m+1)) |j,m+1⟩`.
pub fn spin_matrices<T: Real>(j: HalfInteger) -> Result<SpinRep<T>> {
    check_dimension(j)?;
    let dim = j.dimension();
    let jv = T::lit(j.value());
    let m_at = |idx: usize| jv - T::from_usize_lossy(idx);
    let jz = CMat::from_fn(dim, dim, |r, c| if r == c { re(m_at(r)) } else { zero() });
    let jplus = CMat::from_fn(dim, dim, |r, c| {
        if r + 1 == c {
            let m = m_at(c);
            re((jv * (jv + T::one()) - m * (m + T::one())).sqrt())
        } else {
            zero()
        }
    });
    let jminus = adjoint(&jplus);
    Ok(SpinRep { j, jz, jplus, jminus, valid_dim: dim })
}

/// Spin index of boson state `n`.
pub fn embed_index(j: HalfInteger, branch: HpBranch, n: usize) -> usize {
    match branch {
        HpBranch::Minus => j.twice() as usize - n,
        HpBranch::Plus => n,
    }
}

/// Spin operators built from bosons on the number basis.
///
/// With `exact` the square-root factors are kept and the boson space is the
/// full `0..=2j`:
/// HP- `J+ = d† √(2j - N)`, `Jz = N - j`; HP+ `J+ = √(2j - N) d`, `Jz = j - N`.
/// Without, the square roots are replaced by `√(2j)` on `0..=n_max + 1` and
/// only the `0..=n_max` block is declared valid.
pub fn hp_spin_rep<T: Real>(
    j: HalfInteger,
    branch: HpBranch,
    exact: bool,
    n_max: usize,
) -> Result<SpinRep<T>> {
    check_dimension(j)?;
    let two_j = j.twice() as usize;
    if n_max > two_j {
        return Err(Error::SubspaceTooLarge { n_max, two_j: j.twice() });
    }
    let top = if exact { two_j } else { n_max + 1 };
    let boson = TruncatedBoson::<T>::new(top);
    let dim = boson.dimension();
    let jv = T::lit(j.value());
    let tj = T::from_usize_lossy(two_j);
    let root = CMat::from_fn(dim, dim, |r, c| {
        if r != c {
            zero()
        } else if exact {
            re((tj - T::from_usize_lossy(r)).max(T::zero()).sqrt())
        } else {
            re(tj.sqrt())
        }
    });
    let shifted = CMat::from_fn(dim, dim, |r, c| if r == c { re(jv) } else { zero() });
    let (jplus, jz) = match branch {
        HpBranch::Minus => (&boson.d_dagger * &root, &boson.number - &shifted),
        HpBranch::Plus => (&root * &boson.d, &shifted - &boson.number),
    };
    let jminus = match branch {
        HpBranch::Minus => &root * &boson.d,
        HpBranch::Plus => &boson.d_dagger * &root,
    };
    Ok(SpinRep {
        j,
        jz,
        jplus,
        jminus,
        valid_dim: if exact { dim } else { n_max + 1 },
    })
}

/// Largest entry modulus.
pub fn max_norm<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

fn block_max_norm<T: Real>(m: &CMat<T>, size: usize) -> T {
    max_norm(&m.view((0, 0), (size, size)).clone_owned())
}

/// `‖[Jz,J+] - J+‖`, `‖[Jz,J-] + J-‖`, `‖[J+,J-] - 2Jz‖` over the valid block,
/// each divided by `‖J+‖`.
pub fn commutator_residuals<T: Real>(rep: &SpinRep<T>) -> [T; 3] {
    let comm = |a: &CMat<T>, b: &CMat<T>| a * b - b * a;
    let two = re(T::lit(2.0));
    let scale = max_norm(&rep.jplus).max(T::min_positive_value());
    let size = rep.valid_dim;
    [
        block_max_norm(&(comm(&rep.jz, &rep.jplus) - &rep.jplus), size) / scale,
        block_max_norm(&(comm(&rep.jz, &rep.jminus) + &rep.jminus), size) / scale,
        block_max_norm(&(comm(&rep.jplus, &rep.jminus) - &rep.jz * two), size) / scale,
    ]
}

/// `‖J+† - J-‖ / ‖J+‖` for an independently built `J-`.
pub fn adjoint_residual<T: Real>(rep: &SpinRep<T>) -> T {
    max_norm(&(adjoint(&rep.jplus) - &rep.jminus)) / max_norm(&rep.jplus).max(T::min_positive_value())
}

/// Distance between `J±/√(2j)` and the plain boson ladder `d†`/`d` on the
/// states `n ≤ n_max`, in the max-norm.
///
/// The spin matrices are mapped into the boson number basis through the
/// branch embedding and compared column by column for `n ≤ n_max`. A boson
/// step that leaves the spin ladder (from `n = 2j`) counts in full.
pub fn hp_map_error<T: Real>(j: HalfInteger, branch: HpBranch, n_max: usize) -> Result<T> {
    let two_j = j.twice() as usize;
    if n_max > two_j {
        return Err(Error::SubspaceTooLarge { n_max, two_j: j.twice() });
    }
    let spin = spin_matrices::<T>(j)?;
    let norm = T::from_usize_lossy(two_j).sqrt();
    let dim = spin.jz.nrows();
    let rows = (n_max + 2).min(dim);
    // spin raising along the boson ladder: J+ for HP-, J- for HP+
    let (up, down) = match branch {
        HpBranch::Minus => (&spin.jplus, &spin.jminus),
        HpBranch::Plus => (&spin.jminus, &spin.jplus),
    };
    let pulled = |m: &CMat<T>| {
        CMat::from_fn(rows, n_max + 1, |r, c| {
            m[(embed_index(j, branch, r), embed_index(j, branch, c))] / re(norm)
        })
    };
    let boson = TruncatedBoson::<T>::new(rows - 1);
    let creation = boson.d_dagger.view((0, 0), (rows, n_max + 1)).clone_owned();
    let annihilation = boson.d.view((0, 0), (rows, n_max + 1)).clone_owned();
    let mut error = max_norm(&(pulled(up) - creation)).max(max_norm(&(pulled(down) - annihilation)));
    if n_max == two_j {
        error = error.max(T::from_usize_lossy(two_j + 1).sqrt());
    }
    Ok(error)
}

/// `√(n+1) |1 - √(1 - n/2j)|` maximized over `n ≤ n_max`.
pub fn hp_map_error_closed_form(j: HalfInteger, n_max: usize) -> f64 {
    let two_j = j.twice() as f64;
    (0..=n_max)
        .map(|n| {
            let n = n as f64;
            (n + 1.0).sqrt() * (1.0 - (1.0 - n / two_j).max(0.0).sqrt()).abs()
        })
        .fold(0.0, f64::max)
}

/// One row of the convergence report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    pub j: HalfInteger,
    pub branch: HpBranch,
    pub n_max: usize,
    pub error: T,
}

/// [`hp_map_error`] for every `j` and both branches, in input order.
pub fn convergence_report<T: Real>(js: &[HalfInteger], n_max: usize) -> Result<Vec<ConvergenceRow<T>>> {
    let rows: Vec<Result<Vec<ConvergenceRow<T>>>> = js
        .par_iter()
        .map(|&j| {
            HpBranch::BOTH
                .iter()
                .map(|&branch| {
                    Ok(ConvergenceRow {
                        j,
                        branch,
                        n_max,
                        error: hp_map_error(j, branch, n_max)?,
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}
