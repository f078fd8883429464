//! Physical parameters of one driven cavity with a bosonic bath and a
//! two-level-system bath, and their normalization to units of `kappa`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Which Holstein-Primakoff expansion describes the TLS bath.
///
/// `Minus` expands around the TLS ground state (nonlinear damping adds to
/// `kappa`); `Plus` expands around the fully inverted state (nonlinear damping
/// subtracts from `kappa` and the TLS noise enters conjugated).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HpBranch {
    #[default]
    Minus,
    Plus,
}

impl HpBranch {
    /// `+1` for `Minus`, `-1` for `Plus`: the sign in front of every `kappa_n` term.
    #[inline]
    pub fn sign<T: Real>(self) -> T {
        match self {
            HpBranch::Minus => T::one(),
            HpBranch::Plus => -T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HpBranch::Minus => "minus",
            HpBranch::Plus => "plus",
        }
    }

    pub const BOTH: [HpBranch; 2] = [HpBranch::Minus, HpBranch::Plus];
}

impl std::fmt::Display for HpBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Rates and drive of one simulation instance.
///
/// After [`validate_params`] every frequency is in units of `kappa` and
/// `kappa == 1`; the original `kappa` is kept in [`ModelParams::kappa_unit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct ModelParams<T> {
    /// Linear damping rate.
    pub kappa: T,
    /// Aggregate nonlinear (TLS) damping rate.
    pub kappa_n: T,
    /// Pump detuning `omega_p - omega_c`.
    pub delta: T,
    /// Coherent drive amplitude, in units of `kappa^{1/2}`.
    #[serde(with = "complex_object")]
    pub alpha_in: Complex<T>,
    /// Thermal occupancy of the bosonic bath.
    #[serde(default = "T::zero")]
    pub n_th: T,
    /// Thermal occupancy of the TLS bath.
    #[serde(default = "T::zero")]
    pub n_th_tls: T,
    #[serde(default)]
    pub branch: HpBranch,
    #[serde(skip, default = "T::one")]
    kappa_unit: T,
}

impl<T: Real> ModelParams<T> {
    /// Raw (unvalidated) parameters with a real drive amplitude and zero temperature.
    pub fn new(kappa: T, kappa_n: T, delta: T, alpha_in: T, branch: HpBranch) -> Self {
        ModelParams {
            kappa,
            kappa_n,
            delta,
            alpha_in: Complex::new(alpha_in, T::zero()),
            n_th: T::zero(),
            n_th_tls: T::zero(),
            branch,
            kappa_unit: T::one(),
        }
    }

    pub fn with_occupancies(mut self, n_th: T, n_th_tls: T) -> Self {
        self.n_th = n_th;
        self.n_th_tls = n_th_tls;
        self
    }

    pub fn with_branch(mut self, branch: HpBranch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_drive(mut self, alpha_in: Complex<T>) -> Self {
        self.alpha_in = alpha_in;
        self
    }

    pub fn with_kappa_n(mut self, kappa_n: T) -> Self {
        self.kappa_n = kappa_n;
        self
    }

    /// The physical `kappa` these (normalized) parameters are measured in.
    pub fn kappa_unit(&self) -> T {
        self.kappa_unit
    }

    /// `+1` for HP-, `-1` for HP+.
    #[inline]
    pub fn sign(&self) -> T {
        self.branch.sign()
    }
}

/// Checks `raw` and rescales it so that `kappa == 1`.
///
/// Frequencies and rates are divided by `kappa`, the drive by `sqrt(kappa)`;
/// occupancies are dimensionless and pass through unchanged.
pub fn validate_params<T: Real>(raw: &ModelParams<T>) -> Result<ModelParams<T>> {
    let finite = [
        ("kappa", raw.kappa),
        ("kappa_n", raw.kappa_n),
        ("delta", raw.delta),
        ("alpha_in.re", raw.alpha_in.re),
        ("alpha_in.im", raw.alpha_in.im),
        ("n_th", raw.n_th),
        ("n_th_tls", raw.n_th_tls),
    ];
    for (name, v) in finite {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if raw.kappa <= T::zero() {
        return Err(Error::NonPositiveKappa(raw.kappa.to_f64_lossy()));
    }
    for (name, v) in [
        ("kappa_n", raw.kappa_n),
        ("n_th", raw.n_th),
        ("n_th_tls", raw.n_th_tls),
    ] {
        if v < T::zero() {
            return Err(Error::NegativeRate {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }

    let k = raw.kappa;
    let sqrt_k = k.sqrt();
    Ok(ModelParams {
        kappa: T::one(),
        kappa_n: raw.kappa_n / k,
        delta: raw.delta / k,
        alpha_in: raw.alpha_in / sqrt_k,
        n_th: raw.n_th,
        n_th_tls: raw.n_th_tls,
        branch: raw.branch,
        kappa_unit: raw.kappa_unit * k,
    })
}

/// `{"re": .., "im": ..}` encoding of complex numbers.
pub(crate) mod complex_object {
    use num_complex::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::real::Real;

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields, bound = "T: Real")]
    struct Repr<T> {
        re: T,
        #[serde(default = "T::zero")]
        im: T,
    }

    pub fn serialize<T: Real, S: Serializer>(c: &Complex<T>, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Complex<T>, D::Error> {
        let r = Repr::<T>::deserialize(d)?;
        Ok(Complex::new(r.re, r.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thermal_point() -> ModelParams<f64> {
        ModelParams::new(1.0, 1.5e-4, 20.0, 700.0, HpBranch::Minus).with_occupancies(1.0, 1.0)
    }

    #[test]
    fn rescales_to_unit_kappa() {
        let raw = ModelParams::new(2.0, 3e-4, 40.0, 2f64.sqrt() * 700.0, HpBranch::Minus);
        let p = validate_params(&raw).unwrap();
        assert_eq!(p.kappa, 1.0);
        assert_eq!(p.delta, 20.0);
        assert_eq!(p.kappa_n, 1.5e-4);
        assert!((p.alpha_in.re - 700.0).abs() < 1e-12);
        assert_eq!(p.alpha_in.im, 0.0);
        assert_eq!(p.kappa_unit(), 2.0);
    }

    #[test]
    fn unit_kappa_passes_through() {
        let raw = thermal_point();
        assert_eq!(validate_params(&raw).unwrap(), raw);
    }

    #[test]
    fn idempotent() {
        let raw = ModelParams::new(3.7, 2e-3, -5.5, 12.0, HpBranch::Plus).with_occupancies(0.3, 2.0);
        let once = validate_params(&raw).unwrap();
        let twice = validate_params(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = thermal_point();
        p.kappa = 0.0;
        assert_eq!(validate_params(&p), Err(Error::NonPositiveKappa(0.0)));
        let mut p = thermal_point();
        p.kappa_n = -1e-3;
        assert!(matches!(
            validate_params(&p),
            Err(Error::NegativeRate { name: "kappa_n", .. })
        ));
        let mut p = thermal_point();
        p.n_th_tls = -0.5;
        assert!(matches!(
            validate_params(&p),
            Err(Error::NegativeRate { name: "n_th_tls", .. })
        ));
        let mut p = thermal_point();
        p.delta = f64::NAN;
        assert_eq!(validate_params(&p), Err(Error::NonFinite("delta")));
        let mut p = thermal_point();
        p.alpha_in.im = f64::INFINITY;
        assert_eq!(validate_params(&p), Err(Error::NonFinite("alpha_in.im")));
    }

    #[test]
    fn json_schema() {
        let src = r#"{"kappa":1,"kappa_n":1.5e-4,"delta":20,"alpha_in":{"re":700,"im":0},
                      "n_th":1,"n_th_tls":1,"branch":"plus"}"#;
        let p: ModelParams<f64> = serde_json::from_str(src).unwrap();
        assert_eq!(p, thermal_point().with_branch(HpBranch::Plus));
        let back: ModelParams<f64> = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);

        let bad = r#"{"kapa":1,"kappa_n":0,"delta":0,"alpha_in":{"re":1}}"#;
        let err = serde_json::from_str::<ModelParams<f64>>(bad).unwrap_err().to_string();
        assert!(err.contains("kapa"), "{err}");
    }
}
