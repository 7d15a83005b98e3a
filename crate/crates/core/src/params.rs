//! Central parameter model: oscillator constants, dimensionless ratios,
//! damping-regime classification, and the Matsubara frequency grid.
//!
//! ħ and k_B are ordinary fields rather than compile-time constants so the
//! classical limit ħ → 0 and natural-unit sweeps use one parameter type.
//! Default constructors use natural units m = ħ = k_B = 1.

use serde::{Deserialize, Serialize};

use crate::bathspec::BathSpec;
use crate::error::{Error, Result};

/// Relative tolerance below which |γ/2 − ω₀| counts as critically damped.
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-9;

/// Oscillator + thermodynamic state. All quantities in consistent units
/// (SI or natural); `gamma` is the damping *rate* γ = μ/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub hbar: f64,
    pub kb: f64,
}

impl OscillatorParams {
    pub fn new(
        m: f64,
        omega0: f64,
        gamma: f64,
        temperature: f64,
        hbar: f64,
        kb: f64,
    ) -> Result<Self> {
        let p = Self {
            m,
            omega0,
            gamma,
            temperature,
            hbar,
            kb,
        };
        p.validate()?;
        Ok(p)
    }

    /// Natural units m = ħ = k_B = 1.
    pub fn natural(omega0: f64, gamma: f64, temperature: f64) -> Result<Self> {
        Self::new(1.0, omega0, gamma, temperature, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.m > 0.0
            && self.omega0 > 0.0
            && self.gamma >= 0.0
            && self.temperature > 0.0
            && self.hbar >= 0.0
            && self.kb > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "require m > 0, omega0 > 0, gamma >= 0, T > 0, hbar >= 0, kb > 0; got {self:?}"
            )));
        }
        if !self.beta().is_finite() || self.beta() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta = 1/(kb T) not finite and positive; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Inverse temperature β = 1/(k_B T).
    pub fn beta(&self) -> f64 {
        1.0 / (self.kb * self.temperature)
    }

    /// Friction coefficient μ = mγ.
    pub fn mu(&self) -> f64 {
        self.m * self.gamma
    }

    /// ħβ, the thermal time that sets the Matsubara spacing.
    pub fn beta_hbar(&self) -> f64 {
        self.hbar * self.beta()
    }
}

/// x = βħω₀, ρ = γ/ω₀, and (Drude only) σ = ω_cut/ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub x: f64,
    pub rho: f64,
    pub sigma: Option<f64>,
}

impl DimensionlessParams {
    pub fn new(x: f64, rho: f64, sigma: Option<f64>) -> Result<Self> {
        let d = Self { x, rho, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 0.0 && self.rho >= 0.0) || self.sigma.is_some_and(|s| s <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "require x >= 0, rho >= 0, sigma > 0 when present; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Damping regime, decided by γ/2 against ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DampingRegime {
    UnderDamped,
    OverDamped,
    CriticallyDamped,
}

/// Total classification of (γ, ω₀): critically damped iff
/// |γ/2 − ω₀| ≤ tol·ω₀, otherwise under/over by the sign of γ/2 − ω₀.
pub fn classify_regime(p: &OscillatorParams, tol: f64) -> DampingRegime {
    let half_gamma = 0.5 * p.gamma;
    if (half_gamma - p.omega0).abs() <= tol * p.omega0 {
        DampingRegime::CriticallyDamped
    } else if half_gamma < p.omega0 {
        DampingRegime::UnderDamped
    } else {
        DampingRegime::OverDamped
    }
}

/// Map to figure space: x = ħβω₀, ρ = γ/ω₀, σ = ω_cut/ω₀ for Drude baths.
pub fn to_dimensionless(p: &OscillatorParams, bath: &BathSpec) -> DimensionlessParams {
    DimensionlessParams {
        x: p.hbar * p.beta() * p.omega0,
        rho: p.gamma / p.omega0,
        sigma: match bath {
            BathSpec::Ohmic { .. } => None,
            BathSpec::Drude { omega_cut, .. } => Some(omega_cut / p.omega0),
        },
    }
}

/// Inverse of [`to_dimensionless`] for fixed scales (ω₀, m, ħ, k_B).
/// Requires x > 0 and ħ > 0: the temperature is recovered from x = ħβω₀.
pub fn from_dimensionless(
    d: &DimensionlessParams,
    omega0: f64,
    m: f64,
    hbar: f64,
    kb: f64,
) -> Result<(OscillatorParams, BathSpec)> {
    d.validate()?;
    if d.x <= 0.0 || hbar <= 0.0 {
        return Err(Error::InvalidParameter(
            "from_dimensionless needs x > 0 and hbar > 0".into(),
        ));
    }
    let temperature = hbar * omega0 / (kb * d.x);
    let gamma = d.rho * omega0;
    let p = OscillatorParams::new(m, omega0, gamma, temperature, hbar, kb)?;
    let bath = match d.sigma {
        None => BathSpec::Ohmic { gamma },
        Some(s) => BathSpec::Drude {
            gamma,
            omega_cut: s * omega0,
        },
    };
    Ok((p, bath))
}

/// Bosonic Matsubara frequencies ν_n = 2πn/(ħβ), n = 1..=n_max.
///
/// Construction rejects ħβ = 0: the classical limit is taken analytically in
/// the series formulas, never by building this grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraGrid {
    pub beta_hbar: f64,
    pub n_max: usize,
}

impl MatsubaraGrid {
    pub fn new(beta_hbar: f64, n_max: usize) -> Result<Self> {
        if !beta_hbar.is_finite() || beta_hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Matsubara grid needs hbar*beta > 0 (classical limits are analytic); got {beta_hbar}"
            )));
        }
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        Ok(Self { beta_hbar, n_max })
    }

    pub fn for_params(p: &OscillatorParams, n_max: usize) -> Result<Self> {
        Self::new(p.beta_hbar(), n_max)
    }

    #[inline]
    pub fn nu(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * (n as f64) / self.beta_hbar
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (1..=self.n_max).map(move |n| (n, self.nu(n)))
    }
}

// ---------------------------------------------------------------------------
// TOML parameter blocks
// ---------------------------------------------------------------------------

fn one() -> f64 {
    1.0
}

/// `[oscillator]` block of a config file. `m`, `hbar`, `kB` default to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillatorBlock {
    #[serde(default = "one")]
    pub m: f64,
    pub omega0: f64,
    pub gamma: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(rename = "kB", default = "one")]
    pub kb: f64,
}

/// `[bath]` block: `kind = "ohmic" | "drude"`, `omega_cut` for Drude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BathBlock {
    pub kind: String,
    pub omega_cut: Option<f64>,
}

/// Whole parameter file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub oscillator: OscillatorBlock,
    pub bath: Option<BathBlock>,
}

impl ParamsFile {
    pub fn oscillator_params(&self) -> Result<OscillatorParams> {
        let o = &self.oscillator;
        OscillatorParams::new(o.m, o.omega0, o.gamma, o.temperature, o.hbar, o.kb)
    }

    /// Bath from the `[bath]` block; Ohmic with the oscillator's γ if absent.
    pub fn bath_spec(&self) -> Result<BathSpec> {
        let gamma = self.oscillator.gamma;
        match &self.bath {
            None => Ok(BathSpec::Ohmic { gamma }),
            Some(b) => match b.kind.as_str() {
                "ohmic" => Ok(BathSpec::Ohmic { gamma }),
                "drude" => {
                    let omega_cut = b.omega_cut.ok_or_else(|| {
                        Error::InvalidParameter("drude bath needs omega_cut".into())
                    })?;
                    let spec = BathSpec::Drude { gamma, omega_cut };
                    spec.validate()?;
                    Ok(spec)
                }
                other => Err(Error::InvalidParameter(format!(
                    "unknown bath kind {other:?} (expected \"ohmic\" or \"drude\")"
                ))),
            },
        }
    }
}
