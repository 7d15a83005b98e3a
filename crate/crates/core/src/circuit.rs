//! Series LCR circuit driven by thermal (Johnson–Nyquist) voltage noise.
//!
//! The charge obeys L·Q̈ + R·Q̇ + Q/C = F(t), the exact electrical analogue
//! of the damped oscillator with γ = R/L and ω₀ = 1/√(LC). The thermal-mode
//! energy ε(ω, T) = (ħω/4)·coth(ħω/2k_BT) (zero point included) weights the
//! mean-energy integrals
//!
//!   ⟨E_L⟩ = ∫ (Rω²/πL)  / ((ω²−ω₀²)² + (Rω/L)²) · ε(ω,T) dω,
//!   ⟨E_C⟩ = ∫ (Rω₀²/πL) / ((ω²−ω₀²)² + (Rω/L)²) · ε(ω,T) dω.
//!
//! ⟨E_L⟩ is log-divergent in the frequency cutoff (quantum ε ~ ħω/4 at large
//! ω); ⟨E_C⟩ converges; with the classical weight k_BT/2 both equal k_BT/2.
//! Their difference is computed as a single integral of (ω² − ω₀²) times the
//! shared Lorentzian kernel, not as a subtraction of two nearly equal
//! numbers; its Matsubara series lives in [`crate::matsubara::circuit_diff_series`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::QuadratureResult;
use crate::params::OscillatorParams;
use crate::quad::{self, QuadOptions};
use crate::special::thermal_energy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub inductance: f64,
    pub capacitance: f64,
    pub resistance: f64,
    pub temperature: f64,
    pub hbar: f64,
    pub kb: f64,
}

impl CircuitParams {
    pub fn new(
        inductance: f64,
        capacitance: f64,
        resistance: f64,
        temperature: f64,
        hbar: f64,
        kb: f64,
    ) -> Result<Self> {
        let c = Self {
            inductance,
            capacitance,
            resistance,
            temperature,
            hbar,
            kb,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.inductance > 0.0
            && self.capacitance > 0.0
            && self.resistance > 0.0
            && self.temperature > 0.0
            && self.hbar >= 0.0
            && self.kb > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "require L, C, R, T > 0, hbar >= 0, kb > 0; got {self:?}"
            )));
        }
        if !self.gamma().is_finite() || !self.omega0().is_finite() {
            return Err(Error::InvalidParameter("derived gamma/omega0 not finite".into()));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.resistance / self.inductance
    }

    pub fn omega0(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }

    pub fn beta(&self) -> f64 {
        1.0 / (self.kb * self.temperature)
    }

    /// Mechanical image: mass L, damping R/L, frequency 1/√(LC).
    pub fn to_oscillator(&self) -> OscillatorParams {
        OscillatorParams {
            m: self.inductance,
            omega0: self.omega0(),
            gamma: self.gamma(),
            temperature: self.temperature,
            hbar: self.hbar,
            kb: self.kb,
        }
    }
}

/// Statistical weight per mode in the energy integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThermalWeight {
    /// ε(ω,T) = (ħω/4)·coth(ħω/2k_BT), zero point included.
    Quantum,
    /// Classical equipartition weight k_BT/2.
    Classical,
}

fn epsilon(c: &CircuitParams, weight: ThermalWeight, omega: f64) -> f64 {
    match weight {
        ThermalWeight::Quantum => thermal_energy(omega, c.temperature, c.hbar, c.kb),
        ThermalWeight::Classical => 0.5 * c.kb * c.temperature,
    }
}

fn lorentzian_kernel(c: &CircuitParams, omega: f64) -> f64 {
    let w0sq = c.omega0() * c.omega0();
    let g = c.gamma();
    let d = (omega * omega - w0sq).powi(2) + (g * omega).powi(2);
    c.resistance / (std::f64::consts::PI * c.inductance) / d
}

fn energy_quadrature<F: Fn(f64) -> f64>(
    c: &CircuitParams,
    cutoff: f64,
    tol: f64,
    integrand: F,
) -> Result<QuadratureResult> {
    c.validate()?;
    let w0 = c.omega0();
    let min_cutoff = 10.0 * w0.max(c.gamma());
    if cutoff < min_cutoff {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} below 10x the circuit scales {min_cutoff}"
        )));
    }
    let mut bps = vec![w0];
    for k in [1.0, 3.0, 10.0] {
        bps.push(w0 - k * c.gamma());
        bps.push(w0 + k * c.gamma());
    }
    if c.hbar > 0.0 {
        bps.push(c.kb * c.temperature / c.hbar);
    }
    bps.retain(|&w| w > 0.0 && w < cutoff);
    let opts = QuadOptions {
        abs_tol: tol * c.kb * c.temperature * 1e-3,
        rel_tol: tol,
        max_intervals: 20_000,
        breakpoints: bps,
    };
    let run = |lim: f64| quad::integrate_mapped_real(&integrand, 0.0, lim, w0, &opts);
    let (half_range, err, n1) = run(cutoff);
    let (half_range_lo, _, n2) = run(0.5 * cutoff);
    // even integrand: [−Λ, Λ] = 2·[0, Λ]
    let (value, value_lo) = (2.0 * half_range, 2.0 * half_range_lo);
    let scale = (c.kb * c.temperature).max(value.abs());
    if 2.0 * err > 1e3 * tol * scale {
        return Err(Error::ToleranceNotMet { err: 2.0 * err, tol: tol * scale });
    }
    let stable = (value - value_lo).abs() <= (10.0 * tol * scale).max(16.0 * err);
    Ok(QuadratureResult {
        value,
        err: if stable { (2.0 * err).max((value - value_lo).abs()) } else { 2.0 * err },
        n_evals: n1 + n2,
        cutoff,
        cutoff_extrapolated: stable,
    })
}

/// Mean inductive energy ⟨E_L⟩ = ⟨L·I²⟩/2 by quadrature. Log-divergent in
/// the cutoff for the quantum weight; equals k_BT/2 classically.
pub fn mean_energy_inductor(
    c: &CircuitParams,
    weight: ThermalWeight,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    energy_quadrature(c, cutoff, tol, |w| {
        lorentzian_kernel(c, w) * w * w * epsilon(c, weight, w)
    })
}

/// Mean capacitive energy ⟨E_C⟩ = ⟨Q²/C⟩/2 by quadrature; cutoff-stable.
pub fn mean_energy_capacitor(
    c: &CircuitParams,
    weight: ThermalWeight,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    let w0sq = c.omega0() * c.omega0();
    energy_quadrature(c, cutoff, tol, |w| {
        lorentzian_kernel(c, w) * w0sq * epsilon(c, weight, w)
    })
}

/// ⟨E_L⟩ − ⟨E_C⟩ as one integral of the difference kernel. The classical
/// weight integrates to zero exactly (the ω² − ω₀² numerator averages out
/// against the symmetric Lorentzian); the quantum weight leaves the
/// log-divergent remainder whose series form is
/// [`crate::matsubara::circuit_diff_series`].
pub fn energy_difference(
    c: &CircuitParams,
    weight: ThermalWeight,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    let w0sq = c.omega0() * c.omega0();
    energy_quadrature(c, cutoff, tol, |w| {
        lorentzian_kernel(c, w) * (w * w - w0sq) * epsilon(c, weight, w)
    })
}

/// Johnson–Nyquist voltage-noise power spectrum with frequency-independent
/// resistance, S_F(ω) = (2/π)·R·ħω/(e^{ħω/k_BT} − 1). The Planck form: no
/// zero-point term, classical white limit 2Rk_BT/π at ħω ≪ k_BT.
pub fn johnson_nyquist_spectrum(c: &CircuitParams, omega: f64) -> f64 {
    debug_assert!(omega >= 0.0);
    let kbt = c.kb * c.temperature;
    let x = c.hbar * omega / kbt;
    // ħω/(e^x − 1) = kBT·x/expm1(x), regular at x = 0
    let occupation = if x < 1e-12 { 1.0 } else { x / x.exp_m1() };
    2.0 / std::f64::consts::PI * c.resistance * kbt * occupation
}
