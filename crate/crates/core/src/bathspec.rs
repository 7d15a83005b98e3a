//! Spectral description of the heat bath.
//!
//! Everything downstream is built from three functions of frequency: the bath
//! spectral function J(ω), the one-sided Fourier transform μ̃(ω) of the
//! dissipation kernel, and the oscillator susceptibility
//!
//!   α(ω) = 1 / ( m(ω₀² − ω²) − iω μ̃(ω) ).
//!
//! Two dissipation mechanisms are supported. Ohmic: μ̃(ω) = mγ, J(ω) = mγω.
//! Drude: J(ω) = mγω / (1 + (ω/ω_cut)²), whose kernel is
//! μ(t) = mγω_cut·e^{−ω_cut t} for t ≥ 0 and hence
//!
//!   μ̃(ω) = mγ / (1 − iω/ω_cut).
//!
//! The Drude closed form is locked by a test against the numerical cosine
//! transform of J and the subsequent one-sided time transform, so the sign of
//! Im μ̃ cannot drift silently.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::OscillatorParams;
use crate::quad::{self, QuadOptions};
use crate::special::z_coth_z;

/// Dissipation mechanism. `gamma` is the damping rate γ (rad/s); the Drude
/// form carries a Lorentzian cutoff `omega_cut`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BathSpec {
    Ohmic { gamma: f64 },
    Drude { gamma: f64, omega_cut: f64 },
}

impl BathSpec {
    pub fn gamma(&self) -> f64 {
        match *self {
            BathSpec::Ohmic { gamma } => gamma,
            BathSpec::Drude { gamma, .. } => gamma,
        }
    }

    pub fn omega_cut(&self) -> Option<f64> {
        match *self {
            BathSpec::Ohmic { .. } => None,
            BathSpec::Drude { omega_cut, .. } => Some(omega_cut),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma() < 0.0 {
            return Err(Error::InvalidParameter("bath gamma must be >= 0".into()));
        }
        if let BathSpec::Drude { omega_cut, .. } = *self {
            if !omega_cut.is_finite() || omega_cut <= 0.0 {
                return Err(Error::InvalidParameter(
                    "Drude omega_cut must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Bath spectral function J(ω) for ω ≥ 0 (mass·frequency³ units).
pub fn spectral_density(bath: &BathSpec, m: f64, omega: f64) -> f64 {
    debug_assert!(omega >= 0.0);
    match *bath {
        BathSpec::Ohmic { gamma } => m * gamma * omega,
        BathSpec::Drude { gamma, omega_cut } => {
            let r = omega / omega_cut;
            m * gamma * omega / (1.0 + r * r)
        }
    }
}

/// Fourier-transformed dissipation kernel μ̃(ω) (mass/time units).
pub fn mu_tilde(bath: &BathSpec, m: f64, omega: f64) -> Complex64 {
    match *bath {
        BathSpec::Ohmic { gamma } => Complex64::new(m * gamma, 0.0),
        BathSpec::Drude { gamma, omega_cut } => {
            Complex64::new(m * gamma, 0.0) / Complex64::new(1.0, -omega / omega_cut)
        }
    }
}

/// Denominator of the susceptibility, m(ω₀² − ω²) − iωμ̃(ω).
fn alpha_denominator(p: &OscillatorParams, bath: &BathSpec, omega: f64) -> Complex64 {
    Complex64::new(p.m * (p.omega0 * p.omega0 - omega * omega), 0.0)
        - Complex64::new(0.0, omega) * mu_tilde(bath, p.m, omega)
}

/// Susceptibility α(ω). Errors with [`Error::PoleOnRealAxis`] for γ = 0 at
/// |ω| = ω₀ (relative window 1e−9), where the response is undefined.
pub fn susceptibility(
    p: &OscillatorParams,
    bath: &BathSpec,
    omega: f64,
) -> Result<Complex64> {
    if bath.gamma() == 0.0 && (omega.abs() - p.omega0).abs() <= 1e-9 * p.omega0 {
        return Err(Error::PoleOnRealAxis);
    }
    Ok(alpha_denominator(p, bath, omega).finv())
}

/// Im α(ω) / ω = Re μ̃(ω) / |m(ω₀²−ω²) − iωμ̃|², finite and even in ω.
///
/// This combination is what enters thermal spectra; keeping it fused avoids
/// the 0·∞ at ω = 0 in C̃ₓₓ.
pub fn im_alpha_over_omega(p: &OscillatorParams, bath: &BathSpec, omega: f64) -> f64 {
    let d = alpha_denominator(p, bath, omega);
    mu_tilde(bath, p.m, omega).re / d.norm_sqr()
}

/// Position-fluctuation spectrum by the fluctuation–dissipation theorem,
/// C̃ₓₓ(ω) = ħ·Im α(ω)·coth(ħω/2k_BT), evaluated as
/// (2/β)·(Im α/ω)·(z coth z) so that ω = 0 takes its finite analytic value
/// 2k_BT·Re μ̃(0)/|mω₀²|² (= 2k_BT·γ/(mω₀⁴) for Ohmic friction).
pub fn fdt_position_spectrum(
    p: &OscillatorParams,
    bath: &BathSpec,
    omega: f64,
) -> Result<f64> {
    if bath.gamma() <= 0.0 {
        return Err(Error::InvalidParameter(
            "fdt_position_spectrum needs gamma > 0".into(),
        ));
    }
    let z = 0.5 * p.beta_hbar() * omega;
    Ok(2.0 / p.beta() * im_alpha_over_omega(p, bath, omega) * z_coth_z(z))
}

/// Markovian weak-coupling diffusion constant
/// D = mγħω₀·coth(ħω₀/2k_BT), with the classical limit 2mγk_BT built into
/// the guarded cotangent.
pub fn weak_coupling_correlator(p: &OscillatorParams) -> f64 {
    2.0 * p.m * p.gamma / p.beta() * z_coth_z(0.5 * p.beta_hbar() * p.omega0)
}

/// Symmetrized noise correlation C_FF(τ) = ⟨{F(t), F(t′)}⟩/2 at τ = t − t′,
/// evaluated by quadrature with an explicit frequency cutoff:
///
///   C_FF(τ) = (1/π) ∫₀^Λ ħω·Re μ̃(ω)·coth(ħω/2k_BT)·cos(ωτ) dω.
///
/// Its classical limit is Γδ(τ) with Γ = 2mγk_BT. For an Ohmic bath at
/// τ = 0 the integral grows ~Λ² and the result is flagged cutoff-dependent
/// rather than silently truncated.
#[derive(Debug, Clone, Copy)]
pub struct NoiseCorrelation {
    pub value: f64,
    pub cutoff: f64,
    /// Ohmic equal-time case: value is a pure cutoff artifact.
    pub divergent_at_equal_times: bool,
}

pub fn noise_symmetric_correlator(
    p: &OscillatorParams,
    bath: &BathSpec,
    tau: f64,
    cutoff: f64,
) -> Result<NoiseCorrelation> {
    if bath.gamma() <= 0.0 {
        return Err(Error::InvalidParameter(
            "noise correlator needs gamma > 0".into(),
        ));
    }
    let beta_hbar = p.beta_hbar();
    let integrand = |w: f64| -> f64 {
        // ħω coth(βħω/2) = (2/β)·z coth z stays finite at ω = 0
        let energy = 2.0 / p.beta() * z_coth_z(0.5 * beta_hbar * w);
        energy * mu_tilde(bath, p.m, w).re * (w * tau).cos()
    };
    let opts = oscillatory_opts(tau, cutoff);
    let (mut value, _err, _n) = quad::integrate_real(&integrand, 0.0, cutoff, &opts);
    // For a Drude bath at τ > 0 the integrand tail is (ħmγω_c²/ω)·cos(ωτ),
    // only conditionally convergent: truncating at Λ leaves an O(g(Λ)/τ)
    // oscillation. Complete it in closed form through the cosine-integral
    // asymptotics once Λτ is large enough for them to hold.
    if let BathSpec::Drude { gamma, omega_cut } = *bath {
        let z = cutoff * tau.abs();
        if tau != 0.0 && z > 50.0 && beta_hbar * cutoff > 50.0 {
            let c1 = p.hbar * p.m * gamma * omega_cut * omega_cut;
            value += c1 * (cos_tail(1, cutoff, tau.abs())
                - omega_cut * omega_cut * cos_tail(3, cutoff, tau.abs()));
        }
    }
    Ok(NoiseCorrelation {
        value: value / std::f64::consts::PI,
        cutoff,
        divergent_at_equal_times: matches!(bath, BathSpec::Ohmic { .. }) && tau == 0.0,
    })
}

/// ∫_Λ^∞ cos(ωτ)/ωⁿ dω by repeated integration by parts, valid for Λτ ≫ 1
/// (error O((n+3)!/(Λτ)⁴) relative to the leading term).
fn cos_tail(n: i32, cutoff: f64, tau: f64) -> f64 {
    let z = cutoff * tau;
    let (s, c) = (z.sin(), z.cos());
    let nf = n as f64;
    let t1 = -s / (tau * cutoff.powi(n));
    let t2 = nf * c / (tau * tau * cutoff.powi(n + 1));
    let t3 = nf * (nf + 1.0) * s / (tau.powi(3) * cutoff.powi(n + 2));
    let t4 = -nf * (nf + 1.0) * (nf + 2.0) * c / (tau.powi(4) * cutoff.powi(n + 3));
    t1 + t2 + t3 + t4
}

/// Antisymmetric (commutator) kernel
/// K(τ) = (2/π) ∫₀^Λ ħω·Re μ̃(ω)·sin(ωτ) dω, with ⟨[F(t), F(t′)]⟩ = −i·K(τ).
/// Odd in τ exactly, by construction: K(−τ) = −K(τ) bit for bit.
pub fn noise_commutator_kernel(
    p: &OscillatorParams,
    bath: &BathSpec,
    tau: f64,
    cutoff: f64,
) -> f64 {
    if tau == 0.0 {
        return 0.0;
    }
    let sign = tau.signum();
    let tau = tau.abs();
    let integrand =
        |w: f64| -> f64 { p.hbar * w * mu_tilde(bath, p.m, w).re * (w * tau).sin() };
    let opts = oscillatory_opts(tau, cutoff);
    let (value, _err, _n) = quad::integrate_real(&integrand, 0.0, cutoff, &opts);
    sign * 2.0 / std::f64::consts::PI * value
}

/// Break the [0, Λ] range at oscillation nodes so the adaptive rule sees the
/// cos(ωτ) structure.
fn oscillatory_opts(tau: f64, cutoff: f64) -> QuadOptions {
    let mut opts = QuadOptions::default();
    let period = if tau.abs() > 0.0 {
        std::f64::consts::PI / tau.abs()
    } else {
        f64::INFINITY
    };
    if period.is_finite() && cutoff / period > 4.0 {
        let n = (cutoff / period).ceil() as usize;
        opts.breakpoints = (1..n.min(100_000)).map(|k| k as f64 * period).collect();
        opts.max_intervals = opts.max_intervals.max(4 * n + 1000);
    }
    opts
}
