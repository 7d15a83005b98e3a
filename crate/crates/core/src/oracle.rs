//! Brute-force quadrature evaluation of the frequency integrals that the
//! Matsubara series represent. Used as ground truth in tests and in the
//! `oracle-compare` command; deliberately avoids contour integration, so it
//! shares no method with the series it checks.
//!
//! All integrals run over the symmetric window [−Λ, Λ] with an explicit
//! cutoff Λ. Convergent integrals are reported cutoff-stable when halving Λ
//! moves the value by less than the tolerance; the Ohmic work integral I₁
//! instead grows ~ln Λ and is returned with its cutoff recorded. Tails are
//! compressed with the ω = ω₀·tan θ map and forced subdivision pins the
//! damped resonance.

use num_complex::Complex64;

use crate::bathspec::{im_alpha_over_omega, mu_tilde, susceptibility, BathSpec};
use crate::error::{Error, Result};
use crate::params::OscillatorParams;
use crate::quad::{self, QuadOptions};
use crate::special::{thermal_energy, z_coth_z};

/// Result of one cutoff quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate: quadrature error plus any parity residual.
    pub err: f64,
    pub n_evals: usize,
    pub cutoff: f64,
    /// True when halving the cutoff left the value within tolerance, i.e.
    /// the integral has converged in Λ.
    pub cutoff_extrapolated: bool,
}

/// Default relative tolerance of the oracle integrals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default cutoff multiplier: Λ = 10⁴ × the largest frequency scale.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 1e4;

/// Largest intrinsic frequency scale of (p, bath).
pub fn frequency_scale(p: &OscillatorParams, bath: &BathSpec) -> f64 {
    let thermal = if p.beta_hbar() > 0.0 {
        2.0 * std::f64::consts::PI / p.beta_hbar()
    } else {
        0.0
    };
    p.omega0
        .max(p.gamma)
        .max(bath.omega_cut().unwrap_or(0.0))
        .max(thermal)
}

pub fn default_cutoff(p: &OscillatorParams, bath: &BathSpec) -> f64 {
    DEFAULT_CUTOFF_FACTOR * frequency_scale(p, bath)
}

/// Forced subdivision: the damped resonance neighborhood [ω₀ − 3γ, ω₀ + 3γ]
/// (plus inner rings for narrow resonances), the bath cutoff, and the first
/// thermal frequency.
fn breakpoints(p: &OscillatorParams, bath: &BathSpec, cutoff: f64) -> Vec<f64> {
    let mut bps = vec![p.omega0];
    for k in [1.0, 3.0, 10.0] {
        bps.push(p.omega0 - k * p.gamma);
        bps.push(p.omega0 + k * p.gamma);
    }
    if let Some(wc) = bath.omega_cut() {
        bps.push(wc);
    }
    if p.beta_hbar() > 0.0 {
        bps.push(2.0 * std::f64::consts::PI / p.beta_hbar());
    }
    bps.retain(|&w| w > 0.0 && w < cutoff);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

fn opts_for(p: &OscillatorParams, bath: &BathSpec, cutoff: f64, tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: tol * p.kb * p.temperature * 1e-3,
        rel_tol: tol,
        max_intervals: 20_000,
        breakpoints: breakpoints(p, bath, cutoff),
    }
}

/// ∫_{−Λ}^{Λ} f(ω) dω as two mapped half-line integrals, keeping real part
/// and parity residual (the imaginary part that should cancel between ±ω)
/// separate.
fn integrate_symmetric<F: Fn(f64) -> Complex64>(
    f: &F,
    p: &OscillatorParams,
    cutoff: f64,
    opts: &QuadOptions,
) -> (f64, f64, f64, usize) {
    let (plus, e1, n1) = quad::integrate_mapped_complex(f, 0.0, cutoff, p.omega0, opts);
    let (minus, e2, n2) =
        quad::integrate_mapped_complex(&|w: f64| f(-w), 0.0, cutoff, p.omega0, opts);
    let total = plus + minus;
    (total.re, total.im.abs(), e1 + e2, n1 + n2)
}

fn check_preconditions(p: &OscillatorParams, bath: &BathSpec, cutoff: f64, tol: f64) -> Result<()> {
    p.validate()?;
    bath.validate()?;
    if bath.gamma() <= 0.0 {
        return Err(Error::InvalidParameter(
            "oracle integrals need gamma > 0".into(),
        ));
    }
    let min_cutoff = 10.0 * p.omega0.max(p.gamma).max(bath.omega_cut().unwrap_or(0.0));
    if cutoff < min_cutoff {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} below 10x the largest system scale {min_cutoff}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    Ok(())
}

/// Generic runner: integrate at Λ and Λ/2, flag cutoff stability, fold the
/// parity residual into the error estimate.
fn run_symmetric<F: Fn(f64) -> Complex64>(
    f: F,
    p: &OscillatorParams,
    bath: &BathSpec,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    let opts = opts_for(p, bath, cutoff, tol);
    let (value, parity_residual, err, n1) = integrate_symmetric(&f, p, cutoff, &opts);
    let (half_value, _, _, n2) = integrate_symmetric(&f, p, 0.5 * cutoff, &opts);
    let scale = (p.kb * p.temperature).max(value.abs());
    let err = err + parity_residual;
    if err > 1e3 * tol * scale {
        return Err(Error::ToleranceNotMet { err, tol: tol * scale });
    }
    let stable = (value - half_value).abs() <= (10.0 * tol * scale).max(8.0 * err);
    Ok(QuadratureResult {
        value,
        err: if stable { err.max((value - half_value).abs()) } else { err },
        n_evals: n1 + n2,
        cutoff,
        cutoff_extrapolated: stable,
    })
}

/// Work done by the noise on the oscillator:
/// I₁ = (ħ/2π) ∫ ω·Re μ̃(ω)·α(ω)·coth(ħω/2k_BT) dω,
/// evaluated as (1/πβ) ∫ (z coth z)·Re μ̃·α dω with z = βħω/2 so the ω = 0
/// point is regular and the classical limit ħ → 0 needs no special path.
///
/// Ohmic: grows ~ −(ħγ/π)·ln Λ (cutoff_extrapolated stays false).
/// Drude: cutoff-stable.
pub fn i1_integral(
    p: &OscillatorParams,
    bath: &BathSpec,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    check_preconditions(p, bath, cutoff, tol)?;
    let pref = 1.0 / (std::f64::consts::PI * p.beta());
    let bh = p.beta_hbar();
    let (pc, bc) = (*p, *bath);
    run_symmetric(
        move |w: f64| {
            let alpha = susceptibility(&pc, &bc, w).expect("gamma > 0 has no real pole");
            alpha * (pref * z_coth_z(0.5 * bh * w) * mu_tilde(&bc, pc.m, w).re)
        },
        p,
        bath,
        cutoff,
        tol,
    )
}

/// Friction-kernel weighted position–velocity correlation:
/// I₂ = (iħ/2π) ∫ ω·Im α(ω)·coth(ħω/2k_BT)·μ̃(−ω) dω.
///
/// The real part survives only through Im μ̃(−ω); for an Ohmic bath the whole
/// integrand is odd and the symmetric integral vanishes identically.
pub fn i2_integral(
    p: &OscillatorParams,
    bath: &BathSpec,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    check_preconditions(p, bath, cutoff, tol)?;
    let pref = Complex64::new(0.0, 1.0 / (std::f64::consts::PI * p.beta()));
    let bh = p.beta_hbar();
    let (pc, bc) = (*p, *bath);
    run_symmetric(
        move |w: f64| {
            let alpha = susceptibility(&pc, &bc, w).expect("gamma > 0 has no real pole");
            pref * (z_coth_z(0.5 * bh * w) * alpha.im) * mu_tilde(&bc, pc.m, -w)
        },
        p,
        bath,
        cutoff,
        tol,
    )
}

/// Mean potential energy ⟨V⟩ = (mω₀²/2)⟨x²⟩ with
/// ⟨x²⟩ = (1/2π)∫ C̃ₓₓ(ω) dω from the fluctuation–dissipation theorem.
pub fn position_variance(
    p: &OscillatorParams,
    bath: &BathSpec,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    check_preconditions(p, bath, cutoff, tol)?;
    let pref = p.m * p.omega0 * p.omega0 / (2.0 * std::f64::consts::PI * p.beta());
    let bh = p.beta_hbar();
    let (pc, bc) = (*p, *bath);
    run_symmetric(
        move |w: f64| {
            Complex64::new(
                pref * im_alpha_over_omega(&pc, &bc, w) * z_coth_z(0.5 * bh * w),
                0.0,
            )
        },
        p,
        bath,
        cutoff,
        tol,
    )
}

/// Mean kinetic energy ⟨K⟩ = (m/2)⟨ẋ²⟩, the ω²-weighted spectrum integral.
/// Finite for a Drude bath; log-divergent in the cutoff for Ohmic.
pub fn mean_kinetic_energy(
    p: &OscillatorParams,
    bath: &BathSpec,
    cutoff: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    check_preconditions(p, bath, cutoff, tol)?;
    let pref = p.m / (2.0 * std::f64::consts::PI * p.beta());
    let bh = p.beta_hbar();
    let (pc, bc) = (*p, *bath);
    run_symmetric(
        move |w: f64| {
            Complex64::new(
                pref * w * w * im_alpha_over_omega(&pc, &bc, w) * z_coth_z(0.5 * bh * w),
                0.0,
            )
        },
        p,
        bath,
        cutoff,
        tol,
    )
}

/// Weak-coupling mean energy ⟨K⟩ = ⟨V⟩ = (ħω₀/4)·coth(ħω₀/2k_BT).
pub fn mean_energy_weak_coupling(p: &OscillatorParams) -> f64 {
    thermal_energy(p.omega0, p.temperature, p.hbar, p.kb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(omega0: f64, gamma: f64, beta: f64, hbar: f64) -> OscillatorParams {
        OscillatorParams::new(1.0, omega0, gamma, 1.0 / beta, hbar, 1.0).unwrap()
    }

    #[test]
    fn weak_coupling_energy_limits() {
        // classical equipartition
        let p = natural(1.0, 0.1, 2.0, 1e-9);
        assert!((mean_energy_weak_coupling(&p) - 0.25).abs() < 1e-12);
        // zero point
        let p = OscillatorParams::new(1.0, 1.0, 0.1, 1e-9, 1.0, 1.0).unwrap();
        assert!((mean_energy_weak_coupling(&p) - 0.25).abs() < 1e-12);
        // x = 2
        let p = natural(1.0, 0.1, 2.0, 1.0);
        assert!((mean_energy_weak_coupling(&p) - 0.25 / 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn i1_ohmic_log_divergent_with_slope() {
        let p = natural(1.0, 1.2, 1.5, 1.0);
        let bath = BathSpec::Ohmic { gamma: 1.2 };
        let v1 = i1_integral(&p, &bath, 1000.0, 1e-9).unwrap();
        let v2 = i1_integral(&p, &bath, 2000.0, 1e-9).unwrap();
        let v4 = i1_integral(&p, &bath, 4000.0, 1e-9).unwrap();
        assert!(!v4.cutoff_extrapolated);
        // value(2Λ) − value(Λ) = slope·ln 2, slope = −ħγ/π, stable across doublings
        let s1 = (v2.value - v1.value) / 2f64.ln();
        let s2 = (v4.value - v2.value) / 2f64.ln();
        let expect = -p.hbar * p.gamma / std::f64::consts::PI;
        assert!((s1 - expect).abs() < 2e-3 * expect.abs(), "s1 = {s1}, expect = {expect}");
        assert!((s2 - expect).abs() < 2e-3 * expect.abs());
    }

    #[test]
    fn i1_vanishes_at_weak_coupling() {
        let p = natural(1.0, 1e-6, 1.0, 1.0);
        let bath = BathSpec::Ohmic { gamma: 1e-6 };
        let v = i1_integral(&p, &bath, 1e4, 1e-9).unwrap();
        assert!(v.value.abs() < 1e-4 * p.kb * p.temperature);
    }

    #[test]
    fn i1_drude_cutoff_stable() {
        // the I₁ Drude integrand tail is −(ħγω_cut²/π)/ω³, so the residual
        // cutoff drift is ~(ħγω_cut²/2π)/Λ²; doubling from 1e5 moves the
        // value by well under 1e−6 relative
        let p = natural(1.0, 3.5, 2.0, 1.0);
        let bath = BathSpec::Drude { gamma: 3.5, omega_cut: 10.0 };
        let a = i1_integral(&p, &bath, 2e5, 1e-9).unwrap();
        let b = i1_integral(&p, &bath, 4e5, 1e-9).unwrap();
        assert!(a.cutoff_extrapolated && b.cutoff_extrapolated);
        assert!(((a.value - b.value) / b.value).abs() < 1e-6);
    }

    #[test]
    fn i2_ohmic_integral_vanishes_by_parity() {
        // Im μ̃ = 0 for Ohmic friction, so the symmetric integral is zero.
        let p = natural(1.0, 0.75, 2.0, 1.0);
        let bath = BathSpec::Ohmic { gamma: 0.75 };
        let v = i2_integral(&p, &bath, 2e4, 1e-9).unwrap();
        assert!(v.value.abs() < 1e-12 * p.kb * p.temperature);
        assert!(v.cutoff_extrapolated);
    }

    #[test]
    fn i2_zero_at_zero_coupling_strictly() {
        let p = natural(1.0, 0.0, 1.0, 1.0);
        let bath = BathSpec::Ohmic { gamma: 0.0 };
        assert!(i2_integral(&p, &bath, 1e3, 1e-9).is_err()); // gamma > 0 required
    }

    #[test]
    fn position_variance_limits() {
        // weak coupling: within 0.5% of (ħω₀/4) coth(ħω₀/2kBT)
        let p = natural(1.0, 1e-3, 1.0, 1.0);
        let bath = BathSpec::Ohmic { gamma: 1e-3 };
        let v = position_variance(&p, &bath, 1e4, 1e-9).unwrap();
        let expect = mean_energy_weak_coupling(&p);
        assert!(((v.value - expect) / expect).abs() < 5e-3, "V = {}, weak = {expect}", v.value);

        // classical limit: kBT/2 for any moderate damping
        let pc = natural(1.0, 0.8, 1.0, 1e-7);
        let bc = BathSpec::Ohmic { gamma: 0.8 };
        let v = position_variance(&pc, &bc, 1e4, 1e-9).unwrap();
        assert!(((v.value - 0.5) / 0.5).abs() < 1e-4);
    }

    #[test]
    fn kinetic_log_divergent_ohmic_finite_drude() {
        let p = natural(1.0, 0.8, 1.0, 1.0);
        let ohmic = BathSpec::Ohmic { gamma: 0.8 };
        let k1 = mean_kinetic_energy(&p, &ohmic, 1e3, 1e-9).unwrap();
        let k2 = mean_kinetic_energy(&p, &ohmic, 2e3, 1e-9).unwrap();
        assert!(k2.value > k1.value + 1e-3); // grows with cutoff
        let drude = BathSpec::Drude { gamma: 0.8, omega_cut: 10.0 };
        let k1 = mean_kinetic_energy(&p, &drude, 1e6, 1e-9).unwrap();
        let k2 = mean_kinetic_energy(&p, &drude, 2e6, 1e-9).unwrap();
        assert!(((k1.value - k2.value) / k2.value).abs() < 1e-7);
        assert!(k1.cutoff_extrapolated);
    }

    #[test]
    fn rejects_low_cutoff_and_bad_tol() {
        let p = natural(1.0, 0.5, 1.0, 1.0);
        let bath = BathSpec::Drude { gamma: 0.5, omega_cut: 50.0 };
        assert!(i1_integral(&p, &bath, 100.0, 1e-9).is_err());
        assert!(i1_integral(&p, &bath, 1e4, 0.0).is_err());
    }

    #[test]
    fn error_estimate_bounds_tolerance_refinement() {
        // err should bound |value(tol) − value(tol/10)| on nearly all points
        let mut covered = 0;
        let mut total = 0;
        for (gamma, beta, sigma) in [
            (0.5, 1.0, None),
            (1.2, 0.5, None),
            (2.1, 1.0, Some(10.0)),
            (3.5, 2.0, Some(10.0)),
            (0.8, 3.0, Some(25.0)),
            (1.0, 1.0, Some(5.0)),
        ] {
            let p = natural(1.0, gamma, beta, 1.0);
            let bath = match sigma {
                None => BathSpec::Ohmic { gamma },
                Some(s) => BathSpec::Drude { gamma, omega_cut: s },
            };
            let cutoff = 1e4;
            for f in [i1_integral, position_variance] {
                let coarse = f(&p, &bath, cutoff, 1e-7).unwrap();
                let fine = f(&p, &bath, cutoff, 1e-8).unwrap();
                total += 1;
                if (coarse.value - fine.value).abs() <= coarse.err.max(1e-14) {
                    covered += 1;
                }
            }
        }
        assert!(
            covered * 100 >= total * 95,
            "error estimate covered only {covered}/{total} refinements"
        );
    }

    #[test]
    fn parity_residual_small() {
        let p = natural(1.0, 2.1, 1.0, 1.0);
        let bath = BathSpec::Drude { gamma: 2.1, omega_cut: 10.0 };
        for result in [
            i1_integral(&p, &bath, 1e4, 1e-10).unwrap(),
            i2_integral(&p, &bath, 1e4, 1e-10).unwrap(),
        ] {
            assert!(result.err < 1e-8 * result.value.abs().max(1.0));
        }
    }
}
