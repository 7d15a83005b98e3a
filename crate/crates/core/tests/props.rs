//! Property tests for the structural invariants: unit round-trips, regime
//! scale invariance, kernel parity, passivity, and the sign law of the
//! figure-space I₂ series.

use bathvirial::bathspec::{mu_tilde, susceptibility, BathSpec};
use bathvirial::matsubara::i2_dimensionless;
use bathvirial::params::{
    classify_regime, from_dimensionless, to_dimensionless, DimensionlessParams,
    OscillatorParams, DEFAULT_CRITICAL_TOL,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dimensionless_round_trip_is_identity(
        x in 1e-3..50.0f64,
        rho in 1e-3..10.0f64,
        sigma in prop::option::of(0.1..100.0f64),
        omega0 in 0.1..10.0f64,
        m in 0.1..10.0f64,
        hbar in 0.1..10.0f64,
        kb in 0.1..10.0f64,
    ) {
        let d = DimensionlessParams::new(x, rho, sigma).unwrap();
        let (p, bath) = from_dimensionless(&d, omega0, m, hbar, kb).unwrap();
        let back = to_dimensionless(&p, &bath);
        prop_assert!((back.x - x).abs() <= 4.0 * f64::EPSILON * x);
        prop_assert!((back.rho - rho).abs() <= 4.0 * f64::EPSILON * rho);
        match (back.sigma, sigma) {
            (Some(b), Some(s)) => prop_assert!((b - s).abs() <= 4.0 * f64::EPSILON * s),
            (None, None) => {}
            _ => prop_assert!(false, "bath kind changed in the round trip"),
        }
    }

    #[test]
    fn regime_invariant_under_rescaling(
        omega0 in 0.01..100.0f64,
        gamma in 0.0..100.0f64,
        scale in 1e-3..1e3f64,
    ) {
        let p = OscillatorParams::natural(omega0, gamma, 1.0).unwrap();
        let q = OscillatorParams::natural(scale * omega0, scale * gamma, 1.0).unwrap();
        prop_assert_eq!(
            classify_regime(&p, DEFAULT_CRITICAL_TOL),
            classify_regime(&q, DEFAULT_CRITICAL_TOL)
        );
    }

    #[test]
    fn mu_tilde_parity(
        gamma in 0.0..10.0f64,
        omega_cut in 0.1..100.0f64,
        omega in 0.0..200.0f64,
        m in 0.1..10.0f64,
    ) {
        for bath in [BathSpec::Ohmic { gamma }, BathSpec::Drude { gamma, omega_cut }] {
            let plus = mu_tilde(&bath, m, omega);
            let minus = mu_tilde(&bath, m, -omega);
            prop_assert!((plus.re - minus.re).abs() <= 1e-14 * plus.re.abs().max(1e-300));
            prop_assert!((plus.im + minus.im).abs() <= 1e-14 * plus.im.abs().max(1e-300));
        }
    }

    #[test]
    fn passivity_everywhere(
        omega0 in 0.1..10.0f64,
        gamma in 1e-3..10.0f64,
        omega in -100.0..100.0f64,
        sigma in prop::option::of(0.5..50.0f64),
    ) {
        let p = OscillatorParams::natural(omega0, gamma, 1.0).unwrap();
        let bath = match sigma {
            None => BathSpec::Ohmic { gamma },
            Some(s) => BathSpec::Drude { gamma, omega_cut: s * omega0 },
        };
        let alpha = susceptibility(&p, &bath, omega).unwrap();
        prop_assert!(omega * alpha.im >= -1e-18);
    }

    #[test]
    fn i2_sign_follows_x_minus_one(
        x in 0.05..4.0f64,
        rho in 0.05..1.95f64,
    ) {
        // term-by-term: D₁ − 4D₂ = ρ²(ρ²−4)(x⁴−1), so for ρ < 2 the sign of
        // βI₂ is the sign of x − 1
        prop_assume!((x - 1.0).abs() > 1e-3);
        let d = DimensionlessParams::new(x, rho, None).unwrap();
        let v = i2_dimensionless(&d, 96).unwrap().estimate;
        prop_assert!(v.signum() == (x - 1.0).signum(), "βI₂({x}, {rho}) = {v}");
    }
}
