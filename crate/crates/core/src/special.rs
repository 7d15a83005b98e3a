//! Small numerical helpers shared across modules: guarded hyperbolic
//! cotangents, the thermal energy kernel, compensated summation, straight-line
//! fits, and a polished cubic solver.

use num_complex::Complex64;

/// Threshold below which `coth` and `z coth z` switch to their Laurent
/// expansions `1/z + z/3` and `1 + z^2/3`.
pub const COTH_SERIES_THRESHOLD: f64 = 1e-4;

/// coth(z) with the small-argument Laurent branch.
pub fn coth(z: f64) -> f64 {
    if z.abs() < COTH_SERIES_THRESHOLD {
        1.0 / z + z / 3.0
    } else {
        1.0 / z.tanh()
    }
}

/// z·coth(z), finite and equal to 1 at z = 0.
pub fn z_coth_z(z: f64) -> f64 {
    if z.abs() < COTH_SERIES_THRESHOLD {
        1.0 + z * z / 3.0
    } else {
        z / z.tanh()
    }
}

/// Thermal energy of a mode: ε(ω, T) = (ħω/4)·coth(ħω/2k_BT).
///
/// Includes the zero-point half-quantum; reduces to k_BT/2 as ħω/k_BT → 0,
/// which the guarded form reproduces exactly at ω = 0.
pub fn thermal_energy(omega: f64, temperature: f64, hbar: f64, kb: f64) -> f64 {
    0.5 * kb * temperature * z_coth_z(0.5 * hbar * omega / (kb * temperature))
}

/// cot(z) for complex z, stable for large |Im z| (cot → ∓i).
pub fn cot_complex(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im > 0.0 {
        let w = (2.0 * i * z).exp(); // |w| < 1
        i * (w + 1.0) / (w - 1.0)
    } else {
        let w = (-2.0 * i * z).exp(); // |w| <= 1
        i * (1.0 + w) / (1.0 - w)
    }
}

/// Kahan–Neumaier compensated accumulator. Series here are summed in
/// ascending order of n; compensation keeps the rounding floor flat over
/// 1e6-term sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Least-squares fit y ≈ intercept + slope·x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope.
    pub slope_err: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 3, "need at least 3 points to fit a line");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let slope_err = (ss_res / dof / sxx).sqrt();
    LineFit {
        slope,
        intercept,
        r_squared,
        slope_err,
    }
}

/// Roots of the monic cubic s³ + a2·s² + a1·s + a0 (real coefficients),
/// via Cardano followed by Newton polish to ~1 ulp residuals.
pub fn solve_monic_cubic(a2: f64, a1: f64, a0: f64) -> [Complex64; 3] {
    // depressed cubic t³ + p t + q with s = t - a2/3
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = Complex64::new(0.25 * q * q + p * p * p / 27.0, 0.0).sqrt();
    let mut base = Complex64::new(-0.5 * q, 0.0) + disc;
    if base.norm() < 1e-300 {
        base = Complex64::new(-0.5 * q, 0.0) - disc;
    }
    let u0 = base.powf(1.0 / 3.0);
    let rot = Complex64::new(-0.5, 0.75f64.sqrt());
    let mut roots = [Complex64::default(); 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let u = u0 * rot.powu(k as u32);
        let t = if u.norm() > 0.0 {
            u - Complex64::new(p, 0.0) / (u * 3.0)
        } else {
            Complex64::default()
        };
        let mut s = t - a2 / 3.0;
        for _ in 0..40 {
            let f = ((s + a2) * s + a1) * s + a0;
            let df = (s * 3.0 + 2.0 * a2) * s + a1;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            s -= step;
            if step.norm() <= 1e-16 * (1.0 + s.norm()) {
                break;
            }
        }
        *root = s;
    }
    // conjugate-pair cleanup: a real cubic has either 3 real roots or one
    // real root and a conjugate pair
    for r in roots.iter_mut() {
        if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coth_matches_tanh_away_from_zero() {
        for &z in &[0.5, 1.0, 3.0, -2.0] {
            assert!((coth(z) - 1.0 / z.tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn z_coth_z_limits() {
        assert_eq!(z_coth_z(0.0), 1.0);
        assert!((z_coth_z(1e-6) - 1.0).abs() < 1e-11);
        assert!((z_coth_z(30.0) - 30.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_energy_limits() {
        // classical: ε -> kBT/2 at hbar*omega << kBT
        assert!((thermal_energy(1.0, 1.0, 1e-9, 1.0) - 0.5).abs() < 1e-12);
        // zero point: ε -> ħω/4 at T -> 0
        let e = thermal_energy(2.0, 1e-9, 1.0, 1.0);
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_on_harmonic_tail() {
        let mut k = KahanSum::new();
        let mut naive = 0.0f32;
        for n in 1..=100_000u32 {
            k.add(1.0 / n as f64);
            naive += 1.0 / n as f32;
        }
        let exact: f64 = (1..=100_000u32).map(|n| 1.0 / n as f64).rev().sum();
        assert!((k.value() - exact).abs() < 1e-11);
        assert!((naive as f64 - exact).abs() > 1e-5); // f32 naive drifts
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let fit = line_fit(&x, &y);
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn cubic_roots_real_and_complex() {
        // (s-1)(s-2)(s-3)
        let r = solve_monic_cubic(-6.0, 11.0, -6.0);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 1.0).abs() < 1e-12 && (re[2] - 3.0).abs() < 1e-12);
        assert!(r.iter().all(|z| z.im == 0.0));

        // s³ + s + 1: one real root near -0.6823, conjugate pair
        let r = solve_monic_cubic(0.0, 1.0, 1.0);
        let n_real = r.iter().filter(|z| z.im == 0.0).count();
        assert_eq!(n_real, 1);
        for z in r {
            let res = ((z + 0.0) * z + 1.0) * z + 1.0;
            assert!(res.norm() < 1e-13);
        }
    }

    #[test]
    fn cot_complex_stable_large_imag() {
        let z = Complex64::new(0.3, 50.0);
        let c = cot_complex(z);
        assert!((c - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let z = Complex64::new(0.3, -50.0);
        assert!((cot_complex(z) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        // against direct cos/sin at moderate argument
        let z = Complex64::new(0.7, 0.4);
        let direct = z.cos() / z.sin();
        assert!((cot_complex(z) - direct).norm() < 1e-13);
    }
}
