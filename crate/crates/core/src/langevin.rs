//! Classical side: stochastic integration of the Brownian oscillator,
//! closed-form time averages for the deterministic damped oscillator, and
//! periodogram spectral estimation.
//!
//! The Brownian oscillator mẍ + μẋ + mω₀²x = F(t) with white noise
//! ⟨F(t)F(t′)⟩ = Γδ(t−t′) is integrated with a BAOAB splitting whose
//! friction+noise substep is the exact Ornstein–Uhlenbeck update, so the
//! velocity marginal is sampled without stability loss up to the guard
//! dt·max(γ, ω₀) < 0.1. With Γ = 2μk_BT the stationary state satisfies
//! equipartition ⟨mẋ²/2⟩ = ⟨mω₀²x²/2⟩ = Γ/4μ = k_BT/2, the
//! position–velocity correlation vanishes, and the virial balance
//! ⟨mẋ²⟩ − ⟨mω₀²x²⟩ − μ⟨xẋ⟩ + ⟨xF⟩ = 0 holds within statistical error.
//! Time averages stand in for thermal averages (long-trajectory ergodic
//! sampling); errors are batch-mean standard errors and acceptance is always
//! in units of them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::params::OscillatorParams;

/// Stability guard: dt·max(γ, ω₀) must stay below this.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Configuration of one stochastic run. `noise_intensity` is Γ; `None`
/// selects the thermal choice Γ = 2μk_BT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_burnin: usize,
    pub seed: u64,
    pub noise_intensity: Option<f64>,
    /// Record noise impulses for the ⟨xF⟩ estimator.
    pub store_noise: bool,
    /// Batches for standard errors (≥ 32).
    pub n_batches: usize,
}

impl SdeConfig {
    pub fn new(dt: f64, n_steps: usize, n_burnin: usize, seed: u64) -> Self {
        Self {
            dt,
            n_steps,
            n_burnin,
            seed,
            noise_intensity: None,
            store_noise: true,
            n_batches: 64,
        }
    }

    pub fn validate(&self, p: &OscillatorParams) -> Result<()> {
        p.validate()?;
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter("dt must be > 0".into()));
        }
        let guard = self.dt * p.gamma.max(p.omega0);
        if guard >= STABILITY_LIMIT {
            return Err(Error::UnstableStep(guard));
        }
        if self.n_steps <= self.n_burnin {
            return Err(Error::InvalidParameter(
                "n_steps must exceed n_burnin".into(),
            ));
        }
        if self.n_batches < 32 {
            return Err(Error::InvalidParameter("need at least 32 batches".into()));
        }
        if (self.n_steps - self.n_burnin) < 4 * self.n_batches {
            return Err(Error::InvalidParameter(
                "too few post-burn-in samples for batching".into(),
            ));
        }
        if self.noise_intensity.is_some_and(|g| g < 0.0) {
            return Err(Error::InvalidParameter("noise intensity must be >= 0".into()));
        }
        Ok(())
    }

    fn gamma_noise(&self, p: &OscillatorParams) -> f64 {
        self.noise_intensity
            .unwrap_or(2.0 * p.mu() * p.kb * p.temperature)
    }
}

/// Mean with its batch standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    /// |value − target| in units of the standard error.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        if self.std_err == 0.0 {
            if self.value == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - target).abs() / self.std_err
        }
    }
}

/// Time averages of x², ẋ², xẋ (and optionally xF) from one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    pub mean_x2: Estimate,
    pub mean_v2: Estimate,
    pub mean_xv: Estimate,
    pub mean_xf: Option<Estimate>,
    pub n_samples: usize,
}

impl TrajectoryStats {
    /// ⟨mẋ²⟩ − ⟨mω₀²x²⟩ − μ⟨xẋ⟩ + ⟨xF⟩ with its propagated error.
    pub fn virial_balance(&self, p: &OscillatorParams) -> Estimate {
        let xf = self.mean_xf.unwrap_or(Estimate { value: 0.0, std_err: 0.0 });
        let w0sq = p.omega0 * p.omega0;
        let value = p.m * self.mean_v2.value - p.m * w0sq * self.mean_x2.value
            - p.mu() * self.mean_xv.value
            + xf.value;
        let std_err = ((p.m * self.mean_v2.std_err).powi(2)
            + (p.m * w0sq * self.mean_x2.std_err).powi(2)
            + (p.mu() * self.mean_xv.std_err).powi(2)
            + xf.std_err.powi(2))
        .sqrt();
        Estimate { value, std_err }
    }
}

struct Baoab {
    dt: f64,
    w0sq: f64,
    ou_decay: f64,
    ou_sigma: f64,
    rng: ChaCha8Rng,
    x: f64,
    v: f64,
}

impl Baoab {
    fn new(p: &OscillatorParams, cfg: &SdeConfig) -> Self {
        let gamma_noise = cfg.gamma_noise(p);
        let ou_decay = (-p.gamma * cfg.dt).exp();
        // stationary OU variance per unit mass: Γ/(2μm); zero friction or
        // zero noise both disable the kick
        let ou_sigma = if p.gamma > 0.0 && gamma_noise > 0.0 {
            ((1.0 - ou_decay * ou_decay) * gamma_noise / (2.0 * p.mu() * p.m)).sqrt()
        } else {
            0.0
        };
        Self {
            dt: cfg.dt,
            w0sq: p.omega0 * p.omega0,
            ou_decay,
            ou_sigma,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            x: 0.0,
            v: 0.0,
        }
    }

    /// One BAOAB step; returns (x at the O-point, noise velocity kick).
    #[inline]
    fn step(&mut self) -> (f64, f64) {
        let half = 0.5 * self.dt;
        self.v += -self.w0sq * self.x * half;
        self.x += self.v * half;
        let xi: f64 = StandardNormal.sample(&mut self.rng);
        let kick = self.ou_sigma * xi;
        let x_mid = self.x;
        self.v = self.ou_decay * self.v + kick;
        self.x += self.v * half;
        self.v += -self.w0sq * self.x * half;
        (x_mid, kick)
    }
}

fn batch_estimate(batch_sums: &[f64], batch_len: usize) -> Estimate {
    let n = batch_sums.len() as f64;
    let means: Vec<f64> = batch_sums.iter().map(|s| s / batch_len as f64).collect();
    let mean = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: mean,
        std_err: (var / n).sqrt(),
    }
}

/// Integrate the Brownian oscillator and return post-burn-in time averages.
pub fn simulate_brownian(p: &OscillatorParams, cfg: &SdeConfig) -> Result<TrajectoryStats> {
    cfg.validate(p)?;
    let mut stepper = Baoab::new(p, cfg);
    for _ in 0..cfg.n_burnin {
        stepper.step();
    }
    let n_production = cfg.n_steps - cfg.n_burnin;
    let batch_len = n_production / cfg.n_batches;
    let n_used = batch_len * cfg.n_batches;

    let nb = cfg.n_batches;
    let (mut sx2, mut sv2, mut sxv, mut sxf) =
        (vec![0.0; nb], vec![0.0; nb], vec![0.0; nb], vec![0.0; nb]);
    for i in 0..n_used {
        let (x_mid, kick) = stepper.step();
        let b = i / batch_len;
        sx2[b] += stepper.x * stepper.x;
        sv2[b] += stepper.v * stepper.v;
        sxv[b] += stepper.x * stepper.v;
        if cfg.store_noise {
            // impulse per unit time: m·Δv_noise/dt, correlated with the
            // position at the kick (which cannot anticipate it)
            sxf[b] += x_mid * p.m * kick / cfg.dt;
        }
    }
    Ok(TrajectoryStats {
        mean_x2: batch_estimate(&sx2, batch_len),
        mean_v2: batch_estimate(&sv2, batch_len),
        mean_xv: batch_estimate(&sxv, batch_len),
        mean_xf: cfg.store_noise.then(|| batch_estimate(&sxf, batch_len)),
        n_samples: n_used,
    })
}

/// A recorded trajectory, sampled every `sample_every` steps after burn-in.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

pub fn simulate_trajectory(
    p: &OscillatorParams,
    cfg: &SdeConfig,
    sample_every: usize,
) -> Result<Trajectory> {
    cfg.validate(p)?;
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
    }
    let mut stepper = Baoab::new(p, cfg);
    for _ in 0..cfg.n_burnin {
        stepper.step();
    }
    let n_production = cfg.n_steps - cfg.n_burnin;
    let n_out = n_production / sample_every;
    let mut x = Vec::with_capacity(n_out);
    let mut v = Vec::with_capacity(n_out);
    for i in 0..n_production {
        stepper.step();
        if (i + 1) % sample_every == 0 {
            x.push(stepper.x);
            v.push(stepper.v);
        }
    }
    Ok(Trajectory {
        dt: cfg.dt * sample_every as f64,
        x,
        v,
    })
}

// ---------------------------------------------------------------------------
// deterministic damped oscillator
// ---------------------------------------------------------------------------

/// Finite-window time averages of the free damped oscillator
/// mẍ + μẋ + kx = 0 from its closed-form solution, for checking
/// ⟨mẋ²⟩_T = ⟨kx²⟩_T + μ⟨xẋ⟩_T up to the boundary term.
#[derive(Debug, Clone, Copy)]
pub struct DampedVirial {
    /// ⟨mẋ²⟩ over [0, T].
    pub lhs: f64,
    /// ⟨kx²⟩ + μ⟨xẋ⟩ over [0, T].
    pub rhs: f64,
    pub mean_xv: f64,
    /// m(x(T)ẋ(T) − x₀v₀)/T; equals lhs − rhs identically.
    pub boundary_term: f64,
}

pub fn damped_oscillator_virial(
    m: f64,
    mu: f64,
    k: f64,
    x0: f64,
    v0: f64,
    t_avg: f64,
) -> Result<DampedVirial> {
    if !(m > 0.0 && k > 0.0 && mu >= 0.0 && t_avg > 0.0) {
        return Err(Error::InvalidParameter(
            "need m > 0, k > 0, mu >= 0, t_avg > 0".into(),
        ));
    }
    use num_complex::Complex64;
    let disc = Complex64::new(mu * mu - 4.0 * m * k, 0.0).sqrt();
    let lp = (-mu + disc) / (2.0 * m);
    let lm = (-mu - disc) / (2.0 * m);

    // exp-integral (e^{sT} − 1)/s, series for |sT| -> 0
    let eint = |s: Complex64| -> Complex64 {
        let st = s * t_avg;
        if st.norm() < 1e-8 {
            t_avg * (Complex64::new(1.0, 0.0) + st / 2.0 + st * st / 6.0)
        } else {
            (st.exp() - 1.0) / s
        }
    };

    let (x2, v2, xv, x_t, v_t);
    if (lp - lm).norm() < 1e-9 * (lp.norm() + lm.norm()).max(1e-300) {
        // critically damped: x = (x0 + (v0 − λx0)t)e^{λt}
        let l = 0.5 * (lp + lm);
        let a = Complex64::new(x0, 0.0);
        let b = Complex64::new(v0, 0.0) - l * x0;
        // moments of t^j e^{2λt} over [0, T]
        let e0 = eint(2.0 * l);
        let two_l = 2.0 * l;
        let exp2 = (two_l * t_avg).exp();
        let e1 = (exp2 * t_avg - e0) / two_l;
        let e2 = (exp2 * t_avg * t_avg - 2.0 * e1) / two_l;
        x2 = a * a * e0 + 2.0 * a * b * e1 + b * b * e2;
        let (ap, bp) = (l * a + b, l * b); // ẋ = (ap + bp·t)e^{λt}
        v2 = ap * ap * e0 + 2.0 * ap * bp * e1 + bp * bp * e2;
        xv = a * ap * e0 + (a * bp + b * ap) * e1 + b * bp * e2;
        let et = (l * t_avg).exp();
        x_t = (a + b * t_avg) * et;
        v_t = (ap + bp * t_avg) * et;
    } else {
        let a = (Complex64::new(v0, 0.0) - lm * x0) / (lp - lm);
        let b = Complex64::new(x0, 0.0) - a;
        let (epp, epm, emm) = (eint(2.0 * lp), eint(lp + lm), eint(2.0 * lm));
        x2 = a * a * epp + 2.0 * a * b * epm + b * b * emm;
        v2 = a * a * lp * lp * epp + 2.0 * a * b * lp * lm * epm + b * b * lm * lm * emm;
        xv = a * a * lp * epp + a * b * (lp + lm) * epm + b * b * lm * emm;
        x_t = a * (lp * t_avg).exp() + b * (lm * t_avg).exp();
        v_t = a * lp * (lp * t_avg).exp() + b * lm * (lm * t_avg).exp();
    }

    let real = |z: Complex64, what: &str| -> f64 {
        debug_assert!(
            z.im.abs() <= 1e-9 * z.re.abs().max(1e-12),
            "{what}: imaginary residue {z}"
        );
        z.re
    };
    let mean_x2 = real(x2, "x2") / t_avg;
    let mean_v2 = real(v2, "v2") / t_avg;
    let mean_xv = real(xv, "xv") / t_avg;
    Ok(DampedVirial {
        lhs: m * mean_v2,
        rhs: k * mean_x2 + mu * mean_xv,
        mean_xv,
        boundary_term: m * (real(x_t * v_t, "boundary") - x0 * v0) / t_avg,
    })
}

// ---------------------------------------------------------------------------
// spectral estimation
// ---------------------------------------------------------------------------

/// Two-sided power spectral density on the positive-frequency half grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// ω_k = 2πk/(N·dt) for k = 0..=N/2.
    pub omega: Vec<f64>,
    pub psd: Vec<f64>,
    pub segment_len: usize,
    pub n_segments: usize,
}

impl Spectrum {
    /// (1/2π)·∫ S(ω) dω over the full two-sided range, from the stored half
    /// plus mirror symmetry. Equals ⟨x²⟩ by the discrete Parseval identity
    /// Σ_k S_k·Δω/2π with Δω = 2π/(N·dt).
    pub fn integral_over_2pi(&self) -> f64 {
        let d_omega = self.omega[1] - self.omega[0];
        let interior: f64 = self.psd[1..self.psd.len() - 1].iter().sum();
        let sum = self.psd[0] + 2.0 * interior + self.psd[self.psd.len() - 1];
        sum * d_omega / (2.0 * std::f64::consts::PI)
    }
}

/// Bartlett-averaged periodogram of an evenly sampled trajectory:
/// non-overlapping segments of `segment_len` (a power of two), rectangular
/// window, S(ω_k) = ⟨|Σ_j x_j e^{−iω_k t_j}|²·dt/N⟩ over segments.
/// Needs at least 2¹⁴ samples.
pub fn estimate_spectrum(x: &[f64], dt: f64) -> Result<Spectrum> {
    if x.len() < 1 << 14 {
        return Err(Error::InvalidParameter(format!(
            "spectrum estimation needs >= 16384 samples, got {}",
            x.len()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter("dt must be > 0".into()));
    }
    let segment_len = 1usize << 12; // 4096: resolution vs. averaging trade
    let n_segments = x.len() / segment_len;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(segment_len);
    let mut psd = vec![0.0; segment_len / 2 + 1];
    let mut buf = vec![Complex::new(0.0, 0.0); segment_len];
    for s in 0..n_segments {
        for (b, &val) in buf.iter_mut().zip(&x[s * segment_len..(s + 1) * segment_len]) {
            *b = Complex::new(val, 0.0);
        }
        fft.process(&mut buf);
        for (k, p) in psd.iter_mut().enumerate() {
            *p += buf[k].norm_sqr() * dt / segment_len as f64;
        }
    }
    for p in psd.iter_mut() {
        *p /= n_segments as f64;
    }
    let omega = (0..=segment_len / 2)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / (segment_len as f64 * dt))
        .collect();
    Ok(Spectrum {
        omega,
        psd,
        segment_len,
        n_segments,
    })
}

/// Analytic position spectrum of the Brownian oscillator,
/// S_x(ω) = Γ / (m²(ω₀²−ω²)² + m²γ²ω²).
pub fn analytic_position_spectrum(p: &OscillatorParams, noise_intensity: f64, omega: f64) -> f64 {
    let w0sq = p.omega0 * p.omega0;
    noise_intensity
        / (p.m * p.m * ((w0sq - omega * omega).powi(2) + (p.gamma * omega).powi(2)))
}
