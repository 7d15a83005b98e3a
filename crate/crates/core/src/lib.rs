//! Energy balance of noisy and damped harmonic oscillators.
//!
//! A dissipative quantum oscillator exchanges energy with its bath, and the
//! familiar equality of mean kinetic and potential energy picks up two
//! bath-induced corrections: I₁, the work done on the oscillator by the
//! noise, and I₂, a friction-kernel-weighted position–velocity correlation,
//! with ⟨K⟩ − ⟨V⟩ = (I₂ − I₁)/2. This crate evaluates those corrections as
//! Matsubara series ([`matsubara`]) and, independently, as frequency-domain
//! quadratures ([`oracle`]), so every convergent closed form is checked
//! against a brute-force integral that shares none of its algebra. The
//! classical side of the story — a Brownian oscillator whose noise restores
//! ⟨K⟩ = ⟨V⟩ = k_BT/2 exactly — runs as a stochastic simulation in
//! [`langevin`], and the electrical analogue (an LCR loop driven by
//! Johnson–Nyquist noise) lives in [`circuit`].
//!
//! Conventions: natural units m = ħ = k_B = 1 by default ([`params`]), SI
//! accepted everywhere; figure-space sweeps use x = βħω₀, ρ = γ/ω₀ and
//! σ = ω_cut/ω₀. Divergent series (Ohmic I₁, the circuit energy difference)
//! are returned as partial sums plus a fitted log-divergence verdict — never
//! as a fabricated limit.

pub mod bathspec;
pub mod circuit;
pub mod langevin;
pub mod matsubara;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod special;

mod error;

pub use error::{Error, Result};
