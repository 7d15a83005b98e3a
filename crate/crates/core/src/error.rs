use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Undamped susceptibility evaluated on its own resonance.
    #[error("susceptibility pole on the real axis: gamma = 0 and |omega| = omega0")]
    PoleOnRealAxis,

    /// `omega_+ - omega_-` (or the analogous root separation) underflows the
    /// critical-damping tolerance; closed forms are numerically void there.
    #[error("critically damped: root separation below tolerance, use the quadrature oracle")]
    CriticalDampingSingularity,

    /// A Matsubara frequency landed on (or numerically too close to) a pole of
    /// the summand. Reported instead of returning a silent infinity.
    #[error("Matsubara frequency nu_{n} collides with a summand pole (|denom| = {denom:.3e}, guard = {guard:.3e})")]
    PoleCollision { n: usize, denom: f64, guard: f64 },

    #[error("quadrature tolerance not met: error estimate {err:.3e} > requested {tol:.3e}")]
    ToleranceNotMet { err: f64, tol: f64 },

    /// Stability guard `dt * max(gamma, omega0) < 0.1` failed.
    #[error("unstable step: dt * max(gamma, omega0) = {0:.3e} >= 0.1")]
    UnstableStep(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
