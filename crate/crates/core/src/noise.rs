//! Mean-reverting input specifications.
//!
//! The input coordinate follows `d xi = (S(t) - xi) tau dt + gamma q(xi)
//! sqrt(tau) dW`, parametrized by `tau` (speed) and `gamma` (spread), with
//! `q = 1` for Ornstein-Uhlenbeck input (admissible interval all of R) and
//! `q(x) = sqrt((x + K) v 0)` for Cox-Ingersoll-Ross input (admissible
//! interval `(-K, inf)`, full truncation at the barrier). For CIR the shift
//! must satisfy `K > gamma^2/2 + sup|S|`.

use crate::error::{Error, Result};

/// Deterministic signal carried by the input.
///
/// Constant and sinusoidal signals cover this crate's studies; the
/// `Sinusoid` form is `a (1 + sin(2 pi t / T))`. Additional smooth signal
/// shapes would slot in as further variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Signal {
    Constant(f64),
    Sinusoid { amplitude: f64, period: f64 },
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Constant(c) => *c,
            Signal::Sinusoid { amplitude, period } => {
                amplitude * (1.0 + (2.0 * std::f64::consts::PI * t / period).sin())
            }
        }
    }

    /// `sup_t |S(t)|`, used by the CIR shift constraint.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Signal::Constant(c) => c.abs(),
            Signal::Sinusoid { amplitude, .. } => 2.0 * amplitude.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    Ou,
    /// CIR with barrier at `-shift`.
    Cir { shift: f64 },
}

/// Full input specification: kind, rate, spread and signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub tau: f64,
    pub gamma: f64,
    pub signal: Signal,
}

impl NoiseSpec {
    /// Ornstein-Uhlenbeck input. `gamma = 0` degenerates to a deterministic
    /// relaxation and is allowed.
    pub fn ou(tau: f64, gamma: f64, signal: Signal) -> Result<NoiseSpec> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!("tau must be positive, got {tau}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(NoiseSpec { kind: NoiseKind::Ou, tau, gamma, signal })
    }

    /// Cox-Ingersoll-Ross input with barrier shift `K`.
    pub fn cir(tau: f64, gamma: f64, signal: Signal, shift: f64) -> Result<NoiseSpec> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!("tau must be positive, got {tau}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
        }
        let bound = gamma * gamma / 2.0 + signal.sup_abs();
        if !(shift > bound) {
            return Err(Error::domain(format!(
                "CIR shift K = {shift} must exceed gamma^2/2 + sup|S| = {bound}"
            )));
        }
        Ok(NoiseSpec { kind: NoiseKind::Cir { shift }, tau, gamma, signal })
    }

    /// Drift of the input equation, `b_m(t, x) = (S(t) - x) tau`.
    pub fn drift(&self, t: f64, x: f64) -> f64 {
        (self.signal.eval(t) - x) * self.tau
    }

    /// Diffusion coefficient `sigma(x) = gamma sqrt(tau) q(x)`.
    pub fn sigma(&self, x: f64) -> f64 {
        let base = self.gamma * self.tau.sqrt();
        match self.kind {
            NoiseKind::Ou => base,
            NoiseKind::Cir { shift } => base * (x + shift).max(0.0).sqrt(),
        }
    }

    /// `sigma'(x)`; zero on the truncated CIR region below the barrier.
    pub fn sigma_prime(&self, x: f64) -> f64 {
        match self.kind {
            NoiseKind::Ou => 0.0,
            NoiseKind::Cir { shift } => {
                if x + shift > 0.0 {
                    self.gamma * self.tau.sqrt() / (2.0 * (x + shift).sqrt())
                } else {
                    0.0
                }
            }
        }
    }

    /// Stratonovich drift correction `1/2 sigma sigma'` (constant
    /// `gamma^2 tau / 4` on the live CIR region, zero for OU).
    pub fn strat_correction(&self, x: f64) -> f64 {
        0.5 * self.sigma(x) * self.sigma_prime(x)
    }

    /// Admissible open interval `U` as `(lo, hi)`.
    pub fn interval(&self) -> (f64, f64) {
        match self.kind {
            NoiseKind::Ou => (f64::NEG_INFINITY, f64::INFINITY),
            NoiseKind::Cir { shift } => (-shift, f64::INFINITY),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.interval();
        x > lo && x < hi
    }

    /// Stationary spread `gamma / sqrt(2)` of the OU marginal; used as the
    /// input-coordinate scale in probe metrics.
    pub fn stationary_spread(&self) -> f64 {
        self.gamma / std::f64::consts::SQRT_2
    }

    pub fn describe(&self) -> String {
        match self.kind {
            NoiseKind::Ou => format!("ou(tau={}, gamma={})", self.tau, self.gamma),
            NoiseKind::Cir { shift } => {
                format!("cir(tau={}, gamma={}, K={})", self.tau, self.gamma, shift)
            }
        }
    }
}
