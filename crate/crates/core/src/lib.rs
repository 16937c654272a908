//! Numerical core for stochastic Hodgkin-Huxley systems driven by a
//! mean-reverting random input that shares its Brownian motion with the
//! membrane potential.
//!
//! The crate provides the pieces needed to study such systems at desk scale:
//!
//! * truncated univariate Taylor arithmetic ([`Jet`]) delivering exact
//!   higher-order derivatives of the gate rate functions,
//! * the gate rates and the deterministic Hodgkin-Huxley vector field
//!   ([`rates`], [`HHParams`]), including the input-to-voltage bijection on
//!   the equilibrium branch,
//! * hypoellipticity determinants built from those derivatives
//!   ([`hormander`]): the general `(m-1) x (m-1)` criterion, its 3x3
//!   reduction for Hodgkin-Huxley, zero-finding on the equilibrium branch,
//!   and a finite-difference Lie bracket for cross-checks,
//! * fixed-step RK4 and Euler-Maruyama integration with reproducible
//!   counter-based noise streams ([`dynamics`], [`rng`]),
//! * equilibrium classification and limit-cycle extraction ([`orbit`]),
//! * Cameron-Martin control constructions that steer the system along
//!   arbitrary deterministic evolutions ([`control`]),
//! * Monte Carlo hitting probes with Wilson intervals and a kernel density
//!   estimator over final states ([`probe`]).
//!
//! All voltages are in millivolts and times in milliseconds.

// Guards are written as `!(x > 0.0)` on purpose: they reject NaN along
// with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod error;
pub mod hormander;
pub mod jet;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod orbit;
pub mod probe;
pub mod rates;
pub mod rng;
pub mod trajectory;

pub use control::{ControlPath, SmoothBridge};
pub use error::{Error, Result};
pub use jet::Jet;
pub use model::{GatePair, HHParams, IvriModel};
pub use noise::{NoiseKind, NoiseSpec, Signal};
pub use orbit::{OrbitResult, StabilityReport};
pub use probe::{HitProbe, TargetPair};
pub use rates::Gate;
pub use rng::RngSeed;
pub use trajectory::Trajectory;
