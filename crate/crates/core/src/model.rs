//! The deterministic Hodgkin-Huxley vector field and the general model
//! description with internal variables and random input.
//!
//! The deterministic system is
//!
//! ```text
//! dv = [ I(t) + F(v, n, m, h) ] dt
//! dy = [ alpha_y(v) (1 - y) - beta_y(v) y ] dt,   y in {n, m, h}
//! ```
//!
//! with `F(v,n,m,h) = -[ g_K n^4 (v - E_K) + g_Na m^3 h (v - E_Na) +
//! g_L (v - E_L) ]`. On the equilibrium branch `(v, n_inf(v), m_inf(v),
//! h_inf(v))` the constant input holding the system at `v` is
//! `F_infty(v) = -F(v, branch(v))`; it is strictly increasing on
//! `(-15, 30)` and defines the input-to-voltage bijection `c -> v_c`.
//!
//! [`IvriModel`] generalizes this structure to `m` coordinates: a first
//! coordinate driven by `F` plus the input increments, `m - 2` internal
//! coordinates with drifts linear in themselves, and an autonomous scalar
//! input as last coordinate sharing the Brownian motion with the first.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::noise::NoiseSpec;
use crate::rates::{self, GATES};

/// Interval on which the input-to-voltage bijection is used.
pub const BIJECTION_INTERVAL: (f64, f64) = (-15.0, 30.0);

/// Conductances (mS/cm^2) and reversal potentials (mV).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HHParams {
    pub g_k: f64,
    pub g_na: f64,
    pub g_l: f64,
    pub e_k: f64,
    pub e_na: f64,
    pub e_l: f64,
}

impl Default for HHParams {
    fn default() -> Self {
        HHParams { g_k: 36.0, g_na: 120.0, g_l: 0.3, e_k: -12.0, e_na: 120.0, e_l: 10.6 }
    }
}

impl HHParams {
    pub fn validate(&self) -> Result<()> {
        if self.g_k > 0.0 && self.g_na > 0.0 && self.g_l > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("conductances must be positive"))
        }
    }

    /// Membrane current drift `F(v, n, m, h)`.
    pub fn f(&self, v: f64, n: f64, m: f64, h: f64) -> f64 {
        -(self.g_k * n.powi(4) * (v - self.e_k)
            + self.g_na * m.powi(3) * h * (v - self.e_na)
            + self.g_l * (v - self.e_l))
    }

    /// `F` on the first four entries of a state slice.
    pub fn f_state(&self, x: &[f64]) -> f64 {
        self.f(x[0], x[1], x[2], x[3])
    }

    /// `dF/dv` at frozen gates, `-(g_K n^4 + g_Na m^3 h + g_L)`; strictly
    /// negative whenever the gates sit in `[0, 1]^3`.
    pub fn f_v(&self, n: f64, m: f64, h: f64) -> f64 {
        -(self.g_k * n.powi(4) + self.g_na * m.powi(3) * h + self.g_l)
    }

    /// Jet of `v -> F(v, n, m, h)` with the gate values frozen. `F` is
    /// affine in `v`, so all coefficients beyond the first are zero.
    pub fn f_jet_frozen_gates(&self, vj: &Jet, n: f64, m: f64, h: f64) -> Jet {
        let ord = vj.order();
        let slope = self.f_v(n, m, h);
        Jet::constant(self.f(vj.value(), n, m, h) - slope * vj.value(), ord) + *vj * slope
    }

    /// Constant input holding the equilibrium branch at `v`.
    pub fn f_infty(&self, v: f64) -> f64 {
        let [n, m, h] = rates::branch_gates(v);
        -self.f(v, n, m, h)
    }

    /// Jet of `F_infty`, with the branch gates varying along `v`.
    pub fn f_infty_jet(&self, v: f64, order: usize) -> Jet {
        let vj = Jet::variable(v, order);
        let mut y = [Jet::constant(0.0, order); 3];
        for (slot, gate) in y.iter_mut().zip(GATES) {
            let (a, b) = rates::gate_coeffs_jet(gate, &vj);
            *slot = b / a;
        }
        let [n, m, h] = y;
        -(self.jet_on_gates(&vj, n, m, h))
    }

    fn jet_on_gates(&self, vj: &Jet, n: Jet, m: Jet, h: Jet) -> Jet {
        let ord = vj.order();
        let n4 = n * n * n * n;
        let m3h = m * m * m * h;
        -(n4 * (*vj - self.e_k) * self.g_k
            + m3h * (*vj - self.e_na) * self.g_na
            + (*vj + Jet::constant(-self.e_l, ord)) * self.g_l)
    }

    /// Equilibrium branch point `(v, n_inf(v), m_inf(v), h_inf(v))`.
    pub fn branch_state(&self, v: f64) -> [f64; 4] {
        let [n, m, h] = rates::branch_gates(v);
        [v, n, m, h]
    }

    /// Unique `v_c` with `F_infty(v_c) = c`, by bracketing bisection on the
    /// bijection interval followed by Newton polish with the jet derivative.
    pub fn equilibrium_v(&self, c: f64) -> Result<f64> {
        const RESIDUAL_TOL: f64 = 1e-10;
        const MAX_ITER: usize = 200;
        let (mut lo, mut hi) = BIJECTION_INTERVAL;
        let (c_lo, c_hi) = (self.f_infty(lo), self.f_infty(hi));
        if !(c > c_lo && c < c_hi) {
            return Err(Error::domain(format!(
                "input c = {c} outside admissible interval ({c_lo:.4}, {c_hi:.4}) \
                 = F_infty(({}, {}))",
                lo, hi
            )));
        }
        let mut v = 0.5 * (lo + hi);
        let mut iter = 0;
        // Bisect until the bracket is small, then let Newton finish.
        while hi - lo > 1e-6 && iter < MAX_ITER {
            v = 0.5 * (lo + hi);
            if self.f_infty(v) < c {
                lo = v;
            } else {
                hi = v;
            }
            iter += 1;
        }
        while iter < MAX_ITER {
            let j = self.f_infty_jet(v, 1);
            let resid = j.value() - c;
            if resid.abs() <= RESIDUAL_TOL {
                return Ok(v);
            }
            let slope = j.derivative(1);
            let step = resid / slope;
            v -= step;
            if !(v > BIJECTION_INTERVAL.0 && v < BIJECTION_INTERVAL.1) {
                v = 0.5 * (lo + hi); // Newton left the bracket; fall back
                if self.f_infty(v) < c {
                    lo = v;
                } else {
                    hi = v;
                }
            }
            iter += 1;
        }
        Err(Error::numeric(format!(
            "equilibrium_v did not reach residual {RESIDUAL_TOL} within {MAX_ITER} iterations"
        )))
    }

    /// Full equilibrium state for constant input `c`.
    pub fn equilibrium_state(&self, c: f64) -> Result<[f64; 4]> {
        Ok(self.branch_state(self.equilibrium_v(c)?))
    }

    /// Right-hand side of the deterministic system under input `I(t)`.
    pub fn rhs_deterministic(&self, t: f64, x: &[f64], input: &dyn Fn(f64) -> f64) -> [f64; 4] {
        let (v, n, m, h) = (x[0], x[1], x[2], x[3]);
        let mut out = [0.0; 4];
        out[0] = input(t) + self.f(v, n, m, h);
        for (k, gate) in GATES.iter().enumerate() {
            let (al, be) = rates::rate(*gate, v);
            out[k + 1] = al * (1.0 - x[k + 1]) - be * x[k + 1];
        }
        out
    }
}

/// Scalar coefficient evaluator, `x_1 -> a_i(x_1)`.
pub type ScalarCoeff = Box<dyn Fn(f64) -> f64 + Send + Sync>;
/// Jet coefficient evaluator in the first coordinate.
pub type JetCoeff = Box<dyn Fn(&Jet) -> Jet + Send + Sync>;
/// Coupling drift of the first coordinate over the first `m - 1`
/// coordinates.
pub type CouplingDrift = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Jet of the coupling drift in the first coordinate with the remaining
/// coordinates frozen.
pub type CouplingDriftJet = Box<dyn Fn(&Jet, &[f64]) -> Jet + Send + Sync>;

/// One internal coordinate's drift coefficients: `dx_i = [-a(x_1) x_i +
/// b(x_1)] dt`, with jet evaluators in the first coordinate.
pub struct GatePair {
    pub a: ScalarCoeff,
    pub b: ScalarCoeff,
    pub a_jet: JetCoeff,
    pub b_jet: JetCoeff,
}

/// System description with internal variables and random input: first
/// coordinate coupled to all others through `f` and receiving the input
/// increments, internal coordinates linear in themselves, autonomous scalar
/// input as the last coordinate.
pub struct IvriModel {
    /// State dimension `m` (first coordinate + internals + input).
    pub dim: usize,
    /// Coupling drift of the first coordinate, a function of the first
    /// `m - 1` coordinates.
    pub f: CouplingDrift,
    /// Jet of `f` in the first coordinate, remaining coordinates frozen to
    /// the given values (`rest` holds coordinates `2..m-1`).
    pub f_jet: CouplingDriftJet,
    /// Internal coordinates `2..m-1`, in order.
    pub gates: Vec<GatePair>,
    pub noise: NoiseSpec,
    pub name: String,
}

impl IvriModel {
    /// The stochastic Hodgkin-Huxley system: `m = 5`, gates n, m, h as
    /// internal coordinates, input as fifth coordinate.
    pub fn hh(params: HHParams, noise: NoiseSpec) -> IvriModel {
        let gates = GATES
            .iter()
            .map(|&gate| GatePair {
                a: Box::new(move |v| rates::gate_coeffs(gate, v).0),
                b: Box::new(move |v| rates::gate_coeffs(gate, v).1),
                a_jet: Box::new(move |vj| rates::gate_coeffs_jet(gate, vj).0),
                b_jet: Box::new(move |vj| rates::gate_coeffs_jet(gate, vj).1),
            })
            .collect();
        IvriModel {
            dim: 5,
            f: Box::new(move |x| params.f_state(x)),
            f_jet: Box::new(move |vj, rest| {
                params.f_jet_frozen_gates(vj, rest[0], rest[1], rest[2])
            }),
            gates,
            noise,
            name: "hh".into(),
        }
    }

    /// Drift component `J_i` of coordinate `i` (1-based): `J_1 = F`,
    /// `J_i = -a_i(x_1) x_i + b_i(x_1)` for the internal coordinates.
    pub fn j_component(&self, i: usize, x: &[f64]) -> f64 {
        if i == 1 {
            (self.f)(&x[..self.dim - 1])
        } else {
            let g = &self.gates[i - 2];
            -(g.a)(x[0]) * x[i - 1] + (g.b)(x[0])
        }
    }

    /// Ito drift of the full system at `(t, x)`.
    pub fn drift(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let m = self.dim;
        let bm = self.noise.drift(t, x[m - 1]);
        out[0] = (self.f)(&x[..m - 1]) + bm;
        for i in 2..m {
            out[i - 1] = self.j_component(i, x);
        }
        out[m - 1] = bm;
    }

    /// Stratonovich drift: the Ito drift minus `1/2 sigma sigma'` in the
    /// coordinates carrying the noise (first and last).
    pub fn strat_drift(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.drift(t, x, out);
        let corr = self.noise.strat_correction(x[self.dim - 1]);
        out[0] -= corr;
        out[self.dim - 1] -= corr;
    }

    /// Drift-extended vector field on `(t, x)` space: time slot first,
    /// value `(1, strat_drift)`.
    pub fn a0(&self, tx: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim + 1];
        let (head, tail) = out.split_at_mut(1);
        head[0] = 1.0;
        self.strat_drift(tx[0], &tx[1..], tail);
        out
    }

    /// Diffusion vector field on `(t, x)` space: zero time slot, the scalar
    /// diffusion in the first and last state coordinates.
    pub fn a1(&self, tx: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim + 1];
        let s = self.noise.sigma(tx[self.dim]);
        out[1] = s;
        out[self.dim] = s;
        out
    }

    /// Checks membership in the state space `R x [0,1]^(m-2) x U`.
    pub fn validate_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::domain(format!(
                "state dimension {} does not match model dimension {}",
                x.len(),
                self.dim
            )));
        }
        for (i, v) in x.iter().enumerate().take(self.dim - 1).skip(1) {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::domain(format!(
                    "internal coordinate {} = {v} outside [0, 1]",
                    i + 1
                )));
            }
        }
        let xi = x[self.dim - 1];
        if !self.noise.contains(xi) {
            return Err(Error::domain(format!(
                "input coordinate {xi} outside the admissible interval {:?}",
                self.noise.interval()
            )));
        }
        Ok(())
    }
}
