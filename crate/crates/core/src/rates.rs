//! Hodgkin-Huxley gate opening and closing rates.
//!
//! Rates follow the classical table (voltages in mV, times in ms):
//!
//! ```text
//! alpha_n(v) = (0.1 - 0.01 v) / (exp(1 - 0.1 v) - 1)    beta_n(v) = 0.125 exp(-v/80)
//! alpha_m(v) = (2.5 - 0.1 v) / (exp(2.5 - 0.1 v) - 1)   beta_m(v) = 4 exp(-v/18)
//! alpha_h(v) = 0.07 exp(-v/20)                          beta_h(v) = 1 / (exp(3 - 0.1 v) + 1)
//! ```
//!
//! `alpha_n` and `alpha_m` have removable singularities at `v = 10` and
//! `v = 25`. Both are of the form `c * g(u)` with `g(u) = u/(e^u - 1)` and
//! `u` affine in `v` (`u = 1 - 0.1 v` scaled by `0.1` for the n-gate,
//! `u = 2.5 - 0.1 v` for the m-gate), so evaluation goes through
//! [`Jet::expm1_ratio`] and stays accurate through the singular points.
//!
//! In the drift of the gating equations, `dn = [alpha (1-n) - beta n] dt =
//! [-a n + b] dt` with `a = alpha + beta` and `b = alpha`.

use crate::jet::{expm1_ratio_scalar, Jet};

/// The three gate families of the Hodgkin-Huxley model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    N,
    M,
    H,
}

pub const GATES: [Gate; 3] = [Gate::N, Gate::M, Gate::H];

impl Gate {
    pub fn label(&self) -> &'static str {
        match self {
            Gate::N => "n",
            Gate::M => "m",
            Gate::H => "h",
        }
    }
}

/// Opening rate `alpha_i(v)`.
pub fn alpha(gate: Gate, v: f64) -> f64 {
    match gate {
        Gate::N => 0.1 * expm1_ratio_scalar(1.0 - 0.1 * v),
        Gate::M => expm1_ratio_scalar(2.5 - 0.1 * v),
        Gate::H => 0.07 * (-v / 20.0).exp(),
    }
}

/// Closing rate `beta_i(v)`.
pub fn beta(gate: Gate, v: f64) -> f64 {
    match gate {
        Gate::N => 0.125 * (-v / 80.0).exp(),
        Gate::M => 4.0 * (-v / 18.0).exp(),
        Gate::H => 1.0 / ((3.0 - 0.1 * v).exp() + 1.0),
    }
}

/// Both rates of one gate.
pub fn rate(gate: Gate, v: f64) -> (f64, f64) {
    (alpha(gate, v), beta(gate, v))
}

/// Jet of `alpha_i` in the voltage.
pub fn alpha_jet(gate: Gate, v: &Jet) -> Jet {
    let ord = v.order();
    match gate {
        Gate::N => (Jet::constant(1.0, ord) + *v * (-0.1)).expm1_ratio() * 0.1,
        Gate::M => (Jet::constant(2.5, ord) + *v * (-0.1)).expm1_ratio(),
        Gate::H => (*v * (-1.0 / 20.0)).exp() * 0.07,
    }
}

/// Jet of `beta_i` in the voltage.
pub fn beta_jet(gate: Gate, v: &Jet) -> Jet {
    let ord = v.order();
    match gate {
        Gate::N => (*v * (-1.0 / 80.0)).exp() * 0.125,
        Gate::M => (*v * (-1.0 / 18.0)).exp() * 4.0,
        Gate::H => {
            let den = (Jet::constant(3.0, ord) + *v * (-0.1)).exp() + Jet::constant(1.0, ord);
            Jet::constant(1.0, ord) / den
        }
    }
}

/// Rates of one gate as jets of the requested order in `v`.
pub fn rate_jet(gate: Gate, v: f64, order: usize) -> (Jet, Jet) {
    let vj = Jet::variable(v, order);
    (alpha_jet(gate, &vj), beta_jet(gate, &vj))
}

/// Drift coefficients of the gating equation, `(a, b) = (alpha + beta, alpha)`.
pub fn gate_coeffs(gate: Gate, v: f64) -> (f64, f64) {
    let (a, b) = rate(gate, v);
    (a + b, a)
}

/// Jet version of [`gate_coeffs`].
pub fn gate_coeffs_jet(gate: Gate, v: &Jet) -> (Jet, Jet) {
    let al = alpha_jet(gate, v);
    let be = beta_jet(gate, v);
    (al + be, al)
}

/// Steady state `alpha / (alpha + beta)` of the gate at frozen voltage.
pub fn gate_infty(gate: Gate, v: f64) -> f64 {
    let (al, be) = rate(gate, v);
    al / (al + be)
}

/// The whole equilibrium branch point `(n_inf, m_inf, h_inf)(v)`.
pub fn branch_gates(v: f64) -> [f64; 3] {
    [
        gate_infty(Gate::N, v),
        gate_infty(Gate::M, v),
        gate_infty(Gate::H, v),
    ]
}

#[cfg(test)]
// Oracle constants carry their full printed precision on purpose.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_n_through_singular_point() {
        // Removable singularity at v = 10: limit is 0.1 * g(0) = 0.1.
        assert_relative_eq!(alpha(Gate::N, 10.0), 0.1, epsilon = 1e-15);
        assert_relative_eq!(alpha(Gate::M, 25.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_n_at_zero() {
        assert_relative_eq!(beta(Gate::N, 0.0), 0.125, epsilon = 1e-16);
    }

    #[test]
    fn alpha_n_at_zero_closed_form() {
        let expect = 0.1 / (std::f64::consts::E - 1.0);
        assert_relative_eq!(alpha(Gate::N, 0.0), expect, max_relative = 1e-14);
    }

    #[test]
    fn gate_infty_at_zero() {
        // Oracle: direct evaluation of the rate table at v = 0.
        assert_relative_eq!(gate_infty(Gate::N, 0.0), 0.31767691406069739, max_relative = 1e-12);
        assert_relative_eq!(gate_infty(Gate::M, 0.0), 0.052932485257249575, max_relative = 1e-12);
        assert_relative_eq!(gate_infty(Gate::H, 0.0), 0.59612075350846024, max_relative = 1e-12);
    }

    #[test]
    fn gate_infty_fixed_point_identity() {
        for gate in GATES {
            for &v in &[-40.0, -3.2, 0.0, 10.0, 25.0, 62.5, 110.0] {
                let (al, be) = rate(gate, v);
                let y = gate_infty(gate, v);
                assert!((al * (1.0 - y) - be * y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn n_infty_monotone_spot_check() {
        assert!(gate_infty(Gate::N, 50.0) > gate_infty(Gate::N, 0.0));
    }

    #[test]
    fn alpha_n_jet_matches_symbolic_oracle() {
        // Frozen from a symbolic differentiation of the rate table at v=3.7.
        let (al, _) = rate_jet(Gate::N, 3.7, 4);
        let expect = [
            0.0717858256139183459,
            0.00396369716088399439,
            1.60205097383669094e-4,
            2.00347363293270103e-6,
            -2.88206984800688313e-7,
        ];
        for (k, e) in expect.iter().enumerate() {
            assert_relative_eq!(al.derivative(k), *e, max_relative = 1e-12);
        }
    }

    #[test]
    fn alpha_m_jet_matches_symbolic_oracle() {
        let (al, _) = rate_jet(Gate::M, 3.7, 4);
        let expect = [
            0.287260722837758889,
            0.0191137718165229707,
            0.00107828795782905086,
            4.23689693518778761e-5,
            -2.34630296217331592e-8,
        ];
        for (k, e) in expect.iter().enumerate() {
            assert_relative_eq!(al.derivative(k), *e, max_relative = 1e-10);
        }
    }

    #[test]
    fn alpha_jets_smooth_at_singular_points() {
        // At the singular points the derivatives are Bernoulli numbers
        // scaled by the inner-slope powers: alpha_n^(k)(10) = 0.1 (-0.1)^k B_k.
        let bernoulli = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0];
        let (an, _) = rate_jet(Gate::N, 10.0, 4);
        let (am, _) = rate_jet(Gate::M, 25.0, 4);
        for (k, bk) in bernoulli.iter().enumerate() {
            let scale = (-0.1f64).powi(k as i32) * bk;
            assert_relative_eq!(an.derivative(k), 0.1 * scale, epsilon = 1e-16);
            assert_relative_eq!(am.derivative(k), scale, epsilon = 1e-15);
        }
    }

    #[test]
    fn coeffs_positive_and_ordered_on_grid() {
        // a_i(v) > b_i(v) > 0 on [-100, 200], needed by the positivity
        // results for the gating equations.
        for gate in GATES {
            for i in 0..=1000 {
                let v = -100.0 + 0.3 * i as f64;
                let (a, b) = gate_coeffs(gate, v);
                assert!(b > 0.0, "b_{} ({v}) = {b}", gate.label());
                assert!(a > b, "a_{} ({v}) = {a} <= b = {b}", gate.label());
                let y = gate_infty(gate, v);
                assert!(y > 0.0 && y < 1.0);
            }
        }
    }
}
