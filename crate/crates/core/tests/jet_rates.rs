//! Cross-checks of the jet derivatives against finite differences, for the
//! actual rate functions the determinants are built from.

mod common;

use ivri_core::jet::Jet;
use ivri_core::rates::{self, Gate};

#[test]
fn rate_jets_match_finite_differences() {
    // Orders 1..4 of all six rates at 100 quasi-random points in
    // [-20, 110], excluding half-unit windows around the removable
    // singularities on the FD side.
    let worst = common::worst_rate_fd_error(100);
    assert!(worst <= 1e-5, "worst FD mismatch {worst}");
}

#[test]
fn jet_evaluation_is_smooth_through_singular_points() {
    // The jets must evaluate finitely and smoothly exactly at v = 10 and
    // v = 25 where the raw quotients are 0/0.
    for (gate, v) in [(Gate::N, 10.0), (Gate::M, 25.0)] {
        let (al, be) = rates::rate_jet(gate, v, 4);
        assert!(al.is_finite() && be.is_finite());
        // Values continue the neighboring branch: compare with evaluation
        // a hair away from the singular point.
        let (al_eps, _) = rates::rate_jet(gate, v + 1e-9, 4);
        for k in 0..=4 {
            let a = al.derivative(k);
            let b = al_eps.derivative(k);
            assert!(
                (a - b).abs() <= 1e-6 * a.abs().max(1e-3),
                "gate {gate:?} order {k}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn composite_gate_drift_jets_match_fd() {
    // d_i(v, y) = -a_i(v) y + b_i(v) for frozen y, the rows of the
    // determinant criterion. The composite mixes alpha and beta, so the
    // shortest of their length scales (10 mV) governs the steps.
    let y = 0.37;
    let scale = 10.0;
    for gate in ivri_core::rates::GATES {
        let f = move |v: f64| {
            let (a, b) = rates::gate_coeffs(gate, v);
            -a * y + b
        };
        for v in common::quasi_random_points(25, -20.0, 110.0, &[10.0, 25.0], 0.5) {
            let vj = Jet::variable(v, 4);
            let (aj, bj) = rates::gate_coeffs_jet(gate, &vj);
            let d = bj - aj * y;
            for k in 1..=4usize {
                let h = common::FD_STEP_FACTORS[k - 1] * scale;
                let fd = if k <= 2 {
                    common::fd_central(&f, v, h, k)
                } else {
                    common::fd_richardson(&f, v, h, k)
                };
                let exact = d.derivative(k);
                let floor = f(v).abs() / scale.powi(k as i32);
                assert!(
                    (fd - exact).abs() <= 1e-5 * exact.abs().max(floor),
                    "gate {gate:?} k={k} v={v}: fd {fd} vs jet {exact}"
                );
            }
        }
    }
}
