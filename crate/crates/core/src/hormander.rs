//! Hypoellipticity determinants and their study along the equilibrium
//! branch and along trajectories.
//!
//! The noise of the system enters only the first and last coordinates; the
//! brackets that propagate it carry the voltage derivatives of the drift
//! components `J_1 = F` and `J_i = -a_i(x_1) x_i + b_i(x_1)`. The general
//! criterion is the determinant of the `(m-1) x (m-1)` matrix with rows
//! `J_1..J_{m-1}` and columns the derivative orders `1..m-1`
//! ([`d_general`]); a nonzero value certifies the weak Hormander condition
//! at the point.
//!
//! For the Hodgkin-Huxley case `F` is affine in the voltage, so the first
//! row is `(dF/dv, 0, 0, 0)` and the criterion collapses to the 3x3
//! determinant [`delta`] with rows `d_n, d_m, d_h` and columns the
//! derivative orders 2, 3, 4 — the orientation is rows-by-gate,
//! columns-by-order; the value is transpose-invariant either way.
//!
//! On the time-extended `(t, x)` space the algebra spanned by the two
//! fields and their brackets always gains exactly one dimension (the time
//! slot) over the algebra spanned by the diffusion field and its brackets
//! with the drift, so the determinant targets the m state directions; the
//! extended dimension count itself is not computed here.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::model::IvriModel;
use crate::rates::{self, GATES};
use crate::trajectory::Trajectory;

/// A determinant evaluation with its audit trail.
#[derive(Clone, Debug)]
pub struct DeterminantReport {
    /// Coordinates the determinant depends on (the first `m - 1`).
    pub point: Vec<f64>,
    pub value: f64,
    /// Matrix entries, rows by drift component, columns by derivative order.
    pub matrix: DMatrix<f64>,
    /// Scale-aware zero test; see [`nonzero_tolerance`].
    pub nonzero: bool,
}

fn finish_report(point: Vec<f64>, matrix: DMatrix<f64>) -> DeterminantReport {
    let value = crate::linalg::det(&matrix);
    let nonzero = value.abs() > nonzero_tolerance(&matrix);
    DeterminantReport { point, value, matrix, nonzero }
}

/// Threshold separating a structural zero from a resolved nonzero value:
/// 1e-12 times the product of row maxima, a Hadamard-style estimate of the
/// determinant's natural magnitude. LU roundoff sits orders of magnitude
/// below it, while the rows' very different scales (the gate rates differ
/// by decades) are respected.
pub fn nonzero_tolerance(matrix: &DMatrix<f64>) -> f64 {
    let scale = (0..matrix.nrows())
        .map(|i| (0..matrix.ncols()).fold(0.0f64, |acc, j| acc.max(matrix[(i, j)].abs())))
        .product::<f64>();
    1e-12 * scale
}

/// General criterion for a model with internal variables and random input:
/// determinant of `(d^k/dx_1^k J_i)` over rows `i = 1..m-1` and columns
/// `k = 1..m-1`, evaluated from jets in the first coordinate. Only the
/// first `m - 1` coordinates of `x` enter.
pub fn d_general(model: &IvriModel, x: &[f64]) -> Result<DeterminantReport> {
    let m = model.dim;
    let n = m - 1;
    if n > MAX_ORDER {
        return Err(Error::domain(format!(
            "model dimension {m} needs derivatives of order {n} > {MAX_ORDER}"
        )));
    }
    if x.len() < n {
        return Err(Error::domain(format!(
            "state has {} coordinates, need at least {n}",
            x.len()
        )));
    }
    let vj = Jet::variable(x[0], n);
    let rest = &x[1..n];
    let mut matrix = DMatrix::zeros(n, n);
    let row_f = (model.f_jet)(&vj, rest);
    for k in 1..=n {
        matrix[(0, k - 1)] = row_f.derivative(k);
    }
    for (g, gate) in model.gates.iter().enumerate() {
        let a = (gate.a_jet)(&vj);
        let b = (gate.b_jet)(&vj);
        let row = b - a * x[g + 1];
        for k in 1..=n {
            matrix[(g + 1, k - 1)] = row.derivative(k);
        }
    }
    Ok(finish_report(x[..n].to_vec(), matrix))
}

/// 3x3 reduction for the Hodgkin-Huxley system: rows `d_n, d_m, d_h` with
/// `d_i(v, y) = -a_i(v) y + b_i(v)`, columns the voltage derivatives of
/// orders 2, 3 and 4. Polynomial in the gate values, so these may be any
/// reals.
pub fn delta(v: f64, n: f64, m: f64, h: f64) -> DeterminantReport {
    let vj = Jet::variable(v, 4);
    let gate_values = [n, m, h];
    let mut matrix = DMatrix::zeros(3, 3);
    for (row, (&gate, &y)) in GATES.iter().zip(&gate_values).enumerate() {
        let (a, b) = rates::gate_coeffs_jet(gate, &vj);
        let d = b - a * y;
        for k in 2..=4 {
            matrix[(row, k - 2)] = d.derivative(k);
        }
    }
    finish_report(vec![v, n, m, h], matrix)
}

/// Determinant along the equilibrium branch,
/// `v -> delta(v, n_inf(v), m_inf(v), h_inf(v))`.
pub fn delta_on_branch(v: f64) -> f64 {
    let [n, m, h] = rates::branch_gates(v);
    delta(v, n, m, h).value
}

/// Grid step of the sign scan in [`find_delta_zeros`].
pub const ZERO_SCAN_STEP: f64 = 1e-2;
/// Bisection width at which a bracketed zero is accepted.
pub const ZERO_BISECT_TOL: f64 = 1e-6;

/// Zeros of the branch determinant on `[v_lo, v_hi]`, located by a sign
/// scan on a 1e-2 grid and bisection to 1e-6, returned in ascending order.
pub fn find_delta_zeros(v_lo: f64, v_hi: f64) -> Result<Vec<f64>> {
    if !(v_lo < v_hi) {
        return Err(Error::domain(format!("need v_lo < v_hi, got [{v_lo}, {v_hi}]")));
    }
    if v_lo < -15.0 || v_hi > 30.0 {
        return Err(Error::domain(format!(
            "scan interval [{v_lo}, {v_hi}] leaves the bijection interval [-15, 30]"
        )));
    }
    let n_cells = ((v_hi - v_lo) / ZERO_SCAN_STEP).ceil() as usize;
    let mut roots = Vec::new();
    let mut prev_v = v_lo;
    let mut prev_d = delta_on_branch(prev_v);
    for i in 1..=n_cells {
        let v = (v_lo + i as f64 * ZERO_SCAN_STEP).min(v_hi);
        let d = delta_on_branch(v);
        if prev_d == 0.0 {
            roots.push(prev_v);
        } else if prev_d * d < 0.0 {
            let (mut a, mut b, mut da) = (prev_v, v, prev_d);
            while b - a > ZERO_BISECT_TOL {
                let mid = 0.5 * (a + b);
                let dm = delta_on_branch(mid);
                if da * dm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    da = dm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_v = v;
        prev_d = d;
    }
    Ok(roots)
}

/// The determinant at each stored state of a trajectory (states must have
/// at least the four voltage-and-gate components).
pub fn delta_along(traj: &Trajectory) -> Vec<(f64, f64)> {
    assert!(traj.dim() >= 4, "delta needs at least 4 state components");
    traj.iter()
        .map(|(t, x)| (t, delta(x[0], x[1], x[2], x[3]).value))
        .collect()
}

/// Default step for the finite-difference Lie bracket,
/// `1e-5 (1 + |point|)`.
pub fn default_fd_step(point: &[f64]) -> f64 {
    1e-5 * (1.0 + point.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Lie bracket `[A, B]` of two vector fields on `(t, x)` space by central
/// finite differences of the Jacobian-vector products. Fields map an
/// `(m+1)`-vector (time slot first) to an `(m+1)`-vector.
pub fn lie_bracket_numeric(
    a: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &dyn Fn(&[f64]) -> Vec<f64>,
    point: &[f64],
    fd_step: f64,
) -> Vec<f64> {
    assert!(fd_step > 0.0);
    let n = point.len();
    let a0 = a(point);
    let b0 = b(point);
    let mut out = vec![0.0; n];
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    for j in 0..n {
        plus[j] = point[j] + fd_step;
        minus[j] = point[j] - fd_step;
        let (bp, bm) = (b(&plus), b(&minus));
        let (ap, am) = (a(&plus), a(&minus));
        for i in 0..n {
            let db = (bp[i] - bm[i]) / (2.0 * fd_step);
            let da = (ap[i] - am[i]) / (2.0 * fd_step);
            out[i] += a0[j] * db - b0[j] * da;
        }
        plus[j] = point[j];
        minus[j] = point[j];
    }
    out
}
