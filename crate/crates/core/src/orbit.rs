//! Equilibrium classification and limit-cycle extraction for the
//! deterministic system under constant input.

use nalgebra::{Complex, DMatrix};

use crate::dynamics::integrate_ode;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::HHParams;
use crate::trajectory::Trajectory;

/// Step used for the central-difference Jacobian at the equilibrium.
pub const JACOBIAN_FD_STEP: f64 = 1e-6;
/// An equilibrium counts as unstable when some eigenvalue has real part
/// above this threshold.
pub const INSTABILITY_THRESHOLD: f64 = 1e-8;
/// Default transient discarded before orbit extraction (ms).
pub const DEFAULT_TRANSIENT: f64 = 150.0;
/// Points per loop on the common phase grid of the convergence diagnostic.
pub const PHASE_GRID: usize = 256;
/// Voltage is divided by this factor in the loop-comparison norm, bringing
/// it to the scale of the gate variables.
pub const VOLTAGE_SCALE: f64 = 100.0;

/// Stability classification of an equilibrium of the deterministic system.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub input: f64,
    pub equilibrium: [f64; 4],
    pub jacobian: DMatrix<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real_part: f64,
    pub unstable: bool,
}

/// An extracted stable orbit.
#[derive(Clone, Debug)]
pub struct OrbitResult {
    /// Mean spacing of the final section crossings (ms).
    pub period: f64,
    /// Interpolated states at the `v = 0` up-crossings used for the period.
    pub section_states: Vec<[f64; 4]>,
    /// One full loop, between the last two section crossings.
    pub orbit: Trajectory,
    /// Sup distance between the last two loops on a common phase grid, in
    /// the `(v / 100, n, m, h)` norm.
    pub diagnostic: f64,
}

/// Classifies the equilibrium for constant input `c`: central-difference
/// Jacobian of the right-hand side, eigenvalues via Hessenberg reduction
/// with shifted QR sweeps.
pub fn classify_equilibrium(params: &HHParams, c: f64) -> Result<StabilityReport> {
    let eq = params.equilibrium_state(c)?;
    let rhs_norm = params
        .rhs_deterministic(0.0, &eq, &|_| c)
        .iter()
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt();
    if rhs_norm > 1e-9 {
        return Err(Error::numeric(format!(
            "equilibrium residual {rhs_norm} too large for classification"
        )));
    }
    let f = |x: &[f64]| params.rhs_deterministic(0.0, x, &|_| c).to_vec();
    let jacobian = linalg::jacobian_fd(f, &eq, JACOBIAN_FD_STEP);
    let eigenvalues = linalg::eigenvalues(&jacobian, 10_000)?;
    let max_real_part = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        input: c,
        equilibrium: eq,
        jacobian,
        eigenvalues,
        max_real_part,
        unstable: max_real_part > INSTABILITY_THRESHOLD,
    })
}

/// Up-crossings of `level` by the given state coordinate, located by linear
/// interpolation between bracketing steps. Returns `(time, state)` pairs.
pub fn up_crossings(traj: &Trajectory, coord: usize, level: f64) -> Vec<(f64, Vec<f64>)> {
    let mut out = Vec::new();
    for i in 1..traj.len() {
        let a = traj.state(i - 1)[coord];
        let b = traj.state(i)[coord];
        if a < level && b >= level {
            let w = (level - a) / (b - a);
            let t = traj.time(i - 1) + w * (traj.time(i) - traj.time(i - 1));
            let state: Vec<f64> = traj
                .state(i - 1)
                .iter()
                .zip(traj.state(i))
                .map(|(p, q)| p + w * (q - p))
                .collect();
            out.push((t, state));
        }
    }
    out
}

fn resample_loop(traj: &Trajectory, t_a: f64, t_b: f64) -> Vec<[f64; 4]> {
    (0..PHASE_GRID)
        .map(|k| {
            let t = t_a + (t_b - t_a) * k as f64 / PHASE_GRID as f64;
            let s = traj.interpolate(t);
            [s[0], s[1], s[2], s[3]]
        })
        .collect()
}

fn scaled_sup_distance(a: &[[f64; 4]], b: &[[f64; 4]]) -> f64 {
    let mut sup: f64 = 0.0;
    for (p, q) in a.iter().zip(b) {
        sup = sup.max((p[0] - q[0]).abs() / VOLTAGE_SCALE);
        for j in 1..4 {
            sup = sup.max((p[j] - q[j]).abs());
        }
    }
    sup
}

/// Integrates from a perturbation of the unstable equilibrium, discards the
/// transient and extracts the attracting orbit from the `v = 0`
/// up-crossings.
///
/// The period is the mean spacing of the last four crossings; the orbit is
/// the loop between the last two; the diagnostic is the sup distance
/// between the last two loops resampled on a common phase grid.
pub fn find_stable_orbit(
    params: &HHParams,
    c: f64,
    t_transient: f64,
    dt: f64,
) -> Result<OrbitResult> {
    if !(t_transient >= 0.0) {
        return Err(Error::domain("transient must be nonnegative".to_string()));
    }
    let report = classify_equilibrium(params, c)?;
    if !report.unstable {
        return Err(Error::domain(format!(
            "equilibrium for c = {c} is stable (max Re = {}); no orbit capture",
            report.max_real_part
        )));
    }
    // A +1 mV voltage kick off the unstable point reaches the attractor.
    let mut x0 = report.equilibrium;
    x0[0] += 1.0;
    let rhs = |t: f64, x: &[f64], out: &mut [f64]| {
        out.copy_from_slice(&params.rhs_deterministic(t, x, &|_| c));
    };

    // Integrate past the transient, then extend in windows until enough
    // section crossings have accumulated.
    let mut t_end = t_transient + 110.0;
    loop {
        let traj = integrate_ode(rhs, &x0, 0.0, t_end, dt)?;
        let crossings: Vec<(f64, Vec<f64>)> = up_crossings(&traj, 0, 0.0)
            .into_iter()
            .filter(|(t, _)| *t > t_transient)
            .collect();
        if crossings.len() >= 6 {
            let times: Vec<f64> = crossings.iter().map(|(t, _)| *t).collect();
            let k = times.len();
            let last4 = &times[k - 4..];
            let period = (last4[3] - last4[0]) / 3.0;
            let (t_a, t_b) = (times[k - 2], times[k - 1]);
            let t_prev = times[k - 3];
            let loop_prev = resample_loop(&traj, t_prev, t_a);
            let loop_last = resample_loop(&traj, t_a, t_b);
            let diagnostic = scaled_sup_distance(&loop_prev, &loop_last);

            let mut orbit = Trajectory::new(4, traj.meta.clone());
            for (t, x) in traj.iter().filter(|(t, _)| *t >= t_a && *t <= t_b) {
                orbit.push(t, x)?;
            }
            let section_states = crossings
                .iter()
                .map(|(_, s)| [s[0], s[1], s[2], s[3]])
                .collect();
            return Ok(OrbitResult { period, section_states, orbit, diagnostic });
        }
        t_end += 110.0;
        if t_end > t_transient + 500.0 {
            return Err(Error::domain(format!(
                "fewer than 6 section up-crossings by t = {t_end}; no stable orbit detected"
            )));
        }
    }
}

/// The interpolated orbit state at the section, where the voltage
/// up-crosses zero.
pub fn section_point(orbit: &OrbitResult) -> [f64; 4] {
    *orbit.section_states.last().expect("orbit without section states")
}
