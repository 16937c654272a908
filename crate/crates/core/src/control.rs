//! Control-path constructions: deterministic paths the stochastic system
//! follows with positive probability, and the controls that generate them.
//!
//! Substituting an absolutely continuous control `h` for the Brownian
//! motion turns the system into the controlled ODE
//!
//! ```text
//! dX = sigma(X) h'(s) (e_1 + e_m) ds + b~(s, X) ds,
//! ```
//!
//! with `b~` the Stratonovich-corrected drift. Two constructions matter:
//!
//! * **accessibility**: steer the first coordinate along a smooth bridge
//!   `gamma` to a level `z_1` and hold it there, so the internal
//!   coordinates relax exponentially to their steady state at `z_1`;
//! * **imitation**: reproduce the deterministic system driven by an
//!   arbitrary smooth input `I` while the input coordinate tracks
//!   `x_m + integral of I`.
//!
//! Controls are sampled on a uniform grid; [`integrate_controlled`] steps
//! RK4 over two grid cells at a time so every stage evaluation falls on a
//! sample. Build the control at half the intended integration step.

use crate::dynamics::integrate_ode;
use crate::error::{Error, Result};
use crate::model::IvriModel;
use crate::noise::NoiseKind;
use crate::trajectory::{Trajectory, TrajectoryMeta};

/// Quintic bridge: `value(0) = start`, `value(1) = end`, first and second
/// derivatives zero at both junctions, constant `end` for arguments past 1.
#[derive(Clone, Copy, Debug)]
pub struct SmoothBridge {
    pub start: f64,
    pub end: f64,
}

impl SmoothBridge {
    pub fn value(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            self.start
        } else if tau >= 1.0 {
            self.end
        } else {
            let s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
            self.start + (self.end - self.start) * s
        }
    }

    pub fn deriv(&self, tau: f64) -> f64 {
        if tau <= 0.0 || tau >= 1.0 {
            0.0
        } else {
            let u = tau * (1.0 - tau);
            30.0 * (self.end - self.start) * u * u
        }
    }
}

/// Bridge from `x1` to `z1` over unit time.
pub fn smooth_bridge(x1: f64, z1: f64) -> SmoothBridge {
    SmoothBridge { start: x1, end: z1 }
}

/// The accessibility path together with the bridge that generated it; the
/// bridge supplies the exact `gamma'` needed by the control.
#[derive(Debug)]
pub struct AccessibilityPath {
    pub bridge: SmoothBridge,
    /// Full m-dimensional path on the construction grid.
    pub path: Trajectory,
    /// Level the first coordinate is held at from time 1 on.
    pub level: f64,
}

/// Deterministic path that carries the first coordinate along the bridge to
/// `z1`, lets the internal coordinates relax, and books all drift into the
/// input coordinate: `Z_m = x_m - x_1 + gamma(s) - integral of F(Z)`.
///
/// Requires `t > 1` so the relaxation phase exists. Build with `dt` at half
/// the step intended for [`integrate_controlled`].
pub fn accessibility_path(
    model: &IvriModel,
    x: &[f64],
    z1: f64,
    t: f64,
    dt: f64,
) -> Result<AccessibilityPath> {
    if !(t > 1.0) {
        return Err(Error::domain(format!("accessibility horizon must exceed 1 ms, got {t}")));
    }
    model.validate_state(x)?;
    let m = model.dim;
    let bridge = smooth_bridge(x[0], z1);

    // Augmented state: the m-2 internal coordinates plus the running
    // integral of F along Z, integrated concurrently so the input
    // coordinate stays consistent to RK4 order.
    let mut aug0 = Vec::with_capacity(m - 1);
    aug0.extend_from_slice(&x[1..m - 1]);
    aug0.push(0.0);
    let rhs = |s: f64, y: &[f64], out: &mut [f64]| {
        let v = bridge.value(s);
        for (i, gate) in model.gates.iter().enumerate() {
            out[i] = -(gate.a)(v) * y[i] + (gate.b)(v);
        }
        let mut head = Vec::with_capacity(m - 1);
        head.push(v);
        head.extend_from_slice(&y[..m - 2]);
        out[m - 2] = (model.f)(&head);
    };
    let aug = integrate_ode(rhs, &aug0, 0.0, t, dt)?;

    let meta = TrajectoryMeta {
        model: model.name.clone(),
        integrator: "rk4-bridge".into(),
        dt,
        ..Default::default()
    };
    let mut path = Trajectory::new(m, meta);
    let mut state = vec![0.0; m];
    for (s, y) in aug.iter() {
        let gamma = bridge.value(s);
        state[0] = gamma;
        state[1..m - 1].copy_from_slice(&y[..m - 2]);
        state[m - 1] = x[m - 1] - x[0] + gamma - y[m - 2];
        path.push(s, &state)?;
    }
    Ok(AccessibilityPath { bridge, path, level: z1 })
}

/// A sampled control `h'` with the deterministic path it generates.
#[derive(Clone, Debug)]
pub struct ControlPath {
    /// Uniform sample grid over the control horizon.
    pub times: Vec<f64>,
    pub hdot: Vec<f64>,
    /// Path the control is constructed to generate, stored either on the
    /// sample grid or on the coarser integration grid.
    pub target: Trajectory,
    /// Filled by [`verify_control`].
    pub sup_error: Option<f64>,
}

impl ControlPath {
    pub fn grid_step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

fn hdot_at(model: &IvriModel, s: f64, xm: f64, numerator_head: f64) -> Result<f64> {
    let sigma = model.noise.sigma(xm);
    if !(sigma > 0.0) {
        return Err(Error::domain(format!(
            "diffusion coefficient vanishes at input value {xm}; control undefined"
        )));
    }
    Ok((numerator_head - model.noise.drift(s, xm) + model.noise.strat_correction(xm)) / sigma)
}

/// Control reproducing an accessibility path:
/// `h'(s) = [gamma'(s) - F(Z_s) - b_m(s, Z_m) + sigma sigma'/2] / sigma(Z_m)`.
///
/// Restricted to input with `U = R`; the accessibility construction can
/// leave a half-line domain, so CIR input is rejected.
pub fn control_for_accessibility(
    model: &IvriModel,
    zpath: &AccessibilityPath,
) -> Result<ControlPath> {
    if !matches!(model.noise.kind, NoiseKind::Ou) {
        return Err(Error::domain(
            "accessibility control requires input on the whole line; CIR input may leave its domain"
                .to_string(),
        ));
    }
    let m = model.dim;
    let path = &zpath.path;
    let mut times = Vec::with_capacity(path.len());
    let mut hdot = Vec::with_capacity(path.len());
    for (s, z) in path.iter() {
        let head = zpath.bridge.deriv(s) - (model.f)(&z[..m - 1]);
        times.push(s);
        hdot.push(hdot_at(model, s, z[m - 1], head)?);
    }
    Ok(ControlPath { times, hdot, target: path.clone(), sup_error: None })
}

/// A smooth deterministic input with a closed-form running integral.
pub trait InputCurrent: Send + Sync {
    fn eval(&self, t: f64) -> f64;
    /// Integral over `[0, t]`.
    fn integral(&self, t: f64) -> f64;
}

pub struct ConstantInput(pub f64);

impl InputCurrent for ConstantInput {
    fn eval(&self, _t: f64) -> f64 {
        self.0
    }
    fn integral(&self, t: f64) -> f64 {
        self.0 * t
    }
}

/// `I(t) = a (1 + sin(2 pi t / T))`.
pub struct SinusoidInput {
    pub amplitude: f64,
    pub period: f64,
}

impl InputCurrent for SinusoidInput {
    fn eval(&self, t: f64) -> f64 {
        self.amplitude * (1.0 + (2.0 * std::f64::consts::PI * t / self.period).sin())
    }
    fn integral(&self, t: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI / self.period;
        self.amplitude * (t + (1.0 - (w * t).cos()) / w)
    }
}

/// Control that makes the system imitate the deterministic evolution under
/// input `I` starting from `x0`:
/// `h'(s) = [I(s) - b_m(s, chi_m) + sigma sigma'/2] / sigma(chi_m)` with
/// `chi_m(s) = x_m + integral of I`.
///
/// The control needs no trajectory — `chi_m` is closed-form — so `hdot` is
/// sampled exactly on the fine grid, while the target pairs the driven
/// deterministic subsystem, integrated at the controlled step `2 dt`, with
/// `chi_m`. Verification against that target then isolates the control
/// identity instead of re-measuring the integrator's global error.
pub fn control_for_imitation(
    model: &IvriModel,
    input: &dyn InputCurrent,
    x0: &[f64],
    t: f64,
    dt: f64,
) -> Result<ControlPath> {
    model.validate_state(x0)?;
    if !(t > 0.0 && dt > 0.0) {
        return Err(Error::domain("need positive horizon and grid step".to_string()));
    }
    let m = model.dim;
    let xm0 = x0[m - 1];

    let n_cells = (t / dt + 1e-9).round() as usize;
    let n_cells = n_cells + n_cells % 2; // even cell count for the integrator
    let grid: Vec<f64> = (0..=n_cells).map(|k| k as f64 * dt).collect();
    let mut hdot = Vec::with_capacity(grid.len());
    for &s in &grid {
        let chi = xm0 + input.integral(s);
        if !model.noise.contains(chi) {
            return Err(Error::domain(format!(
                "input path {chi} leaves the admissible interval at s = {s}"
            )));
        }
        hdot.push(hdot_at(model, s, chi, input.eval(s))?);
    }

    // Direct solution of the driven subsystem at the controlled step.
    let rhs = |s: f64, z: &[f64], out: &mut [f64]| {
        out[0] = (model.f)(z) + input.eval(s);
        for (i, gate) in model.gates.iter().enumerate() {
            out[i + 1] = -(gate.a)(z[0]) * z[i + 1] + (gate.b)(z[0]);
        }
    };
    let sub = integrate_ode(rhs, &x0[..m - 1], 0.0, grid[n_cells], 2.0 * dt)?;
    let meta = TrajectoryMeta {
        model: model.name.clone(),
        integrator: "rk4-imitation".into(),
        dt: 2.0 * dt,
        ..Default::default()
    };
    let mut target = Trajectory::new(m, meta);
    let mut state = vec![0.0; m];
    for (s, z) in sub.iter() {
        state[..m - 1].copy_from_slice(z);
        state[m - 1] = xm0 + input.integral(s);
        target.push(s, &state)?;
    }
    Ok(ControlPath { times: grid, hdot, target, sup_error: None })
}

/// RK4 for the controlled ODE `dX = sigma(X) h' (e_1 + e_m)ds + b~(s, X)ds`.
/// Steps two grid cells per RK4 step so stages land on control samples;
/// output states are recorded on the coarse grid.
pub fn integrate_controlled(
    model: &IvriModel,
    x0: &[f64],
    control: &ControlPath,
) -> Result<Trajectory> {
    let m = model.dim;
    if x0.len() != m {
        return Err(Error::domain("start state dimension mismatch".to_string()));
    }
    let n = control.times.len();
    if n < 3 || !(n - 1).is_multiple_of(2) {
        return Err(Error::domain(
            "control grid must hold an even number of cells".to_string(),
        ));
    }
    let g = control.grid_step();
    let last_cell = control.times[n - 1] - control.times[n - 2];
    if (last_cell - g).abs() > 1e-9 * g.abs() {
        return Err(Error::domain(
            "control grid must be uniform; choose a horizon that is a multiple of the step"
                .to_string(),
        ));
    }
    let h = 2.0 * g;
    let rhs = |s: f64, x: &[f64], hd: f64, out: &mut [f64]| {
        let xm = x[m - 1];
        let push = model.noise.sigma(xm) * hd;
        let bm = model.noise.drift(s, xm) - model.noise.strat_correction(xm);
        out[0] = push + (model.f)(&x[..m - 1]) + bm;
        for (i, gate) in model.gates.iter().enumerate() {
            out[i + 1] = -(gate.a)(x[0]) * x[i + 1] + (gate.b)(x[0]);
        }
        out[m - 1] = push + bm;
    };

    let meta = TrajectoryMeta {
        model: model.name.clone(),
        integrator: "rk4-controlled".into(),
        dt: h,
        ..Default::default()
    };
    let mut traj = Trajectory::new(m, meta);
    let mut x = x0.to_vec();
    traj.push(control.times[0], &x)?;
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut xs = vec![0.0; m];
    for step in 0..(n - 1) / 2 {
        let i0 = 2 * step;
        let (t0, t1, t2) = (control.times[i0], control.times[i0 + 1], control.times[i0 + 2]);
        let (h0, h1, h2) = (control.hdot[i0], control.hdot[i0 + 1], control.hdot[i0 + 2]);
        rhs(t0, &x, h0, &mut k1);
        for i in 0..m {
            xs[i] = x[i] + 0.5 * h * k1[i];
        }
        rhs(t1, &xs, h1, &mut k2);
        for i in 0..m {
            xs[i] = x[i] + 0.5 * h * k2[i];
        }
        rhs(t1, &xs, h1, &mut k3);
        for i in 0..m {
            xs[i] = x[i] + h * k3[i];
        }
        rhs(t2, &xs, h2, &mut k4);
        for i in 0..m {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "controlled integration produced a non-finite state at t = {t2}"
            )));
        }
        traj.push(t2, &x)?;
    }
    Ok(traj)
}

/// Runs the controlled flow from the target's start and returns the
/// generated path with the sup distance to the target over all recorded
/// times and coordinates. Accepts targets stored on the control grid or on
/// the coarser integration grid.
pub fn verify_control(model: &IvriModel, control: &ControlPath) -> Result<(Trajectory, f64)> {
    let generated = integrate_controlled(model, control.target.state(0), control)?;
    let stride = (control.target.len() - 1) / (generated.len() - 1);
    if stride == 0 || (generated.len() - 1) * stride != control.target.len() - 1 {
        return Err(Error::domain(
            "target grid is not a multiple of the integration grid".to_string(),
        ));
    }
    let mut sup: f64 = 0.0;
    for (k, (t, gen_state)) in generated.iter().enumerate() {
        debug_assert!((control.target.time(k * stride) - t).abs() < 1e-9);
        let tgt = control.target.state(k * stride);
        for (a, b) in gen_state.iter().zip(tgt) {
            sup = sup.max((a - b).abs());
        }
    }
    Ok((generated, sup))
}
