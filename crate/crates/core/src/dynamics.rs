//! Fixed-step integrators: classical RK4 for the deterministic systems and
//! Euler-Maruyama for the stochastic ones.
//!
//! The stochastic step preserves the structural coupling of the system: one
//! Brownian increment enters the first and last coordinates, and the
//! realized increment of the first coordinate is, by construction, exactly
//! `F dt` plus the realized increment of the input coordinate. Internal
//! coordinates are clamped back to `[0, 1]` after each step; the exact
//! solution never leaves that cube, so clamp events measure pure
//! discretization error and are counted on the trajectory metadata.

use crate::error::{Error, Result};
use crate::model::IvriModel;
use crate::rng::{GaussianStream, RngSeed};
use crate::trajectory::{Trajectory, TrajectoryMeta};

/// Classical 4th-order Runge-Kutta with fixed step; the last step is
/// shortened to land exactly on `t1`.
pub fn integrate_ode<F>(mut rhs: F, x0: &[f64], t0: f64, t1: f64, dt: f64) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt must be positive, got {dt}")));
    }
    if !(t1 > t0) {
        return Err(Error::domain(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let dim = x0.len();
    let meta = TrajectoryMeta {
        integrator: "rk4".into(),
        dt,
        ..Default::default()
    };
    let mut traj = Trajectory::new(dim, meta);
    let mut x = x0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut xs = vec![0.0; dim];
    traj.push(t0, &x)?;

    let n_full = ((t1 - t0) / dt + 1e-9).floor() as usize;
    let mut step = |t: f64, h: f64, x: &mut Vec<f64>,
                    k1: &mut Vec<f64>, k2: &mut Vec<f64>, k3: &mut Vec<f64>, k4: &mut Vec<f64>,
                    xs: &mut Vec<f64>| {
        rhs(t, x, k1);
        for i in 0..dim {
            xs[i] = x[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, xs, k2);
        for i in 0..dim {
            xs[i] = x[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, xs, k3);
        for i in 0..dim {
            xs[i] = x[i] + h * k3[i];
        }
        rhs(t + h, xs, k4);
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };

    let mut t = t0;
    for i in 1..=n_full {
        step(t, dt, &mut x, &mut k1, &mut k2, &mut k3, &mut k4, &mut xs);
        t = t0 + i as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite state during integration; last good time {}",
                traj.last_time()
            )));
        }
        traj.push(t, &x)?;
    }
    let rest = t1 - t;
    if rest > 1e-12 * dt {
        step(t, rest, &mut x, &mut k1, &mut k2, &mut k3, &mut k4, &mut xs);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite state during integration; last good time {}",
                traj.last_time()
            )));
        }
        traj.push(t1, &x)?;
    }
    Ok(traj)
}

/// Final state of a stochastic run plus its discretization counters.
#[derive(Clone, Debug, PartialEq)]
pub struct SdeEndpoint {
    pub state: Vec<f64>,
    pub clamp_events: u64,
    pub barrier_violations: u64,
}

struct EulerRun<'a> {
    model: &'a IvriModel,
    x: Vec<f64>,
    clamp_events: u64,
    barrier_violations: u64,
    stream: GaussianStream,
}

impl<'a> EulerRun<'a> {
    fn new(model: &'a IvriModel, x0: &[f64], seed: RngSeed) -> EulerRun<'a> {
        EulerRun {
            model,
            x: x0.to_vec(),
            clamp_events: 0,
            barrier_violations: 0,
            stream: GaussianStream::new(seed),
        }
    }

    fn step(&mut self, t: f64, dt: f64) {
        let m = self.model.dim;
        let x = &mut self.x;
        let f_val = (self.model.f)(&x[..m - 1]);
        let xm = x[m - 1];
        let dw = dt.sqrt() * self.stream.next_normal();
        let dxm = self.model.noise.drift(t, xm) * dt + self.model.noise.sigma(xm) * dw;
        let xm_new = xm + dxm;
        // The first coordinate receives F dt plus the realized increment of
        // the input coordinate; keep the expression in this exact form so
        // the coupling identity holds bit-for-bit on the stored states.
        let x1_new = x[0] + f_val * dt + (xm_new - xm);
        let v = x[0];
        for (i, gate) in self.model.gates.iter().enumerate() {
            let y = x[i + 1];
            let mut y_new = y + (-(gate.a)(v) * y + (gate.b)(v)) * dt;
            if !(0.0..=1.0).contains(&y_new) {
                self.clamp_events += 1;
                y_new = y_new.clamp(0.0, 1.0);
            }
            x[i + 1] = y_new;
        }
        x[0] = x1_new;
        x[m - 1] = xm_new;
        let (lo, _) = self.model.noise.interval();
        if xm_new <= lo {
            self.barrier_violations += 1;
        }
    }
}

fn sde_preflight(model: &IvriModel, x0: &[f64], t0: f64, t1: f64, dt: f64) -> Result<usize> {
    model.validate_state(x0)?;
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt must be positive, got {dt}")));
    }
    if !(t1 > t0) {
        return Err(Error::domain(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    Ok(((t1 - t0) / dt + 1e-9).floor() as usize)
}

/// Euler-Maruyama path of the model, recording every step.
pub fn simulate_sde(
    model: &IvriModel,
    x0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
    seed: RngSeed,
) -> Result<Trajectory> {
    let n_full = sde_preflight(model, x0, t0, t1, dt)?;
    let mut run = EulerRun::new(model, x0, seed);
    let meta = TrajectoryMeta {
        model: model.name.clone(),
        integrator: "euler-maruyama".into(),
        dt,
        ..Default::default()
    };
    let mut traj = Trajectory::new(model.dim, meta);
    traj.push(t0, &run.x)?;
    let mut t = t0;
    for i in 1..=n_full {
        run.step(t, dt);
        t = t0 + i as f64 * dt;
        traj.push(t, &run.x)?;
    }
    let rest = t1 - t;
    if rest > 1e-12 * dt {
        run.step(t, rest);
        traj.push(t1, &run.x)?;
    }
    traj.meta.clamp_events = run.clamp_events;
    traj.meta.barrier_violations = run.barrier_violations;
    Ok(traj)
}

/// Euler-Maruyama run keeping only the endpoint; used by the Monte Carlo
/// probes where full trajectories would dominate memory.
pub fn simulate_sde_endpoint(
    model: &IvriModel,
    x0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
    seed: RngSeed,
) -> Result<SdeEndpoint> {
    let n_full = sde_preflight(model, x0, t0, t1, dt)?;
    let mut run = EulerRun::new(model, x0, seed);
    let mut t = t0;
    for i in 1..=n_full {
        run.step(t, dt);
        t = t0 + i as f64 * dt;
    }
    let rest = t1 - t;
    if rest > 1e-12 * dt {
        run.step(t, rest);
    }
    if run.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite state in stochastic run".to_string()));
    }
    Ok(SdeEndpoint {
        state: run.x,
        clamp_events: run.clamp_events,
        barrier_violations: run.barrier_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HHParams;
    use crate::noise::{NoiseSpec, Signal};

    #[test]
    fn zero_rhs_gives_constant_trajectory() {
        let traj = integrate_ode(|_, _, out: &mut [f64]| out.fill(0.0), &[1.0, 2.0], 0.0, 1.0, 0.1)
            .unwrap();
        for (_, x) in traj.iter() {
            assert_eq!(x, &[1.0, 2.0]);
        }
    }

    #[test]
    fn lands_exactly_on_t1() {
        let traj = integrate_ode(|_, x, out: &mut [f64]| out[0] = -x[0], &[1.0], 0.0, 0.95, 0.1)
            .unwrap();
        assert_eq!(traj.last_time(), 0.95);
        let expect = (-0.95f64).exp();
        assert!((traj.last_state()[0] - expect).abs() < 1e-6);
    }

    #[test]
    fn nan_in_rhs_reports_last_good_time() {
        let res = integrate_ode(
            |t, x, out: &mut [f64]| out[0] = if t > 0.5 { f64::NAN } else { x[0] },
            &[1.0],
            0.0,
            1.0,
            0.1,
        );
        match res {
            Err(Error::Numeric(msg)) => assert!(msg.contains("last good time"), "{msg}"),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn sde_rejects_state_outside_domain() {
        let model = IvriModel::hh(
            HHParams::default(),
            NoiseSpec::ou(1.0, 0.5, Signal::Constant(0.0)).unwrap(),
        );
        let bad = [0.0, 1.4, 0.1, 0.5, 0.0];
        assert!(simulate_sde(&model, &bad, 0.0, 1.0, 1e-3, RngSeed::new(1)).is_err());
    }

    #[test]
    fn sde_is_reproducible_bitwise() {
        let model = IvriModel::hh(
            HHParams::default(),
            NoiseSpec::ou(1.0, 0.5, Signal::Constant(0.0)).unwrap(),
        );
        let x0 = [0.0, 0.3, 0.1, 0.6, 0.0];
        let a = simulate_sde(&model, &x0, 0.0, 2.0, 1e-3, RngSeed::new(11)).unwrap();
        let b = simulate_sde(&model, &x0, 0.0, 2.0, 1e-3, RngSeed::new(11)).unwrap();
        assert_eq!(a, b);
        let c = simulate_sde(&model, &x0, 0.0, 2.0, 1e-3, RngSeed::new(12)).unwrap();
        assert_ne!(a.last_state(), c.last_state());
    }

    #[test]
    fn endpoint_run_matches_full_run() {
        let model = IvriModel::hh(
            HHParams::default(),
            NoiseSpec::ou(1.0, 0.5, Signal::Constant(0.3)).unwrap(),
        );
        let x0 = [1.0, 0.3, 0.1, 0.6, 0.2];
        let full = simulate_sde(&model, &x0, 0.0, 1.5, 1e-3, RngSeed::new(5)).unwrap();
        let end = simulate_sde_endpoint(&model, &x0, 0.0, 1.5, 1e-3, RngSeed::new(5)).unwrap();
        assert_eq!(full.last_state(), end.state.as_slice());
        assert_eq!(full.meta.clamp_events, end.clamp_events);
    }
}
