//! Subcommand implementations. Each resolves its inputs, writes the
//! stamped artifacts into the output directory and prints a one-line
//! summary.

use std::path::Path;

use serde_json::json;

use ivri_core::control::{
    accessibility_path, control_for_accessibility, control_for_imitation, verify_control,
    ConstantInput, InputCurrent, SinusoidInput,
};
use ivri_core::dynamics::{integrate_ode, simulate_sde};
use ivri_core::hormander::{self, delta_on_branch, find_delta_zeros};
use ivri_core::model::IvriModel;
use ivri_core::orbit::{classify_equilibrium, find_stable_orbit};
use ivri_core::probe::{self, HitProbeSpec, TargetKind};
use ivri_core::rates;
use ivri_core::rng::RngSeed;
use ivri_core::Jet;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt, OutDir};
use crate::{
    ControlVerifyArgs, DeltaScanArgs, EquilibriumArgs, LieCheckArgs, OrbitArgs, PositivityArgs,
    SimulateArgs,
};

fn out_dir(cfg: &RunConfig, desc: &str) -> CliResult<OutDir> {
    let dir = cfg.out.clone().unwrap_or_else(|| "out".to_string());
    OutDir::new(Path::new(&dir), cfg.hash(desc))
}

fn rest_state(cfg: &RunConfig, zeta: f64) -> Vec<f64> {
    let b = cfg.model.params().branch_state(0.0);
    vec![b[0], b[1], b[2], b[3], zeta]
}

pub fn equilibrium(cfg: &RunConfig, args: &EquilibriumArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("equilibrium {args:?}"))?;
    let params = cfg.model.params();
    let report = classify_equilibrium(&params, args.c)?;
    let eig: Vec<[f64; 2]> = report.eigenvalues.iter().map(|e| [e.re, e.im]).collect();
    out.json(
        "equilibrium.json",
        &json!({
            "c": args.c,
            "v_c": report.equilibrium[0],
            "equilibrium": report.equilibrium.to_vec(),
            "eigenvalues": eig,
            "max_real_part": report.max_real_part,
            "unstable": report.unstable,
        }),
    )?;
    println!(
        "v_c={} max_re={} unstable={}",
        fmt(report.equilibrium[0]),
        fmt(report.max_real_part),
        report.unstable
    );
    Ok(())
}

pub fn delta_scan(cfg: &RunConfig, args: &DeltaScanArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("delta-scan {args:?}"))?;
    if !(args.step > 0.0) {
        return Err(CliError::Usage("step must be positive".to_string()));
    }
    let mut csv = out.csv("delta_scan.csv", &["v", "delta", "n_inf", "m_inf", "h_inf"])?;
    let n = ((args.hi - args.lo) / args.step).ceil() as usize;
    for i in 0..=n {
        let v = (args.lo + i as f64 * args.step).min(args.hi);
        let gates = rates::branch_gates(v);
        csv.row(&[v, delta_on_branch(v), gates[0], gates[1], gates[2]])?;
    }
    csv.finish()?;
    let zeros = find_delta_zeros(args.lo, args.hi)?;
    let listed: Vec<String> = zeros.iter().map(|z| fmt(*z)).collect();
    println!("zeros=[{}] count={}", listed.join(", "), zeros.len());
    Ok(())
}

pub fn orbit(cfg: &RunConfig, args: &OrbitArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("orbit {args:?}"))?;
    let dt = args.dt.unwrap_or(cfg.integrator.dt_ode);
    let params = cfg.model.params();
    let orbit = find_stable_orbit(&params, args.c, args.transient, dt)?;
    let mut csv = out.csv("orbit.csv", &["t", "v", "n", "m", "h", "delta"])?;
    let mut phase = out.csv("phase.csv", &["v", "n"])?;
    for (t, x) in orbit.orbit.iter() {
        let d = hormander::delta(x[0], x[1], x[2], x[3]).value;
        csv.row(&[t, x[0], x[1], x[2], x[3], d])?;
        phase.row(&[x[0], x[1]])?;
    }
    csv.finish()?;
    phase.finish()?;
    println!(
        "period_ms={} diagnostic={} sections={}",
        fmt(orbit.period),
        fmt(orbit.diagnostic),
        orbit.section_states.len()
    );
    Ok(())
}

pub fn delta_orbit(cfg: &RunConfig, args: &OrbitArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("delta-orbit {args:?}"))?;
    let dt = args.dt.unwrap_or(cfg.integrator.dt_ode);
    let params = cfg.model.params();
    let orbit = find_stable_orbit(&params, args.c, args.transient, dt)?;
    let along = hormander::delta_along(&orbit.orbit);
    let mut csv = out.csv("delta_orbit.csv", &["t", "v", "n", "m", "h", "delta"])?;
    for ((t, x), (_, d)) in orbit.orbit.iter().zip(&along) {
        csv.row(&[t, x[0], x[1], x[2], x[3], *d])?;
    }
    csv.finish()?;
    let min = along.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
    let max = along.iter().map(|(_, d)| *d).fold(f64::NEG_INFINITY, f64::max);
    let sign_changes = along
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .count();
    println!(
        "period_ms={} delta_min={} delta_max={} sign_changes={sign_changes}",
        fmt(orbit.period),
        fmt(min),
        fmt(max)
    );
    Ok(())
}

pub fn simulate(cfg: &RunConfig, args: &SimulateArgs, stochastic: bool) -> CliResult<()> {
    let name = if stochastic { "simulate-sde" } else { "simulate-ode" };
    let out = out_dir(cfg, &format!("{name} {args:?}"))?;
    let params = cfg.model.params();
    let noise = cfg.noise.spec()?;
    let model = IvriModel::hh(params, noise);
    let x0 = match &args.x0 {
        Some(v) => v.clone(),
        None => rest_state(cfg, 0.0),
    };
    let traj = if stochastic {
        let dt = args.dt.unwrap_or(cfg.integrator.dt_sde);
        simulate_sde(&model, &x0, args.t0, args.t1, dt, RngSeed::new(cfg.seed))?
    } else {
        let dt = args.dt.unwrap_or(cfg.integrator.dt_ode);
        model.validate_state(&x0)?;
        let mut t = integrate_ode(
            |t, x, out: &mut [f64]| model.drift(t, x, out),
            &x0,
            args.t0,
            args.t1,
            dt,
        )?;
        t.meta.model = model.name.clone();
        t
    };
    let file = if stochastic { "trajectory_sde.csv" } else { "trajectory_ode.csv" };
    let mut csv = out.csv(file, &["t", "v", "n", "m", "h", "xi"])?;
    for (t, x) in traj.iter() {
        let mut row = Vec::with_capacity(6);
        row.push(t);
        row.extend_from_slice(x);
        csv.row(&row)?;
    }
    csv.finish()?;
    if args.bin {
        let bin_name = if stochastic { "trajectory_sde.bin" } else { "trajectory_ode.bin" };
        let f = std::fs::File::create(out.path(bin_name))?;
        traj.write_bin(std::io::BufWriter::new(f))?;
    }
    let end = traj.last_state();
    println!(
        "t_end={} v={} n={} m={} h={} xi={} clamp_events={}",
        fmt(traj.last_time()),
        fmt(end[0]),
        fmt(end[1]),
        fmt(end[2]),
        fmt(end[3]),
        fmt(end[4]),
        traj.meta.clamp_events
    );
    Ok(())
}

pub fn control_verify(cfg: &RunConfig, args: &ControlVerifyArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("control-verify {args:?}"))?;
    let params = cfg.model.params();
    let noise = cfg.noise.spec()?;
    let model = IvriModel::hh(params, noise);
    let dt = args.dt.unwrap_or(cfg.integrator.dt_ode);
    let x0 = rest_state(cfg, 0.0);

    let control = match args.mode.as_str() {
        "imitation" => {
            let input: Box<dyn InputCurrent> = match (args.i_const, args.i_amp, args.i_period) {
                (Some(c), None, None) => Box::new(ConstantInput(c)),
                (None, Some(a), Some(p)) => Box::new(SinusoidInput { amplitude: a, period: p }),
                (None, None, None) => Box::new(ConstantInput(15.0)),
                _ => {
                    return Err(CliError::Usage(
                        "give either --i-const or both --i-amp and --i-period".to_string(),
                    ))
                }
            };
            control_for_imitation(&model, input.as_ref(), &x0, args.t, dt / 2.0)?
        }
        "accessibility" => {
            let zp = accessibility_path(&model, &x0, args.z1, args.t, dt / 2.0)?;
            control_for_accessibility(&model, &zp)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown mode '{other}' (expected 'imitation' or 'accessibility')"
            )))
        }
    };

    let (generated, sup) = verify_control(&model, &control)?;
    let stride = (control.target.len() - 1) / (generated.len() - 1);
    let mut csv = out.csv(
        "control.csv",
        &[
            "t", "hdot", "target_v", "gen_v", "target_n", "gen_n", "target_m", "gen_m",
            "target_h", "gen_h", "target_xi", "gen_xi", "err",
        ],
    )?;
    for (k, (t, g)) in generated.iter().enumerate() {
        let tgt = control.target.state(k * stride);
        let err = g
            .iter()
            .zip(tgt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let row = [
            t,
            control.hdot[2 * k],
            tgt[0],
            g[0],
            tgt[1],
            g[1],
            tgt[2],
            g[2],
            tgt[3],
            g[3],
            tgt[4],
            g[4],
            err,
        ];
        csv.row(&row)?;
    }
    csv.finish()?;
    println!("mode={} sup_error={}", args.mode, fmt(sup));
    Ok(())
}

pub fn positivity(cfg: &RunConfig, args: &PositivityArgs) -> CliResult<()> {
    let started = std::time::Instant::now();
    let out = out_dir(cfg, &format!("positivity {args:?}"))?;
    let params = cfg.model.params();
    let noise = cfg.noise.spec()?;
    let model = IvriModel::hh(params, noise);

    let (kind, horizon, desc) = match args.target.as_str() {
        "constant" => (
            TargetKind::Constant { c: args.c },
            args.t.unwrap_or(12.56),
            format!("constant c={}", args.c),
        ),
        "oscillating" => (
            TargetKind::Oscillating { amplitude: args.a, period: args.period },
            args.t.unwrap_or(args.period),
            format!("oscillating a={} T={}", args.a, args.period),
        ),
        other => {
            return Err(CliError::Usage(format!(
                "unknown target '{other}' (expected 'constant' or 'oscillating')"
            )))
        }
    };
    let pair = probe::make_target(&params, &noise, kind, args.zeta, horizon)?;
    let spec = HitProbeSpec {
        start: pair.start.clone(),
        center: pair.target.clone(),
        radius: args.eps,
        horizon,
        n_paths: args.n_paths,
        dt: cfg.integrator.dt_sde,
        coords: None,
    };
    let probe_result = probe::mc_hitting(&model, &spec, RngSeed::new(cfg.seed))?;

    let kde_at_target = if args.kde {
        let est = probe::kde_evaluate(
            &model,
            &probe_result.final_states,
            std::slice::from_ref(&pair.target),
            None,
        )?;
        Some(est[0])
    } else {
        None
    };

    if args.dump_finals {
        let mut csv = out.csv("final_states.csv", &["v", "n", "m", "h", "xi"])?;
        for s in &probe_result.final_states {
            csv.row(s)?;
        }
        csv.finish()?;
    }

    out.json(
        "positivity.json",
        &json!({
            "target": desc,
            "zeta": args.zeta,
            "horizon_ms": horizon,
            "radius": args.eps,
            "n_paths": args.n_paths,
            "dt": cfg.integrator.dt_sde,
            "seed": cfg.seed,
            "noise": noise.describe(),
            "start": pair.start,
            "center": pair.target,
            "hits": probe_result.hits,
            "p_hat": probe_result.p_hat,
            "wilson_lo": probe_result.wilson.lo,
            "wilson_hi": probe_result.wilson.hi,
            "clamp_events": probe_result.clamp_events,
            "barrier_violations": probe_result.barrier_violations,
            "kde_at_target": kde_at_target,
        }),
    )?;
    println!(
        "p_hat={} ci=[{}, {}] hits={} runtime_s={:.2}",
        fmt(probe_result.p_hat),
        fmt(probe_result.wilson.lo),
        fmt(probe_result.wilson.hi),
        probe_result.hits,
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn lie_check(cfg: &RunConfig, args: &LieCheckArgs) -> CliResult<()> {
    let out = out_dir(cfg, &format!("lie-check {args:?}"))?;
    let params = cfg.model.params();
    let noise = cfg.noise.spec()?;
    let model = IvriModel::hh(params, noise);
    let point = args
        .point
        .clone()
        .unwrap_or_else(|| vec![0.0, 1.3, 0.52, 0.21, 0.68, 0.4]);
    if point.len() != model.dim + 1 {
        return Err(CliError::Usage(format!(
            "point needs {} entries (t first), got {}",
            model.dim + 1,
            point.len()
        )));
    }
    let step = args.fd_step.unwrap_or_else(|| hormander::default_fd_step(&point));
    let a1 = |tx: &[f64]| model.a1(tx);
    let a0 = |tx: &[f64]| model.a0(tx);
    let bracket = hormander::lie_bracket_numeric(&a1, &a0, &point, step);

    // Jet reference on the internal coordinates: sigma(x_m) d/dx_1 J_i.
    let sigma = model.noise.sigma(point[model.dim]);
    let vj = Jet::variable(point[1], 1);
    let mut expected = Vec::new();
    let mut max_rel: f64 = 0.0;
    for (g, gate) in model.gates.iter().enumerate() {
        let a = (gate.a_jet)(&vj);
        let b = (gate.b_jet)(&vj);
        let e = sigma * (b - a * point[2 + g]).derivative(1);
        let rel = (bracket[2 + g] - e).abs() / e.abs().max(1e-30);
        max_rel = max_rel.max(rel);
        expected.push(e);
    }
    out.json(
        "lie_check.json",
        &json!({
            "point": point,
            "fd_step": step,
            "bracket": bracket,
            "expected_internal": expected,
            "time_component": bracket[0],
            "max_rel_err": max_rel,
        }),
    )?;
    println!("max_rel_err={} time_component={}", fmt(max_rel), fmt(bracket[0]));
    Ok(())
}
