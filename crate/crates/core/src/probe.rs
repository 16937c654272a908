//! Monte Carlo positivity probes.
//!
//! The positivity statements assert that transition densities, where they
//! exist, are strictly positive near distinguished targets: equilibrium
//! states whose input coordinate has accumulated the constant input, and
//! orbit section states shifted by one period of an oscillating input.
//! These probes estimate the corresponding hitting probabilities by
//! simulating paths and counting arrivals in a scaled ball, with a Wilson
//! score interval quantifying the estimate. A product-kernel density
//! estimate over the final states serves as the empirical counterpart of
//! the density statements.
//!
//! Ball metric: per-coordinate scaling with the voltage divided by 100,
//! gates taken as-is and the input coordinate divided by its stationary
//! spread, then a Euclidean ball of the given radius.

use rayon::prelude::*;

use crate::dynamics::simulate_sde_endpoint;
use crate::error::{Error, Result};
use crate::model::{HHParams, IvriModel};
use crate::noise::NoiseSpec;
use crate::orbit::{find_stable_orbit, section_point, DEFAULT_TRANSIENT, VOLTAGE_SCALE};
use crate::rng::RngSeed;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Start and target of a positivity probe; the first four coordinates of
/// both agree, only the input coordinate is shifted by the accumulated
/// input.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetPair {
    pub start: Vec<f64>,
    pub target: Vec<f64>,
}

/// Which positivity statement the target pair instantiates.
#[derive(Clone, Copy, Debug)]
pub enum TargetKind {
    /// Constant input `c`; start at the equilibrium `(v_c, branch, zeta)`,
    /// target shifts the input coordinate by `c t`.
    Constant { c: f64 },
    /// Oscillating input `a (1 + sin(2 pi t / T))`; start at the orbit
    /// section state, target shifts the input coordinate by the integral
    /// of the input.
    Oscillating { amplitude: f64, period: f64 },
}

/// Builds the probe target pair for horizon `t`.
///
/// The oscillating variant takes its first four coordinates from the
/// section point of the stable orbit under constant input 15.
pub fn make_target(
    params: &HHParams,
    noise: &NoiseSpec,
    kind: TargetKind,
    zeta: f64,
    t: f64,
) -> Result<TargetPair> {
    if !noise.contains(zeta) {
        return Err(Error::domain(format!("zeta = {zeta} outside the admissible interval")));
    }
    let (head, shift) = match kind {
        TargetKind::Constant { c } => {
            let eq = params.equilibrium_state(c)?;
            // The input path zeta + c s must stay admissible up to t; it is
            // monotone in s, so checking the far end suffices.
            if !noise.contains(zeta + c * t) {
                return Err(Error::domain(format!(
                    "input path zeta + c t = {} leaves the admissible interval",
                    zeta + c * t
                )));
            }
            (eq, c * t)
        }
        TargetKind::Oscillating { amplitude, period } => {
            let orbit = find_stable_orbit(params, 15.0, DEFAULT_TRANSIENT, 0.01)?;
            let sec = section_point(&orbit);
            let w = 2.0 * std::f64::consts::PI / period;
            let integral = |s: f64| amplitude * (s + (1.0 - (w * s).cos()) / w);
            // I >= 0, so the running integral is monotone here as well.
            if !noise.contains(zeta + integral(t)) {
                return Err(Error::domain(
                    "oscillating input path leaves the admissible interval".to_string(),
                ));
            }
            (sec, integral(t))
        }
    };
    let mut start = head.to_vec();
    start.push(zeta);
    let mut target = head.to_vec();
    target.push(zeta + shift);
    Ok(TargetPair { start, target })
}

/// Specification of a hitting probe.
#[derive(Clone, Debug)]
pub struct HitProbeSpec {
    pub start: Vec<f64>,
    /// Ball center.
    pub center: Vec<f64>,
    /// Ball radius in the scaled metric.
    pub radius: f64,
    /// Simulation horizon (ms).
    pub horizon: f64,
    pub n_paths: usize,
    pub dt: f64,
    /// Coordinates entering the ball metric; `None` means all.
    pub coords: Option<Vec<usize>>,
}

/// Wilson score interval for a binomial proportion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WilsonInterval {
    pub lo: f64,
    pub hi: f64,
}

/// 95% Wilson interval for `hits` successes out of `n` trials.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> WilsonInterval {
    assert!(n > 0);
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // The score interval contains the point estimate; enforce that under
    // rounding at the endpoints.
    WilsonInterval {
        lo: (center - half).max(0.0).min(p),
        hi: (center + half).min(1.0).max(p),
    }
}

/// Result of a Monte Carlo hitting probe.
#[derive(Clone, Debug)]
pub struct HitProbe {
    pub spec: HitProbeSpec,
    pub hits: u64,
    pub p_hat: f64,
    /// 95% Wilson score interval for the hit probability.
    pub wilson: WilsonInterval,
    /// Total gate clamp events over all paths (discretization artifact).
    pub clamp_events: u64,
    /// Total recorded barrier violations (CIR only).
    pub barrier_violations: u64,
    pub final_states: Vec<Vec<f64>>,
}

/// Per-coordinate scales of the ball metric for this model.
pub fn coordinate_scales(model: &IvriModel) -> Vec<f64> {
    let mut scales = vec![1.0; model.dim];
    scales[0] = VOLTAGE_SCALE;
    let spread = model.noise.stationary_spread();
    scales[model.dim - 1] = if spread > 0.0 { spread } else { 1.0 };
    scales
}

/// Scaled distance between a state and the ball center over the selected
/// coordinates.
fn scaled_distance(x: &[f64], center: &[f64], scales: &[f64], coords: &Option<Vec<usize>>) -> f64 {
    let sq = |i: usize| {
        let d = (x[i] - center[i]) / scales[i];
        d * d
    };
    match coords {
        None => (0..x.len()).map(sq).sum::<f64>().sqrt(),
        Some(idx) => idx.iter().map(|&i| sq(i)).sum::<f64>().sqrt(),
    }
}

/// Runs the probe: `n_paths` independent paths, one RNG stream each, hit
/// when the final state lies in the scaled ball. Deterministic for a fixed
/// `(seed, n_paths)` regardless of thread scheduling.
pub fn mc_hitting(model: &IvriModel, spec: &HitProbeSpec, seed: RngSeed) -> Result<HitProbe> {
    if spec.n_paths < 1 {
        return Err(Error::domain("need at least one path".to_string()));
    }
    if !(spec.radius > 0.0) {
        return Err(Error::domain("ball radius must be positive".to_string()));
    }
    model.validate_state(&spec.start)?;
    let scales = coordinate_scales(model);
    let endpoints: Vec<_> = (0..spec.n_paths)
        .into_par_iter()
        .map(|k| {
            simulate_sde_endpoint(
                model,
                &spec.start,
                0.0,
                spec.horizon,
                spec.dt,
                seed.with_stream(k as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut hits = 0u64;
    let mut clamp_events = 0u64;
    let mut barrier_violations = 0u64;
    let mut final_states = Vec::with_capacity(endpoints.len());
    for e in endpoints {
        if scaled_distance(&e.state, &spec.center, &scales, &spec.coords) <= spec.radius {
            hits += 1;
        }
        clamp_events += e.clamp_events;
        barrier_violations += e.barrier_violations;
        final_states.push(e.state);
    }
    let n = spec.n_paths as u64;
    Ok(HitProbe {
        spec: spec.clone(),
        hits,
        p_hat: hits as f64 / n as f64,
        wilson: wilson_interval(hits, n, Z_95),
        clamp_events,
        barrier_violations,
        final_states,
    })
}

/// Gaussian product-kernel density estimate over the final states of
/// `n_paths` simulations, evaluated at the given points.
///
/// Bandwidths default to Scott's rule per coordinate on the scaled data;
/// pass explicit per-coordinate bandwidths (in original units) to override.
#[allow(clippy::too_many_arguments)]
pub fn kde_density(
    model: &IvriModel,
    x0: &[f64],
    t: f64,
    eval_points: &[Vec<f64>],
    n_paths: usize,
    bandwidth: Option<Vec<f64>>,
    dt: f64,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    let samples: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|k| {
            simulate_sde_endpoint(model, x0, 0.0, t, dt, seed.with_stream(k as u64))
                .map(|e| e.state)
        })
        .collect::<Result<Vec<_>>>()?;
    kde_evaluate(model, &samples, eval_points, bandwidth)
}

/// KDE over an explicit sample cloud (exposed for reuse on probe results).
pub fn kde_evaluate(
    model: &IvriModel,
    samples: &[Vec<f64>],
    eval_points: &[Vec<f64>],
    bandwidth: Option<Vec<f64>>,
) -> Result<Vec<f64>> {
    let d = model.dim;
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain("KDE needs at least two samples".to_string()));
    }
    let bw = match bandwidth {
        Some(b) => {
            if b.len() != d || b.iter().any(|x| !(x > &0.0)) {
                return Err(Error::domain("bandwidth must be positive per coordinate".to_string()));
            }
            b
        }
        None => scott_bandwidth(model, samples),
    };
    let norm = bw.iter().fold(1.0, |acc, h| acc * h * (2.0 * std::f64::consts::PI).sqrt());
    let out = eval_points
        .par_iter()
        .map(|p| {
            let mut acc = 0.0;
            for s in samples {
                let mut q = 0.0;
                for j in 0..d {
                    let u = (p[j] - s[j]) / bw[j];
                    q += u * u;
                }
                acc += (-0.5 * q).exp();
            }
            acc / (n as f64 * norm)
        })
        .collect();
    Ok(out)
}

/// Scott's rule per coordinate on the scaled data, mapped back to original
/// units: `h_j = s_j sigma_hat(scaled_j) n^(-1/(d+4))`.
pub fn scott_bandwidth(model: &IvriModel, samples: &[Vec<f64>]) -> Vec<f64> {
    let d = model.dim;
    let n = samples.len() as f64;
    let scales = coordinate_scales(model);
    let factor = n.powf(-1.0 / (d as f64 + 4.0));
    (0..d)
        .map(|j| {
            let mean = samples.iter().map(|s| s[j] / scales[j]).sum::<f64>() / n;
            let var = samples
                .iter()
                .map(|s| {
                    let e = s[j] / scales[j] - mean;
                    e * e
                })
                .sum::<f64>()
                / (n - 1.0);
            // Degenerate spread still needs a usable kernel width.
            let sd = var.sqrt().max(1e-12);
            scales[j] * sd * factor
        })
        .collect()
}

/// Convenience: the exact OU marginal `(mean, variance)` at time `t` for a
/// constant signal, used as the closed-form oracle of the input-marginal
/// probe.
pub fn ou_marginal(noise: &NoiseSpec, xi0: f64, s0: f64, t: f64) -> (f64, f64) {
    let decay = (-noise.tau * t).exp();
    let mean = s0 + (xi0 - s0) * decay;
    let var = noise.gamma * noise.gamma * (1.0 - (-2.0 * noise.tau * t).exp()) / 2.0;
    (mean, var)
}

/// Dumps final states as CSV (`v,n,m,h,xi` columns for the HH model).
pub fn write_final_states_csv<W: std::io::Write>(
    mut w: W,
    header: &[&str],
    states: &[Vec<f64>],
) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for s in states {
        let row: Vec<String> = s.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
