//! `ivri` — analyses of stochastic Hodgkin-Huxley systems with random
//! input: hypoellipticity determinant scans, equilibrium and orbit studies,
//! reproducible simulation, control verification and Monte Carlo
//! positivity probes.
//!
//! Every subcommand writes CSV or JSON artifacts stamped with a hash of the
//! resolved configuration and prints a one-line summary. Exit codes: 0 on
//! success, 2 on domain errors, 3 on numeric failures.

// Guards are written as `!(x > 0.0)` on purpose: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "ivri", version, about = "Stochastic Hodgkin-Huxley analyses", long_about = None)]
struct Cli {
    /// JSON configuration file (model, noise, integrator, seed, out).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Mean-reversion speed of the input; overrides the config file.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Spread of the input; overrides the config file.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct EquilibriumArgs {
    /// Constant input current.
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
}

#[derive(Args, Debug)]
struct DeltaScanArgs {
    #[arg(long, default_value_t = -15.0, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    hi: f64,
    /// Grid spacing of the CSV scan.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    c: f64,
    /// Transient discarded before orbit extraction (ms).
    #[arg(long, default_value_t = 150.0, allow_negative_numbers = true)]
    transient: f64,
    /// Integration step (ms); defaults to the config integrator step.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    t1: f64,
    /// Step size (ms); defaults to the config integrator step.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Initial state `v,n,m,h,xi`; defaults to the rest state.
    #[arg(long, value_delimiter = ',', num_args = 5, allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Also write the little-endian binary trajectory cache.
    #[arg(long)]
    bin: bool,
}

#[derive(Args, Debug)]
struct ControlVerifyArgs {
    /// `imitation` or `accessibility`.
    #[arg(long, default_value = "imitation")]
    mode: String,
    /// Constant input level for imitation mode.
    #[arg(long, allow_negative_numbers = true)]
    i_const: Option<f64>,
    /// Oscillating input amplitude for imitation mode.
    #[arg(long, allow_negative_numbers = true)]
    i_amp: Option<f64>,
    /// Oscillating input period for imitation mode.
    #[arg(long, allow_negative_numbers = true)]
    i_period: Option<f64>,
    /// Target level of the first coordinate for accessibility mode.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    z1: f64,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    t: f64,
    /// Integration step of the controlled flow.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct PositivityArgs {
    /// `constant` or `oscillating`.
    #[arg(long, default_value = "constant")]
    target: String,
    /// Constant input current.
    #[arg(long, default_value_t = -0.0534, allow_negative_numbers = true)]
    c: f64,
    /// Oscillating input amplitude.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    /// Oscillating input period (also the default horizon).
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    period: f64,
    /// Probe horizon (ms); defaults to one orbit period for constant
    /// targets and one input period for oscillating ones.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Ball radius in the scaled metric.
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 10_000, allow_negative_numbers = true)]
    n_paths: usize,
    /// Input coordinate of the start state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    zeta: f64,
    /// Dump all final states to CSV.
    #[arg(long)]
    dump_finals: bool,
    /// Also report a kernel density estimate at the target point.
    #[arg(long)]
    kde: bool,
}

#[derive(Args, Debug)]
struct LieCheckArgs {
    /// Evaluation point `t,v,n,m,h,xi`.
    #[arg(long, value_delimiter = ',', num_args = 6, allow_negative_numbers = true)]
    point: Option<Vec<f64>>,
    /// Finite-difference step; defaults to the scale-aware choice.
    #[arg(long, allow_negative_numbers = true)]
    fd_step: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the input-to-voltage bijection and classify the equilibrium.
    Equilibrium(EquilibriumArgs),
    /// Scan the branch determinant and report its zeros.
    DeltaScan(DeltaScanArgs),
    /// Evaluate the determinant along the stable orbit.
    DeltaOrbit(OrbitArgs),
    /// Extract the stable orbit and its period.
    Orbit(OrbitArgs),
    /// Integrate the coupled system without noise.
    SimulateOde(SimulateArgs),
    /// Euler-Maruyama path of the stochastic system.
    SimulateSde(SimulateArgs),
    /// Build a control, integrate the controlled flow and compare.
    ControlVerify(ControlVerifyArgs),
    /// Monte Carlo hitting probe with Wilson interval.
    Positivity(PositivityArgs),
    /// Finite-difference Lie bracket against the jet formula.
    LieCheck(LieCheckArgs),
}

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.display().to_string());
    }
    if let Some(tau) = cli.tau {
        cfg.noise.tau = tau;
    }
    if let Some(gamma) = cli.gamma {
        cfg.noise.gamma = gamma;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        // Ignore the error if a pool already exists (e.g. repeated calls in
        // tests within one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = resolve_config(&cli)?;
    match &cli.command {
        Command::Equilibrium(args) => commands::equilibrium(&cfg, args),
        Command::DeltaScan(args) => commands::delta_scan(&cfg, args),
        Command::DeltaOrbit(args) => commands::delta_orbit(&cfg, args),
        Command::Orbit(args) => commands::orbit(&cfg, args),
        Command::SimulateOde(args) => commands::simulate(&cfg, args, false),
        Command::SimulateSde(args) => commands::simulate(&cfg, args, true),
        Command::ControlVerify(args) => commands::control_verify(&cfg, args),
        Command::Positivity(args) => commands::positivity(&cfg, args),
        Command::LieCheck(args) => commands::lie_check(&cfg, args),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
