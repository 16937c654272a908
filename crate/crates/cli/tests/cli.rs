//! End-to-end tests of the binary: summaries, artifacts, reproducibility
//! and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ivri")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ivri-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn delta_scan_reports_zeros_and_writes_csv() {
    let dir = tmp_dir("scan");
    let out = run(&[
        "delta-scan",
        "--lo",
        "-15",
        "--hi",
        "30",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("zeros=["), "{text}");
    assert!(text.contains("count=1"), "{text}");
    assert!(text.contains("1.104858"), "zero location missing: {text}");

    let csv = std::fs::read_to_string(dir.join("delta_scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config-hash="));
    assert_eq!(lines.next().unwrap(), "v,delta,n_inf,m_inf,h_inf");
    assert!(lines.count() > 4000);
}

#[test]
fn equilibrium_summary_and_exit_codes() {
    let dir = tmp_dir("eq");
    let out = run(&["equilibrium", "--c", "15", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("unstable=true"), "{text}");
    assert!(text.contains("v_c=7.1695"), "{text}");
    assert!(dir.join("equilibrium.json").exists());

    // Out-of-range input is a domain error: exit code 2.
    let bad = run(&["equilibrium", "--c", "1e6", "--out", dir.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2), "{}", String::from_utf8_lossy(&bad.stderr));
}

#[test]
fn orbit_summary_matches_period() {
    let dir = tmp_dir("orbit");
    let out = run(&["orbit", "--c", "15", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("period_ms=1.25566"), "{text}");
    assert!(dir.join("orbit.csv").exists());
    assert!(dir.join("phase.csv").exists());
}

#[test]
fn delta_orbit_reports_sign_changes() {
    let dir = tmp_dir("delta-orbit");
    let out = run(&["delta-orbit", "--c", "15", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let changes: usize = text
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("sign_changes="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(changes >= 2, "{text}");
    let csv = std::fs::read_to_string(dir.join("delta_orbit.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("t,v,n,m,h,delta"));
}

#[test]
fn same_config_and_seed_give_byte_identical_outputs() {
    let dir_a = tmp_dir("repro-a");
    let dir_b = tmp_dir("repro-b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "simulate-sde",
            "--t1",
            "2.0",
            "--seed",
            "42",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.join("trajectory_sde.csv")).unwrap();
    let b = std::fs::read(dir_b.join("trajectory_sde.csv")).unwrap();
    assert_eq!(a, b);

    let dir_c = tmp_dir("repro-c");
    let out = run(&[
        "simulate-sde",
        "--t1",
        "2.0",
        "--seed",
        "43",
        "--out",
        dir_c.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let c = std::fs::read(dir_c.join("trajectory_sde.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn zero_noise_sde_matches_ode_endpoint() {
    let dir = tmp_dir("degen");
    let ode = run(&[
        "simulate-ode",
        "--t1",
        "5.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(ode.status.success());
    let sde = run(&[
        "simulate-sde",
        "--gamma",
        "0",
        "--t1",
        "5.0",
        "--dt",
        "0.001",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(sde.status.success());
    let v_of = |s: &str| -> f64 {
        s.split_whitespace()
            .find_map(|tok| tok.strip_prefix("v="))
            .unwrap()
            .parse()
            .unwrap()
    };
    let dv = (v_of(&stdout(&ode)) - v_of(&stdout(&sde))).abs();
    // Euler order-one error bound at dt = 1e-3 over 5 ms.
    assert!(dv < 0.05, "endpoint difference {dv}");
}

#[test]
fn config_file_rejects_unknown_keys_and_flags_override() {
    let dir = tmp_dir("config");
    let bad_path = dir.join("bad.json");
    std::fs::write(&bad_path, r#"{"sede": 1}"#).unwrap();
    let bad = run(&[
        "delta-scan",
        "--config",
        bad_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown field"));

    // Config seed is overridden by --seed: the flagged run matches a plain
    // run with the same seed.
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, r#"{"seed": 1}"#).unwrap();
    let dir_flag = tmp_dir("config-flag");
    let dir_plain = tmp_dir("config-plain");
    let with_flag = run(&[
        "simulate-sde",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "7",
        "--t1",
        "1.0",
        "--out",
        dir_flag.to_str().unwrap(),
    ]);
    assert!(with_flag.status.success());
    let plain = run(&[
        "simulate-sde",
        "--seed",
        "7",
        "--t1",
        "1.0",
        "--out",
        dir_plain.to_str().unwrap(),
    ]);
    assert!(plain.status.success());
    let body = |p: &Path| {
        let text = std::fs::read_to_string(p.join("trajectory_sde.csv")).unwrap();
        text.lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(&dir_flag), body(&dir_plain));
}

#[test]
fn positivity_probe_writes_json() {
    let dir = tmp_dir("positivity");
    let out = run(&[
        "positivity",
        "--target",
        "constant",
        "--c",
        "-0.0534",
        "--t",
        "2.0",
        "--eps",
        "0.5",
        "--n-paths",
        "400",
        "--seed",
        "5",
        "--out",
        dir.to_str().unwrap(),
        "--dump-finals",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("p_hat="), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("positivity.json")).unwrap())
            .unwrap();
    assert!(json["p_hat"].as_f64().unwrap() >= 0.0);
    assert!(json["wilson_hi"].as_f64().unwrap() <= 1.0);
    assert_eq!(json["n_paths"].as_u64().unwrap(), 400);
    let finals = std::fs::read_to_string(dir.join("final_states.csv")).unwrap();
    assert_eq!(finals.lines().count(), 2 + 400);
}

#[test]
fn lie_check_reports_small_error() {
    let dir = tmp_dir("lie");
    let out = run(&["lie-check", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("lie_check.json")).unwrap())
            .unwrap();
    let max_rel = json["max_rel_err"].as_f64().unwrap();
    assert!(max_rel < 1e-4, "bracket error {max_rel}");
    assert_eq!(json["time_component"].as_f64().unwrap(), 0.0);
}

#[test]
fn control_verify_summary() {
    let dir = tmp_dir("ctrl");
    let out = run(&[
        "control-verify",
        "--mode",
        "imitation",
        "--i-const",
        "15",
        "--t",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let sup: f64 = text
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("sup_error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(sup < 1e-6, "sup error {sup}");
    let csv = std::fs::read_to_string(dir.join("control.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("t,hdot,target_v,gen_v"));
}
