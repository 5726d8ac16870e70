use std::process::Command;

use pinchbeam::harness::sweep::trace_path;
use pinchbeam::harness::{
    drop_users, run_sweep, write_outputs, Algorithm, ExperimentConfig, RunOptions, CSV_HEADER,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinchbeam"))
}

fn small(name: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::builtin(name).unwrap();
    cfg.solver.grid_points = 2000;
    cfg.run.n_drops = 2;
    cfg.run.algorithms = vec![Algorithm::Zf];
    cfg
}

#[test]
fn drops_are_reproducible_and_inside_the_area() {
    let cfg = ExperimentConfig::builtin("paper_defaults").unwrap();
    let area = cfg.service_area();
    let a = drop_users(&area, 4, 7, 3);
    assert_eq!(a, drop_users(&area, 4, 7, 3));
    assert_ne!(a, drop_users(&area, 4, 7, 4));
    assert_ne!(a, drop_users(&area, 4, 8, 3));

    let (mut sx, mut sy, mut count) = (0.0, 0.0, 0.0);
    for drop in 0..10_000 {
        for p in drop_users(&area, 1, 1, drop) {
            assert!(area.contains(&p));
            sx += p.x;
            sy += p.y;
            count += 1.0;
        }
    }
    let c = area.center();
    let (wx, wy) = (area.x_max - area.x_min, area.y_max - area.y_min);
    assert!((sx / count - c.x).abs() < 0.01 * wx);
    assert!((sy / count - c.y).abs() < 0.01 * wy);
}

#[test]
fn csv_output_is_deterministic_with_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("headline");
    let mut texts = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.csv"));
        let result = run_sweep(&cfg, &RunOptions::default()).unwrap();
        write_outputs(&out, &result).unwrap();
        texts.push(std::fs::read(&out).unwrap());
        texts.push(std::fs::read(trace_path(&out)).unwrap());
    }
    assert_eq!(texts[0], texts[2]);
    assert_eq!(texts[1], texts[3]);
    let csv = String::from_utf8(texts[0].clone()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(
        CSV_HEADER.join(","),
        "sweep_value,drop,algorithm,power_model,activation,total_power_dbm,mean_sinr_db,converged,runtime_ms"
    );
    // two drops plus one mean row
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().any(|l| l.starts_with("20,mean,zf,")));
}

#[test]
fn estimation_error_lowers_achieved_sinr() {
    let mut cfg = small("sinr_vs_channel_error");
    cfg.run.n_drops = 3;
    let out = run_sweep(&cfg, &RunOptions::default()).unwrap();
    let sinrs: Vec<f64> = cfg
        .run
        .values
        .iter()
        .map(|v| out.mean(*v, Algorithm::Zf).unwrap().mean_sinr)
        .collect();
    let target = 10f64.powf(cfg.radio.sinr_db / 10.0);
    assert!((sinrs[0] - target).abs() < 1e-6 * target);
    for pair in sinrs.windows(2) {
        assert!(pair[1] < pair[0], "{sinrs:?}");
    }
}

#[test]
fn cli_exit_codes() {
    let ok = bin().args(["validate-config", "--config", "paper_defaults"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let listed = bin().arg("list-scenarios").output().unwrap();
    assert_eq!(listed.status.code(), Some(0));
    let names = String::from_utf8(listed.stdout).unwrap();
    for name in ["headline", "power_vs_distance", "sinr_vs_channel_error"] {
        assert!(names.contains(name));
    }

    let bad_flag = bin().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "[geometry]\nn_waveguides = 0\n").unwrap();
    let rejected = bin()
        .args(["validate-config", "--config", bad_cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(2));

    let unknown_key = dir.path().join("typo.toml");
    std::fs::write(&unknown_key, "[radio]\nfrequency = 1\n").unwrap();
    let rejected = bin()
        .args(["validate-config", "--config", unknown_key.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn cli_run_writes_results_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let status = bin()
        .args([
            "run",
            "--config",
            "headline",
            "--drops",
            "1",
            "--algo",
            "zf",
            "--grid-points",
            "2000",
            "--strict",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.exists());
    assert!(dir.path().join("results.trace.csv").exists());
}
