//! Runs a built-in sweep through the experiment harness and writes the
//! results CSV plus its trace file.
//!
//! ```text
//! cargo run --release --example power_sweep -- power_vs_antennas out/antennas.csv
//! ```

use std::path::PathBuf;

use pinchbeam::harness::{run_sweep, write_outputs, Algorithm, DropLabel, ExperimentConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "paper_defaults".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "results.csv".into()));

    let mut cfg = ExperimentConfig::load(&name)?;
    cfg.run.n_drops = cfg.run.n_drops.min(5);
    cfg.solver.grid_points = 20_000;
    cfg.run.algorithms.retain(|a| *a != Algorithm::Penalty);

    let output = run_sweep(&cfg, &RunOptions::default())?;
    for row in output.rows.iter().filter(|r| r.drop == DropLabel::Mean) {
        println!(
            "{:>8} {:<13} {:>9.2} dBm",
            row.sweep_value,
            row.algorithm.as_str(),
            row.power_dbm()
        );
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_outputs(&out, &output)?;
    println!("wrote {} ({} failed runs)", out.display(), output.failures);
    Ok(())
}
