//! Penalty-based joint design started from the zero-forcing layout.
//! Prints one line per outer iteration.

use pinchbeam::harness::units::watts_to_dbm;
use pinchbeam::harness::{drop_users, ExperimentConfig};
use pinchbeam::penalty::run_penalty;
use pinchbeam::zf::sweep_positions;

fn main() -> pinchbeam::Result<()> {
    let mut cfg = ExperimentConfig::builtin("paper_defaults").expect("built-in");
    cfg.radio.sinr_db = 20.0;
    cfg.solver.grid_points = 20_000;
    let users = drop_users(&cfg.service_area(), cfg.antennas.n_users, 1, 0);
    let scenario = cfg.scenario(users)?;

    let zf = sweep_positions(&scenario, &scenario.uniform_layout()?, &cfg.zf_options())?;
    let report = run_penalty(&scenario, &zf.layout, &cfg.penalty_params())?;
    for (outer, (power, violation)) in report.outer_trace.iter().enumerate() {
        println!("outer {outer}: {:.3} dBm, violation {violation:.2e}", watts_to_dbm(*power));
    }
    println!(
        "penalty {:.3} dBm vs ZF {:.3} dBm; {} inner iterations, converged {}",
        watts_to_dbm(report.total_power),
        watts_to_dbm(zf.total_power),
        report.inner_iterations,
        report.converged
    );
    Ok(())
}
