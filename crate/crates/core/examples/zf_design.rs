//! Low-complexity design: zero-forcing beams with element-wise antenna
//! placement. Prints the power after every sweep.

use pinchbeam::harness::units::watts_to_dbm;
use pinchbeam::harness::{drop_users, ExperimentConfig};
use pinchbeam::zf::sweep_positions;

fn main() -> pinchbeam::Result<()> {
    let mut cfg = ExperimentConfig::builtin("paper_defaults").expect("built-in");
    cfg.radio.sinr_db = 20.0;
    cfg.solver.grid_points = 20_000;
    let users = drop_users(&cfg.service_area(), cfg.antennas.n_users, 1, 0);
    let scenario = cfg.scenario(users)?;

    let sol = sweep_positions(&scenario, &scenario.uniform_layout()?, &cfg.zf_options())?;
    for (i, p) in sol.trace.iter().enumerate() {
        println!("sweep {i:>2}: {:.3} dBm", watts_to_dbm(*p));
    }
    println!("converged: {}, rank-one fallback used: {}", sol.converged, sol.used_fallback);
    println!("antenna positions (m), one column per waveguide:");
    for m in 0..scenario.n_antennas() {
        let row: Vec<String> = (0..scenario.n_waveguides()).map(|n| format!("{:7.3}", sol.layout.x[(m, n)])).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
