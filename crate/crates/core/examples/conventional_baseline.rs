//! Fixed half-wavelength array at the origin serving the same users as the
//! pinching design.

use pinchbeam::baseline::{solve_conventional, ula_channel};
use pinchbeam::harness::units::watts_to_dbm;
use pinchbeam::harness::{drop_users, ExperimentConfig};
use pinchbeam::zf::sweep_positions;
use pinchbeam::PowerMinOptions;

fn main() -> pinchbeam::Result<()> {
    let mut cfg = ExperimentConfig::builtin("headline").expect("built-in");
    cfg.solver.grid_points = 20_000;
    let opts = PowerMinOptions {
        max_iters: 5000,
        ..PowerMinOptions::default()
    };
    for drop in 0..5 {
        let users = drop_users(&cfg.service_area(), cfg.antennas.n_users, cfg.run.seed, drop);
        let scenario = cfg.scenario(users)?;
        let ula = cfg.ula(&scenario);
        // Users sit within a narrow cone around the array axis, so the
        // channel Gram matrix is close to singular.
        let h = ula_channel(&ula)?;
        let sv = h.clone().svd(false, false).singular_values;
        let cond = sv.max() / sv.min();
        let fixed = match solve_conventional(&ula, &opts) {
            Ok(r) => format!("{:8.2} dBm", watts_to_dbm(r.total_power)),
            Err(e) => format!("failed ({e})"),
        };
        let pinching = sweep_positions(&scenario, &scenario.uniform_layout()?, &cfg.zf_options())?;
        println!(
            "drop {drop}: fixed array {fixed} (cond {cond:.1e}), pinching {:.2} dBm",
            watts_to_dbm(pinching.total_power)
        );
    }
    Ok(())
}
