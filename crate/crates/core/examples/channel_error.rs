//! Achieved SINR when the designs are computed from an estimated channel and
//! evaluated on a perturbed one.

use pinchbeam::channel::received_sinr;
use pinchbeam::harness::drops::{rng_for, Purpose};
use pinchbeam::harness::{drop_users, ChannelErrorModel, ExperimentConfig};
use pinchbeam::zf::sweep_positions;

fn main() -> pinchbeam::Result<()> {
    let mut cfg = ExperimentConfig::builtin("sinr_vs_channel_error").expect("built-in");
    cfg.solver.grid_points = 20_000;
    let users = drop_users(&cfg.service_area(), cfg.antennas.n_users, cfg.run.seed, 0);
    let scenario = cfg.scenario(users)?;
    let sol = sweep_positions(&scenario, &scenario.uniform_layout()?, &cfg.zf_options())?;

    println!("target {:.1} dB", cfg.radio.sinr_db);
    for &eps in &cfg.run.values {
        let model = ChannelErrorModel::new(eps)?;
        let mut rng = rng_for(cfg.run.seed, 0, Purpose::ChannelError);
        let truth = model.perturb_pinching(&scenario, &sol.layout, &mut rng)?;
        let sinr = received_sinr(&truth, &sol.w, &scenario.noise_powers);
        let worst = sinr.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = sinr.iter().sum::<f64>() / sinr.len() as f64;
        println!(
            "error bound {eps:.0e}: mean {:.2} dB, worst user {:.2} dB",
            10.0 * mean.log10(),
            10.0 * worst.log10()
        );
    }
    Ok(())
}
