//! Builds the effective waveguide-to-user channel for a small deployment and
//! shows how moving one antenna by a fraction of a wavelength rotates its
//! contribution.

use pinchbeam::channel::{effective_channel, received_sinr};
use pinchbeam::harness::{drop_users, ExperimentConfig};
use pinchbeam::zf::{optimal_powers, zf_matrix};

fn main() -> pinchbeam::Result<()> {
    let cfg = ExperimentConfig::builtin("paper_defaults").expect("built-in");
    let users = drop_users(&cfg.service_area(), cfg.antennas.n_users, 1, 0);
    for (k, u) in users.iter().enumerate() {
        println!("user {k} at ({:.2}, {:.2}, {:.2}) m", u.x, u.y, u.z);
    }
    let scenario = cfg.scenario(users)?;
    let mut layout = scenario.uniform_layout()?;
    let ch = effective_channel(&scenario, &layout)?;
    println!("|channel| (waveguide x user):");
    for n in 0..scenario.n_waveguides() {
        let row: Vec<String> = (0..scenario.n_users()).map(|k| format!("{:.2e}", ch.psi[(n, k)].norm())).collect();
        println!("  {}", row.join("  "));
    }

    let quarter = scenario.lambda / 4.0;
    let before = ch.phis[0][(0, 0)];
    layout.x[(0, 0)] += quarter;
    let after = effective_channel(&scenario, &layout)?.phis[0][(0, 0)];
    println!(
        "moving antenna 0 on waveguide 0 by {:.1} mm turns its phase by {:.1} deg",
        quarter * 1e3,
        (after / before).arg().to_degrees()
    );

    let powers = optimal_powers(&scenario.sinr_targets, &scenario.noise_powers);
    let w = zf_matrix(&ch.psi, &powers)?;
    let sinr: Vec<String> = received_sinr(&ch.psi, &w, &scenario.noise_powers)
        .iter()
        .map(|s| format!("{:.1}", 10.0 * s.log10()))
        .collect();
    println!("ZF beams on the uniform layout give SINRs [{}] dB", sinr.join(", "));
    Ok(())
}
