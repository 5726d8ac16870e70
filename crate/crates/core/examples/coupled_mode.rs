//! Power exchange between a waveguide and one pinching antenna.
//!
//! Prints the guided/radiated split along the coupling length for a matched
//! coupler and for a detuned one, and compares the closed form against a
//! direct RK4 integration.

use pinchbeam::coupling::{full_radiation_length, integrate_modes, mode_amplitudes, power_split, CouplingConfig};

fn main() -> pinchbeam::Result<()> {
    let kappa = 50.0;
    let beta = 2.0 * std::f64::consts::PI * 1.4 / 0.02;
    let l_full = full_radiation_length(kappa)?;
    println!("full radiation length for kappa = {kappa}: {:.3} mm", l_full * 1e3);

    let matched = CouplingConfig::matched(kappa, l_full, beta)?;
    let detuned = CouplingConfig::new(kappa, l_full, beta, beta + 2.0 * kappa)?;
    println!("max transfer: matched {:.3}, detuned {:.3}", matched.max_transfer(), detuned.max_transfer());

    println!("{:>8} {:>10} {:>10} {:>10}", "x/L", "matched", "detuned", "rk4 err");
    for i in 0..=8 {
        let x = l_full * i as f64 / 4.0;
        let (_, radiated) = power_split(&matched, x);
        let (_, detuned_rad) = power_split(&detuned, x);
        let (a, b) = mode_amplitudes(&matched, x);
        let (ra, rb) = integrate_modes(&matched, x, matched.default_step())?;
        let err = (a - ra).norm().max((b - rb).norm());
        println!("{:>8.2} {radiated:>10.4} {detuned_rad:>10.4} {err:>10.1e}", x / l_full);
    }
    Ok(())
}
