//! Radiation amplitudes of a chain of pinching antennas under the two power
//! models, with the coupling lengths that realise them.

use pinchbeam::coupling::{make_equal_ladder, make_proportional_ladder, DEFAULT_KAPPA};

fn main() -> pinchbeam::Result<()> {
    let kappa = DEFAULT_KAPPA;
    let equal = make_equal_ladder(6, 0.15)?;
    let proportional = make_proportional_ladder(6, 0.9)?;

    for (name, ladder) in [("equal radiated power", &equal), ("identical couplers", &proportional)] {
        println!("{name}: total radiated {:.6}", ladder.total_radiated());
        let lengths = ladder.lengths(kappa)?;
        for (m, ((alpha, delta), len)) in ladder.alphas.iter().zip(&ladder.deltas).zip(&lengths).enumerate() {
            println!(
                "  antenna {m}: coupled {:.4}, radiated {:.4}, length {:.3} mm",
                delta * delta,
                alpha * alpha,
                len * 1e3
            );
        }
    }
    Ok(())
}
