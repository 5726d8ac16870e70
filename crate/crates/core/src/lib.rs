//! Joint transmit and pinching-antenna beamforming for multi-waveguide
//! pinching-antenna systems.
//!
//! Each waveguide feeds several pinching antennas. Where an antenna sits
//! along its waveguide fixes both the in-waveguide phase and the free-space
//! path to every user, so antenna positions act as an analog beamformer
//! alongside the digital transmit beamformer. The crate provides:
//!
//! - [`coupling`]: coupled-mode power transfer and radiation amplitude ladders.
//! - [`channel`]: geometry, effective channel and SINR evaluation.
//! - [`txbf`]: minimum-power transmit beamforming for a fixed channel.
//! - [`zf`]: low-complexity design with zero-forcing beams and element-wise
//!   position search.
//! - [`penalty`]: penalty-based alternating optimisation of beams and positions.
//! - [`baseline`]: conventional uniform linear array reference.
//! - [`harness`]: random drops, parameter sweeps and CSV output.

pub mod baseline;
pub mod channel;
pub mod coupling;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod penalty;
pub mod search;
pub mod txbf;
pub mod zf;

pub type C64 = nalgebra::Complex<f64>;

pub use channel::{Activation, EffectiveChannel, FeasibleSet, PinchingLayout, Position, Scenario};
pub use coupling::{AmplitudeLadder, CouplingConfig, PowerModel};
pub use error::{PassError, Result};
pub use penalty::{run_penalty, PenaltyParams, PenaltyReport};
pub use txbf::{solve_powermin, PowerMinOptions, PowerMinResult};
pub use zf::{sweep_positions, ZfOptions, ZfSolution};
