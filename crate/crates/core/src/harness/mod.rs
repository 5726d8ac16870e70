//! Monte-Carlo experiment runner: configuration, seeded user drops, sweeps
//! and CSV output.

pub mod config;
pub mod drops;
pub mod sweep;
pub mod units;

pub use config::{Algorithm, ExperimentConfig, Profile, SweepKind, BUILTIN_SCENARIOS};
pub use drops::{drop_users, ChannelErrorModel, ServiceArea};
pub use sweep::{run_sweep, write_outputs, DropLabel, Row, RunOptions, Status, SweepOutput, TraceRow, CSV_HEADER};
