use thiserror::Error;

/// Errors raised by the physics models, channel builders and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PassError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible amplitude ladder: {0}")]
    InfeasibleLadder(String),

    #[error("degenerate geometry: distance {distance:.3e} m between user {user} and an antenna on waveguide {waveguide}")]
    DegenerateGeometry {
        user: usize,
        waveguide: usize,
        distance: f64,
    },

    #[error("infeasible beamforming instance: {0}")]
    InfeasibleInstance(String),

    #[error("singular effective channel (condition number {condition:.3e})")]
    SingularChannel { condition: f64 },

    #[error("successive convex approximation stalled for user {user}")]
    ScaStall { user: usize },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PassError>;

pub(crate) fn invalid(msg: impl Into<String>) -> PassError {
    PassError::InvalidArgument(msg.into())
}
