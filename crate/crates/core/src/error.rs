use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("the zero vector has no support value")]
    ZeroVector,
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("vector is not orthogonal to the base direction (|<v,w>| = {0:e})")]
    NotOrthogonal(f64),
    #[error("degenerate metric at parameter ({0}, {1})")]
    DegenerateMetric(f64, f64),
    #[error("surface is not closed (gap {0:e})")]
    NotClosed(f64),
    #[error("point is not on the domain boundary (distance {0:e})")]
    NotOnBoundary(f64),
    #[error("deformation lost immersion at t = {0}")]
    ImmersionLost(f64),
    #[error("mode not supported: {0}")]
    ModeUnsupported(String),
    #[error(
        "surface is not stationary (mean curvature deviation {mean_curvature:e}, contact deviation {contact:e})"
    )]
    NotStationary { mean_curvature: f64, contact: f64 },
    #[error("volume velocity vanishes")]
    ZeroVolumeVelocity,
    #[error("Wulff boundary does not meet the cone")]
    EmptyIntersection,
    #[error("optimizer diverged at volume {0}")]
    OptimizerDiverged(f64),
    #[error("no feasible candidate for volume {0}")]
    NoFeasibleCandidate(f64),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
