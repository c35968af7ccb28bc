use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("settle did not converge after {iterations} iterations (residual {residual:.3e} m)")]
    Divergence { iterations: usize, residual: f64 },

    #[error("grasp missed: no particle of rope {agent} within {radius} m of ({x:.3}, {y:.3})")]
    GraspMiss {
        agent: usize,
        x: f64,
        y: f64,
        radius: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point ({x:.3}, {y:.3}) lies outside the observation window")]
    OutOfWindow { x: f64, y: f64 },

    #[error("agent {0} has no graspable rope in reach")]
    NoGraspableRope(usize),

    #[error("cannot select from an empty candidate set")]
    EmptyCandidates,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("not enough training samples: need at least {needed}, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
