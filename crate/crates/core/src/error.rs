use thiserror::Error;

pub type Result<T> = std::result::Result<T, DickeError>;

#[derive(Debug, Error)]
pub enum DickeError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigensolver failed on {rows}x{cols} {context} matrix")]
    Numerical {
        context: String,
        rows: usize,
        cols: usize,
    },

    #[error("truncation error: norm deficit {deficit:.3e} exceeds {limit:.1e} ({context})")]
    Truncation {
        context: String,
        deficit: f64,
        limit: f64,
    },

    #[error("normalization error: trace deviates from one by {0:.3e}")]
    Normalization(f64),

    #[error("equations of motion singular at atomic radius^2 = {0}")]
    Singularity(f64),

    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("energy {epsilon} lies below the ground-state energy {ground}")]
    EmptyShell { epsilon: f64, ground: f64 },

    #[error("empty energy window: {0}")]
    Window(String),

    #[error("undefined result: {0}")]
    UndefinedResult(String),

    #[error("need at least {needed} samples, found {found}")]
    SampleSize { needed: usize, found: usize },

    #[error("initial state carries weight {0:.3e} outside the converged eigenstates")]
    Support(f64),
}

impl DickeError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        DickeError::Parameter(msg.into())
    }
}
