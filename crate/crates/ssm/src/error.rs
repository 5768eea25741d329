//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SsmError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error(
        "witness search exhausted after {tries} tries \
         (best residuals: P {best_p:.3e}, Q {best_q:.3e})"
    )]
    WitnessSearch {
        tries: usize,
        best_p: f64,
        best_q: f64,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SsmError>,
    },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("unknown tolerance name: {0}")]
    UnknownTolerance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SsmError {
    /// Tag an error with the pipeline stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Self {
        SsmError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, SsmError>;
