use std::path::PathBuf;

/// Errors of the harness.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// Bad configuration: unknown names, missing fields, invalid values.
    #[error("config error: {0}")]
    Config(String),
    /// A CSV input failed validation.
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    /// A bound check needs per-round diagnostics the traces lack.
    #[error("missing diagnostics: {0}")]
    MissingDiagnostics(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// Error raised by the library during a simulation.
    #[error("simulation failed (seed {seed}, round {round}): {source}")]
    Sim {
        seed: u64,
        round: usize,
        source: algobelief::Error,
    },
    #[error(transparent)]
    Core(#[from] algobelief::Error),
}

impl BenchError {
    /// Process exit code: 2 for anything the user can fix in the config or
    /// its inputs, 1 for the rest.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Parse { .. } | BenchError::MissingDiagnostics(_) | BenchError::Json(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

pub type Result<T> = std::result::Result<T, BenchError>;
