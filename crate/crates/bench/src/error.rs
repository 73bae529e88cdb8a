use std::fmt;
use std::path::PathBuf;

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Split,
    Embed,
    Recommend,
    Evaluate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Split => "split",
            Stage::Embed => "embed",
            Stage::Recommend => "recommend",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{source_name}:{line}: {reason}")]
    Malformed { source_name: String, line: usize, reason: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("[{stage}] {source}")]
    Stage { stage: Stage, source: Box<BenchError> },

    #[error(transparent)]
    Core(#[from] trustrec_core::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        BenchError::Data(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }

    /// Process exit code: 1 configuration, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use trustrec_core::Error as E;
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) | BenchError::Malformed { .. } | BenchError::Io { .. } => 2,
            BenchError::Stage { source, .. } => source.exit_code(),
            BenchError::Core(e) => match e {
                E::InvalidParameter { .. } | E::DirectedGraph => 1,
                E::NoConvergence { .. } | E::Diverged { .. } | E::NonFiniteLoss { .. } | E::Undefined(_) => 3,
                E::NonFinite(_) => 3,
                E::DimensionMismatch { .. }
                | E::EmptyVocabulary
                | E::NoEdges
                | E::InsufficientData(_)
                | E::LengthMismatch { .. } => 2,
            },
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            BenchError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

/// Tags errors with the stage they came from.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<BenchError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| match e.into() {
            tagged @ BenchError::Stage { .. } => tagged,
            other => BenchError::Stage { stage, source: Box::new(other) },
        })
    }
}
