use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what}: need at least {needed}, got {got}")]
    TooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("no R peaks detected")]
    NoPeaks,

    #[error("trial rejected: {flagged} of {total} intervals flagged as artifacts")]
    TooManyArtifacts { flagged: usize, total: usize },

    #[error("electrode {0} not present in recording")]
    MissingElectrode(String),

    #[error("infeasible experiment: {0}")]
    Infeasible(String),

    #[error("covariance of class {0} is singular after regularization")]
    SingularCovariance(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Schema {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    #[error("while processing {context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(path: impl Into<PathBuf>, line: Option<u64>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::InvalidInput(_) => "invalid_input",
            Error::TooShort { .. } => "too_short",
            Error::OutOfBounds(_) => "out_of_bounds",
            Error::NoPeaks => "no_peaks",
            Error::TooManyArtifacts { .. } => "too_many_artifacts",
            Error::MissingElectrode(_) => "missing_electrode",
            Error::Infeasible(_) => "infeasible",
            Error::SingularCovariance(_) => "singular_covariance",
            Error::Numerical(_) => "numerical",
            Error::Schema { .. } => "schema",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Context { .. } => unreachable!(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Schema { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::InvalidInput(_)
            | Error::MissingElectrode(_) => 2,
            Error::Infeasible(_)
            | Error::TooShort { .. }
            | Error::OutOfBounds(_)
            | Error::NoPeaks
            | Error::TooManyArtifacts { .. } => 3,
            Error::SingularCovariance(_) | Error::Numerical(_) => 4,
            Error::Context { .. } => unreachable!(),
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.context(context()))
    }
}
