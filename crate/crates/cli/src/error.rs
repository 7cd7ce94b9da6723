use std::path::PathBuf;

use thiserror::Error;

/// Failure of a CLI run; each variant maps to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config invariant: {0}")]
    Invariant(String),
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("stage `{stage}`: {source}")]
    Numeric {
        stage: &'static str,
        #[source]
        source: qho_core::Error,
    },
    #[error("selftest: {0} check(s) failed")]
    SelfTest(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Numeric { .. } | CliError::SelfTest(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(qho_core::Error) -> Self {
        move |source| CliError::Numeric { stage, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
