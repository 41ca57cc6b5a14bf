use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed scenario file, bad flag value or unknown preset.
    #[error("{0}")]
    Schema(String),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] airtime_core::Error),
}

impl CliError {
    /// 2 for schema and argument errors, 3 for infeasible problems, 1 for
    /// anything else.
    pub fn exit_code(&self) -> i32 {
        use airtime_core::Error as E;
        match self {
            CliError::Schema(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) if e.is_infeasible() => 3,
            CliError::Core(e) => match root(e) {
                E::InvalidScenario(_) | E::InvalidProblem(_) | E::Domain { .. } => 2,
                _ => 1,
            },
        }
    }
}

fn root(e: &airtime_core::Error) -> &airtime_core::Error {
    match e {
        airtime_core::Error::Round { source, .. } => root(source),
        other => other,
    }
}

pub type CliResult<T> = Result<T, CliError>;
