use fluctlab_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Schema(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("decay fit: {0}")]
    Fit(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for anything the config could have prevented, 3 for budgets, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Fit(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Budget(_) | CoreError::Overflow(_) => 3,
                CoreError::InvalidParameter(_)
                | CoreError::Parse { .. }
                | CoreError::GroupMismatch(..)
                | CoreError::OutOfHorizon { .. }
                | CoreError::EmptySet(_)
                | CoreError::NotEnumerable(_) => 2,
                CoreError::Precondition(_) | CoreError::Insufficient(_) | CoreError::Infeasible(_) => 1,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
