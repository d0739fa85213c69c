use thiserror::Error;

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error in stage `{stage}`: {message}")]
    Data { stage: String, message: String },

    #[error("numerical degeneracy in stage `{stage}`: {message}")]
    Numerical { stage: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 config, 3 data, 4 numerical degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Data { .. } | RunError::Io(_) => 3,
            RunError::Numerical { .. } => 4,
        }
    }

    pub fn data(stage: &str, message: impl Into<String>) -> Self {
        RunError::Data {
            stage: stage.to_string(),
            message: message.into(),
        }
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::data("csv", e.to_string())
    }
}

/// Attach the failing stage to a library error.
pub fn at_stage(stage: &str) -> impl Fn(tickdiff::Error) -> RunError + '_ {
    move |e| {
        use tickdiff::Error as E;
        match e {
            E::Parameter { .. } => RunError::Config(format!("stage `{stage}`: {e}")),
            E::ZeroVariance(_) | E::DegenerateTail(_) | E::Consistency(_) => RunError::Numerical {
                stage: stage.to_string(),
                message: e.to_string(),
            },
            E::InsufficientData(_) | E::NonFinite { .. } | E::Unsorted(_) | E::KeyMismatch(_) => {
                RunError::Data {
                    stage: stage.to_string(),
                    message: e.to_string(),
                }
            }
        }
    }
}
