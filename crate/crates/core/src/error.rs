use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input `{field}`: {message}")]
    InvalidInput { field: String, message: String },

    #[error("unsupported muck combination: {0}")]
    UnsupportedCombination(String),

    #[error("cannot fit preprocessor: column `{column}` {message}")]
    Fit { column: String, message: String },

    #[error("training diverged at iteration {iteration} (loss {loss})")]
    TrainingDiverged { iteration: usize, loss: f64 },

    #[error("MAPE undefined: truth is zero at indices {indices:?}")]
    MapeUndefined { indices: Vec<usize> },

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("no feasible grid point (feasible fraction {feasible_fraction})")]
    NoFeasiblePoint { feasible_fraction: f64 },

    #[error("row {row}, column `{column}`: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("unsupported schema version {found:?} (expected {expected:?})")]
    UnsupportedVersion { found: String, expected: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable code, used by the CLI and the HTTP layer.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput { .. } => "invalid_input",
            Error::UnsupportedCombination(_) => "unsupported_combination",
            Error::Fit { .. } => "fit_error",
            Error::TrainingDiverged { .. } => "training_diverged",
            Error::MapeUndefined { .. } => "mape_undefined",
            Error::Infeasible(_) => "infeasible_point",
            Error::NoFeasiblePoint { .. } => "no_feasible_point",
            Error::Csv { .. } => "csv_error",
            Error::Malformed(_) => "malformed_document",
            Error::UnsupportedVersion { .. } => "unsupported_version",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Io(_) => "io_error",
        }
    }

    /// Whether the error stems from caller-supplied data rather than a
    /// failure during computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. }
                | Error::UnsupportedCombination(_)
                | Error::Csv { .. }
                | Error::Malformed(_)
                | Error::UnsupportedVersion { .. }
                | Error::ShapeMismatch(_)
                | Error::MapeUndefined { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
