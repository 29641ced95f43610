use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("stream for channel {channel} is not sorted at index {index}")]
    Unsorted { channel: u8, index: usize },

    #[error("histogram window: {0}")]
    Window(String),

    #[error("no flux: {0}")]
    ZeroFlux(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("missing setting {0}")]
    MissingSetting(String),

    #[error("no convergence after {evaluations} evaluations (loss {loss:.6e}, gradient norm {grad_norm:.3e})")]
    NotConverged {
        evaluations: usize,
        loss: f64,
        grad_norm: f64,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian(_) => "not_hermitian",
            Error::InvalidTrace(_) => "invalid_trace",
            Error::NotPositive(_) => "not_positive",
            Error::NotNormalized(_) => "not_normalized",
            Error::OutOfRange(_) => "out_of_range",
            Error::InvalidInput(_) => "invalid_input",
            Error::Unsorted { .. } => "unsorted",
            Error::Window(_) => "window",
            Error::ZeroFlux(_) => "zero_flux",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::MissingSetting(_) => "missing_setting",
            Error::NotConverged { .. } => "not_converged",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
