use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate bound-state root at E/(2J) = {energy_2j}: |G'| = {g_prime_abs:e}")]
    DegenerateRoot { energy_2j: f64, g_prime_abs: f64 },

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("unfittable series: {0}")]
    Unfittable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
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
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    /// Wraps the error with a human-readable location, e.g. a sweep coordinate.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::Domain(_) => "domain",
            Error::DegenerateRoot { .. } => "degenerate_root",
            Error::Regime(_) => "regime",
            Error::Unfittable(_) => "unfittable",
            Error::Unsupported(_) => "unsupported",
            Error::Eigen(_) => "eigen",
            Error::Parse(_) => "parse",
            Error::Context { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
