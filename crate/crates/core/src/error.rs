use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller handed an operation something it cannot act on (wrong
    /// field space, non-positive gauge time, mismatched grids).
    #[error("usage error: {0}")]
    Usage(String),

    /// A computation left the finite reals.
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// Parameters outside the hypotheses a bound or formula needs.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("perturbation outside its envelope: {0}")]
    Envelope(String),

    /// A closed-form profile reached its blow-up time.
    #[error("blow-up at t = {time}")]
    BlowUp { time: f64 },

    #[error("integration failure at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
