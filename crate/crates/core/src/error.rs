use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into configuration problems (bad input, bad model, bad
/// kernel) and runtime failures; the CLI maps them onto exit codes 2 and 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice {d1}x{d2}: both sides must be at least 2")]
    InvalidLattice { d1: usize, d2: usize },

    #[error("invalid model field `{field}`: {reason}")]
    InvalidModel { field: String, reason: String },

    #[error("operation `{op}` is not available for {model} models")]
    UnsupportedModel { op: &'static str, model: &'static str },

    #[error("bandwidth {h1}x{h2} too small for lattice {d1}x{d2} (need h_k * d_k >= 2)")]
    BandwidthTooSmall { h1: f64, h2: f64, d1: usize, d2: usize },

    #[error("invalid kernel configuration: {0}")]
    InvalidKernel(String),

    #[error("lag ({r1}, {r2}) outside the lattice lag range")]
    LagOutOfRange { r1: i64, r2: i64 },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("rank-deficient trend design: {0}")]
    RankDeficient(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn model(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidModel {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True when the error stems from user input rather than from a failure
    /// while computing.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Simulation(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
