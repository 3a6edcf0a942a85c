use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("weight vector is zero")]
    ZeroWeight,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("label must be -1 or +1, got {0}")]
    InvalidLabel(i64),

    #[error("class {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: usize, num_classes: usize },

    #[error("no candidates supplied")]
    EmptyCandidates,

    #[error("wrong magic: expected {expected:#010x}, found {found:#010x}")]
    WrongMagic { expected: u32, found: u32 },

    #[error("truncated input: needed {needed} bytes, only {available} available")]
    Truncated { needed: usize, available: usize },

    #[error("trailing data: {0} unexpected bytes after payload")]
    TrailingData(usize),

    #[error("label byte {0} out of range 0..=9")]
    LabelOutOfRange(u8),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("privacy budget ({target_epsilon}, {target_delta}) unreachable for sigma in [{sigma_lo}, {sigma_hi}]")]
    CalibrationInfeasible {
        target_epsilon: f64,
        target_delta: f64,
        sigma_lo: f64,
        sigma_hi: f64,
    },

    #[error("composed budget ({epsilon}, {delta}) exceeds target ({target_epsilon}, {target_delta})")]
    BudgetExceeded {
        epsilon: f64,
        delta: f64,
        target_epsilon: f64,
        target_delta: f64,
    },

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("accountant epsilon not monotone in sigma: eps({sigma_small}) = {eps_small} < eps({sigma_large}) = {eps_large}")]
    NonMonotoneAccountant {
        sigma_small: f64,
        eps_small: f64,
        sigma_large: f64,
        eps_large: f64,
    },

    #[error("training failed for classes {classes:?}: {message}")]
    ClassTraining { classes: Vec<usize>, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("model format: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
