use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window ({k_min}, {k_max}) out of range for weight of length {len}")]
    WindowOutOfRange {
        k_min: usize,
        k_max: usize,
        len: usize,
    },

    #[error("weight covers |k| <= {available}, but |k| <= {required} is needed")]
    WeightTooShort { required: usize, available: usize },

    #[error("malformed orders: lower order {mu} exceeds upper order {rho}")]
    MalformedOrders { mu: f64, rho: f64 },

    #[error("spectral result covers n <= {available}, requested n <= {requested}")]
    RangeMismatch { requested: usize, available: usize },

    #[error("interlacing violated at n = {n}: {detail}")]
    Interlacing { n: usize, detail: String },

    #[error("root bracketing failed for {what} on [{lo}, {hi}]")]
    Bracketing { what: String, lo: f64, hi: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("only {usable} usable points for a decay fit (need at least 5)")]
    InsufficientData { usable: usize },

    #[error("spec file: {0}")]
    SpecFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
