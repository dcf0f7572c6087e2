use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed partition token {token:?} in {text:?}")]
    MalformedToken { text: String, token: String },

    #[error("partition parts must be positive, got {0}")]
    NonPositivePart(i64),

    #[error("empty partition")]
    EmptyPartition,

    #[error("invalid branch data: {0}")]
    InvalidSpec(String),

    #[error("factorization enumeration exceeded its budget of {budget} visited tuples")]
    BudgetExceeded { budget: u64 },

    #[error("incomplete enumeration: found {found} of {target} solutions")]
    IncompleteEnumeration { found: usize, target: u64 },

    #[error("overcount: found {found} distinct solutions but only {target} exist")]
    OvercountDetected { found: usize, target: u64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("ambiguous realness: imaginary part {imag:e} within 10x of tolerance {tol:e}")]
    AmbiguousRealness { imag: f64, tol: f64 },

    #[error("two real preimages of w={value} within cluster tolerance ({x1}, {x2})")]
    ClusterAmbiguity { value: f64, x1: f64, x2: f64 },

    #[error("representatives of a covering class have different signs ({0} vs {1})")]
    SignMismatch(i8, i8),

    #[error("reflection z -> -z of a real solution has no match in the solution set")]
    InvolutionMismatch,

    #[error("degree {degree} exceeds the configured bound {bound}")]
    ScaleExceeded { degree: usize, bound: usize },

    #[error("basis fit needs at least 2 entries of the requested parity, got {0}")]
    InsufficientData(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
