use thiserror::Error;

/// Errors produced by the library.
///
/// Most variants describe invalid input. [`Error::Invariant`] is reserved for
/// internal consistency failures (a broken rank function, a matching that does
/// not behave monotonically); callers such as the CLI map it to a separate
/// exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid simplex {0:?}: vertex lists must be non-empty and duplicate-free")]
    InvalidSimplex(Vec<usize>),

    #[error("non-finite filtration value {value} on simplex {simplex:?}")]
    NonFiniteValue { simplex: Vec<usize>, value: f64 },

    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),

    #[error("closure violated: face {face:?} of simplex {simplex:?} is missing")]
    MissingFace { simplex: Vec<usize>, face: Vec<usize> },

    #[error("monotonicity violated: face {face:?} enters at {face_value}, after its coface {simplex:?} at {value}")]
    NonMonotone {
        simplex: Vec<usize>,
        value: f64,
        face: Vec<usize>,
        face_value: f64,
    },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cochain does not live on this complex")]
    HostMismatch,

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("cochain of degree {0} is not a cocycle")]
    NotACocycle(usize),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("generator {0} is not an isometry")]
    NotAnIsometry(usize),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("could not produce a valid perturbed metric after {0} attempts")]
    PerturbationFailed(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures that signal a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
