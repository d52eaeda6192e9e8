use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the numerical core. Numeric payloads are stored as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("univalence suspect for map `{label}`: min |φ'| = {min_abs_deriv:e}, boundary winding = {winding}")]
    UnivalenceSuspect {
        label: String,
        min_abs_deriv: f64,
        winding: i64,
    },

    #[error("non-finite value in functional `{functional}`")]
    NonFinite { functional: &'static str },

    #[error("invalid exponent p = {p}: must satisfy p > 2")]
    InvalidExponent { p: f64 },

    #[error("degenerate triangle {index}: area {area:e}")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("nonpositive weight h = {value:e} in triangle {triangle}")]
    NonpositiveWeight { triangle: usize, value: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigensolver did not converge: {iterations} iterations, basis size {basis}, worst residual {residual:e}")]
    ConvergenceFailure {
        iterations: usize,
        basis: usize,
        residual: f64,
    },

    #[error("zero denominator in Rayleigh quotient")]
    ZeroDenominator,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("two-weight lemma violated at n = {n}: gap {gap:e} > bound {bound:e}")]
    LemmaViolation { n: usize, gap: f64, bound: f64 },

    #[error("invalid quasiconformality constant K = {k}: must satisfy K >= 1")]
    InvalidK { k: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument { .. } => "InvalidArgument",
            Error::UnivalenceSuspect { .. } => "UnivalenceSuspect",
            Error::NonFinite { .. } => "NonFinite",
            Error::InvalidExponent { .. } => "InvalidExponent",
            Error::DegenerateTriangle { .. } => "DegenerateTriangle",
            Error::NonpositiveWeight { .. } => "NonpositiveWeight",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::LemmaViolation { .. } => "LemmaViolation",
            Error::InvalidK { .. } => "InvalidK",
            Error::InvalidCurve(_) => "InvalidCurve",
        }
    }
}
