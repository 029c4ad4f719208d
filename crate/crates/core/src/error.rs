use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector has zero variance; correlation is undefined")]
    ConstantVector,
    #[error("dimension {0} is too small (need n >= 3)")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector is not standardized: {0}")]
    NotStandardized(String),
    #[error("u and v are (anti)collinear; the third basis axis is undefined")]
    DegenerateCoplanar,
    #[error("invalid chi-square degrees of freedom: {0}")]
    InvalidDof(i64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("Soper approximation breaks down: {0}")]
    ApproximationBreakdown(String),
    #[error("too few records: got {got}, need at least {need}")]
    TooFewRecords { got: usize, need: usize },
    #[error("no records with correlation in [{q_lo}, {q_hi}]")]
    EmptyBand { q_lo: f64, q_hi: f64 },
    #[error("infeasible ensemble configuration: {0}")]
    InfeasibleConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical method on otherwise valid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. } | Error::ApproximationBreakdown(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
