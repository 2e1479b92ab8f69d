use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch {
        left: [&'static str; 3],
        right: [&'static str; 3],
    },
    #[error("zero velocity: y must be non-zero")]
    ZeroVelocity,
    #[error("strong convexity fails: Delta = {0:e} <= 0")]
    Convexity(f64),
    #[error("point is not on the indicatrix: F = {0}")]
    NotOnIndicatrix(f64),
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("singular coframe: |det| = {0:e}")]
    SingularCoframe(f64),
    #[error("curvature is not constant: spread {spread:e} over probe points (mean {mean})")]
    NotConstantCurvature { spread: f64, mean: f64 },
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("a is not monotone on the grid: {0}")]
    NonMonotone(String),
    #[error("level-set representatives disagree: {0}")]
    RepresentativeMismatch(String),
    #[error("profile u must be positive, got u({a}) = {u}")]
    NonPositiveU { a: f64, u: f64 },
    #[error("interpolation error: {0}")]
    Interpolation(String),
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Failures that mean "this metric is outside the requested case",
    /// as opposed to bad input.
    pub fn is_case_failure(&self) -> bool {
        matches!(
            self,
            Error::NotConstantCurvature { .. }
                | Error::CaseMismatch(_)
                | Error::NonMonotone(_)
                | Error::RepresentativeMismatch(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
