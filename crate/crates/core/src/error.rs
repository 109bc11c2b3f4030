use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vectors are linearly dependent (residual norm {0:.3e})")]
    DegenerateInput(f64),
    #[error("p = {p} is out of range for ambient dimension {dim}")]
    InvalidP { p: usize, dim: usize },
    #[error("ramp length L must be positive, got {0}")]
    InvalidL(f64),
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    DomainError {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("quadrature did not reach tolerance {tol:.1e} (estimate {estimate:.3e})")]
    QuadratureFailure { tol: f64, estimate: f64 },
    #[error("|beta'| = {slope} exceeds 1 at r = {r}")]
    SlopeViolation { r: f64, slope: f64 },
    #[error("Lambda = {lambda} does not exceed max|alpha| = {alpha_max}")]
    LambdaTooSmall { lambda: f64, alpha_max: f64 },
    #[error("r = {r} is within {eps:.1e} of the axis; use the axis limit")]
    AxisSingularity { r: f64, eps: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("case parameters inconsistent with case {case}: {reason}")]
    CaseMismatch { case: u8, reason: String },
    #[error("profile does not close smoothly at the axis: {0}")]
    NotClosed(String),
    #[error("model not supported here: {0}")]
    UnsupportedModel(String),
    #[error("finite-difference stencil leaves the valid box along coordinate {coord}")]
    StencilOutOfDomain { coord: usize },
    #[error("tangent vectors span a degenerate pair")]
    DegeneratePair,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("region interfaces disagree: max mismatch {0:.3e}")]
    InterfaceMismatch(f64),
    #[error("config: {0}")]
    Config(String),
}
