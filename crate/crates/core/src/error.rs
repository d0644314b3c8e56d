use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter s = {s} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { s: f64, lo: f64, hi: f64 },
    #[error("derivative of order {0} is not available")]
    OrderUnsupported(usize),
    #[error("integrand is not finite at s = {0}")]
    NonFiniteRate(f64),
    #[error("null vector has no Lorentzian angle")]
    NullInput,
    #[error("timelike vectors have opposite time orientation")]
    MixedOrientation,
    #[error("spacelike vectors span a degenerate (null) plane")]
    DegenerateSpan,
    #[error("cylindrical ruling at s = {0}: striction undefined")]
    CylindricalRuling(f64),
    #[error("singular surface point at (s, v) = ({s}, {v})")]
    SingularPoint { s: f64, v: f64 },
    #[error("null surface normal at (s, v) = ({s}, {v})")]
    NullNormal { s: f64, v: f64 },
    #[error("unsupported surface class: {0}")]
    UnsupportedClass(String),
    #[error("frame construction failed at s = {s}: {reason}")]
    FrameFailure { s: f64, reason: String },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("non-finite value at s = {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
