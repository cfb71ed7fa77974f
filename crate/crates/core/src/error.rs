use thiserror::Error;

use crate::model::ValidationReport;

/// Which of the two messages carried by an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `m_{v→w}`, lives in the edge cone.
    LeftToRight,
    /// `m_{w→v}`, lives in the dual cone.
    RightToLeft,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::LeftToRight => f.write_str("v->w"),
            Direction::RightToLeft => f.write_str("w->v"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors belong to different spaces")]
    SpaceMismatch,

    #[error("gram matrix is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricGram { asymmetry: f64 },

    #[error("gram matrix is singular or numerically degenerate (condition {condition:e})")]
    SingularGram { condition: f64 },

    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("axis set {axes:?} does not match the contracted factor list")]
    AxisMismatch { axes: Vec<usize> },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("custom cone is missing its interior vectors")]
    MissingInterior,

    #[error("edge {edge} has no cone attached")]
    MissingCone { edge: usize },

    #[error("edge {edge}: {reason}")]
    UnsupportedCone { edge: usize, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),

    #[error("invalid factor graph: {0}")]
    InvalidFactorGraph(String),

    #[error("invalid graph state: {0}")]
    InvalidGraphState(String),

    #[error("size cap exceeded: {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("gauge for edge {edge} is singular (condition {condition:e})")]
    SingularGauge { edge: usize, condition: f64 },

    #[error("gauge covers {found} edges, model has {expected}")]
    GaugeShape { expected: usize, found: usize },

    #[error("NonpositiveNormalizer: edge {edge} ({direction}) normalizer {value:e}")]
    NonpositiveNormalizer { edge: usize, direction: Direction, value: f64 },

    #[error("ConeViolation: edge {edge} ({direction}) left its cone")]
    ConeViolation { edge: usize, direction: Direction },

    #[error("ZeroEdgePairing: edge {edge} message pairing {value:e}")]
    ZeroEdgePairing { edge: usize, value: f64 },

    #[error("SingularMessage: edge {edge} ({direction}) smallest eigenvalue {min_eigenvalue:e}")]
    SingularMessage { edge: usize, direction: Direction, min_eigenvalue: f64 },

    #[error("NonFixedPoint: residual {residual:e} above certification threshold")]
    NonFixedPoint { residual: f64 },

    #[error("DegenerateBethe: all-zero loop weight is {value:e}")]
    DegenerateBethe { value: f64 },

    #[error("BP did not converge after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonpositiveNormalizer { .. }
                | Error::ConeViolation { .. }
                | Error::ZeroEdgePairing { .. }
                | Error::SingularMessage { .. }
                | Error::NonFixedPoint { .. }
                | Error::NotConverged { .. }
                | Error::DegenerateBethe { .. }
                | Error::SingularGauge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
