use thiserror::Error;

/// Errors raised by the local-model kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    /// Differentiating `s^{1/2}` in `s` would leave the coefficient class.
    #[error("singular differential: d/ds of term {term} produces s^(-1/2)")]
    SingularDifferential { term: String },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("contraction of a degree-0 form")]
    DegreeZero,

    #[error("point outside model domain: {0}")]
    OutsideDomain(String),

    #[error("unknown coordinate direction `{0}`")]
    UnknownDirection(String),

    #[error("form is not basic on the boundary and invariant near it: {}", witness.join("; "))]
    NotBasicInvariant { witness: Vec<String> },

    #[error("coefficient does not descend to the cut space: {0}")]
    NonDescendingCoefficient(String),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),

    #[error("dimension parity: {0}")]
    DimensionParity(String),

    #[error("pullback leaves negative power of s: {0}")]
    ResidualNegativePower(String),

    #[error("degenerate matrix A: smallest singular value {sigma:e} at {point:?}")]
    DegenerateA { sigma: f64, point: Vec<f64> },

    #[error("lift input is not invariant: {0}")]
    NonInvariantInput(String),

    #[error("twist is not unit-modulus: |b|^2 - 1 = {residual:e} at {point:?}")]
    NonUnitTwist { residual: f64, point: Vec<f64> },

    #[error("radial factor g must be positive, got {value} at s = {s}")]
    NonPositiveFactor { value: f64, s: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("distribution frame degenerate at {point:?}")]
    FrameDegenerate { point: Vec<f64> },

    #[error("expression evaluation failed: {0}")]
    Evaluation(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl CutError {
    /// Stable machine-readable name, used by scenario expectations.
    pub fn kind(&self) -> &'static str {
        match self {
            CutError::SingularDifferential { .. } => "SingularDifferential",
            CutError::ModelMismatch(_) => "ModelMismatch",
            CutError::DegreeZero => "DegreeZero",
            CutError::OutsideDomain(_) => "OutsideDomain",
            CutError::UnknownDirection(_) => "UnknownDirection",
            CutError::NotBasicInvariant { .. } => "NotBasicInvariant",
            CutError::NonDescendingCoefficient(_) => "NonDescendingCoefficient",
            CutError::NonPositiveScale(_) => "NonPositiveScale",
            CutError::DimensionParity(_) => "DimensionParity",
            CutError::ResidualNegativePower(_) => "ResidualNegativePower",
            CutError::DegenerateA { .. } => "DegenerateA",
            CutError::NonInvariantInput(_) => "NonInvariantInput",
            CutError::NonUnitTwist { .. } => "NonUnitTwist",
            CutError::NonPositiveFactor { .. } => "NonPositiveFactor",
            CutError::DimMismatch(_) => "DimMismatch",
            CutError::FrameDegenerate { .. } => "FrameDegenerate",
            CutError::Evaluation(_) => "Evaluation",
            CutError::UnknownProperty(_) => "UnknownProperty",
            CutError::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = CutError> = std::result::Result<T, E>;
