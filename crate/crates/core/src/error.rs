use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {coords:?} violates domain margin {margin} on axis {axis}")]
    DomainMargin {
        coords: Vec<f64>,
        axis: usize,
        margin: f64,
    },
    #[error("point has {got} coordinates, chart expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point belongs to chart `{got}`, metric is defined on `{expected}`")]
    ChartMismatch { expected: String, got: String },
    #[error("non-finite value while evaluating {what}")]
    NonFinite { what: &'static str },
    #[error("metric matrix is singular or indefinite (condition number {condition:e})")]
    SingularMetric { condition: f64 },
    #[error("curvature symmetry residual {residual:e} exceeds {limit:e}; step too large or chart degenerate")]
    SymmetryResidual { residual: f64, limit: f64 },
    #[error("sign convention check failed: unit sphere sectional curvature came out {value}")]
    SignConvention { value: f64 },
    #[error("vectors span a degenerate plane")]
    DegeneratePlane,
    #[error("input vectors are linearly dependent (normalized Gram determinant {gram_det:e})")]
    DependentVectors { gram_det: f64 },
    #[error("k = {k} outside 1..={max}")]
    InvalidK { k: usize, max: usize },
    #[error("symmetric eigensolver did not converge")]
    EigenNonConvergence,
    #[error("operator matrix is not symmetric (residual {residual:e})")]
    AsymmetricOperator { residual: f64 },
    #[error("soul parameter {param:?} outside the parameter box of `{soul}`")]
    ParamOutOfBox { soul: String, param: Vec<f64> },
    #[error("soul tangent basis is degenerate at {param:?}")]
    DegenerateTangent { param: Vec<f64> },
    #[error("could not complete the tangent frame to a full frame")]
    ComplementFailure,
    #[error("witness construction defect: {0}")]
    WitnessDefect(String),
    #[error("killing field vanishes at {coords:?}")]
    VanishingKilling { coords: Vec<f64> },
    #[error("section is not transverse to the killing direction at {coords:?}")]
    NonTransverseSection { coords: Vec<f64> },
    #[error("cap radius must be positive, got {0}")]
    InvalidCapRadius(f64),
    #[error("exponent r = {r} must exceed dim/2 = {half_dim} (hypothesis r > dim(soul)/2 of the scalar-curvature splitting theorem)")]
    HypothesisViolated { r: f64, half_dim: f64 },
    #[error("exponent r = {0} must be at least 1")]
    InvalidExponent(f64),
    #[error("entry `{0}` has no declared soul")]
    NoSoul(String),
    #[error(
        "Euler number needs a surface soul with rank-2 normal bundle, got dim {dim}, rank {rank}"
    )]
    WrongSoulTopology { dim: usize, rank: usize },
    #[error("unknown zoo entry `{0}`")]
    UnknownEntry(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
