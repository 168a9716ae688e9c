use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("labels and weights have different lengths ({labels} vs {weights})")]
    LengthMismatch { labels: usize, weights: usize },
    #[error("invalid weight {value} for label {label:?}")]
    InvalidWeight { label: String, value: f64 },
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("probabilities sum to {sum}, expected 1 within 1e-6")]
    NotNormalized { sum: f64 },
    #[error("credible level alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("phi and posterior do not share the same label sequence")]
    LabelMismatch,
    #[error("kappa {kappa} is not a mass value of the posterior and rho(kappa) = {rho} differs from the target mass {target}")]
    InconsistentKappa { kappa: f64, rho: f64, target: f64 },
    #[error("boundary weight {0} falls outside [0, 1] beyond tolerance; kappa is inconsistent with the level")]
    GammaOutOfRange(f64),

    #[error("grid posterior needs at least 2 cells, got {0}")]
    DegenerateGrid(usize),
    #[error("grid density integrates to {integral}, expected 1 within 1e-6")]
    GridNotNormalized { integral: f64 },
    #[error("grid has {len} cells but (hi - lo)/step = {expected}")]
    GridLengthMismatch { len: usize, expected: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("dataset row {row} has {got} features, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("dataset row {row} contains a non-finite feature")]
    NonFiniteFeature { row: usize },
    #[error("need at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error("class {label:?} has {count} samples but covariance estimation needs at least {needed}")]
    ClassTooSmall { label: String, count: usize, needed: usize },
    #[error("covariance for class {0:?} is not positive definite")]
    CovarianceNotPositiveDefinite(String),
    #[error("input has dimension {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid class priors: {0}")]
    InvalidPriors(String),
    #[error("invalid simulation spec: {0}")]
    InvalidSimulationSpec(&'static str),

    #[error("label {0:?} is not part of the credible set")]
    UnknownLabel(String),
    #[error("palette has no color for label {0:?}")]
    MissingColor(String),
    #[error("palette color {color} assigned to more than one label (colors must be a bijection)")]
    DuplicateColor { color: String },
    #[error("canvas of {size} px is too small, minimum is {min}")]
    CanvasTooSmall { size: u32, min: u32 },
    #[error("panel needs at least one point")]
    EmptyPanel,

    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
