use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point ({re}, {im}): need finite coordinates with im > 0")]
    InvalidPoint { re: f64, im: f64 },

    #[error("invalid boundary point: {0}")]
    InvalidBoundaryPoint(f64),

    #[error("matrix determinant {det} is not 1 (entries {entries:?})")]
    InvalidDeterminant { det: f64, entries: [f64; 4] },

    #[error("endpoints coincide")]
    CoincidentEndpoints,

    #[error("isometry is not loxodromic (|trace| = {trace_abs})")]
    NotLoxodromic { trace_abs: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("segment is degenerate")]
    DegenerateSegment,

    #[error("boundary projection did not converge by ray parameter {last_t}")]
    NoConvergence { last_t: f64 },

    #[error("projections are only {gap} apart, need more than 2")]
    ProjectionsTooClose { gap: f64 },

    #[error("no decomposition satisfied the contracting bounds")]
    DecompositionNotFound,

    #[error("shadow radius {0} must exceed 1")]
    RadiusTooSmall(f64),

    #[error("no candidate is aligned")]
    NoCandidateAligns,

    #[error("ball would exceed the cap of {cap} elements at word length {length}")]
    BallTooLarge { cap: usize, length: usize },

    #[error("factors {factors:?} are not loxodromic")]
    NotJointlyLoxodromic { factors: Vec<usize> },

    #[error("no witness in the ball")]
    NoWitnessInBall,

    #[error("insufficient growth data: {0}")]
    InsufficientGrowthData(String),

    #[error("no cell carries the mass floor")]
    EmptyCells,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("spec parse error at line {line}, column {column}: {message}")]
    SpecParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::SpecParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
