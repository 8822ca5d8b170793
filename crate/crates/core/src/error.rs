use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex `{0}` is a sink: no infinite path can continue through it")]
    Sink(String),
    #[error("word `{0}` is not an allowed path in the graph")]
    WordNotAllowed(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("ratio list must contain at least two ratios")]
    TooFewRatios,
    #[error("ratio for edge `{edge}` is {value}, expected a value in (0, 1)")]
    RatioOutOfRange { edge: String, value: f64 },
    #[error("ratio list has {got} entries but the graph has {expected} edges")]
    RatioCountMismatch { expected: usize, got: usize },
    #[error("potential depth must be at least 1")]
    ZeroDepth,
    #[error("potential table has {0} entries, which exceeds the supported size")]
    TableTooLarge(usize),
    #[error("potential table is missing allowed word `{0}`")]
    MissingTableEntry(String),
    #[error("potential table entry for `{word}` is {value}; entries must be finite and positive")]
    NonPositiveTableEntry { word: String, value: f64 },
    #[error("potential table key `{0}` has the wrong length or is not an allowed word")]
    BadTableKey(String),
    #[error("vertex weights must be positive, one per vertex")]
    BadVertexWeights,
    #[error("potential is not admissible for the metric: {0}")]
    NotMetricAdmissible(String),
    #[error("(x, {m}, {n}, y) is not a groupoid element: T^m x != T^n y")]
    NotGroupoidElement { m: usize, n: usize },
    #[error("word is too short: need length at least {min}, got {got}")]
    WordTooShort { min: usize, got: usize },

    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix has a negative or non-finite entry")]
    NegativeEntry,
    #[error("matrix is reducible")]
    Reducible,
    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("root is not bracketed below {0}")]
    NotBracketed(f64),
    #[error("potential takes the value {0} <= 1, so the pressure need not vanish")]
    PressureNotDecreasing(f64),
    #[error("entropy scaling factor must exceed 1, got {0}")]
    ScalingTooSmall(f64),

    #[error("algebra elements live over different graphs")]
    GraphMismatch,
    #[error("bisection words do not share a source vertex")]
    BadBisection,

    #[error("cannot parse weight expression: {0}")]
    Expr(String),
    #[error("circle weight is invalid: {0}")]
    InvalidCircleMap(String),
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },
    #[error("interval ({a}, {b}) is not a section of the covering map")]
    NotASection { a: f64, b: f64 },
    #[error("branch {branch} out of range for degree {degree}")]
    BadBranch { branch: usize, degree: usize },
    #[error("octafold address has an empty word")]
    EmptyOctafoldWord,
    #[error("invalid octafold point: {0}")]
    InvalidOctafoldPoint(String),
    #[error("octafold geometry check failed: {0}")]
    OctafoldGeometry(String),
    #[error("degenerate pair: points coincide")]
    DegeneratePair,
}

pub type Result<T> = std::result::Result<T, Error>;
