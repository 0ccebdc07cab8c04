//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("edge ({0},{1}) has nonpositive weight {2}")]
    NonPositiveWeight(String, String, f64),
    #[error("vertex `{0}` has negative mass {1}")]
    NegativeMass(String, f64),
    #[error("non-finite value in input: {0}")]
    NonFinite(String),
    #[error("exhaustion invalid: {0}")]
    BadExhaustion(String),
    #[error("grid requires n >= 2, got {0}")]
    GridTooSmall(usize),
    #[error("grid requires lo < hi, got lo={0}, hi={1}")]
    BadGridBounds(f64, f64),
    #[error("function defined on {found} vertices, space has {expected}")]
    FunctionSizeMismatch { expected: usize, found: usize },
    #[error("function value missing for vertex `{0}`")]
    MissingVertexValue(String),
    #[error("negative value {value} at vertex {vertex} (integrand must be nonnegative)")]
    NegativeValue { vertex: usize, value: f64 },
    #[error("outer measure of the empty set must be 0, got {0}")]
    NonZeroOnEmpty(f64),
    #[error("exhaustive check requires ground set of at most {limit} points, got {size}")]
    GroundTooLarge { size: usize, limit: usize },
    #[error("set function table must have 2^n entries, got {0}")]
    BadTableSize(usize),
    #[error("set function table key `{0}` is not a subset bitmask in range")]
    BadTableKey(String),
    #[error("measure is not monotone: prefix difference {value} at atom {atom}")]
    NonMonotoneMeasure { atom: usize, value: f64 },
    #[error("function is not constant on atom {0} of the generated algebra")]
    NotAtomMeasurable(usize),
    #[error("subset references point {index} outside ground set of size {size}")]
    PointOutOfRange { index: usize, size: usize },
    #[error("chain of sets is not nested at position {0}")]
    ChainNotNested(usize),
    #[error("quantization step must be positive, got {0}")]
    NonPositiveEps(f64),
    #[error("brute-force method requires |V| <= {limit}, got {size}")]
    BruteForceTooLarge { size: usize, limit: usize },
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error("oracle did not converge within budget (best projected-gradient norm {0:.3e})")]
    OracleBudget(f64),
    #[error("factorization input violates the norm bound at test vector {index}: |T(v)| = {lhs} > Pr(|v|) = {rhs}")]
    FactorBoundViolated { index: usize, lhs: f64, rhs: f64 },
    #[error("factorization inconsistent: T is not constant on m-classes (test vector {0})")]
    FactorInconsistent(usize),
    #[error("unknown suite `{0}`; valid: axioms, outer, capacity, metrics, modules, all")]
    UnknownSuite(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
