use alloc::string::String;

use crate::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("dimension {n} exceeds the enumeration cap {cap}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("invalid point string {0:?}: expected only '+' and '-'")]
    InvalidPoint(String),
    #[error("term uses variable {0} both positively and negatively")]
    ContradictoryTerm(usize),
    #[error("term index {index} out of range ({terms} terms)")]
    TermIndex { index: usize, terms: usize },
    #[error("invalid concept: {0}")]
    InvalidConcept(String),
    #[error("polynomial value {0} is outside its declared output alphabet")]
    NotBoolean(Rational),
    #[error("majority polynomial needs an odd arity in 1..=15, got {0}")]
    EvenMajority(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("map is not injective on the support: two points map to {0}")]
    NonInjective(String),
    #[error("exact computation needs dimension <= {cap} (got {n}); use the Monte Carlo estimator")]
    ExactCap { n: usize, cap: usize },
    #[error("query at distance {distance} from the training set exceeds locality {q}")]
    LocalityViolation { distance: usize, q: usize },
    #[error("query budget of {cap} exhausted")]
    BudgetExhausted { cap: usize },
    #[error("type-B answerer found {found} anchors within distance {q} of the query")]
    AnchorNotUnique { found: usize, q: usize },
    #[error("learner needs {learner}-local queries but the reduction only supports {reduction}")]
    LocalityBudget { learner: usize, reduction: usize },
    #[error("point is not evident for term {0}")]
    NotEvident(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}
