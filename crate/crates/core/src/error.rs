use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u32),
    #[error("field order {0} is outside the supported set {{2,3,4,5,7,8,9,11,13,16}}")]
    UnsupportedField(u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("scalar {value} is not an element of GF({q})")]
    InvalidScalar { q: u32, value: u32 },
    #[error("operation {0} requires a second operand")]
    MissingOperand(&'static str),
    #[error("vector of length {found} where length {expected} was expected")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid subspace dimension {k} for ambient dimension {n}")]
    InvalidDimension { n: usize, k: usize },
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("enumeration of {count} subspaces exceeds the limit of {limit}")]
    EnumerationTooLarge { count: String, limit: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("eigenmatrix formulas disagree at eigenspace {eigenspace}, relation {relation}: {first} vs {second}")]
    FormulaMismatch {
        eigenspace: usize,
        relation: usize,
        first: String,
        second: String,
    },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("association scheme axiom violated: {0}")]
    SchemeAxiomViolation(String),
    #[error("family contains a duplicate member at position {0}")]
    DuplicateMember(usize),
    #[error("eigenvalue order violated: {0}")]
    EigenvalueOrderViolation(String),
    #[error("relation index {0} has no independent set bound (identity relation or out of range)")]
    DegenerateRelation(usize),
    #[error("family is empty")]
    EmptyFamily,
    #[error("family is not independent in relation {relation}: members {first} and {second}")]
    NotIndependent {
        relation: usize,
        first: usize,
        second: usize,
    },
    #[error("the point lies in T")]
    PointInT,
    #[error("member {0} does not meet the line exactly in the given point")]
    MemberNotMeetingInP(usize),
    #[error("search infeasible: {0}")]
    SearchInfeasible(String),
    #[error("coloring has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
