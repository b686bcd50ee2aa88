use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid bundle specification: {0}")]
    InvalidSpec(String),

    #[error("bundle is not Fano: c1 = {c1} > n + r = {bound}")]
    NotFano { c1: u64, bound: u64 },

    #[error("weighted degree of the zero polynomial is undefined")]
    ZeroPolynomial,

    #[error("invalid grading: variable weights must be positive (got q1 = {deg_q1}, q2 = {deg_q2})")]
    InvalidGrading { deg_q1: i64, deg_q2: i64 },

    #[error("rewriting did not terminate within {limit} steps (last polynomial has {terms} terms)")]
    NonTermination { limit: u64, terms: usize },

    #[error("quantum variable in classical-ring input: {0}")]
    QuantumVariable(String),

    #[error("not a classical normal form: {0}")]
    NotNormalForm(String),

    #[error("pairing matrix is singular")]
    SingularPairing,

    #[error("dual of basis element {index} has a non-integral coefficient {value}")]
    NonIntegralDual { index: usize, value: String },

    #[error("invalid invariant query: {0}")]
    InvalidQuery(String),
}
