use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("empty input list")]
    EmptyInput,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("constant polynomial not allowed here")]
    ConstantPolynomial,
    #[error("polynomial must be monic: {0}")]
    NotMonic(String),
    #[error("polynomial is not irreducible: {0}")]
    NotIrreducible(String),
    #[error("degree {0} exceeds the factorization limit")]
    DegreeTooLarge(usize),
    #[error("polynomials are not coprime")]
    NotCoprime,
    #[error("invalid kernel configuration: {0}")]
    InvalidConfig(String),
    #[error("configuration must be algebraic")]
    NotAlgebraic,
    #[error("configuration must be transcendental")]
    NotTranscendental,
    #[error("configurations differ")]
    ConfigMismatch,
    #[error("infinite value at {0}")]
    InfiniteValue(String),
    #[error("configurations are equal")]
    EqualConfigs,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("model is not a C-endomorphism")]
    NotCEndomorphism,
    #[error("model is not C-image-complete")]
    NotImageComplete,
    #[error("decomposition is not direct: {0}")]
    NotDirect(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("illegal generator: {0}")]
    IllegalGenerator(String),
    #[error("subspace is not invariant under theta")]
    NotInvariant,
    #[error("no finite witness exists")]
    NoFiniteWitness,
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("unbound constant {0}")]
    UnboundConstant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}
