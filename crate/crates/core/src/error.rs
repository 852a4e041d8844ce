use thiserror::Error;

use crate::operator::OperatorKind;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),

    #[error("edge ({from}, {to}) references unknown vertex `{missing}`")]
    DanglingEndpoint {
        from: String,
        to: String,
        missing: String,
    },

    #[error("loop with zero index at vertex `{0}` is not allowed")]
    ZeroIndexLoop(String),

    #[error("vertex `{0}` has a non-finite potential")]
    NonFinitePotential(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported lattice dimension {0}; supported range is 1..=4")]
    UnsupportedDimension(usize),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("the quotient graph is not connected")]
    DisconnectedQuotient,

    #[error("lattice basis is numerically singular")]
    SingularBasis,

    #[error("operator kind `{kind}` cannot be built from a {got} graph")]
    WrongGraphFlavor {
        kind: OperatorKind,
        got: &'static str,
    },

    #[error("matrix power {n} exceeds the configured cap {cap}")]
    PowerCapExceeded { n: usize, cap: usize },

    #[error("cycle length {n} exceeds the configured enumeration cap {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("Hermitian eigensolver did not converge")]
    EigensolverFailure,

    #[error("series does not converge: |parameter| = {given:.6e}, convergence boundary at {radius:.6e}")]
    DivergentSeries { given: f64, radius: f64 },

    #[error("quadrature grid of {given} points per dimension aliases the integrand; need at least {required}")]
    GridTooCoarse { given: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
