use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("set size {n} out of range 1..={max}")]
    SizeOutOfRange { n: usize, max: usize },

    #[error("set sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("full enumeration of B_{n} exceeds the budget (n must be at most 4)")]
    EnumerationTooLarge { n: usize },

    #[error("bit vector {bits:#x} has bits beyond position n^2 = {limit}")]
    StrayBits { bits: u64, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("lattice rejected: {0}")]
    Lattice(String),

    #[error("lattice rejected: {axiom} fails at {witness:?}")]
    AxiomViolated {
        axiom: &'static str,
        witness: Vec<usize>,
    },

    #[error("localizer rejected: {0}")]
    Localizer(String),

    #[error("homomorphism precondition violated: {0}")]
    Hom(String),
}
