//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by word, matrix, automorphism and mapping-torus
/// operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Text input could not be parsed.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    /// A generator index fell outside the rank of the ambient free group.
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    /// Two values belong to free groups of different ranks.
    #[error("rank mismatch: expected rank {expected}, got rank {got}")]
    RankMismatch { expected: usize, got: usize },

    /// The operation is only defined in rank 2.
    #[error("operation requires rank 2, got rank {0}")]
    RankNotTwo(usize),

    /// An exponent had to be materialised as a machine-sized count but did
    /// not fit (the result would be astronomically large anyway).
    #[error("exponent too large to materialise")]
    ExponentTooLarge,

    /// A matrix that must lie in GL_n(Z) has determinant other than +-1.
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(String),

    /// A matrix had the wrong shape.
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    /// A map claimed to be (or required to be) an automorphism is not one,
    /// or could not be certified as one.
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    /// No conjugating word exists: the map is not inner.
    #[error("map is not inner: no conjugating word verifies")]
    NotInner,

    /// Elements of different mapping tori were mixed in one operation.
    #[error("elements belong to different mapping tori")]
    TorusMismatch,

    /// A defining relator of the mapping torus is not preserved by the
    /// requested assignment, so it does not define a homomorphism.
    #[error("relator {index} not preserved: image normal-forms to `{image}`")]
    RelatorViolated { index: usize, image: String },

    /// An inverse assignment failed to verify (some generator round trip is
    /// not the identity).
    #[error("inverse assignment does not verify: {0}")]
    InverseFails(String),

    /// The operation needs an inverse assignment that is not present.
    #[error("operation requires a verified inverse assignment")]
    MissingInverse,

    /// A torus map that must preserve the fiber does not.
    #[error("map is not fiber-preserving: {0}")]
    NotFiberPreserving(String),

    /// The monodromy does not have the shape required by the operation.
    #[error("monodromy shape mismatch: {0}")]
    MonodromyShape(String),

    /// A parameter that must be nonzero was zero.
    #[error("argument `{0}` must be nonzero")]
    ZeroArgument(&'static str),

    /// An internal consistency check failed; this indicates a violated
    /// precondition that the library could not detect earlier, or a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<V> = std::result::Result<V, Error>;
