//! Error type shared by the symbolic and numeric layers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The tau-function vanishes at an evaluation point (singular potential
    /// location). Surfaced, never regularized.
    #[error("tau-function vanishes at the evaluation point")]
    DenominatorZero,

    /// An expression with negative powers of (x - y) was evaluated at x = y.
    #[error("diagonal evaluation of an expression with (x-y) poles; use the diagonal form")]
    DiagonalEvaluation,

    /// Soliton wavenumbers must have pairwise distinct absolute values
    /// (k and -k produce the same exponential and a singular interaction
    /// coefficient).
    #[error("duplicate soliton wavenumber (absolute values must be pairwise distinct)")]
    DuplicateWavenumber,

    /// Soliton wavenumbers must be nonzero.
    #[error("soliton wavenumber must be nonzero")]
    ZeroWavenumber,

    /// Rational tau-functions are provided for levels 1 and 2.
    #[error("unsupported rational tau level {0} (levels 1 and 2 are available)")]
    UnsupportedLevel(u32),

    /// Panel refinement hit its limit before the requested tolerance.
    #[error("quadrature did not converge within the panel refinement limit")]
    QuadratureNotConverged,

    /// A pseudo-differential coefficient was requested below the order to
    /// which the operator is trusted.
    #[error("order {requested} is below the trusted truncation order {trusted}")]
    TruncationExceeded { requested: i64, trusted: i64 },

    /// A Lax commutator came out with a nonzero coefficient at a positive
    /// order, which signals a calculus bug rather than a property of the input.
    #[error("commutator is not a multiplication operator: nonzero coefficient at order {0}")]
    NotMultiplicationOperator(i64),

    /// Double factorials are defined down to (-1)!! = 1 and no further.
    #[error("double factorial of {0} is outside the supported range (>= -1)")]
    DoubleFactorialRange(i64),

    /// Working precision below the supported minimum.
    #[error("precision of {got} decimal digits is below the minimum of {min}")]
    PrecisionTooLow { min: u32, got: u32 },

    /// Mismatched constructor inputs (lengths, ranges).
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
