//! Error type shared by every module in the crate.

use thiserror::Error;

/// All failure modes of the decomposition pipeline.
///
/// Variants carry a human-readable detail string; callers match on the
/// variant, reports print the message.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input curve is not convex (slopes decrease somewhere).
    #[error("non-convex input: {0}")]
    NonConvexInput(String),

    /// Parameter outside the curve domain, or an empty/reversed interval.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Curve violates the normalization `0 ≤ γ'_R(a) ≤ γ'_L(b) ≤ 1`,
    /// `γ(a) = 0`, on domain `[0, 1]`.
    #[error("not normalized: {0}")]
    NotNormalized(String),

    /// Epsilon outside `(0, 1/2)`, or `1/ε` not an integer where required.
    #[error("bad epsilon: {0}")]
    EpsilonError(String),

    /// Coarse-partition piece was expected to be class P2 but is not.
    #[error("not a class P2 piece: {0}")]
    NotClassP2(String),

    /// A named admissibility condition fails on the given interval.
    #[error("admissibility failure: {0}")]
    AdmissibilityFailure(String),

    /// Operation requires an admissible curve and the check failed.
    #[error("curve not admissible: {0}")]
    NotAdmissible(String),

    /// Internal invariant broke (iteration caps, monotonicity, progress).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Box handed to an operation does not belong to the given curve.
    #[error("box/curve mismatch: {0}")]
    BoxCurveMismatch(String),

    /// A certified inequality failed at the stated tolerance.
    #[error("certification failure: {0}")]
    CertificationFailure(String),

    /// Too few scales to run the requested estimate.
    #[error("insufficient scales: {0}")]
    InsufficientScales(String),

    /// Direction-separation lower bound failed.
    #[error("separation violation: {0}")]
    SeparationViolation(String),

    /// Branch rescaling did not produce matching collections.
    #[error("bijection failure: {0}")]
    BijectionFailure(String),

    /// Scale or ratio that must be positive is not.
    #[error("non-positive scale: {0}")]
    NonPositiveScale(String),

    /// Polar dual requested for a box whose center is not the origin.
    #[error("not origin-centered: {0}")]
    NotOriginCentered(String),

    /// Requested grid would exceed the configured memory budget.
    #[error("grid too large: {0}")]
    GridTooLarge(String),

    /// Partition endpoints do not align with the expected grid or cover.
    #[error("misaligned partition: {0}")]
    MisalignedPartition(String),

    /// Decomposed parts fail to sum back to the original object.
    #[error("parts don't sum: {0}")]
    PartsDontSum(String),

    /// Lebesgue exponent outside the supported range.
    #[error("bad exponent: {0}")]
    BadExponent(String),

    /// Two indexed families that must align have different shapes.
    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    /// Function mass found outside its certified support set.
    #[error("support violation: {0}")]
    SupportViolation(String),

    /// Report kind tag not recognized by the verifier.
    #[error("unknown report kind: {0}")]
    UnknownReportKind(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
