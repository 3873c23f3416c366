//! Decomposition geometry for convex plane curves.
//!
//! The central objects are graphs of convex functions `γ: [a, b] → ℝ` with
//! one-sided derivatives, measured by three arc functionals:
//!
//! * the **turn** `𝒜(Γ, I)`, the tangent of the angle swept by the tangent
//!   direction across `I`;
//! * the **chord** `cal(Γ, I)`, the Euclidean distance between the endpoints;
//! * the **bending** `𝒲(Γ, I) = cal · 𝒜`, which a similarity of ratio `r`
//!   multiplies by `r` (the turn is invariant, the chord scales).
//!
//! On top of these the crate builds the whole decomposition pipeline:
//!
//! * [`curve`]: concrete curve families (parabolas, polynomials, Cantor
//!   staircase antiderivatives, piecewise-linear interpolants, and rescaled
//!   views of any of them) behind one [`curve::ConvexCurve`] type;
//! * [`geometry`]: plane primitives, orientation-preserving similarities,
//!   and the [`geometry::CanonicalBox`] slanted-box representation;
//! * [`decompose`]: admissibility checks, the single-scale box algorithm,
//!   and the multi-scale [`decompose::DecompositionTree`];
//! * [`partition`]: the coarse partition of a normalized curve and the ideal
//!   partition at scale `R⁻¹` assembled from box trees;
//! * [`covering`]: dyadic covering counts and affine-dimension estimates;
//! * [`branch`]: constant-width branch collections, direction separation,
//!   and the rescaling bijection between branch structures;
//! * [`formats`]: serialization records for every external artifact.
//!
//! Numerical conventions live in [`num`]: suprema and infima over one
//! parameter are resolved by 60 rounds of bisection on monotone predicates,
//! and equalities are asserted with absolute-plus-relative tolerance
//! `1e-12` unless a contract pins something looser.

pub mod branch;
pub mod covering;
pub mod curve;
pub mod decompose;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod num;
pub mod partition;
pub mod rng;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
