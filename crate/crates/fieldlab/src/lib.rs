//! Numerical laboratory for decoupling experiments on convex curves.
//!
//! Everything runs on a side-`L` torus in place of `ℝ²`, with `L = R` and
//! frequencies on the lattice `(1/R)ℤ²`. Test functions are sparse
//! trigonometric polynomials, so Fourier supports are exact sets of lattice
//! points and every norm or convolution below is a finite spectral identity
//! rather than an approximation; grids carry `M = 16R` samples per side so
//! that powers up to `|f|⁶` stay alias-free.
//!
//! * [`grid`]: the [`grid::GridField`] sample container, exact `L^p` norms,
//!   Fourier coefficients, torus convolution, decoupling ratios, and raw
//!   binary export;
//! * [`synth`]: wave-packet synthesis along a curve, one seeded mode per
//!   `R⁻¹`-column, grouped by partition interval;
//! * [`mollifier`]: the low-pass kernels `η_k`, the per-box kernels `ρ_τ`,
//!   and the recursive weights `ω_τ` with measured `L¹` norms;
//! * [`square`]: square functions `g_k = Σ |f_τ|² ∗ ω_τ` and their
//!   high/low frequency split;
//! * [`packets`]: dual-box wave-packet tilings, the `ψ_T` partition of
//!   unity, threshold pruning, and the broad/narrow inequality;
//! * [`analysis`]: Bernstein exponent checks and local `L²` orthogonality;
//! * [`experiment`]: batch decoupling-ratio experiments behind a text
//!   config, with CSV results.

pub mod analysis;
pub mod experiment;
pub mod grid;
pub mod mollifier;
pub mod packets;
pub mod square;
pub mod synth;

pub use convdec_core::{CoreError, Result};
