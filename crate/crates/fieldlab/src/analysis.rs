//! Spectral inequalities measured on grid fields: the Bernstein ratio for
//! box-supported fields and the local orthogonality constant for families
//! with structured frequency supports.

use std::collections::HashSet;

use convdec_core::geometry::CanonicalBox;
use convdec_core::{CoreError, Result};

use crate::grid::{chunked_sum, GridField};

/// Bernstein ratio `‖f‖_q / (|θ|^{1/p − 1/q} ‖f‖_p)` for a field whose
/// declared frequency support lies in the box `θ` of area at most `r²`.
///
/// For fields honestly concentrated on `θ` the ratio is bounded by a
/// constant independent of the box shape; a ratio far above 1 signals a
/// support violation or a degenerate normalization.
pub fn bernstein_check(
    field: &GridField,
    theta: &CanonicalBox,
    p: f64,
    q: f64,
    r: f64,
) -> Result<f64> {
    if !(p >= 1.0) || !(q >= p) || !q.is_finite() {
        return Err(CoreError::BadExponent(format!(
            "need 1 ≤ p ≤ q < ∞, got p = {p}, q = {q}"
        )));
    }
    let area = theta.len * 2.0 * theta.wid;
    if area > r * r * (1.0 + 1e-9) {
        return Err(CoreError::DomainError(format!(
            "box area {area:.3e} exceeds the stated scale {:.3e}",
            r * r
        )));
    }
    let support = field.freq_support.as_ref().ok_or_else(|| {
        CoreError::SupportViolation("Bernstein check needs a declared frequency support".into())
    })?;
    let side = field.side();
    for n in support {
        let xi = convdec_core::geometry::Vec2::new(n[0] as f64 / side, n[1] as f64 / side);
        if !theta.contains_point(xi, 1e-9) {
            return Err(CoreError::SupportViolation(format!(
                "mode ({}, {}) maps to a frequency outside the box",
                n[0], n[1]
            )));
        }
    }
    let denom = field.lp_norm(p)?;
    if denom == 0.0 {
        return Err(CoreError::DomainError(
            "Bernstein ratio of the zero field is undefined".into(),
        ));
    }
    Ok(field.lp_norm(q)? / (area.powf(1.0 / p - 1.0 / q) * denom))
}

/// Outcome of a local orthogonality measurement.
#[derive(Debug, Clone, Copy)]
pub struct OrthogonalityReport {
    /// `|∫ |Σ_k h_k|² W|`.
    pub lhs: f64,
    /// `L · Σ_k ∫ |h_k|² |W|`.
    pub rhs: f64,
    /// Interaction count `L`: the largest number of parts whose spectrum a
    /// single part can reach through the spectrum of `W`.
    pub overlap: usize,
    /// Measured constant `lhs / rhs`; the lemma makes it at most 1, and the
    /// asserted envelope is 4.
    pub constant: f64,
}

impl OrthogonalityReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-9) + 1e-12
    }
}

/// Measures `∫ |Σ_k h_k|² W` against `L·Σ_k ∫ |h_k|² |W|`, where two parts
/// interact when the difference of their spectra meets the spectrum of `W`.
///
/// All fields must carry declared frequency supports; the supports are used
/// verbatim, so a lying support produces a meaningless report (use
/// [`GridField::support_mismatch`] first when in doubt).
pub fn local_orthogonality_check(
    parts: &[GridField],
    weight: &GridField,
) -> Result<OrthogonalityReport> {
    if parts.is_empty() {
        return Err(CoreError::IndexMismatch(
            "local orthogonality needs at least one part".into(),
        ));
    }
    for part in parts {
        part.require_same_shape(weight)?;
    }
    let w_support = weight.freq_support.as_ref().ok_or_else(|| {
        CoreError::SupportViolation("the weight needs a declared frequency support".into())
    })?;
    let mut supports: Vec<&Vec<[i64; 2]>> = Vec::with_capacity(parts.len());
    let mut support_sets: Vec<HashSet<[i64; 2]>> = Vec::with_capacity(parts.len());
    for part in parts {
        let s = part.freq_support.as_ref().ok_or_else(|| {
            CoreError::SupportViolation("every part needs a declared frequency support".into())
        })?;
        supports.push(s);
        support_sets.push(s.iter().copied().collect());
    }
    // interact(k, k') ⟺ ∃ n ∈ Θ_k, w ∈ supp(Ŵ) with n + w ∈ Θ_{k'}.
    let mut overlap = 0usize;
    for k in 0..parts.len() {
        let mut count = 0usize;
        for set in &support_sets {
            let hit = supports[k].iter().any(|n| {
                w_support
                    .iter()
                    .any(|w| set.contains(&[n[0] + w[0], n[1] + w[1]]))
            });
            if hit {
                count += 1;
            }
        }
        overlap = overlap.max(count);
    }
    let m = parts[0].m();
    let h2 = parts[0].spacing() * parts[0].spacing();
    let mut sum_field = vec![num_complex::Complex64::new(0.0, 0.0); m * m];
    for part in parts {
        for (acc, s) in sum_field.iter_mut().zip(part.samples()) {
            *acc += s;
        }
    }
    let lhs = h2
        * chunked_sum(
            (0..m * m).map(|i| sum_field[i].norm_sqr() * weight.samples()[i].re),
        )
        .hypot(chunked_sum(
            (0..m * m).map(|i| sum_field[i].norm_sqr() * weight.samples()[i].im),
        ));
    let mut part_mass = 0.0;
    for part in parts {
        part_mass += h2
            * chunked_sum(
                (0..m * m).map(|i| part.samples()[i].norm_sqr() * weight.samples()[i].norm()),
            );
    }
    let rhs = overlap as f64 * part_mass;
    let constant = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(OrthogonalityReport {
        lhs,
        rhs,
        overlap,
        constant,
    })
}
