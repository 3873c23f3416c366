//! Square functions `g_k = Σ_τ |f_τ|² ∗ ω_τ` and their high/low split.
//!
//! Convolutions run through the DFT, so the discrete Fubini identity
//! `∫g_k = Σ_τ ‖f_τ‖₂²·‖ω_τ‖₁` holds to FFT roundoff; the split
//! `g = g_lo + g_hi` is exact by construction, which makes the pointwise
//! bound `g ≤ |g_hi| + |g_lo|` an identity.

use num_complex::Complex64;

use convdec_core::{CoreError, Result};

use crate::grid::{torus_convolve, GridField};
use crate::mollifier::{Kernel, MollifierSet};

/// `g_k = Σ_τ |f_τ|² ∗ ω_τ` over the boxes of the mollifier set.
///
/// `fields[i]` is the packet field of box `mollifiers.boxes[i]`; the two
/// lists must align. Returns a nonnegative real field (negative roundoff
/// from the DFT is clamped at zero).
pub fn square_function(fields: &[GridField], mollifiers: &MollifierSet) -> Result<GridField> {
    if fields.len() != mollifiers.omega.len() {
        return Err(CoreError::IndexMismatch(format!(
            "{} fields for {} boxes at level {}",
            fields.len(),
            mollifiers.omega.len(),
            mollifiers.level
        )));
    }
    if fields.is_empty() {
        return Err(CoreError::IndexMismatch(
            "square function needs at least one box".into(),
        ));
    }
    let mut g = GridField::zeros(fields[0].m(), fields[0].side())?;
    for (f, omega) in fields.iter().zip(&mollifiers.omega) {
        let term = torus_convolve(&f.abs_sqr(), omega)?;
        g.accumulate(&term)?;
    }
    for s in g.samples_mut() {
        *s = Complex64::new(s.re.max(0.0), 0.0);
    }
    g.freq_support = None;
    Ok(g)
}

/// High/low split: `g_lo = g ∗ η` through the transfer, `g_hi = g − g_lo`.
pub fn hilo_split(g: &GridField, eta: &Kernel) -> Result<(GridField, GridField)> {
    let lo = eta.convolve(g)?;
    let hi = g.sub(&lo)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollifier::eta_kernel;

    #[test]
    fn split_is_exact_and_triangle_holds() {
        let m = 32;
        let side = 4.0;
        let g = GridField::from_modes(
            m,
            side,
            &[
                ([1, 0], Complex64::new(0.5, 0.0)),
                ([0, 0], Complex64::new(1.0, 0.0)),
                ([6, 3], Complex64::new(0.25, 0.1)),
            ],
        )
        .unwrap();
        let eta = eta_kernel(m, side, 0.5).unwrap();
        let (lo, hi) = hilo_split(&g, &eta).unwrap();
        for ((s, l), h) in g.samples().iter().zip(lo.samples()).zip(hi.samples()) {
            assert!(((l + h) - s).norm() < 1e-12);
            assert!(s.norm() <= l.norm() + h.norm() + 1e-12);
        }
    }

    #[test]
    fn low_support_passes_untouched_high_mode_is_killed() {
        let m = 64;
        let side = 4.0;
        let eta = eta_kernel(m, side, 1.0).unwrap();
        // Mode at |ξ| = 0.25 sits inside the plateau B(0, 1).
        let low = GridField::from_modes(m, side, &[([1, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let (_, hi) = hilo_split(&low, &eta).unwrap();
        assert!(hi.max_abs() < 1e-10);
        // Mode at |ξ| = 2.5 sits outside the support B(0, 2).
        let high = GridField::from_modes(m, side, &[([10, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let (lo, _) = hilo_split(&high, &eta).unwrap();
        assert!(lo.max_abs() < 1e-10);
    }
}
