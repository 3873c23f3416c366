//! Wave-packet synthesis along a convex curve.
//!
//! The test functions of the experiments place one frequency mode per
//! `R⁻¹`-column: at column `j` the mode sits at the lattice point
//! `(j/R, round(R·γ(j/R))/R)`, the nearest lattice point to the curve in
//! the vertical convention. Coefficients come from one seeded stream,
//! drawn in column order, so a field depends only on `(curve, R, seed,
//! model)` and not on how the columns are grouped into intervals.
//!
//! Sparsity is deliberate: one packet per cap realizes the decoupling
//! constant up to bounded factors, and keeps grids linear in `R`.

use num_complex::Complex64;

use convdec_core::curve::ConvexCurve;
use convdec_core::partition::IdealPartition;
use convdec_core::rng::SplitMix64;
use convdec_core::{CoreError, Result};

use crate::grid::GridField;

/// Default per-field memory budget in bytes (512 MiB: a 4096² complex
/// grid fits, an 8192² grid does not).
pub const DEFAULT_GRID_BUDGET: usize = 1 << 29;

/// Coefficient law for synthesized packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffModel {
    /// Unit modulus, uniform random phase.
    Unimodular,
    /// Complex gaussian normalized to unit mean square modulus.
    Gaussian,
}

impl std::str::FromStr for CoeffModel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<CoeffModel> {
        match s {
            "unimodular" => Ok(CoeffModel::Unimodular),
            "gaussian" => Ok(CoeffModel::Gaussian),
            other => Err(CoreError::DomainError(format!(
                "unknown coefficient model {other:?}, expected unimodular or gaussian"
            ))),
        }
    }
}

impl std::fmt::Display for CoeffModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoeffModel::Unimodular => "unimodular",
            CoeffModel::Gaussian => "gaussian",
        })
    }
}

/// Validates the synthesis scale: a finite power of two at least 2.
pub(crate) fn check_power_of_two(r: f64) -> Result<u64> {
    if !r.is_finite() || r < 2.0 || r.fract() != 0.0 || !(r as u64).is_power_of_two() {
        return Err(CoreError::DomainError(format!(
            "synthesis needs R a power of two at least 2 for grid alignment, got {r}"
        )));
    }
    Ok(r as u64)
}

/// Grid size `M = 16R`, guarded by the memory budget in bytes.
pub(crate) fn grid_size(r: f64, budget: usize) -> Result<usize> {
    let r_int = check_power_of_two(r)?;
    let m = 16 * r_int as usize;
    let bytes = m * m * std::mem::size_of::<Complex64>();
    if bytes > budget {
        return Err(CoreError::GridTooLarge(format!(
            "R = {r} needs an {m}×{m} grid ({bytes} bytes), budget is {budget}"
        )));
    }
    Ok(m)
}

/// The seeded coefficient for every column `j ∈ {0, …, R}`, drawn in
/// column order from a single stream.
pub(crate) fn column_coefficients(r_int: u64, seed: u64, model: CoeffModel) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(seed);
    (0..=r_int)
        .map(|_| match model {
            CoeffModel::Unimodular => {
                let (c, s) = rng.unit_phase();
                Complex64::new(c, s)
            }
            CoeffModel::Gaussian => {
                let (re, im) = rng.normal_pair();
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
        })
        .collect()
}

/// Signed lattice mode of column `j`: `(j, round(R·γ(j/R)))`.
pub(crate) fn column_mode(curve: &ConvexCurve, r: f64, j: u64) -> Result<[i64; 2]> {
    let t = j as f64 / r;
    let value = curve.value(t.min(1.0))?;
    Ok([j as i64, (r * value).round() as i64])
}

/// Assigns each column to the first interval containing its abscissa.
/// Intervals may overlap (the ideal partition widens short pieces), so
/// first-match keeps the declared frequency supports disjoint.
pub(crate) fn claim_columns(intervals: &[[f64; 2]], r: f64) -> Result<Vec<Vec<u64>>> {
    let r_int = r as u64;
    let mut claimed = vec![false; r_int as usize + 1];
    let mut owned: Vec<Vec<u64>> = vec![Vec::new(); intervals.len()];
    for (slot, iv) in owned.iter_mut().zip(intervals) {
        let [a, b] = *iv;
        if !(a.is_finite() && b.is_finite()) || a < -1e-9 || b > 1.0 + 1e-9 || b < a {
            return Err(CoreError::MisalignedPartition(format!(
                "interval [{a}, {b}] does not sit inside [0, 1]"
            )));
        }
        let lo = ((a - 1e-12) * r).ceil().max(0.0) as u64;
        let hi = (((b + 1e-12) * r).floor() as u64).min(r_int);
        for j in lo..=hi {
            if !claimed[j as usize] {
                claimed[j as usize] = true;
                slot.push(j);
            }
        }
    }
    Ok(owned)
}

/// Synthesizes `f` and its interval pieces `f_J` over plain intervals.
///
/// All fields share one grid with side `L = R` and `M = 16R` samples per
/// side; `f` is the samplewise sum of the pieces, exactly.
pub fn synth_wavepackets_intervals(
    curve: &ConvexCurve,
    intervals: &[[f64; 2]],
    r: f64,
    seed: u64,
    model: CoeffModel,
    budget: usize,
) -> Result<(GridField, Vec<GridField>)> {
    let m = grid_size(r, budget)?;
    let r_int = r as u64;
    let coeffs = column_coefficients(r_int, seed, model);
    let owned = claim_columns(intervals, r)?;
    let mut parts = Vec::with_capacity(intervals.len());
    let mut f = GridField::zeros(m, r)?;
    f.freq_support = Some(Vec::new());
    for columns in &owned {
        let modes: Vec<([i64; 2], Complex64)> = columns
            .iter()
            .map(|&j| Ok((column_mode(curve, r, j)?, coeffs[j as usize])))
            .collect::<Result<_>>()?;
        let part = GridField::from_modes(m, r, &modes)?;
        f.accumulate(&part)?;
        parts.push(part);
    }
    Ok((f, parts))
}

/// Synthesis over the intervals of an ideal partition.
pub fn synth_wavepackets(
    curve: &ConvexCurve,
    partition: &IdealPartition,
    r: f64,
    seed: u64,
    model: CoeffModel,
    budget: usize,
) -> Result<(GridField, Vec<GridField>)> {
    synth_wavepackets_intervals(curve, &partition.intervals, r, seed, model, budget)
}
