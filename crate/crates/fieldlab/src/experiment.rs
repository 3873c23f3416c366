//! Decoupling experiments end to end: key-value configuration, seeded
//! wave-packet synthesis, ratio measurement, and CSV rows.
//!
//! Large sweeps avoid materializing every part on the full grid. The whole
//! field is synthesized once per seed at `M = 16R` for its norm; each part
//! is then re-centered in frequency (a modulation, so all `L^p` norms are
//! unchanged) and evaluated on the smallest power-of-two grid that leaves
//! `|f_J|^p` alias-free. For even `p ≤ 6` the small-grid Riemann sum equals
//! the full-grid one exactly; other exponents fall back to the full grid
//! one part at a time.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use convdec_core::curve::{self, ConvexCurve, CurveSpec};
use convdec_core::partition::ideal_partition;
use convdec_core::{CoreError, Result};

use crate::grid::GridField;
use crate::synth::{
    check_power_of_two, claim_columns, column_coefficients, column_mode, grid_size, CoeffModel,
    DEFAULT_GRID_BUDGET,
};

/// Parses "a/b" or a plain decimal.
pub fn parse_fraction(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| CoreError::DomainError(format!("bad fraction numerator in {s:?}")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| CoreError::DomainError(format!("bad fraction denominator in {s:?}")))?;
        if d == 0.0 {
            return Err(CoreError::DomainError(format!("zero denominator in {s:?}")));
        }
        Ok(n / d)
    } else {
        s.parse()
            .map_err(|_| CoreError::DomainError(format!("bad number {s:?}")))
    }
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| CoreError::DomainError(format!("bad {key} entry {tok:?}")))
        })
        .collect()
}

/// A decoupling sweep: which curve, which scales, which exponents, which
/// seeds, and how the coefficients are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Curve reference: a corpus name (`line`, `parabola`, `cubic`,
    /// `cantor`, `piecewise`) or a path to a curve-spec JSON file.
    pub curve: String,
    pub eps: f64,
    pub r_values: Vec<u64>,
    pub p_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub coeff_model: CoeffModel,
    pub grid_budget: usize,
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Keys: `curve`,
    /// `eps`, `R`, `p`, `seeds`, `coeff_model`, `grid_budget`. Unknown keys
    /// are rejected rather than ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut curve: Option<String> = None;
        let mut eps = 0.25;
        let mut r_values: Vec<u64> = Vec::new();
        let mut p_values = vec![6.0];
        let mut seeds = vec![0u64];
        let mut coeff_model = CoeffModel::Unimodular;
        let mut grid_budget = DEFAULT_GRID_BUDGET;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::DomainError(format!("expected key = value, got {line:?}"))
            })?;
            let value = value.trim();
            match key.trim().to_ascii_lowercase().as_str() {
                "curve" => curve = Some(value.to_string()),
                "eps" => eps = parse_fraction(value)?,
                "r" => r_values = parse_list(value, "R")?,
                "p" => {
                    p_values = value
                        .split(',')
                        .map(parse_fraction)
                        .collect::<Result<Vec<f64>>>()?
                }
                "seeds" => seeds = parse_list(value, "seeds")?,
                "coeff_model" => coeff_model = value.parse()?,
                "grid_budget" => {
                    grid_budget = value.parse().map_err(|_| {
                        CoreError::DomainError(format!("bad grid_budget {value:?}"))
                    })?
                }
                other => {
                    return Err(CoreError::DomainError(format!(
                        "unknown config key {other:?}"
                    )))
                }
            }
        }
        let curve =
            curve.ok_or_else(|| CoreError::DomainError("config is missing a curve".into()))?;
        if r_values.is_empty() {
            return Err(CoreError::DomainError("config is missing R".into()));
        }
        if seeds.is_empty() {
            return Err(CoreError::DomainError("config needs at least one seed".into()));
        }
        Ok(Self {
            curve,
            eps,
            r_values,
            p_values,
            seeds,
            coeff_model,
            grid_budget,
        })
    }

    /// Inverse of [`from_text`](Self::from_text), up to whitespace.
    pub fn to_text(&self) -> String {
        let join = |v: &[u64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let eps = {
            let inv = 1.0 / self.eps;
            if (inv - inv.round()).abs() < 1e-12 {
                format!("1/{}", inv.round() as i64)
            } else {
                format!("{}", self.eps)
            }
        };
        format!(
            "curve = {}\neps = {}\nR = {}\np = {}\nseeds = {}\ncoeff_model = {}\ngrid_budget = {}\n",
            self.curve,
            eps,
            join(&self.r_values),
            self.p_values
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            join(&self.seeds),
            self.coeff_model,
            self.grid_budget,
        )
    }
}

/// One measured ratio. `runtime_s` is the wall time from the start of this
/// `(R, seed)` block to the completion of the row, so the first exponent of
/// a block carries the synthesis cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRow {
    pub r: u64,
    pub p: f64,
    pub seed: u64,
    pub ratio: f64,
    pub runtime_s: f64,
}

/// Renders rows as `R,p,seed,ratio,runtime` CSV.
pub fn rows_to_csv(rows: &[RunRow]) -> String {
    let mut out = String::from("R,p,seed,ratio,runtime\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            row.r, row.p, row.seed, row.ratio, row.runtime_s
        ));
    }
    out
}

/// Resolves a curve reference at scale `r`: a corpus name or a curve-spec
/// JSON path. The Cantor curve is refined to the scale it is used at.
pub fn resolve_curve(curve_ref: &str, r: f64) -> Result<ConvexCurve> {
    match curve_ref {
        "line" => Ok(curve::corpus::line()),
        "parabola" => Ok(curve::corpus::parabola()),
        "cubic" => Ok(curve::corpus::cubic()),
        "cantor" => Ok(curve::corpus::cantor_for_scale(r)),
        "piecewise" => Ok(curve::corpus::random_piecewise(0xC0FFEE)),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CoreError::DomainError(format!("cannot read curve file {path:?}: {e}"))
            })?;
            let spec: CurveSpec = serde_json::from_str(&text)
                .map_err(|e| CoreError::DomainError(format!("bad curve spec {path:?}: {e}")))?;
            spec.build()
        }
    }
}

/// The modes of one part, re-centered so the small grid can hold them.
struct PartModes {
    modes: Vec<([i64; 2], Complex64)>,
    span: usize,
}

fn recentered_part(columns: &[u64], all_modes: &[([i64; 2], Complex64)]) -> PartModes {
    let mut modes: Vec<([i64; 2], Complex64)> = columns
        .iter()
        .map(|&j| all_modes[j as usize])
        .collect();
    if modes.is_empty() {
        return PartModes {
            modes,
            span: 0,
        };
    }
    let (mut lo, mut hi) = ([i64::MAX; 2], [i64::MIN; 2]);
    for (n, _) in &modes {
        for a in 0..2 {
            lo[a] = lo[a].min(n[a]);
            hi[a] = hi[a].max(n[a]);
        }
    }
    let mid = [(lo[0] + hi[0]).div_euclid(2), (lo[1] + hi[1]).div_euclid(2)];
    for (n, _) in &mut modes {
        n[0] -= mid[0];
        n[1] -= mid[1];
    }
    let span = ((hi[0] - lo[0]).max(hi[1] - lo[1])) as usize;
    PartModes { modes, span }
}

/// Grid side for an alias-free `|f|^p` Riemann sum over modes of spread
/// `span`, capped at the full resolution.
fn small_grid(span: usize, half_p: usize, m_full: usize) -> usize {
    (half_p * span + 8).max(32).next_power_of_two().min(m_full)
}

/// All rows for one `(R, seed)` block. Equals
/// `decoupling_ratio(synth_wavepackets(..))` for each `p` without holding
/// every part on the full grid at once.
fn seed_rows(
    curve: &ConvexCurve,
    intervals: &[[f64; 2]],
    r: u64,
    seed: u64,
    p_values: &[f64],
    model: CoeffModel,
    budget: usize,
) -> Result<Vec<RunRow>> {
    let start = Instant::now();
    let rf = r as f64;
    check_power_of_two(rf)?;
    let m_full = grid_size(rf, budget)?;
    let r_int = r as usize;
    let coeffs = column_coefficients(r, seed, model);
    let all_modes: Vec<([i64; 2], Complex64)> = (0..=r_int)
        .map(|j| Ok((column_mode(curve, rf, j as u64)?, coeffs[j])))
        .collect::<Result<Vec<_>>>()?;
    let claimed = claim_columns(intervals, rf)?;
    let f = GridField::from_modes(m_full, rf, &all_modes)?;
    let f_norms: Vec<f64> = p_values.iter().map(|&p| f.lp_norm(p)).collect::<Result<_>>()?;
    drop(f);
    let mut part_sums = vec![0.0f64; p_values.len()];
    for columns in &claimed {
        if columns.is_empty() {
            continue;
        }
        let part = recentered_part(columns, &all_modes);
        for (pi, &p) in p_values.iter().enumerate() {
            let half_p = (p / 2.0).round();
            let even = p.is_finite() && (p - 2.0 * half_p).abs() < 1e-12;
            let m = if even && (1.0..=3.0).contains(&half_p) {
                small_grid(part.span, half_p as usize, m_full)
            } else {
                m_full
            };
            let g = GridField::from_modes(m, rf, &part.modes)?;
            let n = g.lp_norm(p)?;
            part_sums[pi] += n * n;
        }
    }
    p_values
        .iter()
        .zip(&f_norms)
        .zip(&part_sums)
        .map(|((&p, &fnorm), &sum)| {
            if sum <= 0.0 {
                return Err(CoreError::DomainError(
                    "all parts vanish; the decoupling ratio is undefined".into(),
                ));
            }
            Ok(RunRow {
                r,
                p,
                seed,
                ratio: fnorm / sum.sqrt(),
                runtime_s: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Runs the sweep: rows ordered by `R`, then seed, then `p`. Seeds of one
/// scale run in parallel (each worker holds one full-size field).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRow>> {
    let mut rows = Vec::new();
    for &r in &config.r_values {
        let rf = r as f64;
        let curve = resolve_curve(&config.curve, rf)?;
        let partition = ideal_partition(&curve, rf, config.eps)?;
        let blocks: Vec<Vec<RunRow>> = config
            .seeds
            .par_iter()
            .map(|&seed| {
                seed_rows(
                    &curve,
                    &partition.intervals,
                    r,
                    seed,
                    &config.p_values,
                    config.coeff_model,
                    config.grid_budget,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(blocks.into_iter().flatten());
    }
    Ok(rows)
}
