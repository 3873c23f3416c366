//! Periodic sample grids with exact spectral calculus.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * samples: `s(ix, iy) = samples[iy·M + ix]`, position `(ix·h, iy·h)`,
//!   spacing `h = L/M`;
//! * frequency bins: `b(k1, k2) = k2·M + k1`, lattice point `ξ = n/L` with
//!   `n ≡ k (mod M)` and signed representative `n ∈ [−M/2, M/2)`;
//! * modes: `e_n(x) = exp(2πi n·x/L)`, so sampling `e_n` equals the inverse
//!   DFT basis vector of bin `b(n)`.
//!
//! With rustfft's unnormalized transforms, [`GridField::from_modes`] is the
//! exact inverse DFT and [`GridField::coefficients`] the forward DFT divided
//! by `M²`. Torus convolution is `h² · IDFT(DFT(a)·DFT(b)) / M²`; for
//! trigonometric polynomials of combined bandwidth below `M` this is the
//! continuum convolution restricted to the grid, exactly.

use std::collections::{HashMap, HashSet};
use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use convdec_core::{CoreError, Result};

/// Shared FFT plans keyed by (size, inverse). Plans are immutable and
/// thread-safe; the lock guards only the map.
fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = plans.lock().expect("fft plan lock");
    map.entry((m, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(m)
            } else {
                planner.plan_fft_forward(m)
            }
        })
        .clone()
}

/// In-place 2D DFT, rows then columns, unnormalized.
fn fft2(buf: &mut [Complex64], m: usize, inverse: bool) {
    let fft = plan(m, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, m);
    for row in buf.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, m);
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in 0..i {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// Two-level chunked summation; keeps accumulation error near the chunk
/// size times machine epsilon instead of the full grid size.
pub(crate) fn chunked_sum<I: Iterator<Item = f64>>(iter: I) -> f64 {
    let mut total = 0.0;
    let mut chunk = 0.0;
    let mut count = 0usize;
    for v in iter {
        chunk += v;
        count += 1;
        if count == 1 << 15 {
            total += chunk;
            chunk = 0.0;
            count = 0;
        }
    }
    total + chunk
}

/// Signed lattice representative of bin `k` on an `m`-grid, in [−m/2, m/2).
pub fn signed_index(m: usize, k: usize) -> i64 {
    debug_assert!(k < m);
    if 2 * k < m {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// Bin of a signed lattice index.
pub fn bin_of(m: usize, n: i64) -> usize {
    n.rem_euclid(m as i64) as usize
}

/// JSON header accompanying a raw field export.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawHeader {
    m: usize,
    side: f64,
    layout: String,
    dtype: String,
    byte_order: String,
}

/// Complex samples on an `M × M` periodic grid over a side-`L` torus.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    m: usize,
    side: f64,
    samples: Vec<Complex64>,
    /// Signed lattice indices carrying nonzero Fourier coefficients, when
    /// the field was built from explicit modes and the set is exact.
    pub freq_support: Option<Vec<[i64; 2]>>,
}

impl GridField {
    /// Zero field on an `m × m` grid of side `side`.
    pub fn zeros(m: usize, side: f64) -> Result<GridField> {
        if m < 2 {
            return Err(CoreError::DomainError(format!(
                "grid needs at least 2 samples per side, got {m}"
            )));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(CoreError::NonPositiveScale(format!(
                "torus side must be positive and finite, got {side}"
            )));
        }
        Ok(GridField {
            m,
            side,
            samples: vec![Complex64::default(); m * m],
            freq_support: None,
        })
    }

    /// Exact synthesis `f(x) = Σ c_n e_n(x)` from signed lattice modes.
    ///
    /// Repeated indices accumulate. Indices must lie in the representable
    /// band `[−m/2, m/2)` so the declared support names true lattice points
    /// rather than aliases.
    pub fn from_modes(m: usize, side: f64, modes: &[([i64; 2], Complex64)]) -> Result<GridField> {
        let mut field = GridField::zeros(m, side)?;
        let half = m as i64 / 2;
        let mut merged: HashMap<[i64; 2], Complex64> = HashMap::new();
        for &(n, c) in modes {
            if n[0] < -half || n[0] >= (m as i64 + 1) / 2 || n[1] < -half || n[1] >= (m as i64 + 1) / 2 {
                return Err(CoreError::DomainError(format!(
                    "mode ({}, {}) outside the representable band of an {m}-grid",
                    n[0], n[1]
                )));
            }
            *merged.entry(n).or_default() += c;
        }
        let mut support: Vec<[i64; 2]> = Vec::with_capacity(merged.len());
        for (&n, &c) in &merged {
            field.samples[bin_of(m, n[1]) * m + bin_of(m, n[0])] = c;
            if c.norm_sqr() > 0.0 {
                support.push(n);
            }
        }
        support.sort_unstable();
        fft2(&mut field.samples, m, true);
        field.freq_support = Some(support);
        Ok(field)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Grid spacing `h = L/M`.
    pub fn spacing(&self) -> f64 {
        self.side / self.m as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    /// Shape compatibility required by every binary operation.
    pub fn require_same_shape(&self, other: &GridField) -> Result<()> {
        if self.m != other.m || self.side != other.side {
            return Err(CoreError::IndexMismatch(format!(
                "grid shapes differ: {}×{} side {} vs {}×{} side {}",
                self.m, self.m, self.side, other.m, other.m, other.side
            )));
        }
        Ok(())
    }

    /// Normalized Fourier coefficients, bin-indexed like the DFT output.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        fft2(&mut buf, self.m, false);
        let scale = 1.0 / (self.m * self.m) as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Splits the coefficient mass `Σ|c_n|²·L²` by a predicate on the
    /// signed lattice index; returns `(kept, rejected)`.
    pub fn coefficient_mass_where<F: FnMut([i64; 2]) -> bool>(&self, mut keep: F) -> (f64, f64) {
        let coeffs = self.coefficients();
        let l2 = self.side * self.side;
        let mut inside = 0.0;
        let mut outside = 0.0;
        for k2 in 0..self.m {
            for k1 in 0..self.m {
                let mass = coeffs[k2 * self.m + k1].norm_sqr() * l2;
                let n = [signed_index(self.m, k1), signed_index(self.m, k2)];
                if keep(n) {
                    inside += mass;
                } else {
                    outside += mass;
                }
            }
        }
        (inside, outside)
    }

    /// Relative Parseval defect `|Σ|s|²h² − Σ_{n∈support}|c_n|²L²|`,
    /// normalized by `1 + Σ|s|²h²`. Requires a declared support.
    pub fn parseval_gap(&self) -> Result<f64> {
        let support = self.freq_support.as_ref().ok_or_else(|| {
            CoreError::SupportViolation("Parseval check needs a declared frequency support".into())
        })?;
        let h2 = self.spacing() * self.spacing();
        let lhs = chunked_sum(self.samples.iter().map(|s| s.norm_sqr())) * h2;
        let coeffs = self.coefficients();
        let l2 = self.side * self.side;
        let rhs = chunked_sum(
            support
                .iter()
                .map(|n| coeffs[bin_of(self.m, n[1]) * self.m + bin_of(self.m, n[0])].norm_sqr()),
        ) * l2;
        Ok((lhs - rhs).abs() / (1.0 + lhs))
    }

    /// Largest coefficient magnitude outside the declared support, relative
    /// to the largest coefficient overall. Zero for an honest support.
    pub fn support_mismatch(&self) -> Result<f64> {
        let support = self.freq_support.as_ref().ok_or_else(|| {
            CoreError::SupportViolation("support check needs a declared frequency support".into())
        })?;
        let mask: HashSet<[i64; 2]> = support.iter().copied().collect();
        let coeffs = self.coefficients();
        let mut max_all = 0.0f64;
        let mut max_out = 0.0f64;
        for k2 in 0..self.m {
            for k1 in 0..self.m {
                let mag = coeffs[k2 * self.m + k1].norm();
                max_all = max_all.max(mag);
                if !mask.contains(&[signed_index(self.m, k1), signed_index(self.m, k2)]) {
                    max_out = max_out.max(mag);
                }
            }
        }
        if max_all == 0.0 {
            Ok(0.0)
        } else {
            Ok(max_out / max_all)
        }
    }

    /// Sup of `|samples|`.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `∫ f = Σ samples · h²` (exact for trigonometric polynomials: the
    /// grid sum of every nonzero mode vanishes).
    pub fn integral(&self) -> Complex64 {
        let re = chunked_sum(self.samples.iter().map(|s| s.re));
        let im = chunked_sum(self.samples.iter().map(|s| s.im));
        Complex64::new(re, im) * (self.spacing() * self.spacing())
    }

    /// Riemann `L^p` norm `(Σ|s|^p·h²)^{1/p}`; `p = ∞` takes the max.
    ///
    /// Exact for trigonometric polynomials whenever the bandwidth of
    /// `|f|^p` stays below `M`; the synthesis default `M = 16R` covers
    /// `p ≤ 6` for curve-packet fields.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(CoreError::BadExponent(format!(
                "L^p norms need p ≥ 1 or p = ∞, got {p}"
            )));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        let h2 = self.spacing() * self.spacing();
        let sum = if p == 1.0 {
            chunked_sum(self.samples.iter().map(|s| s.norm()))
        } else if p == 2.0 {
            chunked_sum(self.samples.iter().map(|s| s.norm_sqr()))
        } else if p == 4.0 {
            chunked_sum(self.samples.iter().map(|s| {
                let q = s.norm_sqr();
                q * q
            }))
        } else if p == 6.0 {
            chunked_sum(self.samples.iter().map(|s| {
                let q = s.norm_sqr();
                q * q * q
            }))
        } else {
            chunked_sum(self.samples.iter().map(|s| s.norm_sqr().powf(0.5 * p)))
        };
        Ok((sum * h2).powf(1.0 / p))
    }

    /// Pointwise difference; supports are dropped (subtraction does not
    /// preserve exactness of the declared sets).
    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.require_same_shape(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridField {
            m: self.m,
            side: self.side,
            samples,
            freq_support: None,
        })
    }

    /// Adds `other` into `self`, merging declared supports when both exist.
    pub fn accumulate(&mut self, other: &GridField) -> Result<()> {
        self.require_same_shape(other)?;
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        self.freq_support = match (self.freq_support.take(), &other.freq_support) {
            (Some(mut a), Some(b)) => {
                a.extend_from_slice(b);
                a.sort_unstable();
                a.dedup();
                Some(a)
            }
            _ => None,
        };
        Ok(())
    }

    /// `|f|²` as a real field (imaginary parts zero).
    pub fn abs_sqr(&self) -> GridField {
        GridField {
            m: self.m,
            side: self.side,
            samples: self
                .samples
                .iter()
                .map(|s| Complex64::new(s.norm_sqr(), 0.0))
                .collect(),
            freq_support: None,
        }
    }

    /// Writes samples as little-endian `complex64` (f32 real, f32 imaginary)
    /// plus a JSON header. The narrowing to f32 is lossy; `import_raw`
    /// recovers the field to single precision.
    pub fn export_raw(&self, data_path: &Path, header_path: &Path) -> Result<()> {
        let header = RawHeader {
            m: self.m,
            side: self.side,
            layout: "row-major".into(),
            dtype: "complex64".into(),
            byte_order: "little-endian".into(),
        };
        std::fs::write(header_path, serde_json::to_string_pretty(&header)? + "\n")?;
        let mut bytes = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            bytes.extend_from_slice(&(s.re as f32).to_le_bytes());
            bytes.extend_from_slice(&(s.im as f32).to_le_bytes());
        }
        let mut file = std::fs::File::create(data_path)?;
        file.write_all(&bytes)?;
        Ok(())
    }

    /// Reads a field written by [`GridField::export_raw`].
    pub fn import_raw(data_path: &Path, header_path: &Path) -> Result<GridField> {
        let header: RawHeader = serde_json::from_str(&std::fs::read_to_string(header_path)?)?;
        if header.layout != "row-major" || header.dtype != "complex64" || header.byte_order != "little-endian" {
            return Err(CoreError::DomainError(format!(
                "unsupported raw layout {}/{}/{}",
                header.layout, header.dtype, header.byte_order
            )));
        }
        let mut field = GridField::zeros(header.m, header.side)?;
        let mut bytes = Vec::new();
        std::fs::File::open(data_path)?.read_to_end(&mut bytes)?;
        if bytes.len() != header.m * header.m * 8 {
            return Err(CoreError::DomainError(format!(
                "raw data holds {} bytes, header expects {}",
                bytes.len(),
                header.m * header.m * 8
            )));
        }
        for (s, chunk) in field.samples.iter_mut().zip(bytes.chunks_exact(8)) {
            let re = f32::from_le_bytes(chunk[0..4].try_into().expect("4-byte chunk"));
            let im = f32::from_le_bytes(chunk[4..8].try_into().expect("4-byte chunk"));
            *s = Complex64::new(re as f64, im as f64);
        }
        Ok(field)
    }

    /// Forward DFT of the samples, unnormalized; building block for
    /// convolution-style operations in sibling modules.
    pub(crate) fn dft(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        fft2(&mut buf, self.m, false);
        buf
    }

    /// Inverse DFT into a fresh field, dividing by `M²`.
    pub(crate) fn from_dft(m: usize, side: f64, mut buf: Vec<Complex64>) -> GridField {
        fft2(&mut buf, m, true);
        let scale = 1.0 / (m * m) as f64;
        for s in &mut buf {
            *s *= scale;
        }
        GridField {
            m,
            side,
            samples: buf,
            freq_support: None,
        }
    }
}

/// Torus convolution `(a ∗ b)(x) = ∫ a(y) b(x−y) dy`, computed as
/// `h² · IDFT(DFT(a)·DFT(b)) / M²`. Exact on trigonometric polynomials.
pub fn torus_convolve(a: &GridField, b: &GridField) -> Result<GridField> {
    a.require_same_shape(b)?;
    let mut fa = a.dft();
    let fb = b.dft();
    let h2 = a.spacing() * a.spacing();
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y * h2;
    }
    Ok(GridField::from_dft(a.m(), a.side(), fa))
}

/// `‖f‖_p / (Σ_J ‖f_J‖_p²)^{1/2}` for a field split into parts with
/// disjoint declared frequency supports summing back to `f`.
pub fn decoupling_ratio(f: &GridField, parts: &[GridField], p: f64) -> Result<f64> {
    if parts.is_empty() {
        return Err(CoreError::IndexMismatch(
            "decoupling ratio needs at least one part".into(),
        ));
    }
    let mut seen: HashSet<[i64; 2]> = HashSet::new();
    for part in parts {
        f.require_same_shape(part)?;
        let support = part.freq_support.as_ref().ok_or_else(|| {
            CoreError::SupportViolation("decoupling part without declared frequency support".into())
        })?;
        for n in support {
            if !seen.insert(*n) {
                return Err(CoreError::SupportViolation(format!(
                    "parts share the frequency lattice point ({}, {})",
                    n[0], n[1]
                )));
            }
        }
    }
    let scale = 1.0 + f.max_abs();
    let mut worst = 0.0f64;
    for (i, s) in f.samples().iter().enumerate() {
        let total: Complex64 = parts.iter().map(|p| p.samples()[i]).sum();
        worst = worst.max((s - total).norm());
    }
    if worst > 1e-9 * scale {
        return Err(CoreError::PartsDontSum(format!(
            "parts deviate from f by {worst:.3e}, tolerance {:.3e}",
            1e-9 * scale
        )));
    }
    let numerator = f.lp_norm(p)?;
    let mut denom_sq = 0.0;
    for part in parts {
        denom_sq += part.lp_norm(p)?.powi(2);
    }
    if denom_sq == 0.0 {
        return Err(CoreError::DomainError(
            "decoupling ratio undefined: every part vanishes".into(),
        ));
    }
    Ok(numerator / denom_sq.sqrt())
}
