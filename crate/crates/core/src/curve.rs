//! Convex curve families and the arc functionals.
//!
//! Every curve is the graph of a convex function over a closed interval,
//! parametrized by its own abscissa. Convex here means the one-sided
//! slopes exist everywhere, agree except at countably many kinks, and are
//! nondecreasing. Three functionals measure an arc over `[a, b]`:
//!
//! * `turn`: `(γ'_L(b) − γ'_R(a)) / (1 + γ'_L(b) γ'_R(a))`, the tangent of
//!   the angle swept by the tangent line. Exactly invariant under
//!   rotations while the sweep stays below a right angle.
//! * `chord`: Euclidean distance between the endpoints of the arc.
//! * `bending`: `chord · turn`; a similarity of ratio `r` multiplies it
//!   by `r`, since the turn is unchanged and the chord scales.
//!
//! The `Rescaled` kind represents the image of an arc of another curve
//! under an orientation-preserving similarity, reparametrized by its new
//! abscissa. Construction flattens nested rescalings, so a rescaled curve
//! always holds a directly evaluable base plus one similarity.

use crate::error::CoreError;
use crate::geometry::{Similarity, Vec2};
use crate::num::{bisect_sup, close_to, snap_to_points, TOL};
use crate::rng::SplitMix64;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Maximum recursion depth accepted for Cantor-type curves.
pub const MAX_CANTOR_DEPTH: u32 = 40;

/// Depth cap for enumerating Cantor breakpoints (the function is C¹, so
/// breakpoints only guide quadrature; past this depth they are omitted).
const CANTOR_BREAKPOINT_DEPTH: u32 = 14;

#[derive(Debug, Clone)]
enum CurveKind {
    /// `γ(t) = coeff · t²`.
    Parabola { coeff: f64 },
    /// `γ(t) = Σ coeffs[i] · tⁱ`; `deriv` caches the derivative coefficients.
    Polynomial { coeffs: Vec<f64>, deriv: Vec<f64> },
    /// Integrated Cantor staircase: `γ(t) = vscale · Φ_depth(t / hscale)`,
    /// where `Φ_d` integrates the depth-`d` staircase CDF of the Cantor set
    /// with middle gap fraction `gap`.
    Cantor {
        gap: f64,
        depth: u32,
        hscale: f64,
        vscale: f64,
    },
    /// Piecewise-linear interpolant of `(xs[i], ys[i])`; `slopes` caches
    /// segment slopes, nondecreasing by convexity.
    PiecewiseLinear {
        xs: Vec<f64>,
        ys: Vec<f64>,
        slopes: Vec<f64>,
    },
    /// Similarity image of `base` restricted to `base_interval`,
    /// reparametrized by the image abscissa.
    Rescaled {
        base: Box<ConvexCurve>,
        base_interval: [f64; 2],
        map: Similarity,
    },
}

/// Graph of a convex function over a closed interval.
#[derive(Debug, Clone)]
pub struct ConvexCurve {
    kind: CurveKind,
    domain: [f64; 2],
    /// Interior parameters where the slope may jump, sorted ascending.
    breakpoints: Vec<f64>,
}

fn check_domain(domain: [f64; 2]) -> Result<()> {
    let [a, b] = domain;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(CoreError::DomainError(format!(
            "domain [{a}, {b}] must be a finite nondegenerate interval"
        )));
    }
    Ok(())
}

impl ConvexCurve {
    /// `γ(t) = coeff · t²` over `domain`. `coeff ≥ 0` for convexity.
    pub fn parabola(coeff: f64, domain: [f64; 2]) -> Result<Self> {
        check_domain(domain)?;
        if coeff < 0.0 || !coeff.is_finite() {
            return Err(CoreError::NonConvexInput(format!(
                "parabola coefficient {coeff} must be nonnegative"
            )));
        }
        Ok(ConvexCurve {
            kind: CurveKind::Parabola { coeff },
            domain,
            breakpoints: Vec::new(),
        })
    }

    /// `γ(t) = Σ coeffs[i] tⁱ` over `domain`, checked for convexity on a
    /// dense grid of the domain.
    pub fn polynomial(coeffs: Vec<f64>, domain: [f64; 2]) -> Result<Self> {
        check_domain(domain)?;
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::DomainError(
                "polynomial needs at least one finite coefficient".into(),
            ));
        }
        let deriv: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        let curve = ConvexCurve {
            kind: CurveKind::Polynomial { coeffs, deriv },
            domain,
            breakpoints: Vec::new(),
        };
        // Convexity: derivative nondecreasing along a fine grid.
        let n = 1024;
        let mut prev = f64::NEG_INFINITY;
        let scale = curve.max_slope_abs() + 1.0;
        for i in 0..=n {
            let t = domain[0] + (domain[1] - domain[0]) * i as f64 / n as f64;
            let s = curve.raw_slope_r_smooth(t);
            if s < prev - 1e-12 * scale {
                return Err(CoreError::NonConvexInput(format!(
                    "polynomial derivative decreases near t = {t}"
                )));
            }
            prev = prev.max(s);
        }
        Ok(curve)
    }

    /// Integrated Cantor staircase `γ(t) = vscale · Φ_depth(t / hscale)` on
    /// `[0, hscale]`. `gap` is the removed middle fraction (classic set:
    /// `1/3`); `depth` truncates the self-similar recursion, closing the
    /// last level with the uniform CDF so the slope stays continuous.
    pub fn cantor(gap: f64, depth: u32, hscale: f64, vscale: f64) -> Result<Self> {
        if !(gap > 0.0 && gap < 1.0) {
            return Err(CoreError::DomainError(format!(
                "cantor gap {gap} must lie in (0, 1)"
            )));
        }
        if depth > MAX_CANTOR_DEPTH {
            return Err(CoreError::DomainError(format!(
                "cantor depth {depth} exceeds maximum {MAX_CANTOR_DEPTH}"
            )));
        }
        if !(hscale > 0.0) || !(vscale > 0.0) {
            return Err(CoreError::NonPositiveScale(format!(
                "cantor scales ({hscale}, {vscale}) must be positive"
            )));
        }
        let ell = (1.0 - gap) / 2.0;
        let mut pts = Vec::new();
        cantor_endpoints(ell, depth.min(CANTOR_BREAKPOINT_DEPTH), 0.0, 1.0, &mut pts);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let breakpoints = pts
            .into_iter()
            .map(|p| p * hscale)
            .filter(|&p| p > 0.0 && p < hscale)
            .collect();
        Ok(ConvexCurve {
            kind: CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            },
            domain: [0.0, hscale],
            breakpoints,
        })
    }

    /// Piecewise-linear interpolant of the points `(xs[i], ys[i])`.
    /// Requires strictly increasing `xs` and nondecreasing segment slopes.
    pub fn piecewise_linear(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(CoreError::DomainError(format!(
                "need matching xs/ys with at least 2 points, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CoreError::DomainError(format!(
                    "xs must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let slopes: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(xw, yw)| (yw[1] - yw[0]) / (xw[1] - xw[0]))
            .collect();
        let sscale = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
        for w in slopes.windows(2) {
            if w[1] < w[0] - 1e-12 * sscale {
                return Err(CoreError::NonConvexInput(format!(
                    "segment slopes decrease: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let domain = [xs[0], xs[xs.len() - 1]];
        let breakpoints = xs[1..xs.len() - 1].to_vec();
        Ok(ConvexCurve {
            kind: CurveKind::PiecewiseLinear { xs, ys, slopes },
            domain,
            breakpoints,
        })
    }

    /// Image of `base` restricted to `base_interval` under the similarity
    /// `map`, reparametrized by the image abscissa. Nested rescalings are
    /// flattened by composing maps. The image must again be a graph: the
    /// abscissa must be strictly increasing along the arc.
    pub fn rescaled(base: &ConvexCurve, base_interval: [f64; 2], map: Similarity) -> Result<Self> {
        let [a, b] = base_interval;
        let [da, db] = base.domain;
        if !(a >= da - TOL && b <= db + TOL && a < b) {
            return Err(CoreError::DomainError(format!(
                "interval [{a}, {b}] not inside base domain [{da}, {db}]"
            )));
        }
        let a = a.max(da);
        let b = b.min(db);
        // Flatten nested rescalings.
        let (root, root_iv, total): (&ConvexCurve, [f64; 2], Similarity) = match &base.kind {
            CurveKind::Rescaled {
                base: inner,
                map: inner_map,
                ..
            } => {
                let t0 = base.own_to_base(a)?;
                let t1 = base.own_to_base(b)?;
                (inner.as_ref(), [t0, t1], map.compose(inner_map))
            }
            _ => (base, [a, b], map),
        };
        // The image must be a graph over its abscissa: slopes finite and
        // the abscissa increasing across the interval.
        let probes = 17;
        let mut prev_x = f64::NEG_INFINITY;
        for i in 0..=probes {
            let t = root_iv[0] + (root_iv[1] - root_iv[0]) * i as f64 / probes as f64;
            let m = root.raw_slope_r(t);
            if total.apply_slope(m).is_none() {
                return Err(CoreError::NonConvexInput(format!(
                    "image tangent is vertical near base parameter {t}"
                )));
            }
            let x = total.apply(root.raw_point(t)).x;
            if x <= prev_x {
                return Err(CoreError::NonConvexInput(format!(
                    "image abscissa is not increasing near base parameter {t}"
                )));
            }
            prev_x = x;
        }
        let x0 = total.apply(root.raw_point(root_iv[0])).x;
        let x1 = total.apply(root.raw_point(root_iv[1])).x;
        let breakpoints = root
            .breakpoints
            .iter()
            .copied()
            .filter(|&t| t > root_iv[0] && t < root_iv[1])
            .map(|t| total.apply(root.raw_point(t)).x)
            .filter(|&x| x > x0 && x < x1)
            .collect();
        Ok(ConvexCurve {
            kind: CurveKind::Rescaled {
                base: Box::new(root.clone()),
                base_interval: root_iv,
                map: total,
            },
            domain: [x0, x1],
            breakpoints,
        })
    }

    /// Parameter domain `[a, b]`.
    pub fn domain(&self) -> [f64; 2] {
        self.domain
    }

    /// Interior parameters where the slope may jump.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// For rescaled curves, the base curve, its parameter interval, and the
    /// similarity; for direct curves, `None`.
    pub fn rescaling(&self) -> Option<(&ConvexCurve, [f64; 2], &Similarity)> {
        match &self.kind {
            CurveKind::Rescaled {
                base,
                base_interval,
                map,
            } => Some((base.as_ref(), *base_interval, map)),
            _ => None,
        }
    }

    fn check_param(&self, t: f64) -> Result<f64> {
        let [a, b] = self.domain;
        let slack = 1e-9 * (b - a);
        if t < a - slack || t > b + slack {
            return Err(CoreError::DomainError(format!(
                "parameter {t} outside domain [{a}, {b}]"
            )));
        }
        Ok(t.clamp(a, b))
    }

    /// `γ(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.raw_value(self.check_param(t)?))
    }

    /// Point `(t, γ(t))` on the graph.
    pub fn point(&self, t: f64) -> Result<Vec2> {
        Ok(self.raw_point(self.check_param(t)?))
    }

    /// Right slope `γ'_R(t)`; at the right endpoint, the left slope.
    pub fn slope_r(&self, t: f64) -> Result<f64> {
        Ok(self.raw_slope_r(self.check_param(t)?))
    }

    /// Left slope `γ'_L(t)`; at the left endpoint, the right slope.
    pub fn slope_l(&self, t: f64) -> Result<f64> {
        Ok(self.raw_slope_l(self.check_param(t)?))
    }

    pub(crate) fn raw_value(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::Parabola { coeff } => coeff * t * t,
            CurveKind::Polynomial { coeffs, .. } => horner(coeffs, t),
            CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            } => {
                let ell = (1.0 - gap) / 2.0;
                vscale * cantor_integral(ell, *depth, (t / hscale).clamp(0.0, 1.0))
            }
            CurveKind::PiecewiseLinear { xs, ys, slopes } => {
                let i = segment_index(xs, t);
                ys[i] + slopes[i] * (t - xs[i])
            }
            CurveKind::Rescaled { .. } => {
                let tb = self.own_to_base_raw(t);
                self.base_image_point(tb).y
            }
        }
    }

    pub(crate) fn raw_point(&self, t: f64) -> Vec2 {
        Vec2::new(t, self.raw_value(t))
    }

    /// Slope without endpoint checks; `t` must already be in the domain.
    pub(crate) fn raw_slope_r(&self, t: f64) -> f64 {
        if t >= self.domain[1] {
            return self.raw_slope_l(self.domain[1]);
        }
        match &self.kind {
            CurveKind::Parabola { coeff } => 2.0 * coeff * t,
            CurveKind::Polynomial { deriv, .. } => horner(deriv, t),
            CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            } => {
                let ell = (1.0 - gap) / 2.0;
                (vscale / hscale) * cantor_cdf(ell, *depth, (t / hscale).clamp(0.0, 1.0))
            }
            CurveKind::PiecewiseLinear { xs, slopes, .. } => {
                // Segment containing t on the right; at a breakpoint this is
                // the segment that starts there.
                slopes[segment_index(xs, t)]
            }
            CurveKind::Rescaled { base, map, .. } => {
                let tb = self.own_to_base_raw(t);
                map.apply_slope(base.raw_slope_r(tb))
                    .expect("rescaled curve has finite slopes by construction")
            }
        }
    }

    pub(crate) fn raw_slope_l(&self, t: f64) -> f64 {
        if t <= self.domain[0] {
            let a = self.domain[0];
            // Right slope at the left endpoint, bypassing the endpoint
            // reflection above.
            return match &self.kind {
                CurveKind::PiecewiseLinear { slopes, .. } => slopes[0],
                _ => self.raw_slope_r_smooth(a),
            };
        }
        match &self.kind {
            CurveKind::Parabola { coeff } => 2.0 * coeff * t,
            CurveKind::Polynomial { deriv, .. } => horner(deriv, t),
            CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            } => {
                let ell = (1.0 - gap) / 2.0;
                (vscale / hscale) * cantor_cdf(ell, *depth, (t / hscale).clamp(0.0, 1.0))
            }
            CurveKind::PiecewiseLinear { xs, slopes, .. } => {
                // Left slope: the segment ending at or after t; on a
                // breakpoint, the segment before it.
                let i = segment_index(xs, t);
                if t <= xs[i] && i > 0 {
                    slopes[i - 1]
                } else {
                    slopes[i]
                }
            }
            CurveKind::Rescaled { base, map, .. } => {
                let tb = self.own_to_base_raw(t);
                map.apply_slope(base.raw_slope_l(tb))
                    .expect("rescaled curve has finite slopes by construction")
            }
        }
    }

    fn raw_slope_r_smooth(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::Parabola { coeff } => 2.0 * coeff * t,
            CurveKind::Polynomial { deriv, .. } => horner(deriv, t),
            CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            } => {
                let ell = (1.0 - gap) / 2.0;
                (vscale / hscale) * cantor_cdf(ell, *depth, (t / hscale).clamp(0.0, 1.0))
            }
            CurveKind::PiecewiseLinear { slopes, .. } => slopes[0],
            CurveKind::Rescaled { base, map, .. } => {
                let tb = self.own_to_base_raw(t);
                map.apply_slope(base.raw_slope_r(tb))
                    .expect("rescaled curve has finite slopes by construction")
            }
        }
    }

    fn base_image_point(&self, tb: f64) -> Vec2 {
        match &self.kind {
            CurveKind::Rescaled { base, map, .. } => map.apply(base.raw_point(tb)),
            _ => self.raw_point(tb),
        }
    }

    /// For rescaled curves, invert the abscissa map: the base parameter
    /// whose image abscissa equals `x`. Identity for direct curves.
    pub fn own_to_base(&self, x: f64) -> Result<f64> {
        let x = self.check_param(x)?;
        Ok(self.own_to_base_raw(x))
    }

    fn own_to_base_raw(&self, x: f64) -> f64 {
        match &self.kind {
            CurveKind::Rescaled {
                base,
                base_interval,
                ..
            } => {
                let [t0, t1] = *base_interval;
                if x <= self.domain[0] {
                    return t0;
                }
                if x >= self.domain[1] {
                    return t1;
                }
                let t = bisect_sup(t0, t1, |t| self.base_image_point(t).x <= x);
                // Bisection approaches kink preimages from below; land on a
                // base breakpoint exactly so one-sided slopes pick the right
                // side of the kink.
                let span = (self.domain[1] - self.domain[0]).abs();
                snap_to_points(t, &base.breakpoints, 1e-12 * (t1 - t0), |p| {
                    (self.base_image_point(p).x - x).abs() <= 1e-11 * span
                })
            }
            _ => x,
        }
    }

    /// For rescaled curves, the image abscissa of base parameter `t`.
    /// Identity for direct curves.
    pub fn base_to_own(&self, t: f64) -> Result<f64> {
        match &self.kind {
            CurveKind::Rescaled { base_interval, .. } => {
                let [t0, t1] = *base_interval;
                let slack = 1e-9 * (t1 - t0);
                if t < t0 - slack || t > t1 + slack {
                    return Err(CoreError::DomainError(format!(
                        "base parameter {t} outside [{t0}, {t1}]"
                    )));
                }
                Ok(self.base_image_point(t.clamp(t0, t1)).x)
            }
            _ => self.check_param(t),
        }
    }

    fn check_interval(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let a = self.check_param(a)?;
        let b = self.check_param(b)?;
        if a > b {
            return Err(CoreError::DomainError(format!(
                "interval [{a}, {b}] is reversed"
            )));
        }
        Ok((a, b))
    }

    /// Turn `𝒜(Γ, [a, b])`: tangent of the angle swept by the tangent
    /// direction. Zero on degenerate intervals; `+∞` when the sweep
    /// reaches a right angle.
    pub fn turn(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = self.check_interval(a, b)?;
        if a == b {
            return Ok(0.0);
        }
        Ok(turn_from_slopes(self.raw_slope_r(a), self.raw_slope_l(b)))
    }

    /// Chord `cal(Γ, [a, b])`: Euclidean distance between the endpoints.
    pub fn chord(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = self.check_interval(a, b)?;
        Ok((self.raw_point(b) - self.raw_point(a)).norm())
    }

    /// Bending `𝒲(Γ, [a, b]) = chord × turn`; scales by the ratio under
    /// similarities.
    pub fn bending(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = self.check_interval(a, b)?;
        if a == b {
            return Ok(0.0);
        }
        let t = turn_from_slopes(self.raw_slope_r(a), self.raw_slope_l(b));
        Ok(t * (self.raw_point(b) - self.raw_point(a)).norm())
    }

    /// Normalization predicate: domain `[0, 1]`, `γ(0) = 0`, and
    /// `0 ≤ γ'_R(0) ≤ γ'_L(1) ≤ 1` (with tolerance `1e-12`).
    pub fn is_normalized(&self) -> bool {
        let [a, b] = self.domain;
        if !(close_to(a, 0.0, TOL) && close_to(b, 1.0, TOL)) {
            return false;
        }
        if self.raw_value(a).abs() > TOL {
            return false;
        }
        let s0 = self.raw_slope_r(a);
        let s1 = self.raw_slope_l(b);
        s0 >= -TOL && s1 >= s0 - TOL && s1 <= 1.0 + TOL
    }

    /// Detailed normalization check for error reporting.
    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            let [a, b] = self.domain;
            Err(CoreError::NotNormalized(format!(
                "domain [{a}, {b}], γ(a) = {}, γ'_R(a) = {}, γ'_L(b) = {}",
                self.raw_value(a),
                self.raw_slope_r(a),
                self.raw_slope_l(b)
            )))
        }
    }

    /// Largest absolute slope over the domain (attained at an endpoint by
    /// monotonicity of the slopes).
    pub fn max_slope_abs(&self) -> f64 {
        let [a, b] = self.domain;
        self.raw_slope_r(a).abs().max(self.raw_slope_l(b).abs())
    }

    /// Turn without domain checks; `a ≤ b` inside the domain.
    pub(crate) fn turn_raw(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        turn_from_slopes(self.raw_slope_r(a), self.raw_slope_l(b))
    }

    /// Chord without domain checks.
    pub(crate) fn chord_raw(&self, a: f64, b: f64) -> f64 {
        (self.raw_point(b) - self.raw_point(a)).norm()
    }

    /// Bending without domain checks.
    pub(crate) fn bending_raw(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        self.turn_raw(a, b) * self.chord_raw(a, b)
    }
}

/// Turn from one-sided slopes; `+∞` once the sweep reaches a right angle.
pub fn turn_from_slopes(m_start: f64, m_end: f64) -> f64 {
    let denom = 1.0 + m_start * m_end;
    if denom <= 1e-300 {
        return f64::INFINITY;
    }
    (m_end - m_start) / denom
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Index of the segment containing `t`: largest `i` with `xs[i] ≤ t`,
/// capped at the final segment.
fn segment_index(xs: &[f64], t: f64) -> usize {
    let n = xs.len();
    let i = xs.partition_point(|&x| x <= t);
    i.saturating_sub(1).min(n - 2)
}

/// Depth-`d` Cantor staircase CDF with piece length `ell` per side,
/// closed at the last level by the uniform CDF.
fn cantor_cdf(ell: f64, depth: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if depth == 0 {
        return x;
    }
    if x < ell {
        0.5 * cantor_cdf(ell, depth - 1, x / ell)
    } else if x <= 1.0 - ell {
        0.5
    } else {
        0.5 + 0.5 * cantor_cdf(ell, depth - 1, (x - (1.0 - ell)) / ell)
    }
}

/// Integral of [`cantor_cdf`] from 0 to `x`; `Φ_d(1) = 1/2` at every depth.
fn cantor_integral(ell: f64, depth: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let x = x.min(1.0);
    if depth == 0 {
        return 0.5 * x * x;
    }
    if x < ell {
        0.5 * ell * cantor_integral(ell, depth - 1, x / ell)
    } else if x <= 1.0 - ell {
        0.25 * ell + 0.5 * (x - ell)
    } else {
        let base = 0.25 * ell + 0.5 * (1.0 - 2.0 * ell);
        let u = x - (1.0 - ell);
        base + 0.5 * u + 0.5 * ell * cantor_integral(ell, depth - 1, u / ell)
    }
}

/// All piece endpoints of the depth-`d` Cantor construction inside `[a, b]`.
fn cantor_endpoints(ell: f64, depth: u32, a: f64, b: f64, out: &mut Vec<f64>) {
    out.push(a);
    out.push(b);
    if depth == 0 {
        return;
    }
    let w = b - a;
    cantor_endpoints(ell, depth - 1, a, a + ell * w, out);
    cantor_endpoints(ell, depth - 1, b - ell * w, b, out);
}

/// Interchange format for curves.
///
/// `params` is kind-specific; `normalized` is verified on load when set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub kind: String,
    pub params: serde_json::Value,
    pub domain: [f64; 2],
    #[serde(default)]
    pub normalized: bool,
}

impl CurveSpec {
    /// Build the curve this spec describes. Domain must match the natural
    /// domain for kinds that fix one (`cantor`, `samples`).
    pub fn build(&self) -> Result<ConvexCurve> {
        let p = &self.params;
        let get = |name: &str| -> Result<f64> {
            p.get(name)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| CoreError::DomainError(format!("missing numeric param '{name}'")))
        };
        let get_vec = |name: &str| -> Result<Vec<f64>> {
            p.get(name)
                .and_then(|v| v.as_array())
                .map(|a| a.iter().filter_map(|x| x.as_f64()).collect::<Vec<_>>())
                .ok_or_else(|| CoreError::DomainError(format!("missing array param '{name}'")))
        };
        let curve = match self.kind.as_str() {
            "parabola" => ConvexCurve::parabola(get("coeff")?, self.domain)?,
            "polynomial" => ConvexCurve::polynomial(get_vec("coeffs")?, self.domain)?,
            "cantor" => {
                let gap = get("gap")?;
                let depth = get("depth")? as u32;
                let hscale = get("hscale").unwrap_or(1.0);
                let vscale = get("vscale").unwrap_or(1.0);
                let c = ConvexCurve::cantor(gap, depth, hscale, vscale)?;
                if !close_to(self.domain[0], 0.0, TOL) || !close_to(self.domain[1], hscale, TOL) {
                    return Err(CoreError::DomainError(format!(
                        "cantor domain must be [0, {hscale}], got [{}, {}]",
                        self.domain[0], self.domain[1]
                    )));
                }
                c
            }
            "samples" => {
                let xs = get_vec("xs")?;
                let ys = get_vec("ys")?;
                let c = ConvexCurve::piecewise_linear(xs, ys)?;
                let d = c.domain();
                if !close_to(self.domain[0], d[0], TOL) || !close_to(self.domain[1], d[1], TOL) {
                    return Err(CoreError::DomainError(format!(
                        "samples domain must be [{}, {}], got [{}, {}]",
                        d[0], d[1], self.domain[0], self.domain[1]
                    )));
                }
                c
            }
            other => {
                return Err(CoreError::UnknownReportKind(format!(
                    "curve kind '{other}'"
                )))
            }
        };
        if self.normalized {
            curve.require_normalized()?;
        }
        Ok(curve)
    }

    /// Spec describing `curve`. Rescaled curves are engine products and
    /// have no interchange form.
    pub fn from_curve(curve: &ConvexCurve) -> Result<CurveSpec> {
        let (kind, params) = match &curve.kind {
            CurveKind::Parabola { coeff } => (
                "parabola",
                serde_json::json!({ "coeff": coeff }),
            ),
            CurveKind::Polynomial { coeffs, .. } => (
                "polynomial",
                serde_json::json!({ "coeffs": coeffs }),
            ),
            CurveKind::Cantor {
                gap,
                depth,
                hscale,
                vscale,
            } => (
                "cantor",
                serde_json::json!({
                    "gap": gap, "depth": depth, "hscale": hscale, "vscale": vscale
                }),
            ),
            CurveKind::PiecewiseLinear { xs, ys, .. } => (
                "samples",
                serde_json::json!({ "xs": xs, "ys": ys }),
            ),
            CurveKind::Rescaled { .. } => {
                return Err(CoreError::DomainError(
                    "rescaled curves have no interchange form".into(),
                ))
            }
        };
        Ok(CurveSpec {
            kind: kind.to_string(),
            params,
            domain: curve.domain,
            normalized: curve.is_normalized(),
        })
    }
}

/// The reference curves used by the verification suite.
pub mod corpus {
    use super::*;

    /// Flat line `γ(t) = 0` on `[0, 1]`.
    pub fn line() -> ConvexCurve {
        ConvexCurve::polynomial(vec![0.0], [0.0, 1.0]).expect("line is convex")
    }

    /// Normalized parabola `γ(t) = t²/2` on `[0, 1]`.
    pub fn parabola() -> ConvexCurve {
        ConvexCurve::parabola(0.5, [0.0, 1.0]).expect("parabola is convex")
    }

    /// Normalized cubic `γ(t) = t³/3` on `[0, 1]`.
    pub fn cubic() -> ConvexCurve {
        ConvexCurve::polynomial(vec![0.0, 0.0, 0.0, 1.0 / 3.0], [0.0, 1.0])
            .expect("cubic is convex on [0, 1]")
    }

    /// Integrated middle-thirds Cantor staircase at the depth suited to
    /// scale `r`: `⌈log₃ r⌉ + 4`.
    pub fn cantor_for_scale(r: f64) -> ConvexCurve {
        let depth = (r.ln() / 3f64.ln()).ceil() as u32 + 4;
        ConvexCurve::cantor(1.0 / 3.0, depth.min(MAX_CANTOR_DEPTH), 1.0, 1.0)
            .expect("cantor staircase is convex")
    }

    /// Random normalized piecewise-linear curve: 12 segments, slopes
    /// nondecreasing in `[0, 1]`, breakpoints jittered but separated.
    pub fn random_piecewise(seed: u64) -> ConvexCurve {
        let mut rng = SplitMix64::new(seed);
        let segs = 12usize;
        let mut xs = Vec::with_capacity(segs + 1);
        xs.push(0.0);
        for i in 1..segs {
            // Jitter inside the i-th cell, keeping gaps of at least 0.2/segs.
            let u = rng.next_f64();
            xs.push((i as f64 + 0.8 * (u - 0.5)) / segs as f64);
        }
        xs.push(1.0);
        let mut slopes: Vec<f64> = (0..segs).map(|_| rng.next_f64()).collect();
        slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ys = Vec::with_capacity(segs + 1);
        ys.push(0.0);
        for i in 0..segs {
            let y = ys[i] + slopes[i] * (xs[i + 1] - xs[i]);
            ys.push(y);
        }
        ConvexCurve::piecewise_linear(xs, ys).expect("sorted slopes give a convex interpolant")
    }

    /// Names and curves of the whole corpus at scale `r`, in report order.
    pub fn standard(r: f64) -> Vec<(&'static str, ConvexCurve)> {
        vec![
            ("line", line()),
            ("parabola", parabola()),
            ("cubic", cubic()),
            ("cantor", cantor_for_scale(r)),
            ("piecewise", random_piecewise(0xC0FFEE)),
        ]
    }
}
