//! The decomposition engine: admissibility, the single-scale box
//! algorithm, and the multi-scale box tree.
//!
//! An admissible curve is one the box algorithms accept: small total turn,
//! long chord, flat start at the origin, bending at most one. The
//! single-scale algorithm walks the parameter interval left to right,
//! cutting greedily maximal arcs of bending `target` and boxing each arc
//! in the tangent frame at its left endpoint. The multi-scale algorithm
//! iterates: each box is renormalized to unit width by its similarity
//! `𝓛_τ`, the rescaled arc is again admissible, and the single-scale run
//! on it yields the children.
//!
//! All parameter searches happen on the underlying base curve of the
//! (possibly rescaled) input, where evaluation is direct: the turn is
//! similarity invariant and the chord scales by the map ratio, so no
//! abscissa inversions occur in the hot path.

use crate::curve::ConvexCurve;
use crate::error::CoreError;
use crate::geometry::{BoxKind, CanonicalBox, Similarity, Vec2};
use crate::num::{bisect_inf, bisect_sup, snap_to_points};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Absolute tolerance of the flat-start condition (C3).
pub const C3_TOL: f64 = 1e-12;

/// Relative slack allowed on the admissibility inequalities; absorbs the
/// floating error of evaluating a rescaled curve at a boundary case.
pub const ADMISSIBILITY_SLACK: f64 = 1e-9;

/// Measured admissibility conditions of a curve at parameters `(R, ε)`.
///
/// Over the curve's domain `I = [a, b]`:
/// (C1) turn ≤ R^{−2ε}; (C2) chord ≥ R^{2ε};
/// (C3) γ(a) = γ'_R(a) = 0 within `1e-12`; (C4) bending ≤ 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub r: f64,
    pub epsilon: f64,
    pub turn: f64,
    pub turn_bound: f64,
    pub chord: f64,
    pub chord_bound: f64,
    pub gamma_at_a: f64,
    pub slope_at_a: f64,
    pub bending: f64,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
}

impl AdmissibilityReport {
    pub fn pass(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4
    }

    /// Error with the first failing condition, for operations that require
    /// an admissible input.
    pub fn require(&self) -> Result<()> {
        if self.pass() {
            return Ok(());
        }
        let which = if !self.c1 {
            format!("(C1) turn {} > {}", self.turn, self.turn_bound)
        } else if !self.c2 {
            format!("(C2) chord {} < {}", self.chord, self.chord_bound)
        } else if !self.c3 {
            format!(
                "(C3) γ(a) = {}, γ'_R(a) = {}",
                self.gamma_at_a, self.slope_at_a
            )
        } else {
            format!("(C4) bending {} > 1", self.bending)
        };
        Err(CoreError::NotAdmissible(which))
    }
}

fn check_r_eps(r: f64, eps: f64) -> Result<()> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(CoreError::DomainError(format!("R must be ≥ 1, got {r}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(CoreError::EpsilonError(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    Ok(())
}

/// Measure the four admissibility conditions of `curve` at `(r, eps)`.
pub fn admissibility_check(curve: &ConvexCurve, r: f64, eps: f64) -> Result<AdmissibilityReport> {
    check_r_eps(r, eps)?;
    let [a, b] = curve.domain();
    let turn = curve.turn(a, b)?;
    let chord = curve.chord(a, b)?;
    let bending = chord * turn;
    let gamma_at_a = curve.value(a)?;
    let slope_at_a = curve.slope_r(a)?;
    let turn_bound = r.powf(-2.0 * eps);
    let chord_bound = r.powf(2.0 * eps);
    Ok(AdmissibilityReport {
        r,
        epsilon: eps,
        turn,
        turn_bound,
        chord,
        chord_bound,
        gamma_at_a,
        slope_at_a,
        bending,
        c1: turn <= turn_bound * (1.0 + ADMISSIBILITY_SLACK),
        c2: chord >= chord_bound * (1.0 - ADMISSIBILITY_SLACK),
        c3: gamma_at_a.abs() <= C3_TOL && slope_at_a.abs() <= C3_TOL,
        c4: bending <= 1.0 + ADMISSIBILITY_SLACK,
    })
}

/// Flattened evaluation view of a possibly rescaled curve: the directly
/// evaluable base, the base-parameter window, and the similarity from the
/// base plane into the curve's own plane.
pub(crate) struct View<'c> {
    pub base: &'c ConvexCurve,
    pub lo: f64,
    pub hi: f64,
    pub chart: Similarity,
}

impl<'c> View<'c> {
    pub fn new(curve: &'c ConvexCurve) -> View<'c> {
        match curve.rescaling() {
            Some((base, iv, map)) => View {
                base,
                lo: iv[0],
                hi: iv[1],
                chart: *map,
            },
            None => {
                let [a, b] = curve.domain();
                View {
                    base: curve,
                    lo: a,
                    hi: b,
                    chart: Similarity::IDENTITY,
                }
            }
        }
    }

    /// Same base and window, composed with a further map on the own plane.
    pub fn pushed(&self, outer: &Similarity, lo: f64, hi: f64) -> View<'c> {
        View {
            base: self.base,
            lo,
            hi,
            chart: outer.compose(&self.chart),
        }
    }

    /// Point in the curve's own plane at base parameter `t`.
    pub fn point(&self, t: f64) -> Vec2 {
        self.chart.apply(self.base.raw_point(t))
    }

    /// Own-plane abscissa at base parameter `t`.
    pub fn abscissa(&self, t: f64) -> f64 {
        self.point(t).x
    }

    /// Tangent angle of the own-plane curve at base parameter `t`
    /// (right-sided).
    pub fn angle_r(&self, t: f64) -> f64 {
        self.chart.angle + self.base.raw_slope_r(t).atan()
    }

    /// Bending of the own-plane arc over base parameters `[a, b]`: the turn
    /// is similarity invariant and the chord scales by the chart ratio.
    pub fn bending(&self, a: f64, b: f64) -> f64 {
        self.chart.ratio * self.base.bending_raw(a, b)
    }

    /// Chord of the own-plane arc.
    pub fn chord(&self, a: f64, b: f64) -> f64 {
        self.chart.ratio * self.base.chord_raw(a, b)
    }

    fn snap_tol(&self) -> f64 {
        1e-12 * (self.hi - self.lo)
    }
}

/// One arc of a single-scale run, in base parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RunArc {
    pub kind: BoxKind,
    pub t0: f64,
    pub t1: f64,
}

/// Iteration cap: generous multiple of the proved count bound
/// `#𝒯₁ ≤ 32·target^{−1/2}`.
fn single_scale_cap(target: f64) -> usize {
    (10.0 * (2.0 + 16.0 / target.sqrt())).ceil() as usize + 64
}

/// Core single-scale walk over a view. Greedy maximal left boxes, one
/// final right box anchored at the right endpoint, or one exceptional box
/// when the whole arc already bends at most `target`.
pub(crate) fn run_single_scale(v: &View<'_>, target: f64) -> Result<Vec<RunArc>> {
    let (a, b) = (v.lo, v.hi);
    let mut arcs: Vec<RunArc> = Vec::new();
    if v.bending(a, b) <= target {
        arcs.push(RunArc {
            kind: BoxKind::Exceptional,
            t0: a,
            t1: b,
        });
        return Ok(arcs);
    }
    let breaks = v.base.breakpoints();
    let snap_tol = v.snap_tol();
    // Maximal arc of bending ≤ target starting at s: 𝒲(Γ,[s, ·]) is
    // nondecreasing, zero at s, so bisection finds the supremum; a kink
    // within snapping distance is taken when the bound still holds there.
    let sup_end = |s: f64| -> f64 {
        let u = bisect_sup(s, b, |t| v.bending(s, t) <= target);
        snap_to_points(u, breaks, snap_tol, |p| {
            p >= s && p <= b && v.bending(s, p) <= target
        })
    };
    let mut s = a;
    let mut u = sup_end(a);
    arcs.push(RunArc {
        kind: BoxKind::Left,
        t0: s,
        t1: u,
    });
    let cap = single_scale_cap(target);
    loop {
        if arcs.len() > cap {
            return Err(CoreError::InvariantViolation(format!(
                "single-scale run exceeded {cap} boxes at target {target}"
            )));
        }
        if v.bending(u, b) <= target {
            // Final box: extended backwards from b as far as bending allows.
            let s_last = bisect_inf(a, u, |t| v.bending(t, b) <= target);
            let s_last = snap_to_points(s_last, breaks, snap_tol, |p| {
                p >= a && p <= u && v.bending(p, b) <= target
            });
            arcs.push(RunArc {
                kind: BoxKind::Right,
                t0: s_last,
                t1: b,
            });
            return Ok(arcs);
        }
        s = u;
        u = sup_end(s);
        if !(u > s) {
            return Err(CoreError::InvariantViolation(format!(
                "single-scale run made no progress at base parameter {s}"
            )));
        }
        arcs.push(RunArc {
            kind: BoxKind::Left,
            t0: s,
            t1: u,
        });
    }
}

/// Box an arc in the curve's own plane: anchored at the arc start, framed
/// by the tangent there, length the chord, width as given.
pub(crate) fn arc_box(v: &View<'_>, arc: &RunArc, level: u32, wid: f64) -> CanonicalBox {
    CanonicalBox {
        level,
        kind: arc.kind,
        interval: [v.abscissa(arc.t0), v.abscissa(arc.t1)],
        anchor: v.point(arc.t0),
        frame_angle: v.angle_r(arc.t0),
        len: v.chord(arc.t0, arc.t1),
        wid,
    }
}

/// Single-scale decomposition of an admissible curve at the given target
/// bending: the collection 𝒯₁.
///
/// Box intervals are in the curve's own parameters; each box has width
/// exactly `target_bending` and length the chord of its arc.
pub fn single_scale(curve: &ConvexCurve, target_bending: f64) -> Result<Vec<CanonicalBox>> {
    if !(target_bending > 0.0 && target_bending <= 1.0) {
        return Err(CoreError::DomainError(format!(
            "target bending must lie in (0, 1], got {target_bending}"
        )));
    }
    // Admissibility gate: the algorithm's progress argument needs (C1) and
    // small slopes. The (R, ε) pair is implied by the caller; here we only
    // need the structural conditions, checked at the loosest scale the
    // target allows: turn ≤ target about to be exceeded is fine, but the
    // flat start and bending cap are required.
    let [a, b] = curve.domain();
    let g0 = curve.value(a)?;
    let s0 = curve.slope_r(a)?;
    if g0.abs() > C3_TOL || s0.abs() > C3_TOL {
        return Err(CoreError::NotAdmissible(format!(
            "(C3) γ(a) = {g0}, γ'_R(a) = {s0}"
        )));
    }
    let w = curve.bending(a, b)?;
    if w > 1.0 + ADMISSIBILITY_SLACK {
        return Err(CoreError::NotAdmissible(format!("(C4) bending {w} > 1")));
    }
    let s1 = curve.slope_l(b)?;
    if !(s1.abs() <= 1.0 + ADMISSIBILITY_SLACK) {
        return Err(CoreError::NotAdmissible(format!(
            "slopes must stay within [−1, 1], got γ'_L(b) = {s1}"
        )));
    }
    let v = View::new(curve);
    let arcs = run_single_scale(&v, target_bending)?;
    Ok(arcs
        .iter()
        .map(|arc| arc_box(&v, arc, 1, target_bending))
        .collect())
}

/// Per-box certificate of the multi-scale conditions.
///
/// I(k): `len(τ_k) = cal(Γ, I|τ_k) ≥ R^{2ε}·wid(τ_k)` (that is,
/// `≥ R_{k−2}^{−1}`). II(k): `𝒲(Γ, I|τ_k) ≤ wid(τ_k) = R_k^{−1}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NodeCert {
    pub cal: f64,
    pub bending: f64,
    pub i_bound: f64,
    pub ii_bound: f64,
    pub i_pass: bool,
    pub ii_pass: bool,
}

/// One box of the tree with its parent link, base-parameter interval, and
/// renormalizing similarity.
#[derive(Debug, Clone)]
pub struct BoxNode {
    pub bx: CanonicalBox,
    /// Index into the previous level; `None` for the root.
    pub parent: Option<usize>,
    /// Arc interval in the parameters of the underlying base curve (equal
    /// to `bx.interval` when the decomposed curve is not rescaled).
    pub base_interval: [f64; 2],
    /// `𝓛_τ` in the decomposed curve's plane.
    pub map: Similarity,
    pub cert: NodeCert,
}

/// Multi-scale decomposition tree 𝒯₀..𝒯_N of an admissible curve.
#[derive(Debug, Clone)]
pub struct DecompositionTree {
    pub r: f64,
    pub eps: f64,
    pub n: u32,
    /// `levels[k]` is the collection 𝒯_k; `levels[0]` is the root alone.
    pub levels: Vec<Vec<BoxNode>>,
    /// Set when boxes were replaced by their 2-dilates.
    pub doubled: bool,
}

impl DecompositionTree {
    pub fn node(&self, level: usize, idx: usize) -> &BoxNode {
        &self.levels[level][idx]
    }

    /// Scale `R_k = R^{k·eps}` of level `k`.
    pub fn scale(&self, k: usize) -> f64 {
        self.r.powf(k as f64 * self.eps)
    }

    /// Walk parent links from `(level, idx)` up to `ancestor_level`,
    /// returning the ancestor index.
    pub fn ancestor(&self, level: usize, idx: usize, ancestor_level: usize) -> usize {
        let mut l = level;
        let mut i = idx;
        while l > ancestor_level {
            i = self.levels[l][i].parent.expect("non-root has a parent");
            l -= 1;
        }
        i
    }

    /// Whether `(alevel, aidx)` is an ancestor of (or equal to)
    /// `(level, idx)`.
    pub fn is_ancestor(&self, alevel: usize, aidx: usize, level: usize, idx: usize) -> bool {
        alevel <= level && self.ancestor(level, idx, alevel) == aidx
    }

    /// Replace every box by its 2-dilate (frames and intervals kept),
    /// marking the tree. Child containment then weakens from `2·τ` to
    /// `3·τ` of the parent.
    pub fn into_doubled(mut self) -> DecompositionTree {
        for level in &mut self.levels {
            for node in level.iter_mut() {
                node.bx = node.bx.dilate(2.0);
                node.map = node.bx.normalizing_map();
            }
        }
        self.doubled = true;
        self
    }

    /// Fingerprint for cross-checking that a branch structure was built
    /// from this tree.
    pub fn fingerprint(&self) -> (u64, u32, Vec<usize>) {
        (
            self.r.to_bits() ^ self.eps.to_bits().rotate_left(17),
            self.n,
            self.levels.iter().map(|l| l.len()).collect(),
        )
    }
}

/// Multi-scale algorithm: build the box tree of an admissible curve down
/// to level `n`, with per-level target bending `R^{−ε}`.
///
/// Level 0 is the root box `[a, a + cal(Γ, I)] × [−1, 1]`. Level `k+1`
/// renormalizes each level-`k` box by its similarity, runs the
/// single-scale algorithm on the rescaled arc, and pulls the boxes back.
/// Certificates I(k) and II(k) are checked on every node.
pub fn multi_scale(curve: &ConvexCurve, r: f64, eps: f64, n: u32) -> Result<DecompositionTree> {
    check_r_eps(r, eps)?;
    if n as f64 > 1.0 / eps + 1e-9 {
        return Err(CoreError::EpsilonError(format!(
            "depth {n} exceeds 1/eps = {}",
            1.0 / eps
        )));
    }
    let report = admissibility_check(curve, r, eps)?;
    report.require()?;

    let v0 = View::new(curve);
    let [a, _] = curve.domain();
    let cal_total = v0.chord(v0.lo, v0.hi);
    let target = r.powf(-eps);

    let root_box = CanonicalBox {
        level: 0,
        kind: BoxKind::Root,
        interval: curve.domain(),
        anchor: Vec2::new(a, 0.0),
        frame_angle: 0.0,
        len: cal_total,
        wid: 1.0,
    };
    let root = BoxNode {
        map: root_box.normalizing_map(),
        bx: root_box,
        parent: None,
        base_interval: [v0.lo, v0.hi],
        cert: NodeCert {
            cal: cal_total,
            bending: report.bending,
            i_bound: r.powf(2.0 * eps),
            ii_bound: 1.0,
            i_pass: cal_total >= r.powf(2.0 * eps) * (1.0 - ADMISSIBILITY_SLACK),
            ii_pass: report.bending <= 1.0 + ADMISSIBILITY_SLACK,
        },
    };
    if !root.cert.i_pass || !root.cert.ii_pass {
        return Err(CoreError::InvariantViolation(
            "root certificate failed despite admissibility".into(),
        ));
    }

    let mut levels: Vec<Vec<BoxNode>> = vec![vec![root]];
    let i_factor = r.powf(2.0 * eps);
    for k in 0..n as usize {
        let mut next: Vec<BoxNode> = Vec::new();
        for (pi, parent) in levels[k].iter().enumerate() {
            // Rescaled curve Γ_τ via the parent's similarity; searches stay
            // in base parameters.
            let vt = v0.pushed(&parent.map, parent.base_interval[0], parent.base_interval[1]);
            let arcs = run_single_scale(&vt, target)?;
            let wid_child = target * parent.bx.wid;
            for arc in &arcs {
                // Child box directly in the input curve's plane.
                let bx = CanonicalBox {
                    level: (k + 1) as u32,
                    kind: arc.kind,
                    interval: [v0.abscissa(arc.t0), v0.abscissa(arc.t1)],
                    anchor: v0.point(arc.t0),
                    frame_angle: v0.angle_r(arc.t0),
                    len: v0.chord(arc.t0, arc.t1),
                    wid: wid_child,
                };
                let bending = v0.bending(arc.t0, arc.t1);
                let cert = NodeCert {
                    cal: bx.len,
                    bending,
                    i_bound: i_factor * wid_child,
                    ii_bound: wid_child,
                    i_pass: bx.len >= i_factor * wid_child * (1.0 - ADMISSIBILITY_SLACK),
                    ii_pass: bending <= wid_child * (1.0 + ADMISSIBILITY_SLACK),
                };
                if !cert.i_pass || !cert.ii_pass {
                    return Err(CoreError::InvariantViolation(format!(
                        "level {} box over [{}, {}]: I(k) {} ≥ {} is {}, II(k) {} ≤ {} is {}",
                        k + 1,
                        arc.t0,
                        arc.t1,
                        cert.cal,
                        cert.i_bound,
                        cert.i_pass,
                        cert.bending,
                        cert.ii_bound,
                        cert.ii_pass
                    )));
                }
                next.push(BoxNode {
                    map: bx.normalizing_map(),
                    bx,
                    parent: Some(pi),
                    base_interval: [arc.t0, arc.t1],
                    cert,
                });
            }
        }
        levels.push(next);
    }
    Ok(DecompositionTree {
        r,
        eps,
        n,
        levels,
        doubled: false,
    })
}

/// The rescaled curve `Γ_τ = 𝓛_τ(Γ|_τ)` of a box from a tree of `curve`.
///
/// Verifies that the box actually sits on the curve (anchor, frame,
/// length) before constructing, and that the result is admissible.
pub fn rescaled_curve(curve: &ConvexCurve, bx: &CanonicalBox, r: f64, eps: f64) -> Result<ConvexCurve> {
    let [t, v] = bx.interval;
    let [a, b] = curve.domain();
    let slack = 1e-9 * (b - a);
    if t < a - slack || v > b + slack || !(t < v) {
        return Err(CoreError::BoxCurveMismatch(format!(
            "box interval [{t}, {v}] not inside curve domain [{a}, {b}]"
        )));
    }
    let p = curve.point(t)?;
    let scale = bx.len.max(1e-300);
    if (p - bx.anchor).norm() > 1e-9 * scale {
        return Err(CoreError::BoxCurveMismatch(format!(
            "anchor ({}, {}) is not the curve point ({}, {})",
            bx.anchor.x, bx.anchor.y, p.x, p.y
        )));
    }
    let ang = curve.slope_r(t)?.atan();
    if (ang - bx.frame_angle).abs() > 1e-9 {
        return Err(CoreError::BoxCurveMismatch(format!(
            "frame angle {} does not match tangent angle {ang}",
            bx.frame_angle
        )));
    }
    let cal = curve.chord(t, v)?;
    if (cal - bx.len).abs() > 1e-9 * scale {
        return Err(CoreError::BoxCurveMismatch(format!(
            "box length {} does not match chord {cal}",
            bx.len
        )));
    }
    let out = ConvexCurve::rescaled(curve, bx.interval, bx.normalizing_map())?;
    // The multi-scale certificates guarantee admissibility at the level's
    // scale: width R_k^{-1} gives (C1)/(C2) thresholds R^{-2ε}/R^{2ε}.
    let rep = admissibility_check(&out, r, eps)?;
    rep.require()
        .map_err(|e| CoreError::AdmissibilityFailure(format!("rescaled curve: {e}")))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::corpus;
    use crate::num::{close, close_to};

    /// Admissible parabola: `γ(t) = c·t²` on `[0, L]` with `L = R^{2ε}`
    /// and `c` chosen so the total turn is just under `R^{−2ε}`.
    fn admissible_parabola(r: f64, eps: f64) -> ConvexCurve {
        let l = r.powf(2.0 * eps);
        let c = 0.99 * r.powf(-2.0 * eps) / (2.0 * l);
        ConvexCurve::parabola(c, [0.0, l]).unwrap()
    }

    #[test]
    fn admissibility_of_tuned_parabola() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let rep = admissibility_check(&c, r, eps).unwrap();
        assert!(rep.pass(), "{rep:?}");
        // Turn sits just under the bound.
        assert!(rep.turn > 0.9 * rep.turn_bound);
    }

    #[test]
    fn admissibility_rejects_normalized_parabola() {
        // t²/2 on [0,1]: chord ≈ 1.118 < R^{2ε}, turn 1 > R^{−2ε}.
        let rep = admissibility_check(&corpus::parabola(), 1024.0, 0.2).unwrap();
        assert!(!rep.c1 && !rep.c2);
        assert!(matches!(rep.require(), Err(CoreError::NotAdmissible(_))));
    }

    #[test]
    fn single_scale_exceptional_whole_arc() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        // Bending ≤ 1 always, so target 1 yields one exceptional box.
        let boxes = single_scale(&c, 1.0).unwrap();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].kind, BoxKind::Exceptional);
        let d = c.domain();
        assert!(close(boxes[0].interval[0], d[0]));
        assert!(close(boxes[0].interval[1], d[1]));
    }

    #[test]
    fn single_scale_boxes_have_target_width_and_chord_length() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let target = r.powf(-eps);
        let boxes = single_scale(&c, target).unwrap();
        assert!(boxes.len() >= 2, "nontrivial run expected");
        for b in &boxes {
            assert_eq!(b.wid, target);
            let chord = c.chord(b.interval[0], b.interval[1]).unwrap();
            assert!(close_to(b.len, chord, 1e-9));
            let w = c.bending(b.interval[0], b.interval[1]).unwrap();
            assert!(w <= target * (1.0 + 1e-9), "bending {w} over target {target}");
        }
        // Kinds: left boxes then exactly one right box.
        let kinds: Vec<_> = boxes.iter().map(|b| b.kind).collect();
        assert_eq!(kinds[kinds.len() - 1], BoxKind::Right);
        assert!(kinds[..kinds.len() - 1].iter().all(|k| *k == BoxKind::Left));
        // Count bound for target R^{−ε}.
        assert!(boxes.len() as f64 <= 32.0 * r.powf(eps / 2.0));
    }

    #[test]
    fn single_scale_left_boxes_are_maximal() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let target = r.powf(-eps);
        let boxes = single_scale(&c, target).unwrap();
        let [a, b] = c.domain();
        let eta = 1e-9 * (b - a);
        for bx in boxes.iter().filter(|b| b.kind == BoxKind::Left) {
            let u = bx.interval[1];
            if u + eta <= b {
                let w = c.bending(bx.interval[0], u + eta).unwrap();
                assert!(w > target, "left box not maximal: {w} ≤ {target}");
            }
        }
    }

    #[test]
    fn single_scale_covers_domain_and_interlocks() {
        let (r, eps) = (4096.0, 0.25);
        let c = admissible_parabola(r, eps);
        let target = r.powf(-eps);
        let boxes = single_scale(&c, target).unwrap();
        let [a, b] = c.domain();
        assert!(close(boxes[0].interval[0], a));
        assert!(close(boxes[boxes.len() - 1].interval[1], b));
        for w in boxes.windows(2) {
            // Consecutive arcs abut (left chain) or overlap (final right box).
            assert!(w[1].interval[0] <= w[0].interval[1] + 1e-9 * (b - a));
        }
    }

    #[test]
    fn single_scale_requires_flat_start() {
        // Shifted parabola violates (C3).
        let c = ConvexCurve::polynomial(vec![0.1, 0.0, 1e-4], [0.0, 10.0]).unwrap();
        assert!(matches!(
            single_scale(&c, 0.5),
            Err(CoreError::NotAdmissible(_))
        ));
    }

    #[test]
    fn single_scale_snaps_to_kinks() {
        // Piecewise-linear admissible curve: zero slope, then a kink.
        // Bending concentrates at the kink, so a box boundary lands there.
        let l = 16.0;
        let c = ConvexCurve::piecewise_linear(
            vec![0.0, 6.0, l],
            vec![0.0, 0.0, (l - 6.0) * 0.02],
        )
        .unwrap();
        let target = 0.05;
        let boxes = single_scale(&c, target).unwrap();
        assert!(boxes.iter().any(|b| b.interval.iter().any(|&x| x == 6.0)));
    }

    #[test]
    fn multi_scale_tree_shape_and_certs() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let n = 3;
        let tree = multi_scale(&c, r, eps, n).unwrap();
        assert_eq!(tree.levels.len(), n as usize + 1);
        assert_eq!(tree.levels[0].len(), 1);
        let root = &tree.levels[0][0];
        assert_eq!(root.bx.kind, BoxKind::Root);
        assert!(close(root.bx.len, c.chord(0.0, c.domain()[1]).unwrap()));
        assert_eq!(root.bx.wid, 1.0);
        for (k, level) in tree.levels.iter().enumerate() {
            let count_bound = 32f64.powi(k as i32) * r.powf(k as f64 * eps / 2.0);
            assert!(
                (level.len() as f64) <= count_bound,
                "level {k}: {} boxes > {count_bound}",
                level.len()
            );
            for node in level {
                assert!(node.cert.i_pass && node.cert.ii_pass);
                // Width by construction; eccentricity ≥ R^{2ε}.
                assert!(close_to(node.bx.wid, r.powf(-(k as f64) * eps), 1e-9));
                assert!(node.bx.eccentricity() >= r.powf(2.0 * eps) * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn multi_scale_children_partition_parent_interval() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 3).unwrap();
        for k in 0..tree.levels.len() - 1 {
            for (pi, parent) in tree.levels[k].iter().enumerate() {
                let kids: Vec<_> = tree.levels[k + 1]
                    .iter()
                    .filter(|n| n.parent == Some(pi))
                    .collect();
                assert!(!kids.is_empty(), "every box has children until level N");
                // Children cover the parent's interval.
                assert!(close_to(kids[0].base_interval[0], parent.base_interval[0], 1e-9));
                assert!(close_to(
                    kids[kids.len() - 1].base_interval[1],
                    parent.base_interval[1],
                    1e-9
                ));
                for w in kids.windows(2) {
                    assert!(w[1].base_interval[0] <= w[0].base_interval[1] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn multi_scale_len_window_and_nesting() {
        let (r, eps) = (2048.0, 0.25);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 3).unwrap();
        let shrink = r.powf(-eps);
        for k in 1..tree.levels.len() {
            for node in &tree.levels[k] {
                let parent = &tree.levels[k - 1][node.parent.unwrap()];
                assert!(node.bx.len <= parent.bx.len * (1.0 + 1e-9));
                assert!(node.bx.len >= shrink * parent.bx.len * (1.0 - 1e-9));
                // τ_{k+1} ⊆ 2·τ_k when R ≥ 2^{1/ε} (here 2048 ≥ 16).
                assert!(
                    parent.bx.dilate(2.0).contains_box(&node.bx, 1e-9),
                    "child escapes 2·parent at level {k}"
                );
            }
        }
    }

    #[test]
    fn multi_scale_exceptional_child_is_only_child() {
        // A curve bending well below R^{-ε} everywhere at the top level:
        // the root's child is exceptional, alone, same interval.
        let (r, eps) = (1024.0f64, 0.2);
        let l = r.powf(2.0 * eps);
        let c = ConvexCurve::parabola(1e-7, [0.0, l]).unwrap();
        let tree = multi_scale(&c, r, eps, 2).unwrap();
        let lvl1 = &tree.levels[1];
        if lvl1.len() == 1 && lvl1[0].bx.kind == BoxKind::Exceptional {
            assert!(close(lvl1[0].base_interval[0], 0.0));
            assert!(close(lvl1[0].base_interval[1], l));
        } else {
            panic!("expected a single exceptional child, got {}", lvl1.len());
        }
    }

    #[test]
    fn composition_law_on_corners() {
        // Directly built 𝓛_{τ_{k+1}} equals 𝓛_{σ_{k+1}} ∘ 𝓛_{τ_k}: verify on
        // box corners via an independently rescaled curve.
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 2).unwrap();
        for node in &tree.levels[2] {
            let parent = &tree.levels[1][node.parent.unwrap()];
            let gamma_tau = rescaled_curve(&c, &parent.bx, r, eps).unwrap();
            // The σ box of this child inside Γ_τ's plane.
            let x0 = gamma_tau.base_to_own(node.base_interval[0]).unwrap();
            let x1 = gamma_tau.base_to_own(node.base_interval[1]).unwrap();
            let sigma = CanonicalBox {
                level: 1,
                kind: node.bx.kind,
                interval: [x0, x1],
                anchor: gamma_tau.point(x0).unwrap(),
                frame_angle: gamma_tau.slope_r(x0).unwrap().atan(),
                len: gamma_tau.chord(x0, x1).unwrap(),
                wid: r.powf(-eps),
            };
            let composed = sigma.normalizing_map().compose(&parent.map);
            let direct = node.map;
            for corner in node.bx.corners() {
                let p = composed.apply(corner);
                let q = direct.apply(corner);
                assert!(
                    (p - q).norm() <= 1e-9 * (1.0 + q.norm()),
                    "composition law fails at a corner: ({}, {}) vs ({}, {})",
                    p.x,
                    p.y,
                    q.x,
                    q.y
                );
            }
        }
    }

    #[test]
    fn rescaled_curve_is_admissible_and_flat() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 2).unwrap();
        for node in &tree.levels[1] {
            let g = rescaled_curve(&c, &node.bx, r, eps).unwrap();
            let d = g.domain();
            assert!(close(d[0], 0.0));
            assert!(g.value(0.0).unwrap().abs() <= 1e-9);
            assert!(g.slope_r(0.0).unwrap().abs() <= 1e-9);
            // cal(Γ_τ) = R_k · cal(Γ, I|τ) at k = 1.
            let cal_orig = c
                .chord(node.bx.interval[0], node.bx.interval[1])
                .unwrap();
            let cal_resc = g.chord(d[0], d[1]).unwrap();
            assert!(close_to(cal_resc, cal_orig / node.bx.wid, 1e-9));
        }
    }

    #[test]
    fn rescaled_curve_rejects_foreign_box() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 1).unwrap();
        let mut bx = tree.levels[1][0].bx;
        bx.anchor = bx.anchor + Vec2::new(0.1 * bx.len, 0.0);
        assert!(matches!(
            rescaled_curve(&c, &bx, r, eps),
            Err(CoreError::BoxCurveMismatch(_))
        ));
    }

    #[test]
    fn doubling_flag_and_containment() {
        let (r, eps) = (1024.0, 0.2);
        let c = admissible_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 3).unwrap().into_doubled();
        assert!(tree.doubled);
        for k in 1..tree.levels.len() {
            for node in &tree.levels[k] {
                let parent = &tree.levels[k - 1][node.parent.unwrap()];
                // Amended containment: doubled child within 3·(original
                // parent) = 1.5·(doubled parent).
                assert!(parent.bx.dilate(1.5).contains_box(&node.bx, 1e-9));
            }
        }
    }

    #[test]
    fn tree_depth_capped_by_inverse_eps() {
        let (r, eps) = (1024.0, 0.25);
        let c = admissible_parabola(r, eps);
        assert!(matches!(
            multi_scale(&c, r, eps, 5),
            Err(CoreError::EpsilonError(_))
        ));
    }
}
