//! Coarse partition into admissible pieces and the certified ideal
//! partition of a normalized convex curve.
//!
//! The coarse recursion s_{p+1} = max{s_p + R^{-1}, sup{s : 𝒜(Γ,[s_p,s]) ≤
//! R^{-2ε}}} cuts [0,1] into at most 3R^{2ε} pieces. Pieces that exhaust
//! the turn budget (class P2) renormalize to admissible curves with
//! cal = R^{2ε} exactly and are decomposed further; forced R^{-1} steps
//! (class P1) are kept whole. The assembled intervals satisfy the bending
//! certificate (J1) ≤ 2R^{-1} and the length floor (J3) ≥ R^{-1}, and the
//! interval count is compared against the measured covering number (J2).

use crate::covering::covering_number;
use crate::curve::ConvexCurve;
use crate::decompose::{admissibility_check, multi_scale, single_scale};
use crate::error::CoreError;
use crate::geometry::Similarity;
use crate::num::{bisect_sup, close_to, snap_to_points, TOL};
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceClass {
    /// Forced R^{-1} step: the turn budget was exhausted immediately.
    P1,
    /// Turn-limited piece: 𝒜(Γ, I_p) ≤ R^{-2ε} up to its endpoint.
    P2,
}

/// One piece of the coarse partition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoarsePiece {
    pub interval: [f64; 2],
    pub class: PieceClass,
    /// Measured 𝒜(Γ, I_p).
    pub turn: f64,
}

/// `eps` must be the reciprocal of an integer ≥ 3.
fn require_unit_fraction(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(CoreError::EpsilonError(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    let inv = 1.0 / eps;
    if (inv - inv.round()).abs() > 1e-9 {
        return Err(CoreError::EpsilonError(format!(
            "1/eps must be an integer, got 1/{eps} = {inv}"
        )));
    }
    Ok(())
}

/// Coarse partition of §2.1: 0 = s_0 < s_1 < ... < s_P = 1 with each step
/// the larger of the forced R^{-1} advance and the turn-budget supremum.
pub fn coarse_partition(curve: &ConvexCurve, r: f64, eps: f64) -> Result<Vec<CoarsePiece>> {
    curve.require_normalized()?;
    require_unit_fraction(eps)?;
    if !(r >= 1.0) {
        return Err(CoreError::DomainError(format!("R must be ≥ 1, got {r}")));
    }
    let rinv = 1.0 / r;
    let turn_bound = r.powf(-2.0 * eps);
    let count_bound = 3.0 * r.powf(2.0 * eps);
    let mut pieces = Vec::new();
    let mut sp = 0.0f64;
    while sp < 1.0 - TOL {
        let pred = |s: f64| curve.turn_raw(sp, s) <= turn_bound;
        let cand = if pred(1.0) {
            1.0
        } else {
            let raw = bisect_sup(sp, 1.0, pred);
            snap_to_points(raw, curve.breakpoints(), TOL, pred)
        };
        let forced = (sp + rinv).min(1.0);
        let (next, class) = if cand > forced {
            (cand, PieceClass::P2)
        } else {
            (forced, PieceClass::P1)
        };
        pieces.push(CoarsePiece {
            interval: [sp, next],
            class,
            turn: curve.turn_raw(sp, next),
        });
        if pieces.len() as f64 > count_bound + 1.0 {
            return Err(CoreError::InvariantViolation(format!(
                "coarse partition exceeded the bound P ≤ 3R^{{2ε}} = {count_bound}"
            )));
        }
        sp = next;
    }
    if pieces.is_empty() {
        return Err(CoreError::DomainError("degenerate domain".into()));
    }
    pieces.last_mut().unwrap().interval[1] = 1.0;
    if pieces.len() as f64 > count_bound * (1.0 + 1e-9) {
        return Err(CoreError::InvariantViolation(format!(
            "P = {} exceeds 3R^{{2ε}} = {count_bound}",
            pieces.len()
        )));
    }
    Ok(pieces)
}

/// Renormalizes a class-P2 piece to an admissible curve.
///
/// The similarity scales the chord to exactly R^{2ε}, rotates the starting
/// right tangent to the horizontal, and moves Γ(s_p) to the origin, so
/// (C2) holds with equality and (C3) exactly.
pub fn rescale_piece(
    curve: &ConvexCurve,
    piece: &CoarsePiece,
    r: f64,
    eps: f64,
) -> Result<(ConvexCurve, Similarity)> {
    if piece.class != PieceClass::P2 {
        return Err(CoreError::NotClassP2(format!(
            "piece [{}, {}] is class P1",
            piece.interval[0], piece.interval[1]
        )));
    }
    let [sp, sq] = piece.interval;
    let cal = curve.chord(sp, sq)?;
    if cal <= 0.0 {
        return Err(CoreError::DomainError(format!(
            "degenerate piece [{sp}, {sq}]"
        )));
    }
    let ratio = r.powf(2.0 * eps) / cal;
    let angle = -curve.slope_r(sp)?.atan();
    let map = Similarity::new(ratio, angle, curve.point(sp)?)?;
    let rescaled = ConvexCurve::rescaled(curve, [sp, sq], map)?;
    let report = admissibility_check(&rescaled, r, eps)?;
    if !report.pass() {
        return Err(CoreError::AdmissibilityFailure(format!(
            "rescaled piece [{sp}, {sq}] fails admissibility: {report:?}"
        )));
    }
    if !close_to(report.chord, r.powf(2.0 * eps), 1e-9) {
        return Err(CoreError::AdmissibilityFailure(format!(
            "(C2) equality violated: cal = {} vs R^2ε = {}",
            report.chord,
            r.powf(2.0 * eps)
        )));
    }
    Ok((rescaled, map))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    /// P1 piece kept whole.
    Case1,
    /// P2 piece with R_p ≥ R^ε, decomposed by the multi-scale algorithm.
    Case2A,
    /// P2 piece with R_p < R^ε, decomposed by one single-scale pass.
    Case2B,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalCert {
    /// (v − t)(γ'_L(v) − γ'_R(t)), certified against 2R^{-1}.
    pub j1: f64,
    /// v − t, certified against R^{-1}.
    pub length: f64,
}

/// Certification report for an ideal partition.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PartitionCert {
    pub j1_max: f64,
    pub j1_bound: f64,
    pub j3_min: f64,
    pub j3_bound: f64,
    pub count: usize,
    /// Measured N(Γ, R^{-1}).
    pub covering: usize,
    /// count / (R^ε · covering); reported, not asserted.
    pub c_eps: f64,
    pub per_interval: Vec<IntervalCert>,
}

/// Certified covering of [0,1] by bending-bounded intervals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealPartition {
    /// Ordered intervals; consecutive entries overlap or abut.
    pub intervals: Vec<[f64; 2]>,
    pub case_tags: Vec<CaseTag>,
    pub r: f64,
    pub eps: f64,
    /// Set when R is below the admissible-regime threshold and the
    /// partition is the single interval [0,1].
    pub trivial: bool,
    /// Number of intervals widened leftward to reach length R^{-1}.
    pub widened: usize,
    pub cert: PartitionCert,
}

/// Threshold below which the construction's lemmas lose their constants.
fn regime_floor(eps: f64) -> f64 {
    2f64.powf(1.0 / eps).max(eps.powf(-1.0 / eps))
}

/// Builds the certified ideal partition of §2.3.
///
/// Below the regime floor R ≥ max(2^{1/ε}, ε^{-1/ε}) the single interval
/// [0,1] is returned with the trivial flag set and certification is
/// report-only. Intervals shorter than R^{-1} (clipped final piece, jumpy
/// right boxes on kinked curves) are widened leftward to length exactly
/// R^{-1}; the covering semantics tolerate the added overlap and the
/// widened (J1) value is at most R^{-1} outright.
pub fn ideal_partition(curve: &ConvexCurve, r: f64, eps: f64) -> Result<IdealPartition> {
    curve.require_normalized()?;
    require_unit_fraction(eps)?;
    if !(r >= 1.0) {
        return Err(CoreError::DomainError(format!("R must be ≥ 1, got {r}")));
    }
    let trivial = r < regime_floor(eps);
    let (mut intervals, case_tags) = if trivial {
        (vec![[0.0, 1.0]], vec![CaseTag::Case1])
    } else {
        build_intervals(curve, r, eps)?
    };
    let rinv = 1.0 / r;
    let mut widened = 0usize;
    if !trivial {
        for iv in &mut intervals {
            if iv[1] - iv[0] < rinv * (1.0 - 1e-12) {
                iv[0] = (iv[1] - rinv).max(0.0);
                widened += 1;
            }
        }
    }
    let covering = covering_number(curve, rinv)?;
    let mut partition = IdealPartition {
        intervals,
        case_tags,
        r,
        eps,
        trivial,
        widened,
        cert: PartitionCert::default(),
    };
    partition.cert = certify_partition(curve, &partition, r, eps, covering)?;
    Ok(partition)
}

/// Case analysis of §2.3 over the coarse pieces.
fn build_intervals(
    curve: &ConvexCurve,
    r: f64,
    eps: f64,
) -> Result<(Vec<[f64; 2]>, Vec<CaseTag>)> {
    let pieces = coarse_partition(curve, r, eps)?;
    let mut intervals = Vec::new();
    let mut tags = Vec::new();
    for piece in &pieces {
        if piece.class == PieceClass::P1 {
            intervals.push(piece.interval);
            tags.push(CaseTag::Case1);
            continue;
        }
        let (gamma_p, _map) = rescale_piece(curve, piece, r, eps)?;
        let cal_p = curve.chord(piece.interval[0], piece.interval[1])?;
        let r_p = cal_p * r.powf(1.0 - 2.0 * eps);
        if r_p >= r.powf(eps) {
            // Case 2A: replace the scale sequence so R_p = R^{k_p ε̃}.
            let steps = r_p.ln() / (eps * r.ln());
            let k_p = steps.ceil().max(1.0) as u32;
            let eps_t = r_p.ln() / (k_p as f64 * r.ln());
            if eps_t < eps / 2.0 - 1e-9 || eps_t > eps + 1e-9 {
                return Err(CoreError::InvariantViolation(format!(
                    "adjusted ε̃ = {eps_t} escaped [ε/2, ε] for ε = {eps}"
                )));
            }
            let tree = multi_scale(&gamma_p, r, eps_t, k_p)?;
            // Leaf base intervals live in gamma_p's base parameters, which
            // the rescaling flattening makes the root curve's parameters.
            for node in &tree.levels[k_p as usize] {
                let lo = curve.base_to_own(node.base_interval[0])?;
                let hi = curve.base_to_own(node.base_interval[1])?;
                intervals.push([lo, hi]);
                tags.push(CaseTag::Case2A);
            }
        } else {
            // Case 2B: one single-scale pass at bending R_p^{-1}. Box
            // intervals are in gamma_p's own abscissa and pull back through
            // its chart.
            let target = (1.0 / r_p).min(1.0);
            for bx in single_scale(&gamma_p, target)? {
                let lo = curve.base_to_own(gamma_p.own_to_base(bx.interval[0])?)?;
                let hi = curve.base_to_own(gamma_p.own_to_base(bx.interval[1])?)?;
                intervals.push([lo, hi]);
                tags.push(CaseTag::Case2B);
            }
        }
    }
    Ok((intervals, tags))
}

/// Verifies (J1)/(J3) per interval, the covering property, and reports
/// the (J2) comparison against the measured covering number.
///
/// Hard failures are suppressed for trivial partitions (the measurements
/// are still reported).
pub fn certify_partition(
    curve: &ConvexCurve,
    partition: &IdealPartition,
    r: f64,
    eps: f64,
    covering: usize,
) -> Result<PartitionCert> {
    if partition.intervals.is_empty() {
        return Err(CoreError::MisalignedPartition("no intervals".into()));
    }
    if partition.intervals.len() != partition.case_tags.len() {
        return Err(CoreError::MisalignedPartition(
            "case tags do not match intervals".into(),
        ));
    }
    let rinv = 1.0 / r;
    let j1_bound = 2.0 * rinv;
    let slack = 1.0 + 1e-9;
    let mut per_interval = Vec::with_capacity(partition.intervals.len());
    let mut j1_max = f64::MIN;
    let mut j3_min = f64::MAX;
    for &[t, v] in &partition.intervals {
        let j1 = (v - t) * (curve.slope_l(v)? - curve.slope_r(t)?);
        let length = v - t;
        j1_max = j1_max.max(j1);
        j3_min = j3_min.min(length);
        if !partition.trivial {
            if j1 > j1_bound * slack {
                return Err(CoreError::CertificationFailure(format!(
                    "(J1) fails on [{t}, {v}]: {j1} > {j1_bound}"
                )));
            }
            if length < rinv * (1.0 - 1e-9) {
                return Err(CoreError::CertificationFailure(format!(
                    "(J3) fails on [{t}, {v}]: length {length} < {rinv}"
                )));
            }
        }
        per_interval.push(IntervalCert { j1, length });
    }
    // Covering property: no gaps from 0 to 1.
    let tiny = 1e-9;
    if partition.intervals[0][0] > tiny {
        return Err(CoreError::MisalignedPartition(format!(
            "first interval starts at {}",
            partition.intervals[0][0]
        )));
    }
    let mut reach = partition.intervals[0][1];
    for &[t, v] in &partition.intervals[1..] {
        if t > reach + tiny {
            return Err(CoreError::MisalignedPartition(format!(
                "gap before [{t}, {v}]: covered only up to {reach}"
            )));
        }
        reach = reach.max(v);
    }
    if reach < 1.0 - tiny {
        return Err(CoreError::MisalignedPartition(format!(
            "intervals cover only up to {reach}"
        )));
    }
    let count = partition.intervals.len();
    let c_eps = count as f64 / (r.powf(eps) * covering.max(1) as f64);
    Ok(PartitionCert {
        j1_max,
        j1_bound,
        j3_min,
        j3_bound: rinv,
        count,
        covering,
        c_eps,
        per_interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::corpus;

    #[test]
    fn line_coarse_partition_is_one_p2_piece() {
        let c = corpus::line();
        let pieces = coarse_partition(&c, 1024.0, 0.25).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].interval, [0.0, 1.0]);
        assert_eq!(pieces[0].class, PieceClass::P2);
        assert_eq!(pieces[0].turn, 0.0);
    }

    #[test]
    fn parabola_coarse_breakpoints_match_tangent_sweep() {
        // γ = t²/2: 𝒜([s,t]) = (t−s)/(1+st), so s_p = tan(p·atan(R^{-2ε}))
        // and the piece count is ⌈(π/4)/atan(R^{-2ε})⌉.
        let c = corpus::parabola();
        let (r, eps) = (2f64.powi(20), 0.1);
        let pieces = coarse_partition(&c, r, eps).unwrap();
        assert_eq!(pieces.len(), 13);
        assert!((pieces[0].interval[1] - 0.0625).abs() < 1e-9);
        assert!((pieces[1].interval[1] - 0.12549019607843137).abs() < 1e-9);
        assert!(pieces.len() as f64 <= 3.0 * r.powf(2.0 * eps));
        for p in &pieces {
            assert_eq!(p.class, PieceClass::P2);
            assert!(p.turn <= r.powf(-2.0 * eps) * (1.0 + 1e-9));
        }
        assert_eq!(pieces.last().unwrap().interval[1], 1.0);
    }

    #[test]
    fn sharp_kink_near_start_forces_p1() {
        // Slope jumps by 0.3 at t = 0.03 < R^{-1}; the first piece is the
        // forced R^{-1} step.
        let c = ConvexCurve::piecewise_linear(vec![0.0, 0.03, 1.0], vec![0.0, 0.0, 0.291])
            .unwrap();
        let pieces = coarse_partition(&c, 16.0, 0.25).unwrap();
        assert_eq!(pieces[0].class, PieceClass::P1);
        assert_eq!(pieces[0].interval, [0.0, 0.0625]);
        assert_eq!(pieces[1].class, PieceClass::P2);
        assert_eq!(pieces[1].interval, [0.0625, 1.0]);
    }

    #[test]
    fn coarse_sup_snaps_to_breakpoints() {
        let c = ConvexCurve::piecewise_linear(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 0.45])
            .unwrap();
        let pieces = coarse_partition(&c, 256.0, 0.25).unwrap();
        assert_eq!(pieces[0].interval, [0.0, 0.5]);
    }

    #[test]
    fn rescale_piece_gives_c2_equality_and_admissibility() {
        let c = corpus::parabola();
        let (r, eps) = (1024.0, 0.2);
        let pieces = coarse_partition(&c, r, eps).unwrap();
        for piece in &pieces {
            let (gp, map) = rescale_piece(&c, piece, r, eps).unwrap();
            let [a, b] = gp.domain();
            assert!(close_to(gp.chord(a, b).unwrap(), r.powf(2.0 * eps), 1e-9));
            assert!(gp.value(a).unwrap().abs() <= 1e-12);
            assert!(gp.slope_r(a).unwrap().abs() <= 1e-12);
            let expect_ratio = r.powf(2.0 * eps)
                / c.chord(piece.interval[0], piece.interval[1]).unwrap();
            assert!(close_to(map.ratio, expect_ratio, 1e-12));
        }
    }

    #[test]
    fn first_parabola_piece_rescales_to_a_parabola() {
        // A piece starting at slope 0 maps by pure scaling, and t²/2
        // rescales to t²/(2 r_p).
        let c = corpus::parabola();
        let (r, eps) = (1024.0, 0.2);
        let pieces = coarse_partition(&c, r, eps).unwrap();
        let (gp, map) = rescale_piece(&c, &pieces[0], r, eps).unwrap();
        assert_eq!(map.angle, 0.0);
        let [a, b] = gp.domain();
        assert!(a.abs() < 1e-12);
        for i in 1..=8 {
            let x = b * i as f64 / 8.0;
            let expect = x * x / (2.0 * map.ratio);
            assert!(
                close_to(gp.value(x).unwrap(), expect, 1e-9),
                "γ_p({x}) = {} vs {expect}",
                gp.value(x).unwrap()
            );
        }
    }

    #[test]
    fn rescale_rejects_p1_pieces() {
        let piece = CoarsePiece {
            interval: [0.0, 0.1],
            class: PieceClass::P1,
            turn: 0.5,
        };
        assert!(matches!(
            rescale_piece(&corpus::parabola(), &piece, 64.0, 0.25),
            Err(CoreError::NotClassP2(_))
        ));
    }

    #[test]
    fn small_r_yields_trivial_partition() {
        let p = ideal_partition(&corpus::parabola(), 64.0, 0.25).unwrap();
        assert!(p.trivial);
        assert_eq!(p.intervals, vec![[0.0, 1.0]]);
        // Report-only: the whole-interval (J1) exceeds 2R^{-1} but the
        // certification does not fail.
        assert!(p.cert.j1_max > p.cert.j1_bound);
    }

    #[test]
    fn parabola_partition_certifies_with_sqrt_count() {
        let (r, eps) = (1024.0, 0.25);
        let p = ideal_partition(&corpus::parabola(), r, eps).unwrap();
        assert!(!p.trivial);
        assert!(p.cert.j1_max <= p.cert.j1_bound * (1.0 + 1e-9));
        assert!(p.cert.j3_min >= (1.0 / r) * (1.0 - 1e-9));
        let root = r.sqrt();
        let n = p.cert.count as f64;
        assert!(
            n >= root / 4.0 && n <= 4.0 * root,
            "count {n} not within factor 4 of {root}"
        );
    }

    #[test]
    fn case_2a_appears_at_eps_one_fifth() {
        // At ε = 1/5 the parabola's pieces have R_p/R^ε = (1+s²)^{3/2}, so
        // the multi-scale case is exercised for every piece past the first.
        let p = ideal_partition(&corpus::parabola(), 4096.0, 0.2).unwrap();
        assert!(!p.trivial);
        assert!(p.case_tags.contains(&CaseTag::Case2A));
        assert!(p.cert.j1_max <= p.cert.j1_bound * (1.0 + 1e-9));
    }

    #[test]
    fn clipped_tail_piece_is_widened() {
        // Kink at 0.999 with slope jump 0.5: the final coarse piece
        // [0.999, 1] is class P1 and shorter than R^{-1} = 1/32, so it
        // widens leftward to length exactly R^{-1}.
        let c = ConvexCurve::piecewise_linear(vec![0.0, 0.999, 1.0], vec![0.0, 0.0, 0.0005])
            .unwrap();
        let (r, eps) = (32.0, 1.0 / 3.0);
        let p = ideal_partition(&c, r, eps).unwrap();
        assert!(!p.trivial);
        assert_eq!(p.widened, 1);
        let last = *p.intervals.last().unwrap();
        assert!(close_to(last[1] - last[0], 1.0 / r, 1e-12));
        assert_eq!(last[1], 1.0);
        assert_eq!(*p.case_tags.last().unwrap(), CaseTag::Case1);
        assert!(p.cert.j3_min >= (1.0 / r) * (1.0 - 1e-9));
        assert!(p.cert.j1_max <= p.cert.j1_bound * (1.0 + 1e-9));
    }

    #[test]
    fn corpus_partitions_certify() {
        for (name, c) in corpus::standard(1024.0) {
            let p = ideal_partition(&c, 1024.0, 0.25).unwrap();
            assert!(!p.trivial, "{name} unexpectedly trivial");
            assert!(
                p.cert.j1_max <= p.cert.j1_bound * (1.0 + 1e-9),
                "{name}: j1 {} vs {}",
                p.cert.j1_max,
                p.cert.j1_bound
            );
            assert!(p.cert.j3_min >= p.cert.j3_bound * (1.0 - 1e-9), "{name}");
            assert!(p.cert.covering >= 1, "{name}");
        }
    }

    #[test]
    fn cantor_partition_has_spread_length_classes() {
        // At R = 3^{2K} the interval lengths spread over several triadic
        // classes (gap pieces vs Cantor-piece fragments).
        let r = 3f64.powi(6);
        let c = corpus::cantor_for_scale(r);
        let p = ideal_partition(&c, r, 0.25).unwrap();
        assert!(!p.trivial);
        let mut classes: Vec<i32> = p
            .intervals
            .iter()
            .map(|iv| (iv[1] - iv[0]).log(3.0).floor() as i32)
            .collect();
        classes.sort_unstable();
        classes.dedup();
        assert!(
            classes.len() >= 2,
            "expected ≥ 2 triadic length classes, got {classes:?}"
        );
    }

    #[test]
    fn hand_built_short_interval_fails_j3() {
        let (r, eps) = (1024.0, 0.25);
        let bad = IdealPartition {
            intervals: vec![[0.0, 1.0 / (r * r)], [1.0 / (r * r), 1.0]],
            case_tags: vec![CaseTag::Case1, CaseTag::Case1],
            r,
            eps,
            trivial: false,
            widened: 0,
            cert: PartitionCert::default(),
        };
        let got = certify_partition(&corpus::parabola(), &bad, r, eps, 1);
        assert!(matches!(got, Err(CoreError::CertificationFailure(_))));
    }

    #[test]
    fn gapped_partition_is_misaligned() {
        let (r, eps) = (16.0, 0.5);
        let bad = IdealPartition {
            intervals: vec![[0.0, 0.3], [0.5, 1.0]],
            case_tags: vec![CaseTag::Case1, CaseTag::Case1],
            r,
            eps,
            trivial: false,
            widened: 0,
            cert: PartitionCert::default(),
        };
        let got = certify_partition(&corpus::line(), &bad, r, eps, 1);
        assert!(matches!(got, Err(CoreError::MisalignedPartition(_))));
    }

    #[test]
    fn non_unit_fraction_eps_is_rejected() {
        assert!(matches!(
            coarse_partition(&corpus::parabola(), 256.0, 0.3),
            Err(CoreError::EpsilonError(_))
        ));
        assert!(matches!(
            ideal_partition(&corpus::parabola(), 256.0, 0.3),
            Err(CoreError::EpsilonError(_))
        ));
        assert!(matches!(
            ideal_partition(&corpus::parabola(), 256.0, 0.5),
            Err(CoreError::EpsilonError(_))
        ));
    }
}
