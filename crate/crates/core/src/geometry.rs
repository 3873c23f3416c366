//! Plane primitives: vectors, orientation-preserving similarities, and the
//! canonical slanted boxes produced by the decomposition algorithms.
//!
//! A canonical box is stored as anchor point, frame angle, length, and
//! width. The frame is the rotation by the angle: `t = (cos θ, sin θ)`,
//! `n = (−sin θ, cos θ)`, so `det(t | n) = +1` always. The box is the set
//! `anchor + u·len·t + v·wid·n` for `(u, v) ∈ [0, 1] × [−1, 1]`: it extends
//! only forward along the tangent but symmetrically across the normal.

use crate::error::CoreError;
use crate::num::{close_to, TOL};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2 {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    pub fn scale(self, r: f64) -> Vec2 {
        Vec2 {
            x: r * self.x,
            y: r * self.y,
        }
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Orientation-preserving similarity `ξ ↦ ratio · O(angle) · (ξ − origin)`.
///
/// The group is closed under composition and inverse, so chains of
/// renormalization maps flatten to a single `Similarity`. The ratio is
/// strictly positive; the determinant of the linear part is `ratio² > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub ratio: f64,
    pub angle: f64,
    pub origin: Vec2,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        ratio: 1.0,
        angle: 0.0,
        origin: Vec2::ZERO,
    };

    /// Build with a positivity check on the ratio.
    pub fn new(ratio: f64, angle: f64, origin: Vec2) -> Result<Self> {
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(CoreError::NonPositiveScale(format!(
                "similarity ratio must be positive and finite, got {ratio}"
            )));
        }
        Ok(Similarity {
            ratio,
            angle,
            origin,
        })
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        (p - self.origin).rotate(self.angle).scale(self.ratio)
    }

    /// Apply only the linear part (rotation and scaling, no translation).
    pub fn apply_vector(&self, v: Vec2) -> Vec2 {
        v.rotate(self.angle).scale(self.ratio)
    }

    /// Exact inverse in the same parametric form.
    pub fn inverse(&self) -> Similarity {
        // g(ζ) = (1/r)·O(−θ)·(ζ − p') inverts f(ξ) = r·O(θ)·(ξ − p)
        // when p' = −r·O(θ)·p.
        Similarity {
            ratio: 1.0 / self.ratio,
            angle: -self.angle,
            origin: (-self.origin).rotate(self.angle).scale(self.ratio),
        }
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        // r_o·O_o(r_i·O_i(ξ − p_i) − p_o)
        //   = r_o r_i · O(θ_o + θ_i) · (ξ − p_i − (1/r_i)·O(−θ_i)·p_o).
        Similarity {
            ratio: self.ratio * inner.ratio,
            angle: self.angle + inner.angle,
            origin: inner.origin
                + self
                    .origin
                    .rotate(-inner.angle)
                    .scale(1.0 / inner.ratio),
        }
    }

    /// Transform a line slope by the rotation part. `None` when the image
    /// direction is vertical.
    pub fn apply_slope(&self, m: f64) -> Option<f64> {
        let d = Vec2::new(1.0, m).rotate(self.angle);
        if d.x.abs() <= f64::EPSILON * (1.0 + d.y.abs()) {
            None
        } else {
            Some(d.y / d.x)
        }
    }
}

/// Role of a box inside the single-scale algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    /// Level-zero bounding box of the whole admissible curve.
    Root,
    /// Only box of its run: the whole arc already bends less than the target.
    Exceptional,
    /// Box opened at the running endpoint and extended as far as bending allows.
    Left,
    /// Final box, extended backwards from the right endpoint of the domain.
    Right,
}

/// Slanted box produced by the decomposition algorithms.
///
/// Invariants: `len > 0`, `wid > 0`, frame determinant `+1` by
/// construction. `interval` is the parameter interval of the arc the box
/// was built for, in the decomposed curve's own parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalBox {
    pub level: u32,
    pub kind: BoxKind,
    pub interval: [f64; 2],
    pub anchor: Vec2,
    pub frame_angle: f64,
    pub len: f64,
    pub wid: f64,
}

impl CanonicalBox {
    /// Tangent unit vector of the frame.
    pub fn tangent(&self) -> Vec2 {
        let (s, c) = self.frame_angle.sin_cos();
        Vec2::new(c, s)
    }

    /// Normal unit vector of the frame; `(tangent | normal)` is a rotation.
    pub fn normal(&self) -> Vec2 {
        let (s, c) = self.frame_angle.sin_cos();
        Vec2::new(-s, c)
    }

    /// Center of the box.
    pub fn center(&self) -> Vec2 {
        self.anchor + self.tangent().scale(0.5 * self.len)
    }

    /// Four corners, counterclockwise starting at `anchor − wid·n`.
    pub fn corners(&self) -> [Vec2; 4] {
        let t = self.tangent().scale(self.len);
        let n = self.normal().scale(self.wid);
        [
            self.anchor - n,
            self.anchor + t - n,
            self.anchor + t + n,
            self.anchor + n,
        ]
    }

    /// Frame coordinates of a point: `u` along the tangent from the anchor,
    /// `v` along the normal.
    pub fn frame_coords(&self, p: Vec2) -> (f64, f64) {
        let d = p - self.anchor;
        (d.dot(self.tangent()), d.dot(self.normal()))
    }

    /// Containment of a point with relative slack (default callers pass
    /// `1e-9`): coordinates may exceed the box by `slack` times its size.
    pub fn contains_point(&self, p: Vec2, slack: f64) -> bool {
        let (u, v) = self.frame_coords(p);
        let du = slack * self.len + TOL;
        let dv = slack * self.wid + TOL;
        u >= -du && u <= self.len + du && v.abs() <= self.wid + dv
    }

    /// Containment of another box, corner by corner.
    pub fn contains_box(&self, other: &CanonicalBox, slack: f64) -> bool {
        other.corners().iter().all(|&c| self.contains_point(c, slack))
    }

    /// Dilation about the center: `s · B` keeps the center and frame and
    /// scales both extents by `s`.
    pub fn dilate(&self, s: f64) -> CanonicalBox {
        let c = self.center();
        let len = s * self.len;
        CanonicalBox {
            anchor: c - self.tangent().scale(0.5 * len),
            len,
            wid: s * self.wid,
            ..*self
        }
    }

    /// The renormalization map of the box: sends the anchor to the origin,
    /// the frame to the axes, and scales by `1 / wid`, so the box itself
    /// maps onto `[0, len/wid] × [−1, 1]`.
    pub fn normalizing_map(&self) -> Similarity {
        Similarity {
            ratio: 1.0 / self.wid,
            angle: -self.frame_angle,
            origin: self.anchor,
        }
    }

    /// Eccentricity `len / wid`.
    pub fn eccentricity(&self) -> f64 {
        self.len / self.wid
    }
}

/// Rectangle sandwiching the polar dual of an origin-centered box.
///
/// The true polar of a centrally symmetric rectangle is a rhombus; `rect`
/// is the smallest frame-aligned rectangle containing it, and shrinking
/// `rect` by `sandwich_factor` gives a rectangle contained in it. Callers
/// that need a rectangle (tiling translates) use `rect` and carry the
/// factor through their estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarDual {
    pub rect: CanonicalBox,
    pub sandwich_factor: f64,
}

/// Polar dual of an origin-centered box, as a sandwiched rectangle.
///
/// The box has half-extents `(len/2, wid)` along its frame; the dual
/// rectangle has the reciprocal half-extents `(2/len, 1/wid)` along the
/// same frame. Errors with `NotOriginCentered` when the center is farther
/// than `tol` (absolute) from the origin.
pub fn polar_dual(bx: &CanonicalBox, tol: f64) -> Result<PolarDual> {
    let c = bx.center();
    if c.norm() > tol {
        return Err(CoreError::NotOriginCentered(format!(
            "box center ({}, {}) has norm {} > {tol}",
            c.x,
            c.y,
            c.norm()
        )));
    }
    let half_u = 1.0 / (0.5 * bx.len);
    let half_v = 1.0 / bx.wid;
    // Full tangential extent 2·half_u, half normal extent half_v.
    let len = 2.0 * half_u;
    let rect = CanonicalBox {
        level: bx.level,
        kind: bx.kind,
        interval: bx.interval,
        anchor: Vec2::ZERO - bx.tangent().scale(0.5 * len),
        frame_angle: bx.frame_angle,
        len,
        wid: half_v,
    };
    Ok(PolarDual {
        rect,
        sandwich_factor: 2.0,
    })
}

/// Check that two boxes agree in all geometric fields to relative
/// tolerance `tol` (levels and kinds must match exactly).
pub fn boxes_close(a: &CanonicalBox, b: &CanonicalBox, tol: f64) -> bool {
    a.level == b.level
        && a.kind == b.kind
        && close_to(a.interval[0], b.interval[0], tol)
        && close_to(a.interval[1], b.interval[1], tol)
        && close_to(a.anchor.x, b.anchor.x, tol)
        && close_to(a.anchor.y, b.anchor.y, tol)
        && close_to(a.frame_angle, b.frame_angle, tol)
        && close_to(a.len, b.len, tol)
        && close_to(a.wid, b.wid, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::close;

    fn sample_box() -> CanonicalBox {
        CanonicalBox {
            level: 1,
            kind: BoxKind::Left,
            interval: [0.0, 0.5],
            anchor: Vec2::new(1.0, 2.0),
            frame_angle: 0.3,
            len: 2.0,
            wid: 0.25,
        }
    }

    #[test]
    fn frame_is_a_rotation() {
        let b = sample_box();
        let t = b.tangent();
        let n = b.normal();
        assert!(close(t.norm(), 1.0));
        assert!(close(n.norm(), 1.0));
        assert!(close(t.dot(n), 0.0));
        // det(t | n) = +1.
        assert!(close(t.x * n.y - t.y * n.x, 1.0));
    }

    #[test]
    fn similarity_inverse_roundtrip() {
        let f = Similarity {
            ratio: 2.5,
            angle: 1.1,
            origin: Vec2::new(-0.3, 0.7),
        };
        let g = f.inverse();
        let p = Vec2::new(3.0, -4.0);
        let q = g.apply(f.apply(p));
        assert!(close(q.x, p.x) && close(q.y, p.y));
        let r = f.apply(g.apply(p));
        assert!(close(r.x, p.x) && close(r.y, p.y));
    }

    #[test]
    fn similarity_compose_matches_sequential() {
        let f = Similarity {
            ratio: 0.5,
            angle: -0.4,
            origin: Vec2::new(1.0, 1.0),
        };
        let g = Similarity {
            ratio: 3.0,
            angle: 0.9,
            origin: Vec2::new(-2.0, 0.5),
        };
        let h = f.compose(&g);
        let p = Vec2::new(0.2, -0.7);
        let a = f.apply(g.apply(p));
        let b = h.apply(p);
        assert!(close(a.x, b.x) && close(a.y, b.y));
    }

    #[test]
    fn slope_transform_matches_two_point_image() {
        let f = Similarity {
            ratio: 2.0,
            angle: 0.7,
            origin: Vec2::new(0.3, -0.1),
        };
        let m = 0.45;
        let p0 = Vec2::new(1.0, 2.0);
        let p1 = p0 + Vec2::new(1e-3, 1e-3 * m);
        let q0 = f.apply(p0);
        let q1 = f.apply(p1);
        let expected = (q1.y - q0.y) / (q1.x - q0.x);
        let got = f.apply_slope(m).unwrap();
        assert!(close(got, expected));
    }

    #[test]
    fn normalizing_map_sends_box_to_strip() {
        let b = sample_box();
        let f = b.normalizing_map();
        // Anchor to origin.
        let o = f.apply(b.anchor);
        assert!(close(o.x, 0.0) && close(o.y, 0.0));
        // Corners to [0, len/wid] × [−1, 1].
        let e = b.eccentricity();
        for c in b.corners() {
            let q = f.apply(c);
            assert!(q.x >= -1e-12 && q.x <= e + 1e-9);
            assert!(q.y.abs() <= 1.0 + 1e-12);
        }
        // Far corner exactly at (len/wid, ±1).
        let q = f.apply(b.anchor + b.tangent().scale(b.len) + b.normal().scale(b.wid));
        assert!(close(q.x, e) && close(q.y, 1.0));
    }

    #[test]
    fn dilate_keeps_center() {
        let b = sample_box();
        let d = b.dilate(2.0);
        let c0 = b.center();
        let c1 = d.center();
        assert!(close(c0.x, c1.x) && close(c0.y, c1.y));
        assert!(close(d.len, 2.0 * b.len));
        assert!(close(d.wid, 2.0 * b.wid));
        assert!(d.contains_box(&b, 0.0));
    }

    #[test]
    fn containment_with_slack() {
        let b = sample_box();
        let p = b.anchor + b.tangent().scale(b.len * (1.0 + 5e-10));
        assert!(b.contains_point(p, 1e-9));
        let q = b.anchor + b.normal().scale(b.wid * 1.1);
        assert!(!b.contains_point(q, 1e-9));
    }

    #[test]
    fn polar_dual_of_centered_square() {
        // [−1, 1]² as a canonical box: anchor (−1, 0), len 2, wid 1.
        let b = CanonicalBox {
            level: 0,
            kind: BoxKind::Root,
            interval: [0.0, 1.0],
            anchor: Vec2::new(-1.0, 0.0),
            frame_angle: 0.0,
            len: 2.0,
            wid: 1.0,
        };
        let d = polar_dual(&b, 1e-12).unwrap();
        // Half-extents (1, 1): the dual rectangle is [−1, 1]² again.
        assert!(close(d.rect.len, 2.0));
        assert!(close(d.rect.wid, 1.0));
        let c = d.rect.center();
        assert!(close(c.x, 0.0) && close(c.y, 0.0));
        assert_eq!(d.sandwich_factor, 2.0);
        // It contains the shrunk square [−1/2, 1/2]².
        let half = b.dilate(0.5);
        assert!(d.rect.contains_box(&half, 0.0));
    }

    #[test]
    fn polar_dual_requires_centering() {
        let b = sample_box();
        assert!(matches!(
            polar_dual(&b, 1e-12),
            Err(CoreError::NotOriginCentered(_))
        ));
    }

    #[test]
    fn polar_dual_reciprocal_half_axes() {
        // Box with half-extents (A, B) = (2, 0.25) about the origin.
        let b = CanonicalBox {
            level: 3,
            kind: BoxKind::Left,
            interval: [0.1, 0.2],
            anchor: Vec2::new(-2.0, 0.0).rotate(0.6),
            frame_angle: 0.6,
            len: 4.0,
            wid: 0.25,
        };
        let d = polar_dual(&b, 1e-9).unwrap();
        // Dual half-extents (1/A, 1/B) = (0.5, 4).
        assert!(close(d.rect.len, 1.0));
        assert!(close(d.rect.wid, 4.0));
        assert!(close(d.rect.frame_angle, 0.6));
    }
}
