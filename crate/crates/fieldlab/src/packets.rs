//! Wave-packet tilings, the `ψ_T` partition of unity, threshold pruning,
//! and the broad/narrow inequality.
//!
//! The tiles of a frequency box `τ` are the lattice translates of its polar
//! dual rectangle `τ*`: steps `u` along the dual tangent (full length) and
//! `v` along the dual normal (full width). In tile coordinates
//! `c(x) = [u v]^{−1}·x` the cutoff is the product step
//! `ζ(c) = ζ₁(c₁)ζ₁(c₂)`, equal to 1 on `[−1/2, 1/2]²` and 0 outside
//! `(−1, 1)²`, so `1 ≤ Σ_n ζ(c − n) ≤ 9` everywhere and
//! `ψ_T = ζ / Σ_n ζ(· − n)` is a smooth partition of unity.
//!
//! Only close tiles are kept: those meeting `10B_R`, the concentric square
//! of side `10L` around the domain square (plus, for degenerate duals wider
//! than `9L`, any tile whose double can reach the domain). Every tile active
//! at a grid point is kept, so the kept family still sums to 1 on the grid.

use num_complex::Complex64;

use convdec_core::geometry::{polar_dual, CanonicalBox, Vec2};
use convdec_core::{CoreError, Result};

use crate::grid::GridField;
use crate::mollifier::centered_copy;

/// One tile: its lattice index and plane center `index·(u, v)`.
#[derive(Debug, Clone, Copy)]
pub struct Tile {
    pub index: [i64; 2],
    pub center: Vec2,
}

/// Lattice of tiles congruent to the polar dual `τ*` of a frequency box.
#[derive(Debug, Clone)]
pub struct Tiling {
    /// Origin-centered dual rectangle `τ*`.
    pub dual: CanonicalBox,
    /// Close tiles: those meeting `10B_R` (or able to reach the domain).
    pub tiles: Vec<Tile>,
    pub domain_side: f64,
    u: Vec2,
    v: Vec2,
    inv: [[f64; 2]; 2],
    index_set: std::collections::HashSet<[i64; 2]>,
}

/// One-dimensional cutoff: 1 on `|t| ≤ 1/2`, 0 on `|t| ≥ 1`, a `C⁶`
/// degree-13 spline step in between. Deliberately smoother than the
/// mollifier bump: packet spectra must decay fast enough that pruned
/// fields keep their coefficient mass essentially inside the dilated box.
fn zeta1(t: f64) -> f64 {
    let s = 2.0 * t.abs();
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let t = 2.0 - s;
        t.powi(7)
            * (1716.0
                + t * (-9009.0
                    + t * (20020.0
                        + t * (-24024.0 + t * (16380.0 + t * (-6006.0 + t * 924.0))))))
    }
}

fn zeta(c1: f64, c2: f64) -> f64 {
    zeta1(c1) * zeta1(c2)
}

impl Tiling {
    /// Tile coordinates of a plane point.
    fn local(&self, p: Vec2) -> (f64, f64) {
        (
            self.inv[0][0] * p.x + self.inv[0][1] * p.y,
            self.inv[1][0] * p.x + self.inv[1][1] * p.y,
        )
    }

    /// `Σ_{n ∈ ℤ²} ζ(c − n)`, summed over the 3×3 neighbors that can be
    /// active; lies in `[1, 9]`.
    fn denominator(&self, c: (f64, f64)) -> f64 {
        let m0 = c.0.round() as i64;
        let n0 = c.1.round() as i64;
        let mut sum = 0.0;
        for dm in -1..=1 {
            for dn in -1..=1 {
                sum += zeta(c.0 - (m0 + dm) as f64, c.1 - (n0 + dn) as f64);
            }
        }
        sum
    }

    /// `ψ_T(p)` for the tile at position `tile` in the close list.
    pub fn psi(&self, tile: usize, p: Vec2) -> f64 {
        let c = self.local(p);
        let t = &self.tiles[tile];
        let num = zeta(c.0 - t.index[0] as f64, c.1 - t.index[1] as f64);
        if num == 0.0 {
            0.0
        } else {
            num / self.denominator(c)
        }
    }

    /// Number of close tiles whose cutoff is positive at `p`.
    pub fn active_count(&self, p: Vec2) -> usize {
        let c = self.local(p);
        self.tiles
            .iter()
            .filter(|t| zeta(c.0 - t.index[0] as f64, c.1 - t.index[1] as f64) > 0.0)
            .count()
    }

    /// `Σ_T ψ_T` over the close tiles at one point.
    pub fn partition_sum(&self, p: Vec2) -> f64 {
        let c = self.local(p);
        let m0 = c.0.round() as i64;
        let n0 = c.1.round() as i64;
        let mut sum = 0.0;
        for dm in -1..=1 {
            for dn in -1..=1 {
                let idx = [m0 + dm, n0 + dn];
                if self.index_set.contains(&idx) {
                    sum += zeta(c.0 - idx[0] as f64, c.1 - idx[1] as f64);
                }
            }
        }
        sum / self.denominator(c)
    }

    /// Visits the grid cells inside the support `2T` of one tile, passing
    /// the sample index and the value `ψ_T` there.
    fn for_each_cell<F: FnMut(usize, f64)>(&self, tile: &Tile, m: usize, h: f64, mut visit: F) {
        let ext_x = self.u.x.abs() + self.v.x.abs();
        let ext_y = self.u.y.abs() + self.v.y.abs();
        let ix_lo = ((tile.center.x - ext_x) / h).ceil().max(0.0) as usize;
        let ix_hi = (((tile.center.x + ext_x) / h).floor() as i64).min(m as i64 - 1);
        let iy_lo = ((tile.center.y - ext_y) / h).ceil().max(0.0) as usize;
        let iy_hi = (((tile.center.y + ext_y) / h).floor() as i64).min(m as i64 - 1);
        if ix_hi < ix_lo as i64 || iy_hi < iy_lo as i64 {
            return;
        }
        for iy in iy_lo..=iy_hi as usize {
            for ix in ix_lo..=ix_hi as usize {
                let p = Vec2::new(ix as f64 * h, iy as f64 * h);
                let c = self.local(p);
                let num = zeta(c.0 - tile.index[0] as f64, c.1 - tile.index[1] as f64);
                if num > 0.0 {
                    visit(iy * m + ix, num / self.denominator(c));
                }
            }
        }
    }
}

/// Builds the tiling of the side-`L` domain square by translates of the
/// polar dual of `bx`.
pub fn wavepacket_tiling(bx: &CanonicalBox, domain_side: f64) -> Result<Tiling> {
    if !(domain_side > 0.0) || !domain_side.is_finite() {
        return Err(CoreError::NonPositiveScale(format!(
            "domain side must be positive and finite, got {domain_side}"
        )));
    }
    let dual = polar_dual(&centered_copy(bx), 1e-9)?.rect;
    let u = dual.tangent().scale(dual.len);
    let v = dual.normal().scale(2.0 * dual.wid);
    let det = u.x * v.y - v.x * u.y;
    let inv = [[v.y / det, -v.x / det], [-u.y / det, u.x / det]];
    let ext_x = u.x.abs() + v.x.abs();
    let ext_y = u.y.abs() + v.y.abs();
    let l = domain_side;
    // Per-axis keep radius: the tile cell (half extent ext/2) must meet the
    // 10B_R square; the second term keeps any tile whose double 2T (full
    // extent ext) can touch the domain, so the grid partition of unity is
    // complete even when a dual cell is wider than 9L.
    let half_x = (5.0 * l + 0.5 * ext_x).max(0.5 * l + ext_x);
    let half_y = (5.0 * l + 0.5 * ext_y).max(0.5 * l + ext_y);
    let center = Vec2::new(0.5 * l, 0.5 * l);
    // Candidate index hull: tile coordinates of the admissible rectangle.
    let corners = [
        Vec2::new(center.x - half_x, center.y - half_y),
        Vec2::new(center.x + half_x, center.y - half_y),
        Vec2::new(center.x - half_x, center.y + half_y),
        Vec2::new(center.x + half_x, center.y + half_y),
    ];
    let mut c1_lo = f64::INFINITY;
    let mut c1_hi = f64::NEG_INFINITY;
    let mut c2_lo = f64::INFINITY;
    let mut c2_hi = f64::NEG_INFINITY;
    for p in corners {
        let c1 = inv[0][0] * p.x + inv[0][1] * p.y;
        let c2 = inv[1][0] * p.x + inv[1][1] * p.y;
        c1_lo = c1_lo.min(c1);
        c1_hi = c1_hi.max(c1);
        c2_lo = c2_lo.min(c2);
        c2_hi = c2_hi.max(c2);
    }
    let count_estimate = ((c1_hi - c1_lo + 1.0) * (c2_hi - c2_lo + 1.0)).abs();
    if !(count_estimate < 1e7) {
        return Err(CoreError::InvariantViolation(format!(
            "tiling would hold about {count_estimate:.1e} tiles"
        )));
    }
    let mut tiles = Vec::new();
    let mut index_set = std::collections::HashSet::new();
    for n1 in (c1_lo.floor() as i64)..=(c1_hi.ceil() as i64) {
        for n2 in (c2_lo.floor() as i64)..=(c2_hi.ceil() as i64) {
            let c = Vec2::new(
                n1 as f64 * u.x + n2 as f64 * v.x,
                n1 as f64 * u.y + n2 as f64 * v.y,
            );
            if (c.x - center.x).abs() <= half_x && (c.y - center.y).abs() <= half_y {
                tiles.push(Tile {
                    index: [n1, n2],
                    center: c,
                });
                index_set.insert([n1, n2]);
            }
        }
    }
    Ok(Tiling {
        dual,
        tiles,
        domain_side,
        u,
        v,
        inv,
        index_set,
    })
}

/// Prunes a field against a threshold `G`: keeps a tile when
/// `max |ψ_T·f| ≤ G` on the grid and returns `Σ_{good T} ψ_T·f`.
///
/// The output satisfies `|out| ≤ |f|` pointwise (the good-tile weight is a
/// sub-partition of unity) and `‖out‖_∞ ≤ 9G` (at most nine active tiles,
/// each capped at `G`).
pub fn prune(field: &GridField, tiling: &Tiling, threshold: f64) -> Result<GridField> {
    if !(threshold > 0.0) {
        return Err(CoreError::NonPositiveScale(format!(
            "prune threshold must be positive, got {threshold}"
        )));
    }
    if field.side() != tiling.domain_side {
        return Err(CoreError::IndexMismatch(format!(
            "field side {} vs tiling domain {}",
            field.side(),
            tiling.domain_side
        )));
    }
    let m = field.m();
    let h = field.spacing();
    let mut weight = vec![0.0f64; m * m];
    for tile in &tiling.tiles {
        let mut worst = 0.0f64;
        tiling.for_each_cell(tile, m, h, |idx, psi| {
            worst = worst.max(psi * field.samples()[idx].norm());
        });
        if worst <= threshold {
            tiling.for_each_cell(tile, m, h, |idx, psi| {
                weight[idx] += psi;
            });
        }
    }
    let mut out = field.clone();
    for (s, w) in out.samples_mut().iter_mut().zip(&weight) {
        *s *= *w;
    }
    out.freq_support = None;
    Ok(out)
}

/// The paper's pruning threshold `G = A_ε·R^{5ε}·β/α` with the default
/// `A_ε = 20K²ε^{−1}(2Ĉ_lo)^{1/ε}`, `Ĉ_lo` the measured low constant.
pub fn paper_threshold(
    k_param: usize,
    eps: f64,
    c_lo_hat: f64,
    r: f64,
    beta: f64,
    alpha: f64,
) -> f64 {
    let a_eps = 20.0 * (k_param * k_param) as f64 / eps * (2.0 * c_lo_hat).powf(1.0 / eps);
    a_eps * r.powf(5.0 * eps) * beta / alpha
}

/// Broad/narrow inequality at one point: for child values `v_i` in box
/// order, checks
/// `|Σv| ≤ K·(Σ|v_i|⁶)^{1/6} + Σ_{i ≁ j} |v_i|^{1/2}|v_j|^{1/2}`,
/// where `i ≁ j` means separation `|i − j| > ⌈K/4⌉` (ordered pairs).
pub fn broad_narrow_check(values: &[Complex64], k_param: usize) -> Result<bool> {
    if k_param < 4 {
        return Err(CoreError::DomainError(format!(
            "broad/narrow needs K ≥ 4, got {k_param}"
        )));
    }
    let lhs = values.iter().sum::<Complex64>().norm();
    let l6 = values
        .iter()
        .map(|v| {
            let q = v.norm_sqr();
            q * q * q
        })
        .sum::<f64>()
        .powf(1.0 / 6.0);
    let sep = k_param.div_ceil(4);
    let mut pairs = 0.0;
    for (i, vi) in values.iter().enumerate() {
        for (j, vj) in values.iter().enumerate() {
            if i.abs_diff(j) > sep {
                pairs += vi.norm().sqrt() * vj.norm().sqrt();
            }
        }
    }
    let rhs = k_param as f64 * l6 + pairs;
    Ok(lhs <= rhs + 1e-12 * (1.0 + lhs))
}
