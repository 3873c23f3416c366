//! Low-pass kernels `η_k`, per-box kernels `ρ_τ`, and recursive weights `ω_τ`.
//!
//! Kernels are defined by their transfer function on the frequency lattice
//! and realized as spatial fields by one inverse DFT, so plateau and support
//! statements hold exactly on the lattice. The profile is a fixed C² quintic
//! spline rather than a Schwartz bump: its decay is all that desk-scale
//! grids can resolve, and it is reproducible bit for bit.
//!
//! Transfers live on the representable band `[−M/2L, M/2L)²`; callers size
//! the grid so kernel supports stay inside it (the synthesis default
//! `M = 16R` puts Nyquist at 8 curve units, ample for normalized curves).
//!
//! The weight `w_τ` is the local sup of `|ρ_τ|` over the translate
//! `x + 4τ*` of the dual box. On the grid the sup is taken over two
//! arithmetic progressions of index offsets along the dual axes (a centered
//! rectangle is the Minkowski sum of its axis segments), each swept with a
//! monotone-deque sliding maximum, so the cost is independent of how
//! elongated the dual box is. The progression step quantizes the axis
//! direction to a small integer vector; the swept region is the grid's
//! rendering of the parallelogram, not a subpixel-exact copy.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;

use convdec_core::branch::BranchTree;
use convdec_core::decompose::DecompositionTree;
use convdec_core::geometry::{polar_dual, CanonicalBox};
use convdec_core::{CoreError, Result};

use crate::grid::{bin_of, chunked_sum, signed_index, torus_convolve, GridField};

/// C² quintic step: 1 on `[0, 1]`, 0 on `[2, ∞)`, monotone between.
pub fn bump_profile(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let t = 2.0 - s;
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// Convolution kernel with its exact lattice transfer.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// Spatial samples; imaginary parts are inverse-DFT roundoff unless the
    /// transfer is genuinely asymmetric (off-center `ρ_τ` plateaus modulate).
    pub field: GridField,
    transfer: Vec<f64>,
    /// Measured `‖κ‖_{L¹} = Σ|κ|·h²`.
    pub l1_norm: f64,
}

impl Kernel {
    /// Builds a kernel from a real transfer evaluated at lattice points
    /// `ξ = n/L`, `n` the signed representative of each bin, so that
    /// `(f ∗ κ)^(n) = H(n)·f̂(n)` exactly.
    pub fn from_transfer<F: FnMut(f64, f64) -> f64>(
        m: usize,
        side: f64,
        mut transfer_fn: F,
    ) -> Result<Kernel> {
        GridField::zeros(m, side)?;
        // κ = Σ_n H(n)/L² · e_n; from_dft divides by M², so scale by 1/h².
        let inv_h2 = (m * m) as f64 / (side * side);
        let mut transfer = vec![0.0f64; m * m];
        let mut buf = vec![Complex64::default(); m * m];
        for k2 in 0..m {
            let n2 = signed_index(m, k2) as f64 / side;
            for k1 in 0..m {
                let n1 = signed_index(m, k1) as f64 / side;
                let value = transfer_fn(n1, n2);
                transfer[k2 * m + k1] = value;
                buf[k2 * m + k1] = Complex64::new(value * inv_h2, 0.0);
            }
        }
        let field = GridField::from_dft(m, side, buf);
        let h2 = field.spacing() * field.spacing();
        let l1_norm = chunked_sum(field.samples().iter().map(|s| s.norm())) * h2;
        Ok(Kernel {
            field,
            transfer,
            l1_norm,
        })
    }

    /// Narrowest grid kernel: transfer identically 1, a Dirac surrogate.
    pub fn dirac(m: usize, side: f64) -> Result<Kernel> {
        Kernel::from_transfer(m, side, |_, _| 1.0)
    }

    /// Transfer value at a signed lattice index.
    pub fn transfer_at(&self, n: [i64; 2]) -> f64 {
        let m = self.field.m();
        self.transfer[bin_of(m, n[1]) * m + bin_of(m, n[0])]
    }

    /// Exact convolution `f ∗ κ` by transfer multiplication.
    pub fn convolve(&self, f: &GridField) -> Result<GridField> {
        self.field.require_same_shape(f)?;
        let mut buf = f.dft();
        for (x, h) in buf.iter_mut().zip(&self.transfer) {
            *x *= *h;
        }
        Ok(GridField::from_dft(f.m(), f.side(), buf))
    }

    /// `|κ|` as a nonnegative real field.
    pub fn abs_field(&self) -> GridField {
        let mut out = self.field.clone();
        for s in out.samples_mut() {
            *s = Complex64::new(s.norm(), 0.0);
        }
        out.freq_support = None;
        out
    }
}

/// Low-pass kernel `η` with transform 1 on `B(0, λ)` and 0 outside
/// `B(0, 2λ)`, radially decreasing between.
pub fn eta_kernel(m: usize, side: f64, lambda: f64) -> Result<Kernel> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(CoreError::NonPositiveScale(format!(
            "eta kernel needs a positive plateau radius, got {lambda}"
        )));
    }
    Kernel::from_transfer(m, side, |x, y| bump_profile((x * x + y * y).sqrt() / lambda))
}

/// Per-box kernel `ρ_τ` with transform `η̂(R^{−δ}·A_τ ξ)`, where `A_τ` maps
/// the double John ellipse `2J(τ)` (semi-axes `len`, `2·wid` in the box
/// frame) onto the ball `32^{k−N}·𝔹`. The plateau covers the dilated box
/// `R^δ·32^{N−k}·τ` and the support stays inside the double of the dilated
/// ellipse.
pub fn rho_kernel(
    m: usize,
    side: f64,
    bx: &CanonicalBox,
    level: usize,
    depth: usize,
    r: f64,
    delta: f64,
) -> Result<Kernel> {
    if level == 0 || level > depth {
        return Err(CoreError::IndexMismatch(format!(
            "rho kernel level {level} outside 1..={depth}"
        )));
    }
    let center = bx.center();
    let tangent = bx.tangent();
    let normal = bx.normal();
    let inv_len = 1.0 / bx.len;
    let inv_wid = 1.0 / (2.0 * bx.wid);
    // |R^{−δ}·A_τ ξ| = ratio · |Diag(1/len, 1/(2wid)) · Rot(−θ) · (ξ − c)|.
    let ratio = 32f64.powi(level as i32 - depth as i32) * r.powf(-delta);
    Kernel::from_transfer(m, side, move |x, y| {
        let dx = x - center.x;
        let dy = y - center.y;
        let u = (dx * tangent.x + dy * tangent.y) * inv_len;
        let v = (dx * normal.x + dy * normal.y) * inv_wid;
        bump_profile(ratio * (u * u + v * v).sqrt())
    })
}

/// Sliding circular maximum over centered windows of `2a+1` points along
/// the orbits of translation by the index offset `q` on the torus grid.
/// Monotone-deque pass: O(M²) whatever the window size.
fn swept_axis_max(values: &[f64], m: usize, q: [i64; 2], a: usize) -> Vec<f64> {
    if a == 0 {
        return values.to_vec();
    }
    let mut out = vec![0.0f64; m * m];
    let mut visited = vec![false; m * m];
    let mut orbit: Vec<usize> = Vec::new();
    let mut deque: VecDeque<usize> = VecDeque::new();
    for start in 0..m * m {
        if visited[start] {
            continue;
        }
        orbit.clear();
        let (mut ix, mut iy) = (start % m, start / m);
        loop {
            let idx = iy * m + ix;
            if visited[idx] {
                break;
            }
            visited[idx] = true;
            orbit.push(idx);
            ix = (ix as i64 + q[0]).rem_euclid(m as i64) as usize;
            iy = (iy as i64 + q[1]).rem_euclid(m as i64) as usize;
        }
        let n = orbit.len();
        let window = (2 * a + 1).min(n);
        deque.clear();
        for pos in 0..n + window - 1 {
            let v = values[orbit[pos % n]];
            while let Some(&back) = deque.back() {
                if values[orbit[back % n]] <= v {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(pos);
            while let Some(&front) = deque.front() {
                if front + window <= pos {
                    deque.pop_front();
                } else {
                    break;
                }
            }
            // The window [pos−window+1, pos] is centered on the point a
            // steps before its end.
            if pos + 1 >= window {
                let target = (pos + 1 + a - window) % n;
                out[orbit[target]] = values[orbit[*deque.front().expect("deque nonempty") % n]];
            }
        }
    }
    out
}

/// Quantizes a unit direction to a small integer index vector (components
/// at most 4), trading subpixel sweep accuracy for exact arithmetic orbits.
fn quantized_step(dir: [f64; 2]) -> [i64; 2] {
    let scale = 4.0 / dir[0].abs().max(dir[1].abs()).max(1e-300);
    let q = [
        (dir[0] * scale).round() as i64,
        (dir[1] * scale).round() as i64,
    ];
    let g = gcd(q[0].unsigned_abs(), q[1].unsigned_abs()).max(1) as i64;
    [q[0] / g, q[1] / g]
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Grid sup of a nonnegative real field over `x + factor·D` for a centered
/// box `D`: two sliding maxima along the box axes.
fn swept_max(base: &GridField, dual: &CanonicalBox, factor: f64) -> GridField {
    let m = base.m();
    let h = base.spacing();
    let tangent = dual.tangent();
    let normal = dual.normal();
    let mut values: Vec<f64> = base.samples().iter().map(|s| s.re).collect();
    for (dir, extent) in [
        ([tangent.x, tangent.y], factor * dual.len),
        ([normal.x, normal.y], factor * 2.0 * dual.wid),
    ] {
        let q = quantized_step(dir);
        let step_len = h * ((q[0] * q[0] + q[1] * q[1]) as f64).sqrt();
        let a = (0.5 * extent / step_len).ceil() as usize;
        values = swept_axis_max(&values, m, q, a);
    }
    let mut out = base.clone();
    for (s, v) in out.samples_mut().iter_mut().zip(&values) {
        *s = Complex64::new(*v, 0.0);
    }
    out.freq_support = None;
    out
}

/// Mollifier family for one level of a branch structure: the low-pass
/// `η_k` (and `η_{k+1}` when it exists), and per box in `𝒯_k^Λ` the kernel
/// `ρ_τ`, the recursive weight `ω_τ`, and measured `L¹` norms.
#[derive(Debug)]
pub struct MollifierSet {
    pub level: usize,
    /// `δ = ε^{10}`.
    pub delta: f64,
    /// Window scale `λ_k` of the branch at this level.
    pub lambda: f64,
    pub eta: Kernel,
    /// `η_{k+1}`, present for `k < N`; the high/low split at level `k`
    /// filters with it.
    pub eta_next: Option<Kernel>,
    /// Indices into tree level `k`, in branch-collection order.
    pub boxes: Vec<usize>,
    pub rho: Vec<Kernel>,
    /// Weights `ω_τ`: `ω_{τ_1} = w_{τ_1}`, then along the parent chain
    /// `ω_{τ_{k+1}} = max(w_{τ_{k+1}}, ω_{τ_k}, ω_{τ_k} ∗ |ρ_{τ_k}| ∗ |η_{k+1}|)`.
    pub omega: Vec<GridField>,
    /// Measured `‖ω_τ‖₁` per box.
    pub omega_l1: Vec<f64>,
    /// Measured `‖w_τ‖₁` per box (the sup term alone), for induction checks.
    pub w_l1: Vec<f64>,
}

/// Builds the mollifier family at level `k` of a branch structure, on an
/// `m × m` grid of side `side` (the synthesis grid: `side = R`, `m = 16R`).
pub fn build_mollifiers(
    tree: &DecompositionTree,
    branch_tree: &BranchTree,
    k: usize,
    m: usize,
    side: f64,
) -> Result<MollifierSet> {
    let depth = tree.n as usize;
    if k == 0 || k > depth {
        return Err(CoreError::IndexMismatch(format!(
            "mollifier level {k} outside 1..={depth}"
        )));
    }
    let lambdas = branch_tree.branch.lambdas.clone();
    if lambdas.len() != depth {
        return Err(CoreError::IndexMismatch(format!(
            "branch carries {} windows for a depth-{depth} tree",
            lambdas.len()
        )));
    }
    let boxes: Vec<usize> = branch_tree.collection(k)?.to_vec();
    if boxes.is_empty() {
        return Err(CoreError::DomainError(format!(
            "branch collection at level {k} is empty"
        )));
    }
    let delta = tree.eps.powi(10);
    let r = tree.r;

    let mut eta_cache: HashMap<usize, Kernel> = HashMap::new();
    let mut rho_cache: HashMap<(usize, usize), Kernel> = HashMap::new();
    let mut omega_cache: HashMap<(usize, usize), (GridField, f64)> = HashMap::new();
    let mut w_norms: HashMap<(usize, usize), f64> = HashMap::new();

    fn eta_at(
        cache: &mut HashMap<usize, Kernel>,
        m: usize,
        side: f64,
        lambdas: &[f64],
        lvl: usize,
    ) -> Result<Kernel> {
        if let Some(kernel) = cache.get(&lvl) {
            return Ok(kernel.clone());
        }
        let kernel = eta_kernel(m, side, lambdas[lvl - 1])?;
        cache.insert(lvl, kernel.clone());
        Ok(kernel)
    }

    for &idx in &boxes {
        for lvl in 1..=k {
            let id = tree.ancestor(k, idx, lvl);
            if omega_cache.contains_key(&(lvl, id)) {
                continue;
            }
            if !rho_cache.contains_key(&(lvl, id)) {
                let bx = &tree.node(lvl, id).bx;
                rho_cache.insert((lvl, id), rho_kernel(m, side, bx, lvl, depth, r, delta)?);
            }
            let centered = centered_copy(&tree.node(lvl, id).bx);
            let dual = polar_dual(&centered, 1e-9)?.rect;
            let w = swept_max(&rho_cache[&(lvl, id)].abs_field(), &dual, 4.0);
            let h2 = w.spacing() * w.spacing();
            let w_l1 = chunked_sum(w.samples().iter().map(|s| s.re)) * h2;
            w_norms.insert((lvl, id), w_l1);
            let omega = if lvl == 1 {
                w
            } else {
                let pid = tree.ancestor(k, idx, lvl - 1);
                let parent_omega = omega_cache[&(lvl - 1, pid)].0.clone();
                let parent_rho_abs = rho_cache[&(lvl - 1, pid)].abs_field();
                let eta_lvl = eta_at(&mut eta_cache, m, side, &lambdas, lvl)?;
                let smeared = torus_convolve(
                    &torus_convolve(&parent_omega, &parent_rho_abs)?,
                    &eta_lvl.abs_field(),
                )?;
                let mut omega = w;
                for (s, (p, c)) in omega
                    .samples_mut()
                    .iter_mut()
                    .zip(parent_omega.samples().iter().zip(smeared.samples()))
                {
                    *s = Complex64::new(s.re.max(p.re).max(c.re.max(0.0)), 0.0);
                }
                omega
            };
            let omega_l1 = chunked_sum(omega.samples().iter().map(|s| s.re)) * h2;
            omega_cache.insert((lvl, id), (omega, omega_l1));
        }
    }

    let eta = eta_at(&mut eta_cache, m, side, &lambdas, k)?;
    let eta_next = if k < depth {
        Some(eta_at(&mut eta_cache, m, side, &lambdas, k + 1)?)
    } else {
        None
    };
    let mut rho = Vec::with_capacity(boxes.len());
    let mut omega = Vec::with_capacity(boxes.len());
    let mut omega_l1 = Vec::with_capacity(boxes.len());
    let mut w_l1 = Vec::with_capacity(boxes.len());
    for &idx in &boxes {
        rho.push(rho_cache[&(k, idx)].clone());
        let (field, l1) = omega_cache[&(k, idx)].clone();
        omega.push(field);
        omega_l1.push(l1);
        w_l1.push(w_norms[&(k, idx)]);
    }
    Ok(MollifierSet {
        level: k,
        delta,
        lambda: lambdas[k - 1],
        eta,
        eta_next,
        boxes,
        rho,
        omega,
        omega_l1,
        w_l1,
    })
}

/// Origin-centered copy of a box, for the polar dual.
pub fn centered_copy(bx: &CanonicalBox) -> CanonicalBox {
    let c = bx.center();
    CanonicalBox {
        anchor: bx.anchor - c,
        ..*bx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_a_c2_step() {
        assert_eq!(bump_profile(0.0), 1.0);
        assert_eq!(bump_profile(1.0), 1.0);
        assert_eq!(bump_profile(2.0), 0.0);
        assert_eq!(bump_profile(3.0), 0.0);
        let mid = bump_profile(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        // Monotone decreasing on [1, 2].
        let mut prev = 1.0;
        for i in 0..=40 {
            let v = bump_profile(1.0 + i as f64 / 20.0);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
        // C² matching at the seams: finite differences of the derivative
        // shrink toward the plateau values.
        let d = 1e-4;
        let slope_at_1 = (bump_profile(1.0 + d) - bump_profile(1.0)) / d;
        let slope_at_2 = (bump_profile(2.0) - bump_profile(2.0 - d)) / d;
        assert!(slope_at_1.abs() < 1e-3);
        assert!(slope_at_2.abs() < 1e-3);
    }

    #[test]
    fn eta_plateau_and_support_are_exact_on_lattice() {
        let m = 64;
        let side = 8.0;
        let lambda = 1.25;
        let eta = eta_kernel(m, side, lambda).unwrap();
        for k2 in 0..m {
            for k1 in 0..m {
                let n = [signed_index(m, k1), signed_index(m, k2)];
                let xi = ((n[0] * n[0] + n[1] * n[1]) as f64).sqrt() / side;
                let h = eta.transfer_at(n);
                if xi <= lambda {
                    assert_eq!(h, 1.0);
                } else if xi >= 2.0 * lambda {
                    assert_eq!(h, 0.0);
                } else {
                    assert!(h > 0.0 && h < 1.0);
                }
            }
        }
        assert!(eta.l1_norm <= 10.0);
    }

    #[test]
    fn dirac_surrogate_convolves_to_identity() {
        let m = 32;
        let side = 4.0;
        let dirac = Kernel::dirac(m, side).unwrap();
        let f = GridField::from_modes(
            m,
            side,
            &[([3, -2], Complex64::new(0.4, 0.9)), ([0, 5], Complex64::new(-1.0, 0.2))],
        )
        .unwrap();
        let g = dirac.convolve(&f).unwrap();
        let worst = f
            .samples()
            .iter()
            .zip(g.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn swept_max_dominates_and_spreads() {
        let m = 16;
        let mut base = GridField::zeros(m, 4.0).unwrap();
        base.samples_mut()[5 * m + 7] = Complex64::new(2.0, 0.0);
        let dual = CanonicalBox {
            level: 0,
            kind: convdec_core::geometry::BoxKind::Exceptional,
            interval: [0.0, 1.0],
            anchor: convdec_core::geometry::Vec2::new(-0.5, 0.0),
            frame_angle: 0.0,
            len: 1.0,
            wid: 0.25,
        };
        let swept = swept_max(&base, &dual, 4.0);
        // The peak survives at its own location (zero offset included).
        assert!(swept.samples()[5 * m + 7].re >= 2.0 - 1e-12);
        // And spreads along the tangent by about factor·len/2 = 2 units
        // = 8 cells.
        assert!(swept.samples()[5 * m + (7 + 4) % m].re >= 2.0 - 1e-12);
        // Pointwise domination of the base field.
        for (s, b) in swept.samples().iter().zip(base.samples()) {
            assert!(s.re >= b.re - 1e-12);
        }
    }
}
