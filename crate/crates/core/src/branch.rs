//! Dyadic pigeonholing of box lengths into branches.
//!
//! A branch is a sequence Λ = (λ_1, ..., λ_N) of scales, one per tree
//! level. The pigeonholed collection 𝒯_k^Λ keeps the boxes whose arc chord
//! lies in the closed window [λ_k, 2λ_k] along a parent chain that passes
//! every window above. Enumeration over dyadic Λ recovers every box of the
//! tree in exactly the branches its chain realizes, and there are at most
//! (1 + log₂R)^{1/ε} nonempty dyadic branches.
//!
//! Window membership uses relative slack `1e-12` so that chords landing
//! exactly on a dyadic boundary (straight pieces) classify identically
//! before and after renormalization.

use crate::curve::ConvexCurve;
use crate::decompose::{multi_scale, rescaled_curve, DecompositionTree};
use crate::error::CoreError;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One scale sequence Λ with the parameters it was enumerated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    /// λ_1..λ_N, one per tree level below the root.
    pub lambdas: Vec<f64>,
    pub r: f64,
    pub eps: f64,
}

impl BranchSpec {
    pub fn new(lambdas: Vec<f64>, r: f64, eps: f64) -> Result<Self> {
        for &l in &lambdas {
            if !(l > 0.0 && l.is_finite()) {
                return Err(CoreError::NonPositiveScale(format!(
                    "branch scales must be positive and finite, got {l}"
                )));
            }
        }
        Ok(BranchSpec { lambdas, r, eps })
    }

    /// Whether the nonempty-branch bounds hold: absolute range
    /// (1/2)R^{-1+2ε} ≤ λ_k ≤ R^{2ε} and relative λ_{k+1} ≥ (1/2)R^{-ε}λ_k.
    pub fn bounds_ok(&self) -> bool {
        let lo = 0.5 * self.r.powf(-1.0 + 2.0 * self.eps);
        let hi = self.r.powf(2.0 * self.eps);
        let shrink = 0.5 * self.r.powf(-self.eps);
        let slack = 1.0 + 1e-9;
        self.lambdas
            .iter()
            .all(|&l| l * slack >= lo && l <= hi * slack)
            && self
                .lambdas
                .windows(2)
                .all(|w| w[1] * slack >= shrink * w[0])
    }
}

/// Closed length window [λ, 2λ] with the crate's equality slack.
fn in_window(cal: f64, lambda: f64) -> bool {
    cal >= lambda * (1.0 - 1e-12) && cal <= 2.0 * lambda * (1.0 + 1e-12)
}

/// The collections 𝒯_k^Λ of one branch over one decomposition tree.
///
/// Boxes are stored as indices into the tree's levels; the tree itself is
/// passed back into queries and checked against a fingerprint taken at
/// build time.
#[derive(Debug, Clone)]
pub struct BranchTree {
    pub branch: BranchSpec,
    /// `collections[k]` is 𝒯_k^Λ(Γ): indices into `tree.levels[k]`.
    pub collections: Vec<Vec<usize>>,
    /// Per-node window membership (level 0 is unconditioned).
    in_window: Vec<Vec<bool>>,
    fingerprint: (u64, u32, Vec<usize>),
}

impl BranchTree {
    fn require_same_tree(&self, tree: &DecompositionTree) -> Result<()> {
        if self.fingerprint != tree.fingerprint() {
            return Err(CoreError::IndexMismatch(
                "branch structure was built from a different tree".into(),
            ));
        }
        Ok(())
    }

    fn require_level(&self, k: usize) -> Result<()> {
        if k >= self.collections.len() {
            return Err(CoreError::IndexMismatch(format!(
                "level {k} outside tree depth {}",
                self.collections.len() - 1
            )));
        }
        Ok(())
    }

    /// 𝒯_k^Λ(Γ).
    pub fn collection(&self, k: usize) -> Result<&[usize]> {
        self.require_level(k)?;
        Ok(&self.collections[k])
    }

    /// 𝒯_{k+j}^Λ(Γ; τ_k): descendants of `(k, idx)` at level `k + j`
    /// whose chain passes every window strictly below level `k`.
    pub fn collection_from(
        &self,
        tree: &DecompositionTree,
        k: usize,
        idx: usize,
        j: usize,
    ) -> Result<Vec<usize>> {
        self.require_same_tree(tree)?;
        self.require_level(k + j)?;
        if idx >= tree.levels[k].len() {
            return Err(CoreError::IndexMismatch(format!(
                "box index {idx} outside level {k}"
            )));
        }
        let mut mask = vec![false; tree.levels[k].len()];
        mask[idx] = true;
        for l in k + 1..=k + j {
            let mut next = vec![false; tree.levels[l].len()];
            for (i, node) in tree.levels[l].iter().enumerate() {
                let p = node.parent.expect("non-root box has a parent");
                if mask[p] && self.in_window[l][i] {
                    next[i] = true;
                }
            }
            mask = next;
        }
        Ok(mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect())
    }

    /// The partial order: `τ_m ≺ τ_k` iff `τ_m ∈ 𝒯_m^Λ(Γ; τ_k)`.
    pub fn precedes(
        &self,
        tree: &DecompositionTree,
        m: usize,
        midx: usize,
        k: usize,
        kidx: usize,
    ) -> Result<bool> {
        if m < k {
            return Ok(false);
        }
        Ok(self
            .collection_from(tree, k, kidx, m - k)?
            .contains(&midx))
    }

    /// Representation identity:
    /// `𝒯_{k+j}^Λ(τ_k) = ⋃_{τ_{k+l} ∈ 𝒯_{k+l}^Λ(τ_k)} 𝒯_{k+j}^Λ(τ_{k+l})`.
    pub fn verify_representation(
        &self,
        tree: &DecompositionTree,
        k: usize,
        idx: usize,
        l: usize,
        j: usize,
    ) -> Result<()> {
        if l > j {
            return Err(CoreError::IndexMismatch(format!(
                "representation identity needs l ≤ j, got l = {l}, j = {j}"
            )));
        }
        let direct: BTreeSet<usize> = self.collection_from(tree, k, idx, j)?.into_iter().collect();
        let mut union = BTreeSet::new();
        for mid in self.collection_from(tree, k, idx, l)? {
            union.extend(self.collection_from(tree, k + l, mid, j - l)?);
        }
        if direct != union {
            return Err(CoreError::InvariantViolation(format!(
                "representation identity fails at (k, l, j) = ({k}, {l}, {j}) from box {idx}: \
                 direct {direct:?} vs union {union:?}"
            )));
        }
        Ok(())
    }
}

/// Materialize 𝒯_k^Λ for every level of the tree.
///
/// Accepts any positive scale sequence of the tree's depth; the window
/// test uses the arc chord (`cert.cal`), which doubling does not change.
pub fn branch_collections(tree: &DecompositionTree, branch: &BranchSpec) -> Result<BranchTree> {
    let n = tree.n as usize;
    if branch.lambdas.len() != n {
        return Err(CoreError::IndexMismatch(format!(
            "branch has {} scales but the tree has {n} levels below the root",
            branch.lambdas.len()
        )));
    }
    for &l in &branch.lambdas {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CoreError::NonPositiveScale(format!(
                "branch scales must be positive and finite, got {l}"
            )));
        }
    }
    let mut windows: Vec<Vec<bool>> = Vec::with_capacity(n + 1);
    windows.push(vec![true; tree.levels[0].len()]);
    for k in 1..=n {
        let lam = branch.lambdas[k - 1];
        windows.push(
            tree.levels[k]
                .iter()
                .map(|node| in_window(node.cert.cal, lam))
                .collect(),
        );
    }
    let mut collections: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut mask: Vec<bool> = (0..tree.levels[0].len()).map(|i| i == 0).collect();
    collections.push(vec![0]);
    for k in 1..=n {
        let mut next = vec![false; tree.levels[k].len()];
        let mut coll = Vec::new();
        for (i, node) in tree.levels[k].iter().enumerate() {
            let p = node.parent.expect("non-root box has a parent");
            if mask[p] && windows[k][i] {
                next[i] = true;
                coll.push(i);
            }
        }
        collections.push(coll);
        mask = next;
    }
    Ok(BranchTree {
        branch: branch.clone(),
        collections,
        in_window: windows,
        fingerprint: tree.fingerprint(),
    })
}

/// Dyadic exponents `e` with `2^e ≤ cal ≤ 2^{e+1}` inside the grid.
fn dyadic_exponents(cal: f64, grid_lo: f64, grid_hi: f64) -> Vec<i32> {
    let e0 = cal.log2().floor() as i32;
    (e0 - 2..=e0 + 1)
        .filter(|&e| {
            let lam = (e as f64).exp2();
            in_window(cal, lam) && lam * (1.0 + 1e-9) >= grid_lo && lam <= grid_hi * (1.0 + 1e-9)
        })
        .collect()
}

/// Enumerate every dyadic Λ ∈ (2^ℤ)^N whose branch is nonempty, i.e. some
/// leaf's parent chain realizes all N windows.
///
/// The dyadic grid is restricted to [(1/2)R^{-1+2ε}, R^{2ε}]; the count is
/// checked against (1 + log₂R)^{1/ε}.
pub fn enumerate_branches(tree: &DecompositionTree) -> Result<Vec<BranchSpec>> {
    let n = tree.n as usize;
    let grid_lo = 0.5 * tree.r.powf(-1.0 + 2.0 * tree.eps);
    let grid_hi = tree.r.powf(2.0 * tree.eps);
    let mut tuples: BTreeSet<Vec<i32>> = BTreeSet::new();
    for leaf in 0..tree.levels[n].len() {
        // Candidate exponents along the parent chain, leaf to root.
        let mut per_level: Vec<Vec<i32>> = vec![Vec::new(); n];
        let mut level = n;
        let mut idx = leaf;
        while level >= 1 {
            let node = &tree.levels[level][idx];
            per_level[level - 1] = dyadic_exponents(node.cert.cal, grid_lo, grid_hi);
            idx = node.parent.expect("non-root box has a parent");
            level -= 1;
        }
        let mut partial: Vec<Vec<i32>> = vec![Vec::new()];
        for cands in &per_level {
            let mut next = Vec::with_capacity(partial.len() * cands.len());
            for t in &partial {
                for &e in cands {
                    let mut t2 = t.clone();
                    t2.push(e);
                    next.push(t2);
                }
            }
            partial = next;
        }
        tuples.extend(partial);
    }
    let bound = (1.0 + tree.r.log2()).powf(1.0 / tree.eps);
    if tuples.len() as f64 > bound * (1.0 + 1e-9) {
        return Err(CoreError::InvariantViolation(format!(
            "{} branches exceed the bound (1 + log₂R)^(1/ε) = {bound}",
            tuples.len()
        )));
    }
    let mut out = Vec::with_capacity(tuples.len());
    for t in tuples {
        let lambdas = t.iter().map(|&e| (e as f64).exp2()).collect();
        let spec = BranchSpec::new(lambdas, tree.r, tree.eps)?;
        if !spec.bounds_ok() {
            return Err(CoreError::InvariantViolation(format!(
                "enumerated branch violates the scale bounds: {:?}",
                spec.lambdas
            )));
        }
        out.push(spec);
    }
    Ok(out)
}

/// JSON has no ∞, so a vacuous minimum serializes as null.
mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Direction-separation report for one level of a branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    pub level: usize,
    pub boxes: usize,
    /// Number of 4-windows tested; 0 means a vacuous pass.
    pub quadruples: usize,
    /// (2 λ_k R_k)^{-1}.
    pub bound: f64,
    /// min over 4-windows of (γ'_R(t⁴) − γ'_R(t¹)) / bound; ∞ if vacuous.
    #[serde(with = "inf_as_null")]
    pub min_ratio: f64,
}

/// For every 4 consecutive boxes of 𝒯_k^Λ (ordered left to right), check
/// `γ'_R(t_k^4) − γ'_R(t_k^1) ≥ (2 λ_k R_k)^{-1}`.
///
/// `curve` must be the curve the tree decomposes. A violation indicates an
/// implementation bug, not bad input.
pub fn direction_separation_check(
    curve: &ConvexCurve,
    tree: &DecompositionTree,
    branch_tree: &BranchTree,
    k: usize,
) -> Result<SeparationReport> {
    branch_tree.require_same_tree(tree)?;
    if k == 0 {
        return Err(CoreError::IndexMismatch(
            "direction separation is defined for levels k ≥ 1".into(),
        ));
    }
    let mut order = branch_tree.collection(k)?.to_vec();
    order.sort_by(|&a, &b| {
        tree.levels[k][a].bx.interval[0]
            .partial_cmp(&tree.levels[k][b].bx.interval[0])
            .expect("box intervals are finite")
    });
    let lam = branch_tree.branch.lambdas[k - 1];
    let bound = 1.0 / (2.0 * lam * tree.scale(k));
    let mut min_ratio = f64::INFINITY;
    let mut quadruples = 0usize;
    for w in order.windows(4) {
        let t1 = tree.levels[k][w[0]].bx.interval[0];
        let t4 = tree.levels[k][w[3]].bx.interval[0];
        let lhs = curve.slope_r(t4)? - curve.slope_r(t1)?;
        quadruples += 1;
        min_ratio = min_ratio.min(lhs / bound);
        if lhs < bound * (1.0 - 1e-9) {
            return Err(CoreError::SeparationViolation(format!(
                "level {k}: γ'_R({t4}) − γ'_R({t1}) = {lhs} < (2λ_k R_k)^(-1) = {bound}"
            )));
        }
    }
    Ok(SeparationReport {
        level: k,
        boxes: order.len(),
        quadruples,
        bound,
        min_ratio,
    })
}

/// Rescaling-bijection report: per inner level, the matched pair count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescalingReport {
    pub level: usize,
    pub index: usize,
    /// Depth N − k of the independent tree.
    pub depth: usize,
    /// (j, #𝒯_{k+j}^Λ(Γ;τ_k) = #𝒯_j^{Λ'}(Γ_τ)) for 0 ≤ j ≤ depth.
    pub per_level: Vec<(usize, usize)>,
    /// Largest relative corner distance seen across all matches.
    pub max_corner_error: f64,
}

/// Check that `𝓛_{τ_k}` maps `𝒯_{k+j}^Λ(Γ; τ_k)` onto `𝒯_j^{Λ'}(Γ_{τ_k})`
/// for all `j ≤ N − k`, where `Λ' = (R_k λ_{k+i})_i` and the right side is
/// an independent decomposition of the rescaled curve.
///
/// Boxes are matched in left-to-right order, corner by corner, within
/// `1e-9` relative to the box size.
pub fn rescaling_bijection_check(
    curve: &ConvexCurve,
    tree: &DecompositionTree,
    k: usize,
    idx: usize,
    branch: &BranchSpec,
) -> Result<RescalingReport> {
    if tree.doubled {
        return Err(CoreError::DomainError(
            "rescaling bijection runs on the undoubled tree".into(),
        ));
    }
    let n = tree.n as usize;
    let bt = branch_collections(tree, branch)?;
    if !bt.collection(k)?.contains(&idx) {
        return Err(CoreError::DomainError(format!(
            "box ({k}, {idx}) is not in 𝒯_{k}^Λ"
        )));
    }
    let node = tree.node(k, idx);
    let gamma_tau = rescaled_curve(curve, &node.bx, tree.r, tree.eps)?;
    let depth = n - k;
    let indep = multi_scale(&gamma_tau, tree.r, tree.eps, depth as u32)?;
    let rk = tree.scale(k);
    let lambdas2: Vec<f64> = (0..depth).map(|i| rk * branch.lambdas[k + i]).collect();
    let branch2 = BranchSpec::new(lambdas2, tree.r, tree.eps)?;
    let bt2 = branch_collections(&indep, &branch2)?;
    let map = node.map;
    let mut per_level = Vec::with_capacity(depth + 1);
    let mut max_err = 0.0f64;
    for j in 0..=depth {
        let mut ours = bt.collection_from(tree, k, idx, j)?;
        let mut theirs = bt2.collection(j)?.to_vec();
        if ours.len() != theirs.len() {
            return Err(CoreError::BijectionFailure(format!(
                "level {}: {} boxes map onto {} boxes of the rescaled tree",
                k + j,
                ours.len(),
                theirs.len()
            )));
        }
        ours.sort_by(|&a, &b| {
            tree.levels[k + j][a].bx.interval[0]
                .partial_cmp(&tree.levels[k + j][b].bx.interval[0])
                .expect("box intervals are finite")
        });
        theirs.sort_by(|&a, &b| {
            indep.levels[j][a].bx.interval[0]
                .partial_cmp(&indep.levels[j][b].bx.interval[0])
                .expect("box intervals are finite")
        });
        for (&a, &b) in ours.iter().zip(&theirs) {
            let abx = &tree.levels[k + j][a].bx;
            let bbx = &indep.levels[j][b].bx;
            let scale = bbx.len.max(bbx.wid);
            for (ca, cb) in abx.corners().iter().zip(bbx.corners()) {
                let err = (map.apply(*ca) - cb).norm() / (1.0 + scale);
                max_err = max_err.max(err);
                if err > 1e-9 {
                    return Err(CoreError::BijectionFailure(format!(
                        "level {}: image of box {a} misses box {b} by relative {err}",
                        k + j
                    )));
                }
            }
        }
        per_level.push((j, ours.len()));
    }
    Ok(RescalingReport {
        level: k,
        index: idx,
        depth,
        per_level,
        max_corner_error: max_err,
    })
}
