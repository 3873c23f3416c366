//! Machine-readable dump formats.
//!
//! Every writer here is deterministic: the same value produces the same
//! bytes, with floats printed as the shortest round-tripping decimal.
//! Trees go to JSON lines (one record per box, parent index and
//! certificate inline), partitions and covering fits to CSV, branch
//! structures to a single JSON document.

use crate::branch::{BranchTree, RescalingReport, SeparationReport};
use crate::covering::DimensionEstimate;
use crate::decompose::{DecompositionTree, NodeCert};
use crate::geometry::CanonicalBox;
use crate::partition::{CaseTag, IdealPartition};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One line of a tree dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeRecord {
    pub level: usize,
    pub index: usize,
    /// Index into the previous level; `None` only for the root.
    pub parent: Option<usize>,
    #[serde(rename = "box")]
    pub bx: CanonicalBox,
    /// Arc interval in the parameters of the decomposed curve's root.
    pub base_interval: [f64; 2],
    pub cert: NodeCert,
}

/// Dump a tree as JSON lines, one record per box, level by level.
pub fn tree_to_jsonl(tree: &DecompositionTree) -> Result<String> {
    let mut out = String::new();
    for (level, nodes) in tree.levels.iter().enumerate() {
        for (index, node) in nodes.iter().enumerate() {
            let rec = TreeRecord {
                level,
                index,
                parent: node.parent,
                bx: node.bx,
                base_interval: node.base_interval,
                cert: node.cert,
            };
            out.push_str(&serde_json::to_string(&rec)?);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Parse a tree dump back into its records.
pub fn tree_from_jsonl(text: &str) -> Result<Vec<TreeRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

fn case_tag_str(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::Case1 => "case1",
        CaseTag::Case2A => "case2a",
        CaseTag::Case2B => "case2b",
    }
}

/// Dump an ideal partition as CSV: `t,v,case_tag,j1_value,length`.
pub fn partition_to_csv(partition: &IdealPartition) -> String {
    let mut out = String::from("t,v,case_tag,j1_value,length\n");
    for (([t, v], &tag), cert) in partition
        .intervals
        .iter()
        .zip(&partition.case_tags)
        .zip(&partition.cert.per_interval)
    {
        writeln!(out, "{t},{v},{},{},{}", case_tag_str(tag), cert.j1, cert.length)
            .expect("writing to a String cannot fail");
    }
    out
}

/// Dump a covering fit as CSV: `delta,count,residual`.
pub fn covering_to_csv(estimate: &DimensionEstimate) -> String {
    let mut out = String::from("delta,count,residual\n");
    for ((delta, count), resid) in estimate.points.iter().zip(&estimate.residuals) {
        writeln!(out, "{delta},{count},{resid}").expect("writing to a String cannot fail");
    }
    out
}

/// Branch dump: the scales, what they select per level, and the results
/// of whichever checks the caller ran.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchDump {
    pub lambdas: Vec<f64>,
    pub r: f64,
    pub eps: f64,
    /// #𝒯_k^Λ per level, root included.
    pub level_counts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub separation: Vec<SeparationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rescaling: Vec<RescalingReport>,
}

impl BranchDump {
    pub fn new(branch_tree: &BranchTree) -> BranchDump {
        BranchDump {
            lambdas: branch_tree.branch.lambdas.clone(),
            r: branch_tree.branch.r,
            eps: branch_tree.branch.eps,
            level_counts: branch_tree.collections.iter().map(Vec::len).collect(),
            separation: Vec::new(),
            rescaling: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{branch_collections, direction_separation_check, enumerate_branches};
    use crate::covering::affine_dimension_estimate;
    use crate::curve::{corpus, ConvexCurve};
    use crate::decompose::multi_scale;
    use crate::partition::ideal_partition;

    fn tuned_parabola(r: f64, eps: f64) -> ConvexCurve {
        let l = r.powf(2.0 * eps);
        let c = 0.99 * r.powf(-2.0 * eps) / (2.0 * l);
        ConvexCurve::parabola(c, [0.0, l]).unwrap()
    }

    #[test]
    fn tree_jsonl_roundtrips_and_links_parents() {
        let (r, eps) = (1024.0, 0.2);
        let tree = multi_scale(&tuned_parabola(r, eps), r, eps, 2).unwrap();
        let text = tree_to_jsonl(&tree).unwrap();
        let records = tree_from_jsonl(&text).unwrap();
        let total: usize = tree.levels.iter().map(Vec::len).sum();
        assert_eq!(records.len(), total);
        assert_eq!(records[0].parent, None);
        let mut sizes = vec![0usize; tree.levels.len()];
        for rec in &records {
            sizes[rec.level] += 1;
            if rec.level > 0 {
                let p = rec.parent.expect("non-root records carry a parent");
                assert!(p < tree.levels[rec.level - 1].len());
                assert!(rec.cert.i_pass && rec.cert.ii_pass);
            }
            let node = tree.node(rec.level, rec.index);
            assert_eq!(rec.bx.interval, node.bx.interval);
            assert_eq!(rec.base_interval, node.base_interval);
        }
        for (k, nodes) in tree.levels.iter().enumerate() {
            assert_eq!(sizes[k], nodes.len());
        }
        assert_eq!(text, tree_to_jsonl(&tree).unwrap());
    }

    #[test]
    fn partition_csv_has_one_row_per_interval() {
        let (r, eps) = (1024.0, 0.25);
        let p = ideal_partition(&corpus::parabola(), r, eps).unwrap();
        let csv = partition_to_csv(&p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,v,case_tag,j1_value,length");
        assert_eq!(lines.len(), p.intervals.len() + 1);
        for line in &lines[1..] {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 5);
            let t: f64 = f[0].parse().unwrap();
            let v: f64 = f[1].parse().unwrap();
            assert!(t < v);
            assert!(matches!(f[2], "case1" | "case2a" | "case2b"));
            let _: f64 = f[3].parse().unwrap();
            let len: f64 = f[4].parse().unwrap();
            assert!((len - (v - t)).abs() <= 1e-12);
        }
        assert_eq!(csv, partition_to_csv(&p));
    }

    #[test]
    fn covering_csv_matches_fit_points() {
        let scales: Vec<f64> = (3..=10).map(|k| 0.5f64.powi(k)).collect();
        let est = affine_dimension_estimate(&corpus::parabola(), &scales).unwrap();
        let csv = covering_to_csv(&est);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "delta,count,residual");
        assert_eq!(lines.len(), est.points.len() + 1);
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), est.points[0].0);
        assert_eq!(f[1].parse::<usize>().unwrap(), est.points[0].1);
    }

    #[test]
    fn branch_dump_carries_counts_and_checks() {
        let (r, eps) = (1024.0, 0.2);
        let c = tuned_parabola(r, eps);
        let tree = multi_scale(&c, r, eps, 2).unwrap();
        let b = enumerate_branches(&tree).unwrap().remove(0);
        let bt = branch_collections(&tree, &b).unwrap();
        let mut dump = BranchDump::new(&bt);
        for k in 1..=2 {
            dump.separation
                .push(direction_separation_check(&c, &tree, &bt, k).unwrap());
        }
        let text = dump.to_json().unwrap();
        let back: BranchDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.lambdas, b.lambdas);
        assert_eq!(back.level_counts.len(), 3);
        assert_eq!(back.level_counts[0], 1);
        assert_eq!(back.separation.len(), 2);
        assert!(back.rescaling.is_empty());
        assert_eq!(text, dump.to_json().unwrap());
    }
}
