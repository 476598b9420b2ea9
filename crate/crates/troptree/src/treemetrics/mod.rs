//! Tree metrics and ultrametrics: the four- and three-point conditions,
//! equidistant trees, conversion between trees and cophenetic vectors,
//! Newick text, and coalescent sampling for tests.
//!
//! An equidistant tree is a rooted tree in which every leaf sits at the same
//! distance `h` from the root.  Its metric data are the internal edge
//! lengths ℓ(S), one per clade S, and the external edge lengths ℓᵢ, tied
//! together by h = ℓᵢ + Σ_{S ∋ i} ℓ(S) for every leaf.  A tree metric is an
//! ultrametric exactly when its tree is equidistant, which is what makes
//! the three-point condition the right validity check here.
//!
//! The root is implicit: clades are subsets of 1..=N and never mention a
//! root label.

mod coalescent;
mod newick;

pub use coalescent::random_coalescent_tree;
pub use newick::{parse_newick, write_newick};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{Clade, Topology};
use crate::torus::{pairs, PairVector, DEFAULT_TOL};

/// Which class of metric an input turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    TreeMetric,
    Ultrametric,
    Neither,
}

/// Outcome of a metric validity check.  `witness` holds a violating triple
/// or quadruple of leaves exactly when the check failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub kind: MetricKind,
    pub witness: Option<Vec<usize>>,
}

/// Four-point condition: `w` defines a tree metric iff for every quadruple
/// i<j<k<ℓ the largest of the three sums w(i,j)+w(k,ℓ), w(i,k)+w(j,ℓ),
/// w(i,ℓ)+w(j,k) is attained at least twice (within `tol`).
pub fn is_tree_metric(w: &PairVector, tol: f64) -> ValidationReport {
    let n = w.leaf_count();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let sums = [
                        w.get(i, j) + w.get(k, l),
                        w.get(i, k) + w.get(j, l),
                        w.get(i, l) + w.get(j, k),
                    ];
                    if !max_attained_twice(&sums, tol) {
                        return ValidationReport {
                            kind: MetricKind::Neither,
                            witness: Some(vec![i, j, k, l]),
                        };
                    }
                }
            }
        }
    }
    ValidationReport {
        kind: MetricKind::TreeMetric,
        witness: None,
    }
}

/// Three-point condition: `w` is an ultrametric iff for every triple i<j<k
/// the largest of w(i,j), w(i,k), w(j,k) is attained at least twice
/// (within `tol`).
pub fn is_ultrametric(w: &PairVector, tol: f64) -> ValidationReport {
    let n = w.leaf_count();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let values = [w.get(i, j), w.get(i, k), w.get(j, k)];
                if !max_attained_twice(&values, tol) {
                    return ValidationReport {
                        kind: MetricKind::Neither,
                        witness: Some(vec![i, j, k]),
                    };
                }
            }
        }
    }
    ValidationReport {
        kind: MetricKind::Ultrametric,
        witness: None,
    }
}

fn max_attained_twice(values: &[f64], tol: f64) -> bool {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().filter(|&&v| max - v <= tol).count() >= 2
}

/// A rooted equidistant tree: leaf labels, one positive length per internal
/// edge (keyed by its clade), derived external edge lengths, and the common
/// root-to-leaf height.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistantTree {
    leaf_labels: Vec<String>,
    internal_edges: BTreeMap<Clade, f64>,
    external_edges: Vec<f64>,
    height: f64,
}

impl EquidistantTree {
    /// Builds a tree from labels, internal edges, and a height.  The clade
    /// keys must form a nested family; external lengths are derived from
    /// the height equation and must come out nonnegative.
    pub fn new(
        leaf_labels: Vec<String>,
        internal_edges: Vec<(Clade, f64)>,
        height: f64,
    ) -> Result<Self> {
        let n = leaf_labels.len();
        if n < 2 {
            return Err(Error::TooFewLeaves(n));
        }
        for (k, label) in leaf_labels.iter().enumerate() {
            if leaf_labels[..k].contains(label) {
                return Err(Error::DuplicateLeafLabel(label.clone()));
            }
        }
        if height <= 0.0 || !height.is_finite() {
            return Err(Error::HeightTooSmall {
                height,
                leaf: 0,
                external: f64::NAN,
            });
        }
        // Nested-family validation is exactly the topology constructor's job.
        Topology::new(n, internal_edges.iter().map(|(c, _)| c.clone()).collect())?;
        let edges: BTreeMap<Clade, f64> = internal_edges.into_iter().collect();
        for (clade, &len) in &edges {
            if len <= 0.0 || !len.is_finite() {
                return Err(Error::NonPositiveInternalEdge(clade.leaves().to_vec()));
            }
        }
        let slack = DEFAULT_TOL * height.max(1.0);
        let mut external_edges = Vec::with_capacity(n);
        for leaf in 1..=n {
            let above: f64 = edges
                .iter()
                .filter(|(c, _)| c.contains(leaf))
                .map(|(_, &len)| len)
                .sum();
            let external = height - above;
            if external < -slack {
                return Err(Error::HeightTooSmall {
                    height,
                    leaf,
                    external,
                });
            }
            external_edges.push(external.max(0.0));
        }
        Ok(Self {
            leaf_labels,
            internal_edges: edges,
            external_edges,
            height,
        })
    }

    /// Same, with the default labels "1".."N".
    pub fn with_default_labels(
        leaf_count: usize,
        internal_edges: Vec<(Clade, f64)>,
        height: f64,
    ) -> Result<Self> {
        Self::new(
            (1..=leaf_count).map(|i| i.to_string()).collect(),
            internal_edges,
            height,
        )
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_labels.len()
    }

    pub fn leaf_labels(&self) -> &[String] {
        &self.leaf_labels
    }

    pub fn internal_edges(&self) -> &BTreeMap<Clade, f64> {
        &self.internal_edges
    }

    pub fn internal_clades(&self) -> Vec<Clade> {
        self.internal_edges.keys().cloned().collect()
    }

    /// External edge length of the 1-based leaf.
    pub fn external_edge(&self, leaf: usize) -> f64 {
        self.external_edges[leaf - 1]
    }

    pub fn external_edges(&self) -> &[f64] {
        &self.external_edges
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// The clade family of this tree, as a topology value.
    pub fn topology(&self) -> Topology {
        Topology::new(self.leaf_count(), self.internal_clades())
            .expect("tree clades form a nested family")
    }

    /// Direct children of an internal vertex; `None` addresses the root.
    pub(crate) fn children(&self, of: Option<&Clade>) -> Vec<TreeChild> {
        let member = |leaf: usize| of.is_none_or(|c| c.contains(leaf));
        let inside: Vec<&Clade> = self
            .internal_edges
            .keys()
            .filter(|c| match of {
                Some(parent) => c.len() < parent.len() && c.is_subset_of(parent),
                None => true,
            })
            .collect();
        let mut out: Vec<TreeChild> = inside
            .iter()
            .filter(|c| {
                !inside
                    .iter()
                    .any(|d| c.len() < d.len() && c.is_subset_of(d))
            })
            .map(|c| TreeChild::Internal((*c).clone()))
            .collect();
        for leaf in 1..=self.leaf_count() {
            if member(leaf) && !inside.iter().any(|c| c.contains(leaf)) {
                out.push(TreeChild::Leaf(leaf));
            }
        }
        out.sort_by_key(|child| match child {
            TreeChild::Leaf(leaf) => *leaf,
            TreeChild::Internal(c) => c.leaves()[0],
        });
        out
    }
}

#[derive(Debug, Clone)]
pub(crate) enum TreeChild {
    Leaf(usize),
    Internal(Clade),
}

/// The cophenetic vector of an equidistant tree:
/// w(i,j) = 2h − 2·Σ over clades containing both i and j of ℓ(S).
pub fn tree_to_vector(tree: &EquidistantTree) -> PairVector {
    let n = tree.leaf_count();
    let coords = pairs(n)
        .map(|(i, j)| {
            let shared: f64 = tree
                .internal_edges
                .iter()
                .filter(|(c, _)| c.contains(i) && c.contains(j))
                .map(|(_, &len)| len)
                .sum();
            2.0 * tree.height - 2.0 * shared
        })
        .collect();
    PairVector::new(n, coords).expect("tree produces a well-shaped vector")
}

/// Realizes an ultrametric as an equidistant tree.
///
/// With `height` given, the vector is translated on the torus so the root
/// sits at exactly that height (an error when some external edge would come
/// out negative).  Without it, the minimal admissible height max(w)/2 is
/// used, which gives the deepest leaves zero slack.
pub fn vector_to_tree(w: &PairVector, height: Option<f64>, tol: f64) -> Result<EquidistantTree> {
    let topology = crate::topology::topology_of(w, tol)?;
    let n = w.leaf_count();
    let max = w.max_coord();
    let h = height.unwrap_or(max / 2.0);
    let shift = 2.0 * h - max;

    // Merge height of each clade: half the (translated) coordinate value of
    // any pair whose closure it is.
    let mut merge = BTreeMap::new();
    for (i, j) in pairs(n) {
        if let Some(k) = topology.closure_index(i, j)? {
            let entry = merge
                .entry(topology.clades()[k].clone())
                .or_insert(f64::INFINITY);
            *entry = entry.min((w.get(i, j) + shift) / 2.0);
        }
    }
    let parent_height = |clade: &Clade| {
        merge
            .iter()
            .filter(|(c, _)| c.len() > clade.len() && clade.is_subset_of(c))
            .map(|(_, &v)| v)
            .fold(h, f64::min)
    };
    let internal_edges = merge
        .iter()
        .map(|(clade, &v)| (clade.clone(), parent_height(clade) - v))
        .collect();
    EquidistantTree::with_default_labels(n, internal_edges, h).map_err(|e| match e {
        // Surface the caller's height request in the error.
        Error::HeightTooSmall { leaf, external, .. } => Error::HeightTooSmall {
            height: h,
            leaf,
            external,
        },
        other => other,
    })
}

/// Graphviz DOT rendering of the tree, edges labeled with their lengths.
pub fn tree_to_dot(tree: &EquidistantTree, name: &str) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=point];").unwrap();
    out.push_str(&tree_dot_body(tree, "", "  "));
    writeln!(out, "}}").unwrap();
    out
}

/// Node and edge lines for one tree, with node ids prefixed so several
/// trees can share a graph.
pub(crate) fn tree_dot_body(tree: &EquidistantTree, prefix: &str, indent: &str) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for (k, label) in tree.leaf_labels.iter().enumerate() {
        writeln!(
            out,
            "{indent}{prefix}leaf{} [shape=plaintext, label=\"{}\"];",
            k + 1,
            label.replace('"', "\\\"")
        )
        .unwrap();
    }
    let clades = tree.internal_clades();
    let node_id = |child: &TreeChild| match child {
        TreeChild::Leaf(leaf) => format!("{prefix}leaf{leaf}"),
        TreeChild::Internal(c) => format!(
            "{prefix}v{}",
            clades.iter().position(|d| d == c).expect("known clade")
        ),
    };
    let mut stack: Vec<(String, Option<Clade>)> = vec![(format!("{prefix}root"), None)];
    while let Some((id, of)) = stack.pop() {
        for child in tree.children(of.as_ref()) {
            let child_id = node_id(&child);
            let length = match &child {
                TreeChild::Leaf(leaf) => tree.external_edge(*leaf),
                TreeChild::Internal(c) => tree.internal_edges[c],
            };
            writeln!(out, "{indent}{id} -> {child_id} [label=\"{length:.6}\"];").unwrap();
            if let TreeChild::Internal(c) = child {
                stack.push((child_id, Some(c)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn five_leaf_tree() -> EquidistantTree {
        EquidistantTree::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into(), "E".into()],
            vec![
                (Clade::from([1, 2]), 12.0),
                (Clade::from([3, 4, 5]), 10.0),
                (Clade::from([4, 5]), 5.0),
            ],
            20.0,
        )
        .unwrap()
    }

    pub(crate) fn five_leaf_vector() -> PairVector {
        PairVector::new(
            5,
            vec![16.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0, 20.0, 20.0, 10.0],
        )
        .unwrap()
    }

    #[test]
    fn four_point_condition() {
        assert_eq!(
            is_tree_metric(&five_leaf_vector(), 1e-9).kind,
            MetricKind::TreeMetric
        );

        let zeros = PairVector::new(4, vec![0.0; 6]).unwrap();
        assert_eq!(is_tree_metric(&zeros, 1e-9).kind, MetricKind::TreeMetric);

        // Sums 4, 2, 2: the maximum is attained only once.
        let w = PairVector::new(4, vec![1.0, 1.0, 1.0, 1.0, 1.0, 3.0]).unwrap();
        let report = is_tree_metric(&w, 1e-9);
        assert_eq!(report.kind, MetricKind::Neither);
        assert_eq!(report.witness, Some(vec![1, 2, 3, 4]));
    }

    #[test]
    fn three_point_condition() {
        assert_eq!(
            is_ultrametric(&five_leaf_vector(), 1e-9).kind,
            MetricKind::Ultrametric
        );

        let star = PairVector::new(5, vec![3.0; 10]).unwrap();
        assert_eq!(is_ultrametric(&star, 1e-9).kind, MetricKind::Ultrametric);

        let w = PairVector::new(3, vec![1.0, 2.0, 3.0]).unwrap();
        let report = is_ultrametric(&w, 1e-9);
        assert_eq!(report.kind, MetricKind::Neither);
        assert_eq!(report.witness, Some(vec![1, 2, 3]));
    }

    #[test]
    fn cophenetic_vector_of_the_five_leaf_tree() {
        assert_eq!(
            tree_to_vector(&five_leaf_tree()).coords(),
            five_leaf_vector().coords()
        );
    }

    #[test]
    fn star_tree_vector() {
        let star = EquidistantTree::with_default_labels(4, vec![], 3.0).unwrap();
        assert_eq!(tree_to_vector(&star).coords(), &[6.0; 6]);
    }

    #[test]
    fn height1_four_leaf_tree() {
        let t1 = EquidistantTree::with_default_labels(
            4,
            vec![(Clade::from([1, 2, 3]), 0.6), (Clade::from([1, 2]), 0.2)],
            1.0,
        )
        .unwrap();
        let w = tree_to_vector(&t1);
        let expected = [0.4, 0.8, 2.0, 0.8, 2.0, 2.0];
        for (a, b) in w.coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t1.external_edge(1) - 0.2).abs() < 1e-12);
        assert!((t1.external_edge(3) - 0.4).abs() < 1e-12);
        assert!((t1.external_edge(4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_realization_recovers_the_five_leaf_tree() {
        let tree = vector_to_tree(&five_leaf_vector(), Some(20.0), 1e-9).unwrap();
        assert_eq!(tree.internal_clades(), five_leaf_tree().internal_clades());
        for (clade, len) in tree.internal_edges() {
            assert!((len - five_leaf_tree().internal_edges()[clade]).abs() < 1e-9);
        }
        assert_eq!(tree.height(), 20.0);

        // Default height is max(w)/2, here the same 20.
        let tree = vector_to_tree(&five_leaf_vector(), None, 1e-9).unwrap();
        assert_eq!(tree.height(), 20.0);

        // Asking for too small a height fails: leaf 1 would need a negative
        // external edge once the deepest pair is pushed below zero.
        assert!(matches!(
            vector_to_tree(&five_leaf_vector(), Some(10.0), 1e-9),
            Err(Error::HeightTooSmall { .. })
        ));
    }

    #[test]
    fn star_vector_realizes_star_tree() {
        let w = PairVector::new(4, vec![6.0; 6]).unwrap();
        let tree = vector_to_tree(&w, None, 1e-9).unwrap();
        assert!(tree.internal_edges().is_empty());
        assert_eq!(tree.height(), 3.0);
    }

    #[test]
    fn round_trip_is_torus_identity() {
        for seed in 0..20 {
            let tree = random_coalescent_tree(6, seed).unwrap();
            let w = tree_to_vector(&tree);
            let back = tree_to_vector(&vector_to_tree(&w, None, 1e-9).unwrap());
            assert!(w.torus_eq(&back, 1e-9).unwrap());
        }
    }

    #[test]
    fn rejects_negative_externals_and_bad_edges() {
        assert!(matches!(
            EquidistantTree::with_default_labels(3, vec![(Clade::from([1, 2]), 2.0)], 1.0),
            Err(Error::HeightTooSmall { .. })
        ));
        assert!(matches!(
            EquidistantTree::with_default_labels(3, vec![(Clade::from([1, 2]), 0.0)], 1.0),
            Err(Error::NonPositiveInternalEdge(_))
        ));
        assert!(matches!(
            EquidistantTree::new(vec!["A".into(), "A".into()], vec![], 1.0),
            Err(Error::DuplicateLeafLabel(_))
        ));
    }

    #[test]
    fn perturbing_an_external_edge_breaks_the_three_point_condition() {
        // Lengthening one external edge breaks equidistance; the pairwise
        // distances recomputed from the perturbed tree stop being an
        // ultrametric (they remain a tree metric).
        let tree = five_leaf_tree();
        let mut w = tree_to_vector(&tree);
        let eps = 1.0;
        // Leaf 1 gains eps on its external edge: every pair through leaf 1
        // grows by eps.
        let coords: Vec<f64> = pairs(5)
            .zip(w.coords())
            .map(|((i, j), &v)| if i == 1 || j == 1 { v + eps } else { v })
            .collect();
        w = PairVector::new(5, coords).unwrap();
        assert_eq!(is_ultrametric(&w, 1e-9).kind, MetricKind::Neither);
        assert_eq!(is_tree_metric(&w, 1e-9).kind, MetricKind::TreeMetric);
    }
}
