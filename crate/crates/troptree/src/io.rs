//! On-disk formats: Newick text, vector JSON, topology JSON, and the JSON
//! documents emitted for segments and compatibility runs.
//!
//! Tree-valued inputs are auto-detected by their first non-blank byte:
//! `(` starts Newick, `{` starts JSON.  Vector JSON carries the leaf count,
//! optional labels, and the coordinates in the fixed lexicographic pair
//! order: `{"leaf_count": N, "labels": [...], "coords": [...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compat::CompatReport;
use crate::error::{Error, Result};
use crate::segment::{SegmentTopology, TropicalSegment};
use crate::topology::Topology;
use crate::torus::PairVector;
use crate::treemetrics::{parse_newick, tree_to_vector, EquidistantTree};

/// The vector JSON document.
#[derive(Debug, Serialize, Deserialize)]
pub struct VectorFile {
    pub leaf_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub coords: Vec<f64>,
}

impl VectorFile {
    pub fn from_vector(w: &PairVector, labels: Option<&[String]>) -> Self {
        Self {
            leaf_count: w.leaf_count(),
            labels: Some(match labels {
                Some(labels) => labels.to_vec(),
                None => (1..=w.leaf_count()).map(|i| i.to_string()).collect(),
            }),
            coords: w.coords().to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(PairVector, Vec<String>)> {
        if let Some(labels) = &self.labels {
            if labels.len() != self.leaf_count {
                return Err(Error::UnrecognizedInput(format!(
                    "{} labels for {} leaves",
                    labels.len(),
                    self.leaf_count
                )));
            }
        }
        let labels = self
            .labels
            .unwrap_or_else(|| (1..=self.leaf_count).map(|i| i.to_string()).collect());
        Ok((PairVector::new(self.leaf_count, self.coords)?, labels))
    }
}

/// A parsed tree-valued input: always a vector, plus the tree itself when
/// the input was Newick.
#[derive(Debug)]
pub struct TreeInput {
    pub vector: PairVector,
    pub labels: Vec<String>,
    pub tree: Option<EquidistantTree>,
}

/// Parses Newick or vector JSON, detected by the leading character.
pub fn parse_tree_input(text: &str) -> Result<TreeInput> {
    match text.trim_start().chars().next() {
        Some('(') => {
            let tree = parse_newick(text)?;
            Ok(TreeInput {
                vector: tree_to_vector(&tree),
                labels: tree.leaf_labels().to_vec(),
                tree: Some(tree),
            })
        }
        Some('{') => {
            let file: VectorFile = serde_json::from_str(text)?;
            let (vector, labels) = file.into_parts()?;
            Ok(TreeInput {
                vector,
                labels,
                tree: None,
            })
        }
        _ => Err(Error::UnrecognizedInput(
            "expected Newick '(' or JSON '{'".into(),
        )),
    }
}

pub fn read_tree_input(path: &Path) -> Result<TreeInput> {
    parse_tree_input(&fs::read_to_string(path)?)
}

/// Reads a topology JSON file; validation happens in deserialization.
pub fn read_topology_file(path: &Path) -> Result<Topology> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// The segment JSON document.
#[derive(Debug, Serialize)]
pub struct SegmentFile {
    pub leaf_count: usize,
    pub lambdas: Vec<f64>,
    pub bend_points: Vec<Vec<f64>>,
    pub topologies: Vec<SegmentTopology>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

impl SegmentFile {
    pub fn new(
        seg: &TropicalSegment,
        bend_points: &[PairVector],
        topologies: Vec<SegmentTopology>,
        verified: Option<bool>,
    ) -> Self {
        Self {
            leaf_count: seg.from_point().leaf_count(),
            lambdas: seg.lambdas().to_vec(),
            bend_points: bend_points.iter().map(|p| p.coords().to_vec()).collect(),
            topologies,
            verified,
        }
    }
}

/// The compatibility JSON document.
#[derive(Debug, Serialize)]
pub struct CompatFile {
    pub leaf_count: usize,
    pub member_count: usize,
    pub reports: Vec<CompatReport>,
}

impl CompatFile {
    pub fn new(leaf_count: usize, reports: Vec<CompatReport>) -> Self {
        Self {
            leaf_count,
            member_count: reports.iter().filter(|r| r.member).count(),
            reports,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_json_round_trip() {
        let w = PairVector::new(3, vec![1.0, 2.0, 2.0]).unwrap();
        let json = serde_json::to_string(&VectorFile::from_vector(&w, None)).unwrap();
        let input = parse_tree_input(&json).unwrap();
        assert_eq!(input.vector.coords(), w.coords());
        assert_eq!(input.labels, ["1", "2", "3"]);
        assert!(input.tree.is_none());
    }

    #[test]
    fn newick_input_detected() {
        let input = parse_tree_input("(A:1,B:1);").unwrap();
        assert!(input.tree.is_some());
        assert_eq!(input.vector.coords(), &[2.0]);
        assert_eq!(input.labels, ["A", "B"]);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(parse_tree_input("hello").is_err());
        assert!(parse_tree_input(r#"{"leaf_count": 3, "coords": [1.0]}"#).is_err());
        assert!(parse_tree_input(
            r#"{"leaf_count": 3, "labels": ["a"], "coords": [1.0, 2.0, 2.0]}"#
        )
        .is_err());
    }
}
