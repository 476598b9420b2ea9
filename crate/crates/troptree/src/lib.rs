//! Tropical geometry of equidistant phylogenetic trees.
//!
//! Equidistant trees on N leaves, read as cophenetic vectors, form the
//! space of ultrametrics inside the tropical projective torus ℝⁿ/ℝ𝟏
//! (n = N(N−1)/2).  That space is tropically convex: the max-plus line
//! segment between two ultrametrics stays inside it, so the segment can be
//! walked as a sequence of equidistant trees.  This crate computes those
//! segments and studies the tree shapes along them:
//!
//! * [`torus`] — max-plus arithmetic, the tropical metric, canonical torus
//!   representatives, and leaf relabeling.
//! * [`treemetrics`] — the three- and four-point conditions, conversion
//!   between trees and vectors, Newick text, and coalescent sampling.
//! * [`topology`] — clade families, the closure calculus, cone membership,
//!   topology extraction, and enumeration of all (2N−3)!! binary shapes.
//! * [`segment`] — tropical line segments: bending points, the topology
//!   itinerary, origin avoidance, and relabeling equivariance.
//! * [`compat`] — which topologies can appear as the tropical sum of two
//!   cones: a necessary-condition filter plus an exact search.
//! * [`cli`] / [`io`] — the `troptree` command set and its file formats.
//!
//! The `examples/` directory has one runnable walkthrough per capability;
//! start with `cargo run --example segment_walkthrough`.

pub mod cli;
pub mod compat;
pub mod error;
pub mod io;
pub mod segment;
pub mod topology;
pub mod torus;
pub mod treemetrics;

pub use compat::{compatibility_set, decide_membership, necessary_condition, CompatReport};
pub use error::{Error, Result};
pub use segment::{
    check_equivariance, contains_origin, rescale_to_diameter, segment_topologies, tropical_segment,
    tropical_segment_unchecked, LambdaInterval, SegmentTopology, TropicalSegment,
};
pub use topology::{
    enumerate_topologies, is_binary, topology_of, ut_membership, Clade, PairRelation, Topology,
};
pub use torus::{LeafPermutation, PairVector, DEFAULT_TOL};
pub use treemetrics::{
    is_tree_metric, is_ultrametric, parse_newick, random_coalescent_tree, tree_to_vector,
    vector_to_tree, write_newick, EquidistantTree, MetricKind, ValidationReport,
};
