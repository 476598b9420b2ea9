//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building or combining tree-space values.
#[derive(Debug, Error)]
pub enum Error {
    /// Two pair vectors with different coordinate counts were combined.
    #[error("dimension mismatch: {left} vs {right} coordinates")]
    DimensionMismatch { left: usize, right: usize },

    /// Two values built over different leaf sets were combined.
    #[error("leaf count mismatch: {left} vs {right}")]
    LeafCountMismatch { left: usize, right: usize },

    /// A pair vector was built with the wrong number of coordinates.
    #[error("expected {expected} coordinates for {leaf_count} leaves, got {got}")]
    BadCoordinateCount {
        leaf_count: usize,
        expected: usize,
        got: usize,
    },

    /// A coordinate was NaN or infinite.
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    /// Fewer than two leaves.
    #[error("leaf count {0} is too small (need at least 2)")]
    TooFewLeaves(usize),

    /// A permutation whose length does not match the leaf count.
    #[error("permutation acts on {perm} labels but the vector has {leaves} leaves")]
    PermutationLengthMismatch { perm: usize, leaves: usize },

    /// The given mapping is not a bijection of 1..=N.
    #[error("mapping is not a permutation of 1..={0}")]
    NotAPermutation(usize),

    /// A leaf index outside 1..=N, or a degenerate pair {i,i}.
    #[error("invalid leaf pair ({i},{j}) for {leaves} leaves")]
    InvalidPair { i: usize, j: usize, leaves: usize },

    /// A clade violated the size bounds 2 <= |S| <= N-1.
    #[error("clade {0:?} violates the size bounds 2 <= |S| <= N-1")]
    BadCladeSize(Vec<usize>),

    /// A clade mentions a leaf outside 1..=N.
    #[error("clade {clade:?} mentions leaf {leaf}, outside 1..={leaves}")]
    CladeOutOfRange {
        clade: Vec<usize>,
        leaf: usize,
        leaves: usize,
    },

    /// Two clades overlap without one containing the other.
    #[error("clades {0:?} and {1:?} are neither nested nor disjoint")]
    NotNested(Vec<usize>, Vec<usize>),

    /// A nested family larger than the N-2 bound.
    #[error("{got} clades exceed the bound N-2 = {bound}")]
    TooManyClades { got: usize, bound: usize },

    /// An operation that only applies to full-dimensional topologies got a
    /// degenerate one.
    #[error("topology has {got} clades but must be full dimensional ({needed})")]
    NotFullDimensional { got: usize, needed: usize },

    /// An operation that requires an ultrametric got something else.
    #[error("input is not an ultrametric (witness triple {0:?})")]
    NotUltrametric([usize; 3]),

    /// An internal edge with non-positive length.
    #[error("internal edge for clade {0:?} must have positive length")]
    NonPositiveInternalEdge(Vec<usize>),

    /// A tree whose height cannot accommodate its internal edges.
    #[error("height {height} is too small: leaf {leaf} would get external length {external}")]
    HeightTooSmall {
        height: f64,
        leaf: usize,
        external: f64,
    },

    /// Newick text that could not be parsed.
    #[error("newick parse error at byte {offset}: {message}")]
    NewickSyntax { offset: usize, message: String },

    /// A Newick tree whose root-to-leaf path sums differ.
    #[error("tree is not equidistant: leaf {leaf} has root path {got}, expected {expected}")]
    NotEquidistant {
        leaf: usize,
        got: f64,
        expected: f64,
    },

    /// The same leaf label appears twice.
    #[error("duplicate leaf label {0:?}")]
    DuplicateLeafLabel(String),

    /// Enumeration or search asked for a leaf count outside the supported range.
    #[error("leaf count {got} out of supported range {min}..={max}")]
    LeafCountOutOfRange { got: usize, min: usize, max: usize },

    /// The compatibility search would branch over too many assignments.
    #[error("search bound exceeded: {got} constraint triples (limit {limit})")]
    SearchBoundExceeded { got: usize, limit: usize },

    /// A lambda outside the segment's range was requested.
    #[error("lambda {lambda} outside segment range [{min}, {max}]")]
    LambdaOutOfRange { lambda: f64, min: f64, max: f64 },

    /// Sampling found a topology change inside an open interval; the
    /// piecewise-constancy assumption does not hold for this input.
    #[error("topology not constant on the open interval ({0}, {1})")]
    UnstableIntervalTopology(f64, f64),

    /// I/O failure while reading an input file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Input file in neither Newick nor JSON form, or JSON with the
    /// wrong shape for the requested command.
    #[error("unrecognized input: {0}")]
    UnrecognizedInput(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
