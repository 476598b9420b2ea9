//! Tree topologies as nested families of clades, and the calculus built on
//! them: closures of leaf pairs, the equivalence `=_F` and partial order
//! `<_F`, full dimensionality, bifurcation, cone membership, topology
//! extraction from ultrametrics, and exhaustive enumeration.
//!
//! A topology on N leaves is a family F of clades S ⊆ {1,…,N} with
//! 2 ≤ |S| ≤ N−1 in which any two distinct clades are nested or disjoint.
//! Such a family has at most N−2 members; it is full dimensional when it
//! has exactly N−2, which happens exactly for binary tree shapes.  The set
//! of ultrametrics realizing F, written ut(F), is cut out by equalities
//! along `=_F` and strict inequalities along `<_F`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{pairs, PairVector};
use crate::treemetrics::{self, EquidistantTree, MetricKind};

/// A clade: a sorted, duplicate-free set of 1-based leaf labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clade {
    leaves: Vec<usize>,
}

impl Clade {
    /// Builds a clade from any leaf list; sorts and removes duplicates.
    pub fn new(mut leaves: Vec<usize>) -> Self {
        leaves.sort_unstable();
        leaves.dedup();
        Self { leaves }
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn contains(&self, leaf: usize) -> bool {
        self.leaves.binary_search(&leaf).is_ok()
    }

    pub fn is_subset_of(&self, other: &Clade) -> bool {
        self.leaves.iter().all(|&l| other.contains(l))
    }

    pub fn is_disjoint_from(&self, other: &Clade) -> bool {
        !self.leaves.iter().any(|&l| other.contains(l))
    }
}

impl<const K: usize> From<[usize; K]> for Clade {
    fn from(leaves: [usize; K]) -> Self {
        Clade::new(leaves.to_vec())
    }
}

/// How two leaf pairs relate under a topology F: their closures are equal,
/// strictly nested one way or the other, or incomparable.  Pairs sharing a
/// leaf are never incomparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRelation {
    Equal,
    Less,
    Greater,
    Incomparable,
}

#[derive(Serialize, Deserialize)]
struct TopologyData {
    leaf_count: usize,
    clades: Vec<Vec<usize>>,
}

/// A tree topology: a nested family of clades over the leaf set 1..=N.
///
/// Clades are held in sorted canonical order, so equal topologies compare
/// and hash equal, and enumeration output is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "TopologyData", into = "TopologyData")]
pub struct Topology {
    leaf_count: usize,
    clades: Vec<Clade>,
}

impl TryFrom<TopologyData> for Topology {
    type Error = Error;

    fn try_from(data: TopologyData) -> Result<Self> {
        Topology::new(
            data.leaf_count,
            data.clades.into_iter().map(Clade::new).collect(),
        )
    }
}

impl From<Topology> for TopologyData {
    fn from(t: Topology) -> Self {
        TopologyData {
            leaf_count: t.leaf_count,
            clades: t.clades.into_iter().map(|c| c.leaves).collect(),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, clade) in self.clades.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (m, leaf) in clade.leaves().iter().enumerate() {
                if m > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{leaf}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl Topology {
    /// Validates and canonicalizes a clade family: size bounds, leaf range,
    /// the nested-set trichotomy, and the |F| ≤ N−2 cardinality bound.
    pub fn new(leaf_count: usize, clades: Vec<Clade>) -> Result<Self> {
        if leaf_count < 2 {
            return Err(Error::TooFewLeaves(leaf_count));
        }
        let mut clades: Vec<Clade> = {
            let set: BTreeSet<Clade> = clades.into_iter().collect();
            set.into_iter().collect()
        };
        clades.sort();
        for clade in &clades {
            if clade.len() < 2 || clade.len() > leaf_count - 1 {
                return Err(Error::BadCladeSize(clade.leaves.clone()));
            }
            if let Some(&leaf) = clade.leaves.iter().find(|&&l| l == 0 || l > leaf_count) {
                return Err(Error::CladeOutOfRange {
                    clade: clade.leaves.clone(),
                    leaf,
                    leaves: leaf_count,
                });
            }
        }
        for (a, clade_a) in clades.iter().enumerate() {
            for clade_b in &clades[a + 1..] {
                let nested = clade_a.is_subset_of(clade_b) || clade_b.is_subset_of(clade_a);
                if !nested && !clade_a.is_disjoint_from(clade_b) {
                    return Err(Error::NotNested(
                        clade_a.leaves.clone(),
                        clade_b.leaves.clone(),
                    ));
                }
            }
        }
        if clades.len() > leaf_count - 2 {
            return Err(Error::TooManyClades {
                got: clades.len(),
                bound: leaf_count - 2,
            });
        }
        Ok(Self { leaf_count, clades })
    }

    /// The star topology: no clades at all.
    pub fn star(leaf_count: usize) -> Result<Self> {
        Self::new(leaf_count, Vec::new())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn clades(&self) -> &[Clade] {
        &self.clades
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || j == 0 || i == j || i > self.leaf_count || j > self.leaf_count {
            return Err(Error::InvalidPair {
                i,
                j,
                leaves: self.leaf_count,
            });
        }
        Ok(())
    }

    /// Index into `clades` of the smallest clade containing {i,j}, or `None`
    /// when no clade does (the closure is then the whole leaf set).
    pub fn closure_index(&self, i: usize, j: usize) -> Result<Option<usize>> {
        self.check_pair(i, j)?;
        let mut best: Option<usize> = None;
        for (k, clade) in self.clades.iter().enumerate() {
            if clade.contains(i) && clade.contains(j) {
                match best {
                    Some(b) if self.clades[b].len() <= clade.len() => {}
                    _ => best = Some(k),
                }
            }
        }
        Ok(best)
    }

    /// The closure of the pair {i,j}: the smallest clade containing both
    /// leaves, or the whole leaf set 1..=N when no clade does.
    pub fn closure(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        Ok(match self.closure_index(i, j)? {
            Some(k) => self.clades[k].leaves.clone(),
            None => (1..=self.leaf_count).collect(),
        })
    }

    /// Compares two pairs by closure containment: `Equal` when the closures
    /// coincide, `Less`/`Greater` for strict containment, `Incomparable`
    /// otherwise.  Pairs sharing a leaf are always comparable.
    pub fn compare(&self, p: (usize, usize), q: (usize, usize)) -> Result<PairRelation> {
        let cp = self.closure_index(p.0, p.1)?;
        let cq = self.closure_index(q.0, q.1)?;
        Ok(match (cp, cq) {
            (a, b) if a == b => PairRelation::Equal,
            (Some(_), None) => PairRelation::Less,
            (None, Some(_)) => PairRelation::Greater,
            (Some(a), Some(b)) => {
                let (ca, cb) = (&self.clades[a], &self.clades[b]);
                if ca.is_subset_of(cb) {
                    PairRelation::Less
                } else if cb.is_subset_of(ca) {
                    PairRelation::Greater
                } else {
                    PairRelation::Incomparable
                }
            }
            (None, None) => unreachable!("covered by the equality arm"),
        })
    }

    /// True exactly when |F| = N−2.
    pub fn is_full_dimensional(&self) -> bool {
        self.clades.len() == self.leaf_count - 2
    }

    /// True when every S in F̄ = {S ∈ F : |S| ≥ 3} ∪ {[N]} splits in exactly
    /// one of the two admissible ways: a sub-clade of size |S|−1, or two
    /// disjoint sub-clades covering S.
    pub fn is_bifurcated(&self) -> bool {
        let ground = Clade::new((1..=self.leaf_count).collect());
        self.clades
            .iter()
            .filter(|s| s.len() >= 3)
            .chain(std::iter::once(&ground))
            .all(|s| {
                let inside: Vec<&Clade> = self
                    .clades
                    .iter()
                    .filter(|c| c.len() < s.len() && c.is_subset_of(s))
                    .collect();
                let peel = inside.iter().any(|c| c.len() == s.len() - 1);
                let split = inside.iter().enumerate().any(|(k, a)| {
                    inside[k + 1..]
                        .iter()
                        .any(|b| a.is_disjoint_from(b) && a.len() + b.len() == s.len())
                });
                peel != split
            })
    }

    /// A representative point of ut(F): each coordinate is the size of the
    /// pair's closure (with N for the whole leaf set).  Closure sizes grow
    /// strictly along containment, so this always lies in the open cone.
    pub fn representative_ultrametric(&self) -> PairVector {
        let n = self.leaf_count;
        let coords = pairs(n)
            .map(
                |(i, j)| match self.closure_index(i, j).expect("valid pair") {
                    Some(k) => self.clades[k].len() as f64,
                    None => n as f64,
                },
            )
            .collect();
        PairVector::new(n, coords).expect("representative has the right shape")
    }
}

/// True when the rooted tree is binary: every internal vertex, the root
/// included (counting its virtual root edge), is trivalent.  Equivalently
/// every internal node has exactly two children.
pub fn is_binary(tree: &EquidistantTree) -> bool {
    let n = tree.leaf_count();
    let mut nodes = tree.internal_clades();
    nodes.push(Clade::new((1..=n).collect()));
    nodes.iter().all(|s| {
        // Children of S: its maximal proper sub-clades plus uncovered leaves.
        let inside: Vec<&Clade> = nodes
            .iter()
            .filter(|c| c.len() < s.len() && c.is_subset_of(s))
            .collect();
        let maximal: Vec<&&Clade> = inside
            .iter()
            .filter(|c| {
                !inside
                    .iter()
                    .any(|d| c.len() < d.len() && c.is_subset_of(d))
            })
            .collect();
        let covered: usize = maximal.iter().map(|c| c.len()).sum();
        maximal.len() + (s.len() - covered) == 2
    })
}

/// True when `w` lies in ut(F): coordinates agree on `=_F`-equivalent pairs
/// (within `tol`) and drop strictly along `<_F` (by more than `tol`).
///
/// Errors if `w` is not an ultrametric or the leaf counts differ.
pub fn ut_membership(f: &Topology, w: &PairVector, tol: f64) -> Result<bool> {
    if f.leaf_count != w.leaf_count() {
        return Err(Error::LeafCountMismatch {
            left: f.leaf_count,
            right: w.leaf_count(),
        });
    }
    let report = treemetrics::is_ultrametric(w, tol);
    if report.kind != MetricKind::Ultrametric {
        let witness = report
            .witness
            .expect("non-ultrametric report has a witness");
        return Err(Error::NotUltrametric([witness[0], witness[1], witness[2]]));
    }

    // One value per closure class; classes indexed 0..=|F| with |F| = ground.
    let ground = f.clades.len();
    let mut lo = vec![f64::INFINITY; ground + 1];
    let mut hi = vec![f64::NEG_INFINITY; ground + 1];
    for (i, j) in pairs(f.leaf_count) {
        let class = f.closure_index(i, j)?.unwrap_or(ground);
        let v = w.get(i, j);
        lo[class] = lo[class].min(v);
        hi[class] = hi[class].max(v);
    }
    // Equality within each class.
    if (0..=ground).any(|c| lo[c].is_finite() && hi[c] - lo[c] > tol) {
        return Ok(false);
    }
    // Strict drop along containment, clade-to-clade and clade-to-ground.
    for (a, clade_a) in f.clades.iter().enumerate() {
        if lo[a].is_infinite() {
            continue;
        }
        if lo[ground].is_finite() && hi[a] >= lo[ground] - tol {
            return Ok(false);
        }
        for (b, clade_b) in f.clades.iter().enumerate() {
            if a != b && lo[b].is_finite() && clade_a.is_subset_of(clade_b) && hi[a] >= lo[b] - tol
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Reads the unique topology F with `w ∈ ut(F)` off an ultrametric by
/// single-linkage merging at its distinct coordinate values (values within
/// `tol` of a level's first value count as that level).
pub fn topology_of(w: &PairVector, tol: f64) -> Result<Topology> {
    let report = treemetrics::is_ultrametric(w, tol);
    if report.kind != MetricKind::Ultrametric {
        let witness = report
            .witness
            .expect("non-ultrametric report has a witness");
        return Err(Error::NotUltrametric([witness[0], witness[1], witness[2]]));
    }
    let n = w.leaf_count();
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    let mut order: Vec<usize> = (0..pair_list.len()).collect();
    order.sort_by(|&a, &b| w.coords()[a].total_cmp(&w.coords()[b]));

    let mut dsu = DisjointSets::new(n + 1);
    let mut clades = BTreeSet::new();
    let mut k = 0;
    while k < order.len() {
        let level = w.coords()[order[k]];
        while k < order.len() && w.coords()[order[k]] <= level + tol {
            let (i, j) = pair_list[order[k]];
            dsu.union(i, j);
            k += 1;
        }
        for block in dsu.blocks(1..=n) {
            if (2..n).contains(&block.len()) {
                clades.insert(Clade::new(block));
            }
        }
    }
    Topology::new(n, clades.into_iter().collect())
}

/// Enumerates topologies on 1..=N in sorted canonical order.  With
/// `full_dim_only` the result is exactly the (2N−3)!! full-dimensional
/// families (one per rooted binary shape); otherwise every nested family,
/// the empty star topology included.
///
/// Guarded to 3 ≤ N ≤ 8.
pub fn enumerate_topologies(leaf_count: usize, full_dim_only: bool) -> Result<Vec<Topology>> {
    if !(3..=8).contains(&leaf_count) {
        return Err(Error::LeafCountOutOfRange {
            got: leaf_count,
            min: 3,
            max: 8,
        });
    }
    let leaves: Vec<usize> = (1..=leaf_count).collect();
    let full = binary_clade_sets(&leaves);
    let mut out: Vec<Topology> = if full_dim_only {
        full.into_iter()
            .map(|clades| Topology::new(leaf_count, clades).expect("enumerated family is nested"))
            .collect()
    } else {
        let mut seen: BTreeSet<Vec<Clade>> = BTreeSet::new();
        for clades in &full {
            for mask in 0..1u32 << clades.len() {
                let subset: Vec<Clade> = clades
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, c)| c.clone())
                    .collect();
                seen.insert({
                    let mut s = subset;
                    s.sort();
                    s
                });
            }
        }
        seen.into_iter()
            .map(|clades| Topology::new(leaf_count, clades).expect("subfamily is nested"))
            .collect()
    };
    out.sort();
    Ok(out)
}

/// Clade sets of all rooted binary shapes on `leaves`, built by recursive
/// bipartition: the root splits the set in two, each side recurses, and a
/// side of size ≥ 2 contributes itself as a clade.
fn binary_clade_sets(leaves: &[usize]) -> Vec<Vec<Clade>> {
    if leaves.len() <= 2 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let rest = &leaves[1..];
    // Unordered bipartitions: the first leaf always goes left.
    for mask in 0..(1u32 << rest.len()) - 1 {
        let mut left = vec![leaves[0]];
        let mut right = Vec::new();
        for (k, &leaf) in rest.iter().enumerate() {
            if mask >> k & 1 == 1 {
                left.push(leaf);
            } else {
                right.push(leaf);
            }
        }
        for sub_left in binary_clade_sets(&left) {
            for sub_right in binary_clade_sets(&right) {
                let mut clades = sub_left.clone();
                clades.extend(sub_right.iter().cloned());
                if left.len() >= 2 {
                    clades.push(Clade::new(left.clone()));
                }
                if right.len() >= 2 {
                    clades.push(Clade::new(right.clone()));
                }
                out.push(clades);
            }
        }
    }
    out
}

/// Plain union-find over 0..n.
struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn blocks(&mut self, range: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in range {
            by_root.entry(self.find(x)).or_default().push(x);
        }
        by_root.into_values().collect()
    }
}

/// Renders the tree realized by a topology's representative ultrametric as
/// Graphviz DOT (see [`crate::treemetrics::tree_to_dot`]).
pub fn topology_to_dot(f: &Topology) -> String {
    let w = f.representative_ultrametric();
    let tree = treemetrics::vector_to_tree(&w, None, crate::torus::DEFAULT_TOL)
        .expect("representative ultrametric realizes a tree");
    treemetrics::tree_to_dot(&tree, "topology")
}
