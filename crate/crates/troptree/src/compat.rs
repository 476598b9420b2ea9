//! Compatibility of tree topologies under tropical addition.
//!
//! A topology F is compatible with the pair (F₁, F₂) when some ultrametrics
//! w¹ ∈ ut(F₁) and w² ∈ ut(F₂) have w¹ ⊞ w² ∈ ut(F); the set of such F is
//! written C(F₁,F₂) and lists every topology a tropical line segment between
//! the two cones can traverse.
//!
//! Two tools are provided.  The necessary-condition filter checks that every
//! `=_F` equivalence class of pairs sits inside a single `=_F₁` class or a
//! single `=_F₂` class; for fully dimensional triples this is necessary for
//! membership, but not sufficient.  The exact decision procedure searches
//! over which side attains the coordinatewise maximum — one binary choice
//! per distinct closure-class triple (cl_F(p), cl_F₁(p), cl_F₂(p)) — and
//! tests each choice by feasibility of a digraph of weak and strict order
//! constraints: infeasible exactly when some strongly connected component
//! contains a strict edge.  A feasible choice yields a concrete witness by
//! longest-path leveling, which is then re-verified against all three cones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::topology::{enumerate_topologies, ut_membership, Topology};
use crate::torus::{pairs, PairVector};

/// Hard cap on distinct closure-class triples in one decision;
/// past this the assignment search is declared out of bounds.
const TRIPLE_LIMIT: usize = 48;

/// Hard cap on explored search nodes, in case pruning degenerates.
const NODE_LIMIT: usize = 10_000_000;

/// Outcome of deciding one candidate topology against a pair of topologies.
#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub candidate: Topology,
    /// Value of the necessary-condition filter (vacuously true when the
    /// candidate is not full dimensional, where the filter does not apply).
    pub passes_necessary: bool,
    /// Whether the exact search ran to completion.
    pub decided: bool,
    pub member: bool,
    /// A realizing pair (w¹, w²) with w¹ ⊞ w² in the candidate's cone.
    pub witness: Option<(PairVector, PairVector)>,
}

/// The necessary condition for F ∈ C(F₁,F₂) among full-dimensional
/// topologies: every equivalence class of `=_F` is contained in a single
/// equivalence class of `=_F₁` or in a single one of `=_F₂`.
///
/// F₁ and F₂ may be degenerate, but F itself must be full dimensional.
pub fn necessary_condition(f1: &Topology, f2: &Topology, f: &Topology) -> Result<bool> {
    check_same_leaves(f1, f2, f)?;
    if !f.is_full_dimensional() {
        return Err(Error::NotFullDimensional {
            got: f.clades().len(),
            needed: f.leaf_count() - 2,
        });
    }
    let n = f.leaf_count();
    let ground = f.clades().len();
    let mut class_members: Vec<Vec<(Option<usize>, Option<usize>)>> = vec![Vec::new(); ground + 1];
    for (i, j) in pairs(n) {
        let c = f.closure_index(i, j)?.unwrap_or(ground);
        class_members[c].push((f1.closure_index(i, j)?, f2.closure_index(i, j)?));
    }
    Ok(class_members.iter().all(|members| {
        members.iter().all(|m| m.0 == members[0].0) || members.iter().all(|m| m.1 == members[0].1)
    }))
}

fn check_same_leaves(f1: &Topology, f2: &Topology, f: &Topology) -> Result<()> {
    for other in [f2, f] {
        if f1.leaf_count() != other.leaf_count() {
            return Err(Error::LeafCountMismatch {
                left: f1.leaf_count(),
                right: other.leaf_count(),
            });
        }
    }
    Ok(())
}

/// Exactly decides F ∈ C(F₁,F₂).
///
/// When all three topologies are full dimensional and the necessary
/// condition fails, that is already a sound negative.  Otherwise the
/// assignment search runs; it either produces a verified witness or proves
/// that every max-attainment pattern is order-infeasible.
pub fn decide_membership(f1: &Topology, f2: &Topology, f: &Topology) -> Result<CompatReport> {
    check_same_leaves(f1, f2, f)?;
    let all_full_dim =
        f.is_full_dimensional() && f1.is_full_dimensional() && f2.is_full_dimensional();
    let passes_necessary = if f.is_full_dimensional() {
        necessary_condition(f1, f2, f)?
    } else {
        true
    };
    if all_full_dim && !passes_necessary {
        return Ok(CompatReport {
            candidate: f.clone(),
            passes_necessary,
            decided: true,
            member: false,
            witness: None,
        });
    }

    let witness = AssignmentSearch::new(f1, f2, f)?.run()?;
    if let Some((w1, w2)) = &witness {
        let sum = w1.trop_sum(w2)?;
        assert!(
            ut_membership(f1, w1, 1e-9)?
                && ut_membership(f2, w2, 1e-9)?
                && ut_membership(f, &sum, 1e-9)?,
            "extracted witness failed cone verification"
        );
    }
    Ok(CompatReport {
        candidate: f.clone(),
        passes_necessary,
        decided: true,
        member: witness.is_some(),
        witness,
    })
}

/// Enumerates every candidate topology on the common leaf set, decides each
/// one, and returns the reports in canonical candidate order.  Exhaustive
/// enumeration is guarded to N ≤ 6.
pub fn compatibility_set(
    f1: &Topology,
    f2: &Topology,
    full_dim_only: bool,
) -> Result<Vec<CompatReport>> {
    if f1.leaf_count() != f2.leaf_count() {
        return Err(Error::LeafCountMismatch {
            left: f1.leaf_count(),
            right: f2.leaf_count(),
        });
    }
    let n = f1.leaf_count();
    if !(3..=6).contains(&n) {
        return Err(Error::LeafCountOutOfRange {
            got: n,
            min: 3,
            max: 6,
        });
    }
    enumerate_topologies(n, full_dim_only)?
        .iter()
        .map(|f| decide_membership(f1, f2, f))
        .collect()
}

/// Closure-class layout of one topology: a class per clade plus one for the
/// whole leaf set, the class of every pair, and the covering relations.
struct ClassLayout {
    class_of_pair: Vec<usize>,
    class_count: usize,
    covers: Vec<(usize, usize)>,
}

impl ClassLayout {
    fn new(f: &Topology) -> Result<Self> {
        let n = f.leaf_count();
        let ground = f.clades().len();
        let class_of_pair = pairs(n)
            .map(|(i, j)| Ok(f.closure_index(i, j)?.unwrap_or(ground)))
            .collect::<Result<Vec<usize>>>()?;
        let mut covers = Vec::new();
        for (a, clade) in f.clades().iter().enumerate() {
            let parent = f
                .clades()
                .iter()
                .enumerate()
                .filter(|(b, other)| a != *b && clade.is_subset_of(other))
                .min_by_key(|(_, other)| other.len())
                .map(|(b, _)| b)
                .unwrap_or(ground);
            covers.push((a, parent));
        }
        Ok(Self {
            class_of_pair,
            class_count: ground + 1,
            covers,
        })
    }
}

/// One distinct (cl_F, cl_F₁, cl_F₂) combination, as graph variable ids.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Triple {
    y: usize,
    x1: usize,
    x2: usize,
}

/// Depth-first search over per-triple max-attainment choices, carrying an
/// incrementally edited constraint digraph.
struct AssignmentSearch {
    leaf_count: usize,
    f: ClassLayout,
    f1: ClassLayout,
    f2: ClassLayout,
    /// Triples grouped by their F-class, groups ordered by clade size.
    groups: Vec<Vec<Triple>>,
    graph: ConstraintGraph,
    x1_base: usize,
    x2_base: usize,
    nodes_explored: usize,
}

impl AssignmentSearch {
    fn new(f1: &Topology, f2: &Topology, f: &Topology) -> Result<Self> {
        let layout_f = ClassLayout::new(f)?;
        let layout_f1 = ClassLayout::new(f1)?;
        let layout_f2 = ClassLayout::new(f2)?;
        let x1_base = layout_f.class_count;
        let x2_base = x1_base + layout_f1.class_count;
        let total_vars = x2_base + layout_f2.class_count;

        let mut triples: Vec<Triple> = layout_f
            .class_of_pair
            .iter()
            .zip(&layout_f1.class_of_pair)
            .zip(&layout_f2.class_of_pair)
            .map(|((&y, &c1), &c2)| Triple {
                y,
                x1: x1_base + c1,
                x2: x2_base + c2,
            })
            .collect();
        triples.sort_by_key(|t| (t.y, t.x1, t.x2));
        triples.dedup();
        if triples.len() > TRIPLE_LIMIT {
            return Err(Error::SearchBoundExceeded {
                got: triples.len(),
                limit: TRIPLE_LIMIT,
            });
        }

        // Group by F-class; small clades first, ground last, so conflicts
        // between nearby classes surface early.
        let class_size = |class: usize| {
            if class == layout_f.class_count - 1 {
                f.leaf_count()
            } else {
                f.clades()[class].len()
            }
        };
        let mut classes: Vec<usize> = (0..layout_f.class_count).collect();
        classes.sort_by_key(|&c| (class_size(c), c));
        let groups: Vec<Vec<Triple>> = classes
            .iter()
            .map(|&c| triples.iter().filter(|t| t.y == c).copied().collect())
            .filter(|g: &Vec<Triple>| !g.is_empty())
            .collect();

        let mut graph = ConstraintGraph::new(total_vars);
        for (child, parent) in &layout_f.covers {
            graph.add_edge(*child, *parent, true);
        }
        for (child, parent) in &layout_f1.covers {
            graph.add_edge(x1_base + child, x1_base + parent, true);
        }
        for (child, parent) in &layout_f2.covers {
            graph.add_edge(x2_base + child, x2_base + parent, true);
        }

        Ok(Self {
            leaf_count: f.leaf_count(),
            f: layout_f,
            f1: layout_f1,
            f2: layout_f2,
            groups,
            graph,
            x1_base,
            x2_base,
            nodes_explored: 0,
        })
    }

    fn run(mut self) -> Result<Option<(PairVector, PairVector)>> {
        if !self.graph.feasible() {
            return Ok(None);
        }
        if !self.dfs(0)? {
            return Ok(None);
        }
        // The feasible graph is still loaded; level it and lift to vectors.
        let levels = self.graph.levels();
        let n_pairs = self.f.class_of_pair.len();
        let coord = |base: usize, layout: &ClassLayout, p: usize| {
            1.0 + levels[base + layout.class_of_pair[p]] as f64
        };
        let w1 = PairVector::new(
            self.leaf_count,
            (0..n_pairs)
                .map(|p| coord(self.x1_base, &self.f1, p))
                .collect(),
        )?;
        let w2 = PairVector::new(
            self.leaf_count,
            (0..n_pairs)
                .map(|p| coord(self.x2_base, &self.f2, p))
                .collect(),
        )?;
        Ok(Some((w1, w2)))
    }

    /// Tries every side pattern for group `depth`; on success leaves the
    /// graph loaded with the full feasible assignment.
    fn dfs(&mut self, depth: usize) -> Result<bool> {
        if depth == self.groups.len() {
            return Ok(true);
        }
        let group = self.groups[depth].clone();
        for mask in 0u64..1 << group.len() {
            self.nodes_explored += 1;
            if self.nodes_explored > NODE_LIMIT {
                return Err(Error::SearchBoundExceeded {
                    got: self.nodes_explored,
                    limit: NODE_LIMIT,
                });
            }
            let mark = self.graph.mark();
            for (k, triple) in group.iter().enumerate() {
                let (attains, other) = if mask >> k & 1 == 0 {
                    (triple.x1, triple.x2)
                } else {
                    (triple.x2, triple.x1)
                };
                self.graph.add_edge(attains, triple.y, false);
                self.graph.add_edge(triple.y, attains, false);
                self.graph.add_edge(other, triple.y, false);
            }
            if self.graph.feasible() && self.dfs(depth + 1)? {
                return Ok(true);
            }
            self.graph.undo_to(mark);
        }
        Ok(false)
    }
}

/// A digraph of order constraints: an edge (u, v) means value(u) ≤ value(v),
/// strict edges mean value(u) < value(v).  Feasible over the reals iff no
/// strongly connected component contains a strict edge.
struct ConstraintGraph {
    adj: Vec<Vec<(usize, bool)>>,
    log: Vec<usize>,
}

impl ConstraintGraph {
    fn new(vars: usize) -> Self {
        Self {
            adj: vec![Vec::new(); vars],
            log: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, strict: bool) {
        self.adj[u].push((v, strict));
        self.log.push(u);
    }

    fn mark(&self) -> usize {
        self.log.len()
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let u = self.log.pop().expect("log not empty above mark");
            self.adj[u].pop();
        }
    }

    fn feasible(&self) -> bool {
        let comp = self.components();
        for (u, edges) in self.adj.iter().enumerate() {
            for &(v, strict) in edges {
                if strict && comp[u] == comp[v] {
                    return false;
                }
            }
        }
        true
    }

    /// Tarjan's algorithm, iterative; returns the component id of each node.
    fn components(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut comp = vec![usize::MAX; n];
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        let mut call: Vec<(usize, usize)> = Vec::new();

        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            call.push((start, 0));
            while let Some(&mut (v, ref mut edge)) = call.last_mut() {
                if *edge == 0 {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                if *edge < self.adj[v].len() {
                    let (w, _) = self.adj[v][*edge];
                    *edge += 1;
                    if index[w] == usize::MAX {
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("scc stack nonempty");
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                    call.pop();
                    if let Some(&mut (parent, _)) = call.last_mut() {
                        low[parent] = low[parent].min(low[v]);
                    }
                }
            }
        }
        comp
    }

    /// Integer levels that satisfy every constraint: nodes in one component
    /// share a level, weak edges never decrease it, strict edges increase
    /// it by at least one.  Call only on a feasible graph.
    fn levels(&self) -> Vec<i64> {
        let comp = self.components();
        let n_comp = comp.iter().map(|&c| c + 1).max().unwrap_or(0);
        // Condensation edges with strictness as weight.
        let mut dag: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n_comp];
        let mut indegree = vec![0usize; n_comp];
        for (u, edges) in self.adj.iter().enumerate() {
            for &(v, strict) in edges {
                if comp[u] != comp[v] {
                    dag[comp[u]].push((comp[v], i64::from(strict)));
                    indegree[comp[v]] += 1;
                }
            }
        }
        let mut level = vec![0i64; n_comp];
        let mut queue: Vec<usize> = (0..n_comp).filter(|&c| indegree[c] == 0).collect();
        while let Some(c) = queue.pop() {
            for &(d, weight) in &dag[c] {
                level[d] = level[d].max(level[c] + weight);
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    queue.push(d);
                }
            }
        }
        comp.iter().map(|&c| level[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Clade;

    fn topo(n: usize, clades: &[&[usize]]) -> Topology {
        Topology::new(n, clades.iter().map(|c| Clade::new(c.to_vec())).collect()).unwrap()
    }

    fn example_f1() -> Topology {
        topo(5, &[&[1, 2, 3], &[1, 2], &[4, 5]])
    }

    fn example_f2() -> Topology {
        topo(5, &[&[1, 3, 4, 5], &[1, 3, 5], &[1, 5]])
    }

    #[test]
    fn necessary_condition_cases() {
        // F whose classes coincide with F1's is trivially fine.
        assert!(necessary_condition(&example_f1(), &example_f2(), &example_f1()).unwrap());

        // {1,2} and {1,3} merge under F3 but fall in different classes of
        // both F1 and F2.
        let f3 = topo(5, &[&[1, 2, 3], &[2, 3], &[4, 5]]);
        assert!(!necessary_condition(&example_f1(), &example_f2(), &f3).unwrap());
    }

    #[test]
    fn necessary_condition_needs_full_dimensional_candidate() {
        let degenerate = topo(5, &[&[1, 2]]);
        assert!(necessary_condition(&example_f1(), &example_f2(), &degenerate).is_err());
    }

    #[test]
    fn membership_with_identical_cones() {
        let f = example_f1();
        let report = decide_membership(&f, &f, &f).unwrap();
        assert!(report.member && report.decided && report.passes_necessary);
        let (w1, w2) = report.witness.unwrap();
        let sum = w1.trop_sum(&w2).unwrap();
        assert!(ut_membership(&f, &sum, 1e-9).unwrap());
    }

    #[test]
    fn the_five_leaf_compatibility_set() {
        let reports = compatibility_set(&example_f1(), &example_f2(), true).unwrap();
        assert_eq!(reports.len(), 105);
        let members: Vec<&Topology> = reports
            .iter()
            .filter(|r| r.member)
            .map(|r| &r.candidate)
            .collect();
        let expected = [
            example_f1(),
            example_f2(),
            topo(5, &[&[1, 3, 4, 5], &[1, 3, 5], &[1, 3]]),
            topo(5, &[&[1, 3, 4, 5], &[4, 5], &[1, 3]]),
            topo(5, &[&[1, 2, 3], &[1, 3], &[4, 5]]),
        ];
        assert_eq!(members.len(), 5);
        for f in &expected {
            assert!(members.contains(&f), "missing member {f:?}");
        }
        let f3 = topo(5, &[&[1, 2, 3], &[2, 3], &[4, 5]]);
        assert!(!members.contains(&&f3));
    }

    #[test]
    fn degenerate_pair_from_the_remark() {
        let f1 = topo(5, &[&[3, 4]]);
        let f2 = topo(5, &[&[1, 4], &[2, 3], &[1, 2, 3, 4]]);
        let f = topo(5, &[&[1, 4], &[1, 3, 4], &[2, 5]]);
        assert!(necessary_condition(&f1, &f2, &f).unwrap());
        let report = decide_membership(&f1, &f2, &f).unwrap();
        assert!(report.decided && !report.member);
    }

    #[test]
    fn twelve_leaf_infeasible_chain() {
        let f1 = topo(
            12,
            &[
                &[1, 2, 7, 8, 9, 12],
                &[1, 7, 9],
                &[2, 8, 12],
                &[1, 7],
                &[2, 8],
                &[3, 4, 5, 6, 10, 11],
                &[3, 5, 11],
                &[4, 6, 10],
                &[3, 5],
                &[4, 6],
            ],
        );
        let f2 = topo(
            12,
            &[
                &[1, 2, 3, 4, 9, 10],
                &[2, 3, 4, 9, 10],
                &[2, 3, 4, 10],
                &[3, 4, 10],
                &[3, 10],
                &[5, 6, 7, 8, 11, 12],
                &[5, 7, 12],
                &[6, 8, 11],
                &[5, 7],
                &[6, 8],
            ],
        );
        let f = topo(
            12,
            &[
                &[1, 2, 3, 4, 9, 10],
                &[1, 2, 9],
                &[3, 4, 10],
                &[1, 9],
                &[3, 10],
                &[5, 6, 7, 8, 11, 12],
                &[5, 6, 11],
                &[7, 8, 12],
                &[5, 11],
                &[7, 12],
            ],
        );
        assert!(f.is_full_dimensional() && f1.is_full_dimensional() && f2.is_full_dimensional());
        assert!(necessary_condition(&f1, &f2, &f).unwrap());
        let report = decide_membership(&f1, &f2, &f).unwrap();
        assert!(report.decided && !report.member && report.passes_necessary);
    }

    #[test]
    fn witnesses_are_verified_members() {
        // Every decided member of a small compatibility set carries a
        // witness that checks out in all three cones.
        let reports = compatibility_set(&example_f1(), &example_f2(), true).unwrap();
        for report in reports.iter().filter(|r| r.member) {
            let (w1, w2) = report.witness.as_ref().unwrap();
            assert!(ut_membership(&example_f1(), w1, 1e-9).unwrap());
            assert!(ut_membership(&example_f2(), w2, 1e-9).unwrap());
            let sum = w1.trop_sum(w2).unwrap();
            assert!(ut_membership(&report.candidate, &sum, 1e-9).unwrap());
            assert!(report.passes_necessary);
        }
    }

    #[test]
    fn leaf_count_mismatch_is_rejected() {
        let f4 = topo(4, &[&[1, 2]]);
        assert!(decide_membership(&example_f1(), &example_f2(), &f4).is_err());
        assert!(compatibility_set(&example_f1(), &f4, true).is_err());
    }
}
