//! Tropical line segments between ultrametrics.
//!
//! The segment between torus points `w¹` and `w²` is the set
//! {a ⊙ w¹ ⊞ b ⊙ w²}, a concatenation of ordinary line segments whose
//! directions are zero-one vectors.  Its bending points are read off the
//! sorted distinct coordinate differences λ = w²−w¹: the point at λ is
//! (λ ⊙ w¹) ⊞ w², so the walk starts at w² (smallest λ) and ends at a
//! representative of w¹ (largest λ).  Constructing a segment costs one sort
//! of the n coordinate differences; bending points are materialized on
//! demand.
//!
//! Between two ultrametrics every point of the segment is itself an
//! ultrametric, so the walk can be read as a sequence of equidistant trees
//! whose topologies change only at the bending points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{topology_of, Topology};
use crate::torus::{LeafPermutation, PairVector};
use crate::treemetrics::{self, is_ultrametric, MetricKind};

/// A tropical line segment, stored as its endpoints plus the sorted
/// distinct λ values; the m ≤ n bending points are derived.
#[derive(Debug, Clone)]
pub struct TropicalSegment {
    from: PairVector,
    to: PairVector,
    lambdas: Vec<f64>,
}

/// Builds the segment between two ultrametrics, rejecting endpoints that
/// fail the three-point condition.  Use
/// [`tropical_segment_unchecked`] for raw torus points.
pub fn tropical_segment(from: &PairVector, to: &PairVector) -> Result<TropicalSegment> {
    for endpoint in [from, to] {
        let report = is_ultrametric(endpoint, crate::torus::DEFAULT_TOL);
        if report.kind != MetricKind::Ultrametric {
            let w = report.witness.expect("failed check carries a witness");
            return Err(Error::NotUltrametric([w[0], w[1], w[2]]));
        }
    }
    tropical_segment_unchecked(from, to)
}

/// Builds the segment between two arbitrary torus points; the segment math
/// is defined on the whole torus, only the tree reading needs ultrametrics.
pub fn tropical_segment_unchecked(from: &PairVector, to: &PairVector) -> Result<TropicalSegment> {
    if from.leaf_count() != to.leaf_count() {
        return Err(Error::DimensionMismatch {
            left: from.coords().len(),
            right: to.coords().len(),
        });
    }
    let mut lambdas: Vec<f64> = to
        .coords()
        .iter()
        .zip(from.coords())
        .map(|(t, f)| t - f)
        .collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    Ok(TropicalSegment {
        from: from.clone(),
        to: to.clone(),
        lambdas,
    })
}

impl TropicalSegment {
    pub fn from_point(&self) -> &PairVector {
        &self.from
    }

    pub fn to_point(&self) -> &PairVector {
        &self.to
    }

    /// The sorted distinct λ values; bending points sit exactly here.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Number of bending points, m.
    pub fn bend_count(&self) -> usize {
        self.lambdas.len()
    }

    /// The k-th bending point (0-based): (λ_k ⊙ from) ⊞ to.
    pub fn bend_point(&self, k: usize) -> PairVector {
        self.eval(self.lambdas[k])
    }

    /// All bending points, in λ order.  The first is `to` exactly and the
    /// last is torus-equal to `from`.
    pub fn bend_points(&self) -> Vec<PairVector> {
        self.lambdas.iter().map(|&l| self.eval(l)).collect()
    }

    /// Bending points rescaled so each has diameter `target_diameter`
    /// (subtracting max − target from every coordinate, as when drawing
    /// unit-height trees).
    pub fn normalized_bend_points(&self, target_diameter: f64) -> Vec<PairVector> {
        self.lambdas
            .iter()
            .map(|&l| rescale_to_diameter(&self.eval(l), target_diameter))
            .collect()
    }

    fn eval(&self, lambda: f64) -> PairVector {
        self.from
            .trop_scalar(lambda)
            .trop_sum(&self.to)
            .expect("endpoints share dimensions")
    }

    /// The segment point at any λ in [λ_min, λ_max]: continuous, piecewise
    /// linear, and equal to the bending points at the λ values themselves.
    pub fn point_at(&self, lambda: f64) -> Result<PairVector> {
        let (min, max) = (self.lambdas[0], self.lambdas[self.lambdas.len() - 1]);
        if lambda < min || lambda > max {
            return Err(Error::LambdaOutOfRange { lambda, min, max });
        }
        Ok(self.eval(lambda))
    }
}

/// Subtracts (max coordinate − `target_diameter`) from every coordinate, so
/// the largest pairwise distance becomes exactly `target_diameter`.  The
/// default diameter 2 corresponds to height-1 equidistant trees.
pub fn rescale_to_diameter(w: &PairVector, target_diameter: f64) -> PairVector {
    w.trop_scalar(target_diameter - w.max_coord())
}

/// Where on the λ axis a topology was observed: at a bending point, or on
/// the open interval between two consecutive ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaInterval {
    At(f64),
    Between(f64, f64),
}

/// One entry of the topology itinerary of a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTopology {
    pub interval: LambdaInterval,
    pub topology: Topology,
}

/// The ordered list of tree topologies along the segment: one entry per
/// bending point and one per open interval in between.  Each interval's
/// topology is computed at its midpoint and cross-checked at the quarter
/// points; a disagreement is reported as an error rather than glossed over.
pub fn segment_topologies(seg: &TropicalSegment, tol: f64) -> Result<Vec<SegmentTopology>> {
    let mut out = Vec::new();
    for (k, &lambda) in seg.lambdas().iter().enumerate() {
        if k > 0 {
            let prev = seg.lambdas()[k - 1];
            let mid = topology_of(&seg.point_at(prev + 0.5 * (lambda - prev))?, tol)?;
            for frac in [0.25, 0.75] {
                let probe = topology_of(&seg.point_at(prev + frac * (lambda - prev))?, tol)?;
                if probe != mid {
                    return Err(Error::UnstableIntervalTopology(prev, lambda));
                }
            }
            out.push(SegmentTopology {
                interval: LambdaInterval::Between(prev, lambda),
                topology: mid,
            });
        }
        out.push(SegmentTopology {
            interval: LambdaInterval::At(lambda),
            topology: topology_of(&seg.bend_point(k), tol)?,
        });
    }
    Ok(out)
}

/// Whether some point of the segment is torus-equal to the origin class
/// (the star tree).  Checked exactly: the coordinate spread of the segment
/// point is piecewise linear in λ with breakpoints among {to_p − from_q},
/// so its minimum is attained at one of those candidate λ values.
pub fn contains_origin(seg: &TropicalSegment, tol: f64) -> bool {
    let (min, max) = (seg.lambdas[0], seg.lambdas[seg.lambdas.len() - 1]);
    let mut best = f64::INFINITY;
    for &t in seg.to.coords() {
        for &f in seg.from.coords() {
            let lambda = (t - f).clamp(min, max);
            let point = seg.eval(lambda);
            let spread =
                point.max_coord() - point.coords().iter().copied().fold(f64::INFINITY, f64::min);
            best = best.min(spread);
        }
    }
    best <= tol
}

/// Checks segment equivariance under leaf relabeling: relabeling every
/// bending point of the segment between `w_t` and `w_t0` by σ must give,
/// point for point and at the same λ values, the bending points of the
/// segment between the relabeled endpoints.
pub fn check_equivariance(
    w_t: &PairVector,
    w_t0: &PairVector,
    sigma: &LeafPermutation,
    tol: f64,
) -> Result<bool> {
    let seg = tropical_segment(w_t, w_t0)?;
    let primed = tropical_segment(
        &w_t.apply_permutation(sigma)?,
        &w_t0.apply_permutation(sigma)?,
    )?;
    if seg.bend_count() != primed.bend_count() {
        return Ok(false);
    }
    for (a, b) in seg.lambdas().iter().zip(primed.lambdas()) {
        if (a - b).abs() > tol {
            return Ok(false);
        }
    }
    for k in 0..seg.bend_count() {
        let relabeled = seg.bend_point(k).apply_permutation(sigma)?;
        if !relabeled.torus_eq(&primed.bend_point(k), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Graphviz DOT rendering of the bending-point tree sequence: one cluster
/// per bending point, labeled with its λ.
pub fn segment_to_dot(seg: &TropicalSegment, tol: f64) -> Result<String> {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "digraph segment {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=point];").unwrap();
    for (k, &lambda) in seg.lambdas().iter().enumerate() {
        let tree = treemetrics::vector_to_tree(&seg.bend_point(k), None, tol)?;
        writeln!(out, "  subgraph cluster_{k} {{").unwrap();
        writeln!(out, "    label=\"lambda = {lambda}\";").unwrap();
        out.push_str(&treemetrics::tree_dot_body(
            &tree,
            &format!("b{k}_"),
            "    ",
        ));
        writeln!(out, "  }}").unwrap();
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Clade;

    fn w1() -> PairVector {
        PairVector::new(4, vec![0.4, 0.8, 2.0, 0.8, 2.0, 2.0]).unwrap()
    }

    fn w2() -> PairVector {
        PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 0.8, 0.4]).unwrap()
    }

    fn assert_close(got: &PairVector, want: &[f64]) {
        for (a, b) in got.coords().iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", got.coords(), want);
        }
    }

    #[test]
    fn the_worked_four_leaf_segment() {
        let seg = tropical_segment(&w1(), &w2()).unwrap();
        let expected_lambdas = [-1.6, -1.2, 0.0, 1.2, 1.6];
        assert_eq!(seg.bend_count(), 5);
        for (a, b) in seg.lambdas().iter().zip(expected_lambdas) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_close(&seg.bend_point(0), &[2.0, 2.0, 2.0, 0.8, 0.8, 0.4]);
        assert_close(&seg.bend_point(1), &[2.0, 2.0, 2.0, 0.8, 0.8, 0.8]);
        assert_close(&seg.bend_point(2), &[2.0, 2.0, 2.0, 0.8, 2.0, 2.0]);
        assert_close(&seg.bend_point(3), &[2.0, 2.0, 3.2, 2.0, 3.2, 3.2]);
        assert_close(&seg.bend_point(4), &[2.0, 2.4, 3.6, 2.4, 3.6, 3.6]);

        // After rescaling to diameter 2 the last two match the height-1
        // representatives, ending at w1 itself.
        let normalized = seg.normalized_bend_points(2.0);
        assert_close(&normalized[3], &[0.8, 0.8, 2.0, 0.8, 2.0, 2.0]);
        assert_close(&normalized[4], &[0.4, 0.8, 2.0, 0.8, 2.0, 2.0]);

        // Endpoint recovery on the torus.
        assert!(seg.bend_point(0).torus_eq(&w2(), 1e-9).unwrap());
        assert!(seg.bend_point(4).torus_eq(&w1(), 1e-9).unwrap());
    }

    #[test]
    fn degenerate_segment_is_a_point() {
        let seg = tropical_segment(&w1(), &w1()).unwrap();
        assert_eq!(seg.lambdas(), &[0.0]);
        assert!(seg.bend_point(0).torus_eq(&w1(), 0.0).unwrap());
    }

    #[test]
    fn rejects_non_ultrametric_endpoints() {
        let bad = PairVector::new(3, vec![1.0, 2.0, 3.0]).unwrap();
        let ok = PairVector::new(3, vec![1.0, 2.0, 2.0]).unwrap();
        assert!(matches!(
            tropical_segment(&bad, &ok),
            Err(Error::NotUltrametric(_))
        ));
        // The raw entry point accepts any torus points.
        assert!(tropical_segment_unchecked(&bad, &ok).is_ok());
    }

    #[test]
    fn point_at_matches_the_example() {
        let seg = tropical_segment(&w1(), &w2()).unwrap();
        assert_close(&seg.point_at(-1.6).unwrap(), w2().coords());
        assert_close(&seg.point_at(0.0).unwrap(), &[2.0, 2.0, 2.0, 0.8, 2.0, 2.0]);
        assert_close(
            &seg.point_at(-0.6).unwrap(),
            &[2.0, 2.0, 2.0, 0.8, 1.4, 1.4],
        );
        assert!(matches!(
            seg.point_at(2.0),
            Err(Error::LambdaOutOfRange { .. })
        ));
    }

    #[test]
    fn consecutive_bends_differ_by_zero_one_steps() {
        for seeds in [(1, 2), (3, 4), (5, 6)] {
            let a = treemetrics::tree_to_vector(
                &treemetrics::random_coalescent_tree(6, seeds.0).unwrap(),
            );
            let b = treemetrics::tree_to_vector(
                &treemetrics::random_coalescent_tree(6, seeds.1).unwrap(),
            );
            let seg = tropical_segment(&a, &b).unwrap();
            let points = seg.bend_points();
            for k in 1..points.len() {
                let step = seg.lambdas()[k] - seg.lambdas()[k - 1];
                for (hi, lo) in points[k].coords().iter().zip(points[k - 1].coords()) {
                    let d = hi - lo;
                    assert!(
                        d.abs() < 1e-9 || (d - step).abs() < 1e-9,
                        "coordinate moved by {d}, expected 0 or {step}"
                    );
                }
            }
        }
    }

    #[test]
    fn rescaling_matches_the_worked_values() {
        let y4 = PairVector::new(4, vec![2.0, 2.0, 3.2, 2.0, 3.2, 3.2]).unwrap();
        assert_close(
            &rescale_to_diameter(&y4, 2.0),
            &[0.8, 0.8, 2.0, 0.8, 2.0, 2.0],
        );

        let already = PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 2.0, 2.0]).unwrap();
        assert_close(&rescale_to_diameter(&already, 2.0), already.coords());

        let y5 = PairVector::new(4, vec![2.0, 2.4, 3.6, 2.4, 3.6, 3.6]).unwrap();
        assert_close(
            &rescale_to_diameter(&y5, 2.0),
            &[0.4, 0.8, 2.0, 0.8, 2.0, 2.0],
        );
    }

    #[test]
    fn topology_itinerary_of_the_worked_segment() {
        let seg = tropical_segment(&w1(), &w2()).unwrap();
        let itinerary = segment_topologies(&seg, 1e-9).unwrap();
        let bends: Vec<&Topology> = itinerary
            .iter()
            .filter(|e| matches!(e.interval, LambdaInterval::At(_)))
            .map(|e| &e.topology)
            .collect();
        let expect = |clades: &[&[usize]]| {
            Topology::new(4, clades.iter().map(|c| Clade::new(c.to_vec())).collect()).unwrap()
        };
        assert_eq!(bends.len(), 5);
        assert_eq!(*bends[0], expect(&[&[3, 4], &[2, 3, 4]]));
        assert_eq!(*bends[1], expect(&[&[2, 3, 4]]));
        assert_eq!(*bends[2], expect(&[&[2, 3]]));
        assert_eq!(*bends[3], expect(&[&[1, 2, 3]]));
        assert_eq!(*bends[4], expect(&[&[1, 2], &[1, 2, 3]]));

        let single = tropical_segment(&w1(), &w1()).unwrap();
        assert_eq!(segment_topologies(&single, 1e-9).unwrap().len(), 1);
    }

    #[test]
    fn origin_detection() {
        let seg = tropical_segment(&w1(), &w2()).unwrap();
        assert!(!contains_origin(&seg, 1e-9));

        let origin = PairVector::new(4, vec![1.0; 6]).unwrap();
        let seg = tropical_segment(&origin, &w1()).unwrap();
        assert!(contains_origin(&seg, 1e-9));
    }

    #[test]
    fn equivariance_of_the_figure_pair() {
        // σ = σ⁻¹ = (4,3,2,1) swaps the two height-1 trees.
        let sigma = LeafPermutation::new(vec![4, 3, 2, 1]).unwrap();
        assert_eq!(
            w1().apply_permutation(&sigma).unwrap().coords(),
            w2().coords()
        );
        let star = PairVector::new(4, vec![2.0; 6]).unwrap();
        assert!(check_equivariance(&w1(), &star, &sigma, 1e-9).unwrap());
        assert!(check_equivariance(&w1(), &w2(), &sigma, 1e-9).unwrap());

        let id = LeafPermutation::identity(4);
        assert!(check_equivariance(&w1(), &w2(), &id, 1e-9).unwrap());
    }
}
