//! Max-plus arithmetic on the tropical projective torus ℝⁿ/ℝ𝟏.
//!
//! The tropical (max-plus) semiring replaces addition by `max` (⊞) and
//! multiplication by `+` (⊙).  Points of the torus are pair-indexed
//! coordinate vectors (cophenetic vectors) considered up to an additive
//! constant: `u` and `v` are the same torus point exactly when `u - v` is a
//! constant vector.  Coordinates are indexed by unordered leaf pairs {i,j},
//! 1 ≤ i < j ≤ N, in lexicographic order (1,2), (1,3), …, (N−1,N).
//!
//! The semiring identity −∞ is not representable here: every stored
//! coordinate is a finite `f64`, which is all tree data ever needs.
//!
//! All operations are pure; values are immutable after construction and can
//! be shared freely between threads.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for torus comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of unordered pairs over `n` leaves, n(n−1)/2.
pub fn pair_count(leaf_count: usize) -> usize {
    leaf_count * (leaf_count - 1) / 2
}

/// Lexicographic index of the pair {i,j} (1-based, i < j) among all pairs.
pub fn pair_index(leaf_count: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= leaf_count);
    (i - 1) * leaf_count + j - 1 - i * (i + 1) / 2
}

/// All pairs {i,j} with 1 ≤ i < j ≤ N, in coordinate order.
pub fn pairs(leaf_count: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..leaf_count).flat_map(move |i| (i + 1..=leaf_count).map(move |j| (i, j)))
}

/// A point of the tropical projective torus, stored as a cophenetic vector:
/// one coordinate per unordered leaf pair, in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVector {
    leaf_count: usize,
    coords: Vec<f64>,
}

impl fmt::Display for PairVector {
    /// Human-oriented rendering, rounded to ten decimals; serialization
    /// keeps full precision.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let fixed = format!("{c:.10}");
            let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
            write!(
                f,
                "{}",
                if trimmed.is_empty() || trimmed == "-" {
                    "0"
                } else {
                    trimmed
                }
            )?;
        }
        write!(f, ")")
    }
}

impl PairVector {
    /// Builds a vector from its coordinate list, checking length and
    /// finiteness.  Needs at least two leaves.
    pub fn new(leaf_count: usize, coords: Vec<f64>) -> Result<Self> {
        if leaf_count < 2 {
            return Err(Error::TooFewLeaves(leaf_count));
        }
        let expected = pair_count(leaf_count);
        if coords.len() != expected {
            return Err(Error::BadCoordinateCount {
                leaf_count,
                expected,
                got: coords.len(),
            });
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index });
        }
        Ok(Self { leaf_count, coords })
    }

    /// The all-zeros representative of the origin class (star tree).
    pub fn origin(leaf_count: usize) -> Result<Self> {
        Self::new(leaf_count, vec![0.0; pair_count(leaf_count)])
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate for the unordered pair {i,j} (1-based, i ≠ j).
    ///
    /// Panics if the pair is out of range; use [`PairVector::try_get`] for a
    /// checked lookup.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.try_get(i, j).expect("valid leaf pair")
    }

    /// Checked coordinate lookup for the unordered pair {i,j}.
    pub fn try_get(&self, i: usize, j: usize) -> Result<f64> {
        let (a, b) = (i.min(j), i.max(j));
        if a == 0 || a == b || b > self.leaf_count {
            return Err(Error::InvalidPair {
                i,
                j,
                leaves: self.leaf_count,
            });
        }
        Ok(self.coords[pair_index(self.leaf_count, a, b)])
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.leaf_count != other.leaf_count {
            return Err(Error::DimensionMismatch {
                left: self.coords.len(),
                right: other.coords.len(),
            });
        }
        Ok(())
    }

    /// Tropical scalar action a ⊙ w: adds `a` to every coordinate.
    pub fn trop_scalar(&self, a: f64) -> Self {
        Self {
            leaf_count: self.leaf_count,
            coords: self.coords.iter().map(|c| a + c).collect(),
        }
    }

    /// Coordinatewise tropical sum u ⊞ v = max(u, v).
    pub fn trop_sum(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            leaf_count: self.leaf_count,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.max(*b))
                .collect(),
        })
    }

    /// The torus representative with first coordinate zero.
    pub fn canonical_rep(&self) -> Self {
        self.trop_scalar(-self.coords[0])
    }

    /// Torus equality: true when the coordinatewise difference is constant
    /// up to `tol`, i.e. when the tropical distance is at most `tol`.
    pub fn torus_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.trop_distance(other)? <= tol)
    }

    /// The tropical metric: max over pairs of (u−v) minus min over pairs of
    /// (u−v).  Nonnegative, and zero exactly on torus-equal points.
    pub fn trop_distance(&self, other: &Self) -> Result<f64> {
        self.check_dims(other)?;
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for (a, b) in self.coords.iter().zip(&other.coords) {
            let d = a - b;
            max = max.max(d);
            min = min.min(d);
        }
        Ok(max - min)
    }

    /// The Σ map: relabels leaves by σ, so that the result's {i,j}
    /// coordinate is this vector's {σᵢ,σⱼ} coordinate.
    pub fn apply_permutation(&self, sigma: &LeafPermutation) -> Result<Self> {
        if sigma.len() != self.leaf_count {
            return Err(Error::PermutationLengthMismatch {
                perm: sigma.len(),
                leaves: self.leaf_count,
            });
        }
        let coords = pairs(self.leaf_count)
            .map(|(i, j)| self.get(sigma.image(i), sigma.image(j)))
            .collect();
        Ok(Self {
            leaf_count: self.leaf_count,
            coords,
        })
    }

    /// Largest coordinate.
    pub fn max_coord(&self) -> f64 {
        self.coords
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A bijection σ on the leaf labels 1..=N, stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPermutation {
    mapping: Vec<usize>,
}

impl LeafPermutation {
    /// Builds a permutation from its 1-based image sequence (σ₁, …, σ_N).
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n + 1];
        for &image in &mapping {
            if image == 0 || image > n || seen[image] {
                return Err(Error::NotAPermutation(n));
            }
            seen[image] = true;
        }
        Ok(Self { mapping })
    }

    /// The identity permutation on 1..=N.
    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// σᵢ for 1-based i.
    pub fn image(&self, i: usize) -> usize {
        self.mapping[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.mapping
    }

    /// The inverse permutation σ⁻¹.
    pub fn inverse(&self) -> Self {
        let mut mapping = vec![0; self.mapping.len()];
        for (i, &image) in self.mapping.iter().enumerate() {
            mapping[image - 1] = i + 1;
        }
        Self { mapping }
    }

    /// Composition (σ∘τ)ᵢ = σ_{τᵢ}: apply τ first, then σ.
    ///
    /// This is the convention under which Σ(Σ(w,σ),τ) = Σ(w,σ∘τ).
    pub fn compose(&self, tau: &Self) -> Result<Self> {
        if self.len() != tau.len() {
            return Err(Error::PermutationLengthMismatch {
                perm: self.len(),
                leaves: tau.len(),
            });
        }
        Ok(Self {
            mapping: tau.mapping.iter().map(|&t| self.image(t)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(coords: &[f64]) -> PairVector {
        let n = (2..).find(|n| n * (n - 1) / 2 == coords.len()).unwrap();
        PairVector::new(n, coords.to_vec()).unwrap()
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        let order: Vec<_> = pairs(5).collect();
        assert_eq!(order[0], (1, 2));
        assert_eq!(order[1], (1, 3));
        assert_eq!(order[9], (4, 5));
        for (k, (i, j)) in pairs(5).enumerate() {
            assert_eq!(pair_index(5, i, j), k);
        }
    }

    #[test]
    fn scalar_action() {
        let w = pv(&[2.0, 2.0, 2.0, 0.8, 0.8, 0.4]);
        assert_eq!(w.trop_scalar(0.0).coords(), w.coords());

        let w1 = pv(&[0.4, 0.8, 2.0, 0.8, 2.0, 2.0]);
        let shifted = w1.trop_scalar(-1.6);
        let expected = [-1.2, -0.8, 0.4, -0.8, 0.4, 0.4];
        for (a, b) in shifted.coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }

        let shifted = w1.trop_scalar(1.2);
        let expected = [1.6, 2.0, 3.2, 2.0, 3.2, 3.2];
        for (a, b) in shifted.coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tropical_sum_is_coordinatewise_max() {
        let u = pv(&[-1.2, -0.8, 0.4, -0.8, 0.4, 0.4]);
        let v = pv(&[2.0, 2.0, 2.0, 0.8, 0.8, 0.4]);
        assert_eq!(u.trop_sum(&v).unwrap().coords(), v.coords());

        assert_eq!(v.trop_sum(&v).unwrap().coords(), v.coords());

        let u = pv(&[1.6, 2.0, 3.2, 2.0, 3.2, 3.2]);
        assert_eq!(
            u.trop_sum(&v).unwrap().coords(),
            &[2.0, 2.0, 3.2, 2.0, 3.2, 3.2]
        );
    }

    #[test]
    fn sum_rejects_dimension_mismatch() {
        let u = pv(&[0.0, 0.0, 0.0]);
        let v = pv(&[0.0; 6]);
        assert!(matches!(
            u.trop_sum(&v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonical_rep_zeroes_first_coordinate() {
        let w = pv(&[2.0, 2.0, 3.2, 2.0, 3.2, 3.2]);
        let expected = [0.0, 0.0, 1.2, 0.0, 1.2, 1.2];
        for (a, b) in w.canonical_rep().coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }

        let zero = pv(&[0.0; 6]);
        assert_eq!(zero.canonical_rep().coords(), zero.coords());

        let five_leaf = PairVector::new(
            5,
            vec![16.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0, 20.0, 20.0, 10.0],
        )
        .unwrap();
        assert_eq!(
            five_leaf.canonical_rep().coords(),
            &[0.0, 24.0, 24.0, 24.0, 24.0, 24.0, 24.0, 4.0, 4.0, -6.0]
        );
    }

    #[test]
    fn torus_equality() {
        let u = pv(&[2.0, 2.0, 3.2, 2.0, 3.2, 3.2]);
        let v = pv(&[0.8, 0.8, 2.0, 0.8, 2.0, 2.0]);
        assert!(u.torus_eq(&v, 1e-9).unwrap());
        assert!(u.torus_eq(&u, 0.0).unwrap());

        let u = pv(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let v = pv(&[0.0; 6]);
        assert!(!u.torus_eq(&v, 1e-9).unwrap());
    }

    #[test]
    fn tropical_distance() {
        let u = pv(&[0.4, 0.8, 2.0, 0.8, 2.0, 2.0]);
        let v = pv(&[2.0, 2.0, 2.0, 0.8, 0.8, 0.4]);
        assert!((u.trop_distance(&v).unwrap() - 3.2).abs() < 1e-12);

        assert_eq!(u.trop_distance(&u).unwrap(), 0.0);

        let z = pv(&[0.0; 6]);
        let c = pv(&[7.5; 6]);
        assert_eq!(z.trop_distance(&c).unwrap(), 0.0);
    }

    #[test]
    fn permutation_action_reproduces_relabeling() {
        // Σ(w², σ) = w¹ for the height-1 four-leaf pair.
        let w2 = pv(&[0.8, 0.8, 2.0, 0.4, 2.0, 2.0]);
        let w1 = pv(&[0.4, 0.8, 2.0, 0.8, 2.0, 2.0]);
        let sigma = LeafPermutation::new(vec![2, 3, 1, 4]).unwrap();
        assert_eq!(w2.apply_permutation(&sigma).unwrap().coords(), w1.coords());
        assert_eq!(
            w1.apply_permutation(&sigma.inverse()).unwrap().coords(),
            w2.coords()
        );

        let id = LeafPermutation::identity(4);
        assert_eq!(w1.apply_permutation(&id).unwrap().coords(), w1.coords());
    }

    #[test]
    fn permutation_validation() {
        assert!(LeafPermutation::new(vec![1, 1, 3]).is_err());
        assert!(LeafPermutation::new(vec![0, 1, 2]).is_err());
        assert!(LeafPermutation::new(vec![2, 3, 4]).is_err());
        let sigma = LeafPermutation::new(vec![3, 1, 2, 4]).unwrap();
        let composed = sigma.compose(&sigma.inverse()).unwrap();
        assert_eq!(composed, LeafPermutation::identity(4));
    }

    #[test]
    fn permutation_length_checked() {
        let w = pv(&[0.0; 6]);
        let sigma = LeafPermutation::identity(5);
        assert!(matches!(
            w.apply_permutation(&sigma),
            Err(Error::PermutationLengthMismatch { .. })
        ));
    }
}
