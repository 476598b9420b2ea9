//! Kingman coalescent sampling of random equidistant trees.
//!
//! Starting from N lineages, pairs merge uniformly at random with waiting
//! times drawn from Exp(k·(k−1)/2) while k lineages remain; the resulting
//! genealogy is normalized to height 1.  The generator is an explicit seed,
//! never global state, so a seed pins the tree exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::topology::Clade;
use crate::treemetrics::EquidistantTree;

/// Samples one coalescent tree on `leaf_count` leaves, binary by
/// construction and normalized to height 1.
pub fn random_coalescent_tree(leaf_count: usize, seed: u64) -> Result<EquidistantTree> {
    if leaf_count < 2 {
        return Err(Error::TooFewLeaves(leaf_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lineages: Vec<Vec<usize>> = (1..=leaf_count).map(|i| vec![i]).collect();
    let mut merge_heights: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut time = 0.0;
    while lineages.len() > 1 {
        let k = lineages.len();
        let rate = (k * (k - 1) / 2) as f64;
        time += Exp::new(rate).expect("positive rate").sample(&mut rng);
        let a = rng.random_range(0..k);
        let b = loop {
            let b = rng.random_range(0..k);
            if b != a {
                break b;
            }
        };
        let (mut merged, other) = (lineages[a].clone(), lineages[b].clone());
        merged.extend(other);
        merged.sort_unstable();
        lineages.swap_remove(a.max(b));
        lineages.swap_remove(a.min(b));
        lineages.push(merged.clone());
        merge_heights.push((merged, time));
    }
    let root_height = time;

    // Internal edge of clade S runs from S's merge up to its parent's.
    let mut internal_edges = Vec::new();
    for (clade, height) in &merge_heights {
        if clade.len() == leaf_count {
            continue;
        }
        let parent_height = merge_heights
            .iter()
            .filter(|(other, _)| {
                other.len() > clade.len() && clade.iter().all(|l| other.contains(l))
            })
            .map(|&(_, h)| h)
            .fold(root_height, f64::min);
        internal_edges.push((
            Clade::new(clade.clone()),
            (parent_height - height) / root_height,
        ));
    }
    EquidistantTree::with_default_labels(leaf_count, internal_edges, 1.0)
}
