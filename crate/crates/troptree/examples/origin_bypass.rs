//! Shows that tropical line segments slide around the star tree instead of
//! passing through it, even between mirror-image trees.
//!
//! Run with: cargo run --example origin_bypass

use troptree::{
    contains_origin, random_coalescent_tree, segment_topologies, tree_to_vector, tropical_segment,
    PairVector,
};

fn main() -> troptree::Result<()> {
    // Mirror-image pair: same shape, labels reversed.  A path through tree
    // space that contracts all internal edges would pass the star tree;
    // the tropical segment keeps an internal edge alive the whole way.
    let w1 = PairVector::new(4, vec![0.4, 0.8, 2.0, 0.8, 2.0, 2.0])?;
    let w2 = PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 0.8, 0.4])?;
    let seg = tropical_segment(&w1, &w2)?;
    println!(
        "mirror pair crosses the star tree: {}",
        contains_origin(&seg, 1e-9)
    );
    println!("shapes along the way stay informative:");
    for entry in segment_topologies(&seg, 1e-9)? {
        println!("  {:?} -> {}", entry.interval, entry.topology);
    }

    // The same holds across a random sample.
    let mut hits = 0usize;
    let trials = 500u64;
    for rep in 0..trials {
        let a = tree_to_vector(&random_coalescent_tree(5, 2 * rep)?);
        let b = tree_to_vector(&random_coalescent_tree(5, 2 * rep + 1)?);
        if contains_origin(&tropical_segment(&a, &b)?, 1e-9) {
            hits += 1;
        }
    }
    println!("\n{trials} random five-leaf segments, {hits} touched the origin");

    // Only segments anchored at the origin class itself contain it.
    let star = PairVector::new(4, vec![1.0; 6])?;
    let anchored = tropical_segment(&star, &w1)?;
    println!(
        "segment anchored at the star tree contains it: {}",
        contains_origin(&anchored, 1e-9)
    );
    Ok(())
}
