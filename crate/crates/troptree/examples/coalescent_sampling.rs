//! Samples random equidistant trees from the coalescent and measures them
//! with the tropical metric.
//!
//! Run with: cargo run --example coalescent_sampling

use troptree::{
    is_ultrametric, random_coalescent_tree, topology_of, tree_to_vector, write_newick, MetricKind,
};

fn main() -> troptree::Result<()> {
    println!("five seeded coalescent trees on 6 leaves:\n");
    for seed in 0..5u64 {
        let tree = random_coalescent_tree(6, seed)?;
        let w = tree_to_vector(&tree);
        assert_eq!(is_ultrametric(&w, 1e-9).kind, MetricKind::Ultrametric);
        println!("seed {seed}: {}", write_newick(&tree));
        println!("        topology {}", topology_of(&w, 1e-9)?);
    }

    // Pairwise tropical distances for the sample.
    let vectors: Vec<_> = (0..5u64)
        .map(|seed| tree_to_vector(&random_coalescent_tree(6, seed).unwrap()))
        .collect();
    println!("\npairwise tropical distances:");
    for (i, u) in vectors.iter().enumerate() {
        let row: Vec<String> = vectors
            .iter()
            .map(|v| format!("{:>6.3}", u.trop_distance(v).unwrap()))
            .collect();
        println!("  seed {i}: [{}]", row.join(", "));
    }

    // Tropical sums of ultrametrics stay ultrametric.
    let sum = vectors[0].trop_sum(&vectors[1])?;
    println!(
        "\nmax of seeds 0 and 1 is still an ultrametric: {}",
        is_ultrametric(&sum, 1e-9).kind == MetricKind::Ultrametric
    );
    println!("its topology: {}", topology_of(&sum, 1e-9)?);
    Ok(())
}
