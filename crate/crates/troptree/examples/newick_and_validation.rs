//! Parses a Newick tree, checks the three- and four-point conditions, and
//! converts between the tree and its cophenetic vector.
//!
//! Run with: cargo run --example newick_and_validation

use troptree::{
    is_tree_metric, is_ultrametric, parse_newick, tree_to_vector, vector_to_tree, write_newick,
    PairVector,
};

fn main() -> troptree::Result<()> {
    let text = "((A:8,B:8):12,(C:10,(D:5,E:5):5):10);";
    let tree = parse_newick(text)?;
    println!(
        "parsed {} leaves at height {}",
        tree.leaf_count(),
        tree.height()
    );

    let w = tree_to_vector(&tree);
    println!("cophenetic vector: {w}");
    println!("three-point condition: {:?}", is_ultrametric(&w, 1e-9).kind);
    println!("four-point condition: {:?}", is_tree_metric(&w, 1e-9).kind);

    // Realize the vector back as a tree at the same height.
    let realized = vector_to_tree(&w, Some(20.0), 1e-9)?;
    println!("\nrealized edges:");
    for (clade, length) in realized.internal_edges() {
        println!("  clade {:?}: length {length}", clade.leaves());
    }
    println!("round trip: {}", write_newick(&tree));

    // A non-ultrametric vector gets a violating triple back.
    let skew = PairVector::new(3, vec![1.0, 2.0, 3.0])?;
    let report = is_ultrametric(&skew, 1e-9);
    println!(
        "\nskew vector {skew} is {:?}, witness {:?}",
        report.kind, report.witness
    );
    Ok(())
}
