//! Enumerates tree topologies, checks the (2N−3)!! count, and shows the
//! clade calculus: closures, pair comparison, and cone membership.
//!
//! Run with: cargo run --example topology_census

use troptree::topology::topology_to_dot;
use troptree::{enumerate_topologies, is_binary, ut_membership, vector_to_tree, Clade, Topology};

fn main() -> troptree::Result<()> {
    for n in 3..=6usize {
        let full = enumerate_topologies(n, true)?;
        let every = enumerate_topologies(n, false)?;
        let double_factorial: usize = (1..=2 * n - 3).step_by(2).product();
        println!(
            "N = {n}: {} full-dimensional ({}!! check: {double_factorial}), {} total families",
            full.len(),
            2 * n - 3,
            every.len(),
        );
    }

    let f = Topology::new(
        5,
        vec![
            Clade::from([1, 2]),
            Clade::from([3, 4, 5]),
            Clade::from([4, 5]),
        ],
    )?;
    println!("\nworking topology: {f}");
    println!("closure of (4,5): {:?}", f.closure(4, 5)?);
    println!("closure of (1,4): {:?}", f.closure(1, 4)?);
    println!("compare (4,5) vs (3,4): {:?}", f.compare((4, 5), (3, 4))?);

    // Full dimensionality, bifurcation, and binarity coincide.
    let w = f.representative_ultrametric();
    let tree = vector_to_tree(&w, None, 1e-9)?;
    println!(
        "full-dimensional: {}, bifurcated: {}, realizes a binary tree: {}",
        f.is_full_dimensional(),
        f.is_bifurcated(),
        is_binary(&tree),
    );
    println!("representative cone member: {w}");
    println!("member of its own cone: {}", ut_membership(&f, &w, 1e-9)?);

    println!("\nGraphviz view of the topology:\n{}", topology_to_dot(&f));
    Ok(())
}
