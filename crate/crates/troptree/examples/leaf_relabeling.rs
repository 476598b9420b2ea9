//! Relabels leaves with the Σ action and checks that tropical segments are
//! equivariant under relabeling.
//!
//! Run with: cargo run --example leaf_relabeling

use troptree::{check_equivariance, tropical_segment, LeafPermutation, PairVector};

fn main() -> troptree::Result<()> {
    // Two trees with the same shape and branch lengths, labels permuted.
    let w1 = PairVector::new(4, vec![0.4, 0.8, 2.0, 0.8, 2.0, 2.0])?;
    let w2 = PairVector::new(4, vec![0.8, 0.8, 2.0, 0.4, 2.0, 2.0])?;
    let sigma = LeafPermutation::new(vec![2, 3, 1, 4])?;

    println!("w1 = {w1}");
    println!("w2 = {w2}");
    println!(
        "sigma = {:?}, inverse = {:?}",
        sigma.images(),
        sigma.inverse().images()
    );
    println!("Sigma(w2, sigma)      = {}", w2.apply_permutation(&sigma)?);
    println!(
        "Sigma(w1, sigma^-1)   = {}",
        w1.apply_permutation(&sigma.inverse())?
    );

    // The action composes: applying sigma then tau is applying sigma∘tau.
    let tau = LeafPermutation::new(vec![4, 3, 2, 1])?;
    let two_step = w1.apply_permutation(&sigma)?.apply_permutation(&tau)?;
    let composed = w1.apply_permutation(&sigma.compose(&tau)?)?;
    println!(
        "\ncomposition law holds: {}",
        two_step.coords() == composed.coords()
    );

    // Segments commute with relabeling: relabel the bending points of a
    // segment, or relabel the endpoints and recompute — same answer.
    let flip = LeafPermutation::new(vec![4, 3, 2, 1])?;
    let mirror = PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 0.8, 0.4])?;
    let star = PairVector::new(4, vec![2.0; 6])?;
    println!(
        "\nflip carries w1 to its mirror: {}",
        w1.apply_permutation(&flip)?.coords() == mirror.coords()
    );
    println!(
        "segment to the star tree is equivariant: {}",
        check_equivariance(&w1, &star, &flip, 1e-9)?
    );
    println!(
        "segment between the mirrored pair is equivariant: {}",
        check_equivariance(&w1, &mirror, &flip, 1e-9)?
    );

    let seg = tropical_segment(&w1, &mirror)?;
    println!("\nbending points of the mirrored-pair segment:");
    for (lambda, point) in seg.lambdas().iter().zip(seg.bend_points()) {
        println!("  lambda = {lambda:>5}: {point}");
    }
    Ok(())
}
