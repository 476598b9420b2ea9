//! Walks the tropical line segment between two four-leaf ultrametrics,
//! printing every bending point and the tree shape it carries.
//!
//! Run with: cargo run --example segment_walkthrough

use troptree::{segment_topologies, tropical_segment, LambdaInterval, PairVector};

fn main() -> troptree::Result<()> {
    // Two height-1 equidistant trees on four leaves.  In w1 the cherry is
    // {1,2} nested inside {1,2,3}; in w2 it is {3,4} inside {2,3,4}.
    let w1 = PairVector::new(4, vec![0.4, 0.8, 2.0, 0.8, 2.0, 2.0])?;
    let w2 = PairVector::new(4, vec![2.0, 2.0, 2.0, 0.8, 0.8, 0.4])?;
    println!("endpoints:");
    println!("  w1 = {w1}");
    println!("  w2 = {w2}");

    let seg = tropical_segment(&w1, &w2)?;
    println!("\nlambda values (sorted distinct coordinate differences w2 - w1):");
    println!("  {:?}", seg.lambdas());

    println!("\nbending points (lambda ⊙ w1) ⊞ w2, rescaled to diameter 2:");
    for (lambda, point) in seg.lambdas().iter().zip(seg.normalized_bend_points(2.0)) {
        println!("  lambda = {lambda:>5}: {point}");
    }

    println!("\ntopology itinerary:");
    for entry in segment_topologies(&seg, 1e-9)? {
        match entry.interval {
            LambdaInterval::At(l) => println!("  at {l:>5}: {}", entry.topology),
            LambdaInterval::Between(a, b) => {
                println!("  on ({a}, {b}): {}", entry.topology)
            }
        }
    }

    // Interior points are ordinary convex steps between bending points.
    let midway = seg.point_at(-0.6)?;
    println!("\npoint at lambda = -0.6: {midway}");
    Ok(())
}
