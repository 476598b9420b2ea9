//! Searches for every tree topology the tropical sum of two cones can
//! produce, then shows a pair where the combinatorial filter passes but no
//! actual realization exists.
//!
//! Run with: cargo run --example compatibility_search

use troptree::{
    compatibility_set, decide_membership, necessary_condition, ut_membership, Clade, Topology,
};

fn topo(n: usize, clades: &[&[usize]]) -> Topology {
    Topology::new(n, clades.iter().map(|c| Clade::new(c.to_vec())).collect()).unwrap()
}

fn main() -> troptree::Result<()> {
    let f1 = topo(5, &[&[1, 2, 3], &[1, 2], &[4, 5]]);
    let f2 = topo(5, &[&[1, 3, 4, 5], &[1, 3, 5], &[1, 5]]);
    println!("F1 = {f1}");
    println!("F2 = {f2}");

    let reports = compatibility_set(&f1, &f2, true)?;
    println!(
        "\n{} full-dimensional candidates, members of C(F1,F2):",
        reports.len()
    );
    for report in reports.iter().filter(|r| r.member) {
        let (w1, w2) = report.witness.as_ref().expect("members carry witnesses");
        let sum = w1.trop_sum(w2)?;
        assert!(ut_membership(&report.candidate, &sum, 1e-9)?);
        println!("  {}   witness sum {}", report.candidate, sum);
    }

    let f3 = topo(5, &[&[1, 2, 3], &[2, 3], &[4, 5]]);
    let report = decide_membership(&f1, &f2, &f3)?;
    println!(
        "\n{f3}: necessary condition {}, member: {}",
        if report.passes_necessary {
            "passes"
        } else {
            "fails"
        },
        report.member
    );

    // A twelve-leaf triple where the filter is satisfied yet the order
    // constraints close into a strict cycle, so membership fails.
    let g1 = topo(
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
    let g2 = topo(
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
    let g = topo(
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
    println!("\ntwelve-leaf pair:");
    println!(
        "  necessary condition: {}",
        necessary_condition(&g1, &g2, &g)?
    );
    println!(
        "  exact membership:    {}",
        decide_membership(&g1, &g2, &g)?.member
    );
    Ok(())
}
