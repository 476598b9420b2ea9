//! Property tests for the torus arithmetic, the permutation action, and the
//! tree/vector/text conversions.

use proptest::prelude::*;

use troptree::{
    is_tree_metric, is_ultrametric, parse_newick, random_coalescent_tree, tree_to_vector,
    vector_to_tree, write_newick, LeafPermutation, MetricKind, PairVector,
};

const TOL: f64 = 1e-9;

fn arb_vector(n: usize) -> impl Strategy<Value = PairVector> {
    prop::collection::vec(-50.0..50.0f64, n * (n - 1) / 2)
        .prop_map(move |coords| PairVector::new(n, coords).unwrap())
}

fn arb_permutation(n: usize) -> impl Strategy<Value = LeafPermutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| LeafPermutation::new(images).unwrap())
}

fn coalescent(n: usize, seed: u64) -> PairVector {
    tree_to_vector(&random_coalescent_tree(n, seed).unwrap())
}

proptest! {
    #[test]
    fn tropical_metric_axioms(u in arb_vector(5), v in arb_vector(5), w in arb_vector(5)) {
        let duv = u.trop_distance(&v).unwrap();
        prop_assert!(duv >= 0.0);
        prop_assert!((duv - v.trop_distance(&u).unwrap()).abs() < 1e-12);
        prop_assert_eq!(u.trop_distance(&u).unwrap(), 0.0);
        let duw = u.trop_distance(&w).unwrap();
        let dwv = w.trop_distance(&v).unwrap();
        prop_assert!(duv <= duw + dwv + 1e-9);
    }

    #[test]
    fn distance_ignores_constant_shifts(u in arb_vector(5), v in arb_vector(5), c in -100.0..100.0f64) {
        let shifted = u.trop_scalar(c);
        let d = u.trop_distance(&v).unwrap();
        prop_assert!((shifted.trop_distance(&v).unwrap() - d).abs() < 1e-9);
        prop_assert!(u.torus_eq(&shifted, 1e-9).unwrap());
    }

    #[test]
    fn canonical_rep_is_the_same_torus_point(u in arb_vector(4)) {
        let rep = u.canonical_rep();
        prop_assert_eq!(rep.coords()[0], 0.0);
        prop_assert!(u.torus_eq(&rep, 1e-9).unwrap());
    }

    #[test]
    fn permutations_act_as_a_group(
        w in arb_vector(6),
        sigma in arb_permutation(6),
        tau in arb_permutation(6),
    ) {
        let id = LeafPermutation::identity(6);
        let under_id = w.apply_permutation(&id).unwrap();
        prop_assert_eq!(under_id.coords(), w.coords());

        // Sigma then tau equals the composite sigma∘tau.
        let two_steps = w.apply_permutation(&sigma).unwrap().apply_permutation(&tau).unwrap();
        let composite = w.apply_permutation(&sigma.compose(&tau).unwrap()).unwrap();
        prop_assert_eq!(two_steps.coords(), composite.coords());

        let inverse_round = w.apply_permutation(&sigma).unwrap()
            .apply_permutation(&sigma.inverse()).unwrap();
        prop_assert_eq!(inverse_round.coords(), w.coords());
    }

    #[test]
    fn relabeling_commutes_with_tropical_arithmetic(
        u in arb_vector(5),
        v in arb_vector(5),
        sigma in arb_permutation(5),
        a in -10.0..10.0f64,
        b in -10.0..10.0f64,
    ) {
        let lhs = u.trop_scalar(a).trop_sum(&v.trop_scalar(b)).unwrap()
            .apply_permutation(&sigma).unwrap();
        let rhs = u.apply_permutation(&sigma).unwrap().trop_scalar(a)
            .trop_sum(&v.apply_permutation(&sigma).unwrap().trop_scalar(b)).unwrap();
        prop_assert_eq!(lhs.coords(), rhs.coords());
    }

    #[test]
    fn coalescent_round_trips(n in 3usize..8, seed in 0u64..10_000) {
        let tree = random_coalescent_tree(n, seed).unwrap();
        let w = tree_to_vector(&tree);
        prop_assert_eq!(is_ultrametric(&w, TOL).kind, MetricKind::Ultrametric);
        prop_assert_eq!(is_tree_metric(&w, TOL).kind, MetricKind::TreeMetric);
        prop_assert_eq!(troptree::topology_of(&w, TOL).unwrap(), tree.topology());

        // Vector realization is a torus identity.
        let back = tree_to_vector(&vector_to_tree(&w, None, TOL).unwrap());
        prop_assert!(w.torus_eq(&back, 1e-9).unwrap());

        // Text round trip preserves structure and metric.
        let reread = parse_newick(&write_newick(&tree)).unwrap();
        prop_assert_eq!(reread.leaf_labels(), tree.leaf_labels());
        prop_assert_eq!(reread.internal_clades(), tree.internal_clades());
        prop_assert!(tree_to_vector(&reread).torus_eq(&w, 1e-9).unwrap());
    }

    #[test]
    fn sums_of_ultrametrics_stay_ultrametric(sa in 0u64..5_000, sb in 0u64..5_000) {
        let u = coalescent(6, sa);
        let v = coalescent(6, 1_000_000 + sb);
        let sum = u.trop_sum(&v).unwrap();
        prop_assert_eq!(is_ultrametric(&sum, TOL).kind, MetricKind::Ultrametric);
    }
}
