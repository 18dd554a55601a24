use num_bigint::BigUint;
use repzeta::closed_form::GelfandSeries;
use repzeta::trees::{
    orbit_count_layer, tree_zeta, BoundarySeries, ProjectiveTree, ProjectiveTreeSpec, TreeSpec,
    DEFAULT_ENUMERATION_BUDGET,
};

fn projective(p: u64, n: usize, d: usize, depth: u32) -> ProjectiveTree {
    ProjectiveTree::new(ProjectiveTreeSpec { p, n, depth, d, inv: 1 }).unwrap()
}

#[test]
fn acceptance_layers() {
    for ((p, n, d, k), expect) in [((2, 1, 1, 2), vec![3u64, 2]), ((3, 2, 1, 1), vec![13]), ((2, 1, 2, 1), vec![5])] {
        let layers = projective(p, n, d, k).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(layers.branching, expect);
        assert!(layers.matches_closed());
    }
}

#[test]
fn other_invariant() {
    // Δ of index 3 with invariant 2/3 has the same tree
    let t = ProjectiveTree::new(ProjectiveTreeSpec { p: 2, n: 1, depth: 2, d: 3, inv: 2 }).unwrap();
    let layers = t.layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
    assert_eq!(layers.branching, vec![9, 8]);
    assert_eq!(t.distance_classes(2, DEFAULT_ENUMERATION_BUDGET).unwrap(), 3);
}

#[test]
fn boundary_of_projective_tree_is_the_gelfand_series() {
    let (q, n, d) = (3u64, 1u32, 1u32);
    let layers = projective(q, n as usize, d as usize, 3).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
    let tail = *layers.branching.last().unwrap();
    let boundary = BoundarySeries::new(layers.branching[..1].to_vec(), tail).unwrap();
    let series = GelfandSeries::new(q, n, d).unwrap();
    let expect: Vec<BigUint> = series.dimensions(8).into_iter().map(|x| x.to_biguint().unwrap()).collect();
    assert_eq!(boundary.dimensions(8), expect);
}

#[test]
fn orbit_counts_on_projective_trees_match_rooted_trees() {
    let t = projective(3, 1, 1, 2);
    let spec = t.layers(DEFAULT_ENUMERATION_BUDGET).unwrap().tree();
    for k in 1..=2 {
        assert_eq!(t.distance_classes(k, DEFAULT_ENUMERATION_BUDGET).unwrap(), orbit_count_layer(&spec, k as usize).unwrap());
    }
}

#[test]
fn regular_tree_partial_sums() {
    // at s = −1 the partial sums of Σ dim^{−s} telescope to the layer size
    let s = BoundarySeries::new(vec![], 4).unwrap();
    for count in 1..8 {
        let spec = s.truncation(count - 1);
        assert_eq!(s.partial_sum_at_negative(count, 1), spec.layer_size(spec.depth()));
    }
    let dims = tree_zeta(&TreeSpec::new(vec![4, 4, 4]).unwrap());
    assert_eq!(dims.len(), 4);
}
