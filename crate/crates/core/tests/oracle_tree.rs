mod common;

use approx::assert_abs_diff_eq;
use common::{check_tree_identities, check_tree_oracle, check_tree_routes, m1, tree_instance};
use hmm_entropy::{
    entropy_summary, enumerate_tree, smooth_tree, tree_entropy_profile, viterbi_profiles, viterbi_tree,
    ObservedTree, TreeTopology, DEFAULT_CHILDREN_BUDGET, DEFAULT_CONFIG_BUDGET,
};

// Exact values for M1 on the star tree with three zero observations, from a
// rational-arithmetic enumeration.
const EVIDENCE: f64 = 0.2258;
const GLOBAL: f64 = 0.412_546_575_904_582;
const ROOT_GIVEN_CHILDREN: f64 = 0.053_993_132_426_869_095;
const LEAF_GIVEN_ROOT: f64 = 0.139_009_999_048_723_88;
const COMPLEMENT_OF_LEAF: f64 = 0.273_536_576_855_858;

fn star() -> ObservedTree {
    ObservedTree::univariate(TreeTopology::star(2), &[0, 0, 0]).unwrap()
}

#[test]
fn star_smoothing() {
    let post = smooth_tree(&m1(), &star()).unwrap();
    assert_abs_diff_eq!(post.log_likelihood.exp(), EVIDENCE, epsilon = 1e-14);
    let leaf = (0.4 * 0.72 * 0.74 + 0.1 * 0.08 * 0.26) / EVIDENCE;
    assert_abs_diff_eq!(post.smoothed[[1, 0]], leaf, epsilon = 1e-14);
    assert_abs_diff_eq!(post.smoothed[[2, 0]], leaf, epsilon = 1e-14);
    assert_abs_diff_eq!(post.smoothed[[0, 0]], 0.970_062_001_771_479_2, epsilon = 1e-14);
}

#[test]
fn star_entropies() {
    let model = m1();
    let tree = star();
    let post = smooth_tree(&model, &tree).unwrap();
    let prof = tree_entropy_profile(&model, &tree, &post, Some(DEFAULT_CHILDREN_BUDGET)).unwrap();
    assert_abs_diff_eq!(prof.global_entropy, GLOBAL, epsilon = 1e-12);
    assert_abs_diff_eq!(prof.children_conditional.as_ref().unwrap()[0], ROOT_GIVEN_CHILDREN, epsilon = 1e-12);
    assert_abs_diff_eq!(prof.parent_conditional[1], LEAF_GIVEN_ROOT, epsilon = 1e-12);
    assert_abs_diff_eq!(prof.partial_complement[2], COMPLEMENT_OF_LEAF, epsilon = 1e-12);
    assert_eq!(prof.partial_complement[0], 0.0);
    let s = entropy_summary(&prof).unwrap();
    assert!(s.g <= s.c && s.c <= s.m);
}

#[test]
fn star_restoration() {
    let model = m1();
    let tree = star();
    let v = viterbi_tree(&model, &tree).unwrap();
    assert_eq!(v.states, vec![0, 0, 0]);
    assert_abs_diff_eq!(v.log_joint.exp(), 0.20736, epsilon = 1e-14);
    let prof = viterbi_profiles(&model, &tree).unwrap();
    assert_abs_diff_eq!(prof[[0, 1]], 0.1 * 0.18 * 0.18 / EVIDENCE, epsilon = 1e-14);
    assert_abs_diff_eq!(prof[[0, 0]], 0.20736 / EVIDENCE, epsilon = 1e-14);
}

#[test]
fn star_oracle_evidence() {
    let r = enumerate_tree(&m1(), &star(), DEFAULT_CONFIG_BUDGET).unwrap();
    assert_abs_diff_eq!(r.evidence(), EVIDENCE, epsilon = 1e-15);
}

#[test]
fn random_trees_match_enumeration() {
    for seed in 0..150 {
        let (model, tree) = tree_instance(seed);
        let m = check_tree_oracle(&model, &tree);
        assert!(m.is_ok(), "seed {seed}: {:?}", &m.failures[..m.failures.len().min(5)]);
    }
}

#[test]
fn random_trees_satisfy_identities() {
    for seed in 0..150 {
        let (model, tree) = tree_instance(seed);
        check_tree_identities(&model, &tree).assert_ok();
        check_tree_routes(&model, &tree).assert_ok();
    }
}
