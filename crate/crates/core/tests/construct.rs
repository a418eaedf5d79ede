mod common;

use std::collections::HashSet;

use common::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trellis_astar::baselines::{beam_search, brute_force_map};
use trellis_astar::construct::{
    approximate_search, init_from_trees, iterative_search, ApproxConfig, Extender, ExtenderConfig, SamplerMode,
};
use trellis_astar::ginkgo::GinkgoHeuristic;
use trellis_astar::graph::GraphHeuristic;
use trellis_astar::{astar_search, tree_cost, Cluster, CostModel, Hierarchy, Trellis};

/// Representable means every split of the tree is recorded in the trellis.
fn representable(trellis: &Trellis, tree: &Hierarchy) -> bool {
    tree.internal().all(|(parent, pair)| {
        trellis
            .node(parent)
            .is_some_and(|node| node.recorded_splits().contains(pair))
    })
}

fn best_representable(trellis: &Trellis, model: &dyn CostModel) -> f64 {
    all_trees(model.element_count())
        .iter()
        .filter(|t| representable(trellis, t))
        .map(|t| tree_cost(t, model))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn single_tree_trellis_returns_that_tree() {
    let m = hcc(6, 11, GraphHeuristic::Native);
    for (i, tree) in all_trees(6).iter().enumerate().step_by(97) {
        let mut t = init_from_trees(std::slice::from_ref(tree), 6).unwrap();
        let r = astar_search(&mut t, &m, None).unwrap();
        assert_eq!(&r.tree, tree, "tree {i}");
        assert!(rel_close(r.cost, tree_cost(tree, &m), 1e-12));
    }
}

#[test]
fn recombination_of_two_trees() {
    // Two 5-leaf trees sharing the root split {0,1,2} | {3,4} and differing
    // only inside {0,1,2}: nothing to recombine, exactly the two inputs.
    let c = |ix: &[usize]| -> Cluster { ix.iter().copied().collect() };
    let s = |a: &[usize], b: &[usize]| (c(a), c(b));
    let t1 = Hierarchy::from_splits(5, [s(&[0, 1, 2], &[3, 4]), s(&[0, 1], &[2]), s(&[0], &[1]), s(&[3], &[4])]).unwrap();
    let t2 = Hierarchy::from_splits(5, [s(&[0, 1, 2], &[3, 4]), s(&[0], &[1, 2]), s(&[1], &[2]), s(&[3], &[4])]).unwrap();
    let trellis = init_from_trees(&[t1.clone(), t2.clone()], 5).unwrap();
    let count = all_trees(5).iter().filter(|t| representable(&trellis, t)).count();
    assert_eq!(count, 2);
    assert!((trellis.log10_trees_recorded() - 2f64.log10()).abs() < 1e-12);

    // Two 6-leaf trees whose root children each have two recorded splits
    // recombine into 2 × 2 = 4 trees.
    let t3 = Hierarchy::from_splits(6, [s(&[0, 1, 2], &[3, 4, 5]), s(&[0, 1], &[2]), s(&[0], &[1]), s(&[3, 4], &[5]), s(&[3], &[4])]).unwrap();
    let t4 = Hierarchy::from_splits(6, [s(&[0, 1, 2], &[3, 4, 5]), s(&[0], &[1, 2]), s(&[1], &[2]), s(&[3], &[4, 5]), s(&[4], &[5])]).unwrap();
    let trellis = init_from_trees(&[t3, t4], 6).unwrap();
    assert_eq!(all_trees(6).iter().filter(|t| representable(&trellis, t)).count(), 4);
    assert!((trellis.log10_trees_recorded() - 4f64.log10()).abs() < 1e-12);
}

#[test]
fn all_fifteen_trees_recover_the_optimum() {
    let trees = all_trees(4);
    assert_eq!(trees.len(), 15);
    for seed in 0..10 {
        let m = dasgupta(4, seed, GraphHeuristic::Native);
        let mut t = init_from_trees(&trees, 4).unwrap();
        let r = astar_search(&mut t, &m, None).unwrap();
        assert!(rel_close(r.cost, brute_force_map(&m).unwrap().cost, 1e-12));
    }
}

#[test]
fn sparse_astar_finds_best_representable_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 3..=6 {
        let trees = all_trees(n);
        for seed in 0..8 {
            let m = ginkgo(n, seed, GinkgoHeuristic::H0);
            let picked: Vec<_> = trees.choose_multiple(&mut rng, 3).cloned().collect();
            let mut t = init_from_trees(&picked, n).unwrap();
            let r = astar_search(&mut t, &m, None).unwrap();
            let expected = best_representable(&t, &m);
            assert!(rel_close(r.cost, expected, 1e-9), "n={n} seed={seed}: {} vs {expected}", r.cost);
        }
    }
}

#[test]
fn superset_trellis_is_never_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 4..=8 {
        for seed in 0..6 {
            let m = hcc(n, 100 + seed, GraphHeuristic::Native);
            let trees: Vec<_> = (0..6)
                .map(|_| {
                    // random agglomerations give random trees cheaply
                    let mut active: Vec<Cluster> = (0..n).map(Cluster::singleton).collect();
                    let mut merges = Vec::new();
                    while active.len() > 1 {
                        active.shuffle(&mut rng);
                        let a = active.pop().unwrap();
                        let b = active.pop().unwrap();
                        active.push(a.union(&b));
                        merges.push((a, b));
                    }
                    Hierarchy::from_merges(n, &merges).unwrap()
                })
                .collect();
            let mut costs = Vec::new();
            for k in 1..=trees.len() {
                let mut t = init_from_trees(&trees[..k], n).unwrap();
                costs.push(astar_search(&mut t, &m, None).unwrap().cost);
            }
            assert!(costs.windows(2).all(|w| w[1] <= w[0]), "n={n}: {costs:?}");
            let best_input = trees.iter().map(|t| tree_cost(t, &m)).fold(f64::INFINITY, f64::min);
            assert!(costs.last().unwrap() <= &(best_input + 1e-12));
        }
    }
}

#[test]
fn sampled_splits_never_duplicate_in_a_queue() {
    for mode in [SamplerMode::BestK, SamplerMode::Importance] {
        let m = ginkgo(14, 3, GinkgoHeuristic::H1);
        let beam = beam_search(&m, 20).unwrap();
        let trees: Vec<_> = beam.trees.into_iter().map(|t| t.1).collect();
        let mut t = init_from_trees(&trees, 14).unwrap();
        let cfg = ExtenderConfig { mode, k: 4, pool: 64 };
        iterative_search(&mut t, &m, 3, cfg, 1).unwrap();
        for node in t.nodes() {
            let Some(q) = node.queue() else { continue };
            let keys: HashSet<_> = q.iter().map(|e| e.left.clone()).collect();
            assert_eq!(keys.len(), q.len());
            for e in q.iter() {
                assert!(e.left < e.right);
                assert!(e.left.is_disjoint(&e.right));
                assert_eq!(e.left.union(&e.right), node.cluster);
            }
        }
    }
}

#[test]
fn one_round_equals_single_approximate_search() {
    let m = ginkgo(10, 4, GinkgoHeuristic::H1);
    let cfg = ApproxConfig { seed: 9, ..Default::default() };
    let a = approximate_search(&m, cfg).unwrap();
    let b = approximate_search(&m, cfg).unwrap();
    assert_eq!(a.result.cost, b.result.cost);
    assert_eq!(a.result.tree, b.result.tree);
    assert_eq!(a.rounds.len(), 1);
    assert!(a.result.cost <= a.beam_cost);
}

#[test]
fn exhaustive_sampling_reaches_the_optimum_in_one_round() {
    for seed in 0..5 {
        let m = hcc(6, seed, GraphHeuristic::Native);
        let tree = beam_search(&m, 1).unwrap().best.tree;
        let mut t = init_from_trees(&[tree], 6).unwrap();
        let cfg = ExtenderConfig { mode: SamplerMode::BestK, k: 31, pool: 31 };
        let r = iterative_search(&mut t, &m, 1, cfg, seed).unwrap();
        assert!(rel_close(r[0].cost, brute_force_map(&m).unwrap().cost, 1e-12));
    }
}

#[test]
fn extender_determinism_under_seed() {
    let m = ginkgo(16, 2, GinkgoHeuristic::H1);
    let c = Cluster::full(16);
    let cfg = ExtenderConfig { mode: SamplerMode::Importance, k: 5, pool: 300 };
    let a = Extender::new(cfg, 42).unwrap().sample_splits(&c, &m);
    let b = Extender::new(cfg, 42).unwrap().sample_splits(&c, &m);
    let other = Extender::new(cfg, 43).unwrap().sample_splits(&c, &m);
    assert_eq!(a, b);
    assert_ne!(a, other);
}
