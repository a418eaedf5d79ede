mod common;

use common::*;
use trellis_astar::baselines::{beam_search, brute_force_map, greedy};
use trellis_astar::ginkgo::GinkgoHeuristic;
use trellis_astar::graph::GraphHeuristic;
use trellis_astar::{astar_search, exhaustive_search, tree_cost, CostModel, Trellis};

fn check(model: &dyn CostModel, label: &str) {
    let n = model.element_count();
    let oracle = brute_force_map(model).unwrap();
    let mut t = Trellis::full(n).unwrap();
    let a = astar_search(&mut t, model, None).unwrap();
    assert!(rel_close(a.cost, oracle.cost, 1e-9), "{label}: astar {} oracle {}", a.cost, oracle.cost);
    assert!(rel_close(a.cost, tree_cost(&a.tree, model), 1e-9), "{label}: reported cost is not the tree's");
    let mut t = Trellis::full(n).unwrap();
    let e = exhaustive_search(&mut t, model).unwrap();
    assert!(rel_close(e.cost, oracle.cost, 1e-9), "{label}: exhaustive {} oracle {}", e.cost, oracle.cost);
    let g = greedy(model).unwrap();
    assert!(oracle.cost <= g.cost + 1e-9, "{label}: greedy below oracle");
    let b = beam_search(model, 5).unwrap();
    assert!(oracle.cost <= b.best.cost + 1e-9, "{label}: beam below oracle");
}

#[test]
fn astar_matches_brute_force_on_small_instances() {
    for n in 1..=7 {
        for seed in 0..6 {
            check(&hcc(n, seed, GraphHeuristic::Native), &format!("hcc n={n} seed={seed}"));
            check(&hcc(n, seed, GraphHeuristic::Zero), &format!("hcc/zero n={n} seed={seed}"));
            check(&dasgupta(n, seed, GraphHeuristic::Native), &format!("dasgupta n={n} seed={seed}"));
            if n >= 2 {
                check(&ginkgo(n, seed, GinkgoHeuristic::H0), &format!("ginkgo/h0 n={n} seed={seed}"));
                check(&ginkgo(n, seed, GinkgoHeuristic::Zero), &format!("ginkgo/zero n={n} seed={seed}"));
            }
        }
    }
}
