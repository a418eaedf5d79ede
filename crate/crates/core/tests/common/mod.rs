#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trellis_astar::ginkgo::{generate_jet_with_leaves, GinkgoHeuristic, GinkgoModel, JetEvent};
use trellis_astar::graph::{DasguptaModel, GraphHeuristic, HccModel, SimilarityGraph};

pub const LAMBDA: f64 = 1.5;
// With t_cut ≥ 2 every finite split NLL is nonnegative, so the zero
// heuristic stays admissible for Ginkgo too.
pub const T_CUT: f64 = 4.0;

/// Root mass that makes `n` leaves a typical outcome for the generator.
pub fn t_root_for(n: usize) -> f64 {
    match n {
        0..=3 => 40.0,
        4..=5 => 100.0,
        6..=8 => 400.0,
        9..=12 => 1000.0,
        13..=24 => 6000.0,
        _ => 3.0e5,
    }
}

pub fn jet(n: usize, seed: u64) -> Arc<JetEvent> {
    Arc::new(generate_jet_with_leaves(LAMBDA, t_root_for(n), T_CUT, n, seed).unwrap())
}

pub fn ginkgo(n: usize, seed: u64, h: GinkgoHeuristic) -> GinkgoModel {
    GinkgoModel::new(jet(n, seed), h)
}

/// Mean-centered cosine similarities of random Gaussian-ish points in 3-d.
pub fn hcc_graph(n: usize, seed: u64) -> Arc<SimilarityGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let g = SimilarityGraph::cosine(&points).unwrap();
    Arc::new(if n >= 2 { g.mean_center().unwrap() } else { g })
}

pub fn hcc(n: usize, seed: u64, h: GraphHeuristic) -> HccModel {
    HccModel::new(hcc_graph(n, seed), h)
}

/// Nonnegative weights, about a third of them zero.
pub fn dasgupta_graph(n: usize, seed: u64) -> Arc<SimilarityGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(2.0 / 3.0) {
                edges.push((i, j, rng.gen_range(0.0..1.0)));
            }
        }
    }
    Arc::new(SimilarityGraph::from_edges(n, edges).unwrap())
}

pub fn dasgupta(n: usize, seed: u64, h: GraphHeuristic) -> DasguptaModel {
    DasguptaModel::new(dasgupta_graph(n, seed), h).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

use trellis_astar::{Cluster, Hierarchy};

/// Every hierarchy over the members of `c`, as split lists. Splits are
/// chosen by the subset holding the smallest member, so each tree appears once.
pub fn all_split_sets(c: &Cluster) -> Vec<Vec<(Cluster, Cluster)>> {
    let members = c.to_vec();
    if members.len() == 1 {
        return vec![Vec::new()];
    }
    let first = members[0];
    let rest = &members[1..];
    let mut out = Vec::new();
    // side containing `first` takes `first` plus any proper subset of `rest`
    for mask in 0..(1u64 << rest.len()) - 1 {
        let mut a = Cluster::singleton(first);
        for (k, &m) in rest.iter().enumerate() {
            if mask >> k & 1 == 1 {
                a.insert(m);
            }
        }
        let b = c.difference(&a);
        for la in all_split_sets(&a) {
            for lb in all_split_sets(&b) {
                let mut splits = vec![(a.clone(), b.clone())];
                splits.extend(la.iter().cloned());
                splits.extend(lb.iter().cloned());
                out.push(splits);
            }
        }
    }
    out
}

pub fn all_trees(n: usize) -> Vec<Hierarchy> {
    all_split_sets(&Cluster::full(n))
        .into_iter()
        .map(|s| Hierarchy::from_splits(n, s).unwrap())
        .collect()
}
