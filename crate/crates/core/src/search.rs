//! A* over the trellis.
//!
//! Each iteration reads the current best partial hierarchy off the trellis,
//! stops once that state is complete and its realized cost meets the root bound,
//! otherwise instantiates the queues of its unexplored leaves and then
//! refreshes the top entries of the nodes on the state, leaves first.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cluster::Cluster;
use crate::construct::Extender;
use crate::cost::{sanitize, CostModel};
use crate::error::{Error, Result};
use crate::hierarchy::{tree_cost, Hierarchy};
use crate::trellis::{HeapEntry, PartialHierarchy, Trellis, TrellisKind};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes_explored: u64,
    pub heap_pushes: u64,
    pub heap_pops: u64,
    pub iterations: u64,
    #[serde(serialize_with = "serialize_ms", rename = "wall_ms")]
    pub wall_time: Duration,
    /// log10 of the hierarchies representable within the explored sub-trellis.
    pub trees_in_trellis_log10: f64,
}

fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub cost: f64,
    pub tree: Hierarchy,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchConfig {
    /// Outer-loop cap; defaults to 10 × the number of trellis nodes.
    pub max_iterations: Option<u64>,
}

/// Relative slack between a complete state's realized cost and the root
/// bound, absorbing summation-order rounding.
const GOAL_TOLERANCE: f64 = 1e-12;

/// Runs A* with the default configuration.
pub fn astar_search(
    trellis: &mut Trellis,
    model: &dyn CostModel,
    extender: Option<&mut Extender>,
) -> Result<SearchResult> {
    astar_search_with(trellis, model, extender, SearchConfig::default())
}

pub fn astar_search_with(
    trellis: &mut Trellis,
    model: &dyn CostModel,
    mut extender: Option<&mut Extender>,
    config: SearchConfig,
) -> Result<SearchResult> {
    let start = Instant::now();
    let n = model.element_count();
    if trellis.n() != n {
        return Err(Error::Domain(format!(
            "trellis covers {} elements but the cost model has {n}",
            trellis.n()
        )));
    }
    let mut stats = SearchStats::default();
    if n == 1 {
        stats.wall_time = start.elapsed();
        return Ok(SearchResult {
            cost: 0.0,
            tree: Hierarchy::leaf(),
            stats,
        });
    }
    let root = trellis.root().clone();
    loop {
        stats.iterations += 1;
        let cap = config.max_iterations.unwrap_or_else(|| {
            let nodes = trellis.node_count().min(u64::MAX as u128 / 10) as u64;
            10 * nodes.max(trellis.materialized_nodes() as u64).max(1)
        });
        if stats.iterations > cap {
            return Err(Error::IterationCap(cap));
        }
        let state = trellis.extract_state()?;
        if let Some(top) = trellis.top(&root) {
            let bound = top.f();
            if bound == f64::INFINITY {
                return Err(Error::SearchExhausted);
            }
            // Every queue entry is a lower bound on the best tree through its
            // split, so a complete state whose realized cost meets the root's
            // bound is optimal. Entries refreshed against children that have
            // changed since can make the bound stale; checking the realized
            // cost rather than trusting h == 0 keeps the goal test sound.
            if state.is_complete() {
                let realized: f64 = state.pairs.iter().map(|(l, r)| sanitize(model.psi(l, r))).sum();
                if realized - bound <= GOAL_TOLERANCE * bound.abs().max(1.0) {
                    let tree = Hierarchy::from_splits(n, state.pairs)?;
                    // summed in the tree's own order so it equals `tree_cost` bit for bit
                    let cost = tree_cost(&tree, model);
                    stats.wall_time = start.elapsed();
                    stats.trees_in_trellis_log10 = trellis.log10_trees_explored();
                    return Ok(SearchResult { cost, tree, stats });
                }
            }
        }
        explore_leaves(trellis, &state.frontier, model, extender.as_deref_mut(), &mut stats)?;
        propagate_updates(trellis, &state, model, &mut stats);
    }
}

/// Instantiates the queue of every frontier cluster.
pub fn explore_leaves(
    trellis: &mut Trellis,
    frontier: &[Cluster],
    model: &dyn CostModel,
    mut extender: Option<&mut Extender>,
    stats: &mut SearchStats,
) -> Result<()> {
    for c in frontier {
        if !trellis.contains(c) {
            return Err(Error::MissingNode(format!("{c:?}")));
        }
        if let (Some(ext), TrellisKind::Sparse) = (extender.as_deref_mut(), trellis.kind()) {
            for (l, r) in ext.sample_splits(c, model) {
                trellis.add_split(l, r)?;
            }
        }
        let pairs = trellis.children_pairs(c)?;
        let entries: Vec<HeapEntry> = pairs
            .into_iter()
            .map(|(left, right)| {
                let g = compute_g(&left, &right, trellis, model);
                let h = compute_h(&left, &right, trellis, model);
                HeapEntry { g, h, left, right }
            })
            .collect();
        stats.heap_pushes += entries.len() as u64;
        stats.nodes_explored += 1;
        trellis.instantiate(c, entries)?;
    }
    Ok(())
}

/// Realized cost of a child's best sub-state: 0 if unexplored, `+inf` if
/// explored with no split.
fn best_g(c: &Cluster, trellis: &Trellis) -> f64 {
    if c.is_singleton() {
        return 0.0;
    }
    match trellis.explored_state(c) {
        None => 0.0,
        Some(true) => f64::INFINITY,
        Some(false) => trellis.top(c).map_or(0.0, |e| e.g),
    }
}

fn best_h(c: &Cluster, trellis: &Trellis, model: &dyn CostModel) -> f64 {
    if c.is_singleton() {
        return 0.0;
    }
    match trellis.explored_state(c) {
        None => model.heuristic(c),
        Some(true) => 0.0,
        Some(false) => trellis.top(c).map_or(0.0, |e| e.h),
    }
}

/// `ψ(left, right)` plus the realized costs of both children's best sub-states.
pub fn compute_g(left: &Cluster, right: &Cluster, trellis: &Trellis, model: &dyn CostModel) -> f64 {
    sanitize(model.psi(left, right)) + best_g(left, trellis) + best_g(right, trellis)
}

/// Heuristic mass on the unexplored leaves below `left` and `right`.
pub fn compute_h(left: &Cluster, right: &Cluster, trellis: &Trellis, model: &dyn CostModel) -> f64 {
    best_h(left, trellis, model) + best_h(right, trellis, model)
}

/// Refreshes the top entry of every node on the state, children before
/// parents: the top is popped, its `g` and `h` recomputed from the current
/// child queues and re-enqueued, repeating until the top is up to date.
pub fn propagate_updates(
    trellis: &mut Trellis,
    state: &PartialHierarchy,
    model: &dyn CostModel,
    stats: &mut SearchStats,
) {
    for c in state.clusters.iter().rev() {
        if c.is_singleton() {
            continue;
        }
        let limit = trellis.queue_mut(c).map_or(0, |q| q.len());
        for _ in 0..limit {
            let Some(top) = trellis.queue_mut(c).and_then(|q| q.pop()) else {
                break;
            };
            stats.heap_pops += 1;
            let g = compute_g(&top.left, &top.right, trellis, model);
            let h = compute_h(&top.left, &top.right, trellis, model);
            let fresh = g == top.g && h == top.h;
            let queue = trellis.queue_mut(c).expect("popped from it above");
            queue.push(HeapEntry { g, h, ..top });
            stats.heap_pushes += 1;
            if fresh {
                break;
            }
        }
    }
}

/// Explores every node of a full trellis bottom-up, so each queue minimum
/// is the exact optimum of its cluster, then reads off the root's tree.
pub fn exhaustive_search(trellis: &mut Trellis, model: &dyn CostModel) -> Result<SearchResult> {
    let start = Instant::now();
    if trellis.kind() != TrellisKind::Full {
        return Err(Error::Domain("exhaustive search needs a full trellis".into()));
    }
    let n = trellis.n();
    if n > 30 {
        return Err(Error::Capacity(format!(
            "exhaustive exploration of {n} elements is infeasible"
        )));
    }
    let mut stats = SearchStats::default();
    let mut clusters: Vec<u128> = (1u128..(1u128 << n)).filter(|b| b.count_ones() >= 2).collect();
    clusters.sort_by_key(|b| (b.count_ones(), *b));
    for bits in clusters {
        let c = Cluster::from_bits(bits);
        explore_leaves(trellis, std::slice::from_ref(&c), model, None, &mut stats)?;
    }
    let mut result = astar_search(trellis, model, None)?;
    stats.iterations = result.stats.iterations;
    stats.wall_time = start.elapsed();
    stats.trees_in_trellis_log10 = result.stats.trees_in_trellis_log10;
    result.stats = stats;
    Ok(result)
}
