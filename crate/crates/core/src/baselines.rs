//! Agglomerative baselines (greedy, beam) and a brute-force optimum for tiny inputs.

use std::cmp::Ordering;

use crate::cluster::{Cluster, TwoPartitions};
use crate::cost::{sanitize, CostModel};
use crate::error::{Error, Result};
use crate::hierarchy::{tree_cost, Hierarchy};

/// Largest input accepted by [`brute_force_map`]; 17!! ≈ 3.4e7 trees at 10.
pub const BRUTE_FORCE_MAX: usize = 10;

#[derive(Clone, Debug)]
pub struct BaselineResult {
    pub cost: f64,
    pub tree: Hierarchy,
}

#[derive(Clone, Debug)]
pub struct BeamResult {
    pub best: BaselineResult,
    /// Every complete tree left in the final beam, cheapest first.
    pub trees: Vec<(f64, Hierarchy)>,
    /// Partial clusterings expanded over all levels.
    pub states_expanded: u64,
}

/// Beam width used when none is given: every pair of a level for small
/// inputs, 1000 beyond 40 elements.
pub fn default_beam_width(n: usize) -> usize {
    if n > 40 {
        1000
    } else {
        (n * n.saturating_sub(1) / 2).max(1)
    }
}

/// `(2n-3)!!`, the number of binary hierarchies over `n` leaves; `None` on overflow.
pub fn hierarchy_count(n: usize) -> Option<u128> {
    (1..n).try_fold(1u128, |acc, k| acc.checked_mul(2 * k as u128 - 1))
}

/// `log10((2n-3)!!)`.
pub fn log10_hierarchy_count(n: usize) -> f64 {
    (1..n).map(|k| ((2 * k - 1) as f64).log10()).sum()
}

fn singletons(n: usize) -> Vec<Cluster> {
    (0..n).map(Cluster::singleton).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("dataset is empty".into()));
    }
    Ok(())
}

/// Repeatedly merges the pair with the smallest sibling cost; ties go to the
/// smaller `(left, right)` in cluster order.
pub fn greedy(model: &dyn CostModel) -> Result<BaselineResult> {
    let n = model.element_count();
    check_n(n)?;
    let mut active = singletons(n);
    // Row i holds ψ(active[i], active[j]) for j < i.
    let mut psi: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..i).map(|j| sanitize(model.psi(&active[j], &active[i]))).collect())
        .collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    while active.len() > 1 {
        let mut best: Option<(f64, (Cluster, Cluster), usize, usize)> = None;
        for i in 1..active.len() {
            for j in 0..i {
                let v = psi[i][j];
                let better = match &best {
                    None => true,
                    Some((bv, bpair, _, _)) => match v.total_cmp(bv) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let pair = Cluster::canonical_pair(active[i].clone(), active[j].clone());
                            pair < *bpair
                        }
                    },
                };
                if better {
                    let pair = Cluster::canonical_pair(active[i].clone(), active[j].clone());
                    best = Some((v, pair, i, j));
                }
            }
        }
        let (_, pair, i, j) = best.expect("at least one pair");
        let merged = pair.0.union(&pair.1);
        merges.push(pair);
        // Remove i then j (i > j), shrinking the triangle accordingly.
        for (k, row) in psi.iter_mut().enumerate() {
            if k > i {
                row.remove(i);
            }
            if k > j {
                row.remove(j);
            }
        }
        psi.remove(i);
        psi.remove(j);
        active.remove(i);
        active.remove(j);
        let row = active
            .iter()
            .map(|other| sanitize(model.psi(other, &merged)))
            .collect();
        active.push(merged);
        psi.push(row);
    }
    let tree = Hierarchy::from_merges(n, &merges)?;
    // summed in tree order so every result equals `tree_cost` of its tree exactly
    Ok(BaselineResult {
        cost: tree_cost(&tree, model),
        tree,
    })
}

#[derive(Clone)]
struct BeamState {
    cost: f64,
    /// Active clusters in ascending cluster order.
    active: Vec<Cluster>,
    /// ψ(active[a], active[b]) for a > b at `tri(a, b)`.
    pair_cost: Vec<f64>,
    merges: Vec<(Cluster, Cluster)>,
}

fn tri(a: usize, b: usize) -> usize {
    a * (a - 1) / 2 + b
}

/// Merging `active[lo]` with `active[hi]` (lo < hi) in beam state `state`.
#[derive(Clone, Copy)]
struct Candidate {
    cost: f64,
    state: usize,
    lo: usize,
    hi: usize,
}

// Within a state, (lo, hi) order is (left, right) cluster order because
// `active` is sorted, so a beam of one breaks ties exactly like greedy.
fn candidate_order(x: &Candidate, y: &Candidate) -> Ordering {
    x.cost
        .total_cmp(&y.cost)
        .then(x.state.cmp(&y.state))
        .then(x.lo.cmp(&y.lo))
        .then(x.hi.cmp(&y.hi))
}

impl BeamState {
    fn merge(&self, lo: usize, hi: usize, cost: f64, model: &dyn CostModel) -> BeamState {
        let pair = (self.active[lo].clone(), self.active[hi].clone());
        let merged = pair.0.union(&pair.1);
        // Old index of each new position; None marks the merged cluster.
        let mut origin: Vec<Option<usize>> = (0..self.active.len())
            .filter(|&k| k != lo && k != hi)
            .map(Some)
            .collect();
        let at = origin.partition_point(|o| self.active[o.unwrap()] < merged);
        origin.insert(at, None);
        let active: Vec<Cluster> = origin
            .iter()
            .map(|o| o.map_or_else(|| merged.clone(), |k| self.active[k].clone()))
            .collect();
        let m = active.len();
        let mut pair_cost = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for x in 1..m {
            for y in 0..x {
                pair_cost.push(match (origin[x], origin[y]) {
                    (Some(ox), Some(oy)) => self.pair_cost[tri(ox, oy)],
                    _ => sanitize(model.psi(&active[y], &active[x])),
                });
            }
        }
        let mut merges = self.merges.clone();
        merges.push(pair);
        BeamState {
            cost,
            active,
            pair_cost,
            merges,
        }
    }
}

/// Level-synchronous beam search over agglomeration sequences.
pub fn beam_search(model: &dyn CostModel, width: usize) -> Result<BeamResult> {
    beam_search_with(model, width, true)
}

/// As [`beam_search`]; with `dedup`, a candidate whose accumulated cost
/// equals (to 1e-12 relative) that of the previously kept candidate is
/// dropped, which collapses merge-order permutations of the same forest.
pub fn beam_search_with(model: &dyn CostModel, width: usize, dedup: bool) -> Result<BeamResult> {
    let n = model.element_count();
    check_n(n)?;
    if width == 0 {
        return Err(Error::Domain("beam width must be positive".into()));
    }
    let active = singletons(n);
    let mut pair_cost = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 1..n {
        for b in 0..a {
            pair_cost.push(sanitize(model.psi(&active[b], &active[a])));
        }
    }
    let mut beam = vec![BeamState {
        cost: 0.0,
        active,
        pair_cost,
        merges: Vec::new(),
    }];
    let mut states_expanded = 0u64;
    for _ in 1..n {
        states_expanded += beam.len() as u64;
        let mut candidates = Vec::new();
        for (s, state) in beam.iter().enumerate() {
            let m = state.active.len();
            for hi in 1..m {
                for lo in 0..hi {
                    candidates.push(Candidate {
                        cost: state.cost + state.pair_cost[tri(hi, lo)],
                        state: s,
                        lo,
                        hi,
                    });
                }
            }
        }
        beam = select(&beam, candidates, width, dedup, model);
    }
    let mut trees = Vec::with_capacity(beam.len());
    for state in beam {
        let tree = Hierarchy::from_merges(n, &state.merges)?;
        trees.push((tree_cost(&tree, model), tree));
    }
    // re-summing can reorder near-ties; keep the beam's order otherwise
    trees.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (cost, tree) = trees[0].clone();
    Ok(BeamResult {
        best: BaselineResult { cost, tree },
        trees,
        states_expanded,
    })
}

fn same_cost(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

fn select(
    beam: &[BeamState],
    mut candidates: Vec<Candidate>,
    width: usize,
    dedup: bool,
    model: &dyn CostModel,
) -> Vec<BeamState> {
    // Order only a prefix large enough to survive deduplication in the
    // common case; fall back to the whole list when it does not.
    let mut prefix = width.saturating_mul(4).min(candidates.len());
    loop {
        if prefix < candidates.len() {
            candidates.select_nth_unstable_by(prefix, candidate_order);
        }
        candidates[..prefix].sort_unstable_by(candidate_order);
        let mut kept: Vec<&Candidate> = Vec::with_capacity(width);
        for cand in &candidates[..prefix] {
            if dedup && kept.last().is_some_and(|last| same_cost(last.cost, cand.cost)) {
                continue;
            }
            kept.push(cand);
            if kept.len() == width {
                break;
            }
        }
        if kept.len() == width || prefix == candidates.len() {
            return kept
                .into_iter()
                .map(|c| beam[c.state].merge(c.lo, c.hi, c.cost, model))
                .collect();
        }
        prefix = candidates.len();
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub cost: f64,
    pub tree: Hierarchy,
    /// Number of hierarchies enumerated, `(2n-3)!!`.
    pub tree_count: u128,
}

/// Enumerates every binary hierarchy over `n <= 10` elements and returns the
/// cheapest (first found on ties).
pub fn brute_force_map(model: &dyn CostModel) -> Result<OracleResult> {
    let n = model.element_count();
    check_n(n)?;
    if n > BRUTE_FORCE_MAX {
        return Err(Error::Capacity(format!(
            "brute force is limited to {BRUTE_FORCE_MAX} elements, got {n}"
        )));
    }
    let mut search = Enumeration {
        model,
        pending: vec![Cluster::full(n)],
        chosen: Vec::new(),
        best_cost: f64::INFINITY,
        best: None,
        count: 0,
    };
    search.recurse(0.0);
    let tree = match search.best {
        Some(splits) => Hierarchy::from_splits(n, splits)?,
        None if n == 1 => Hierarchy::leaf(),
        // Every tree has infinite cost; report the first one enumerated.
        None => first_tree(n)?,
    };
    Ok(OracleResult {
        cost: if n == 1 { 0.0 } else { tree_cost(&tree, model) },
        tree,
        tree_count: search.count,
    })
}

fn first_tree(n: usize) -> Result<Hierarchy> {
    let splits = (1..n).map(|k| (Cluster::full(k), Cluster::singleton(k)));
    Hierarchy::from_splits(n, splits)
}

struct Enumeration<'a> {
    model: &'a dyn CostModel,
    pending: Vec<Cluster>,
    chosen: Vec<(Cluster, Cluster)>,
    best_cost: f64,
    best: Option<Vec<(Cluster, Cluster)>>,
    count: u128,
}

impl Enumeration<'_> {
    fn recurse(&mut self, cost: f64) {
        let Some(c) = self.pending.pop() else {
            self.count += 1;
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(self.chosen.clone());
            }
            return;
        };
        if c.is_singleton() {
            self.recurse(cost);
        } else {
            for (l, r) in TwoPartitions::new(&c) {
                let psi = sanitize(self.model.psi(&l, &r));
                self.pending.push(l.clone());
                self.pending.push(r.clone());
                self.chosen.push((l, r));
                self.recurse(cost + psi);
                self.chosen.pop();
                self.pending.pop();
                self.pending.pop();
            }
        }
        self.pending.push(c);
    }
}
