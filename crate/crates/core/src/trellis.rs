//! The cluster trellis: nodes keyed by cluster, each holding a lazily
//! instantiated min-heap over its candidate two-partitions.
//!
//! A full trellis contains every nonempty subset of the dataset implicitly;
//! nodes are materialized when explored. A sparse trellis contains only the
//! clusters and splits recorded into it, either up front or by an extender
//! during search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::cluster::{Cluster, TwoPartitions, INLINE_CAPACITY};
use crate::error::{Error, Result};

/// One candidate split of a node with its A* bookkeeping.
///
/// `f` is always derived as `g + h`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeapEntry {
    pub g: f64,
    pub h: f64,
    pub left: Cluster,
    pub right: Cluster,
}

impl HeapEntry {
    pub fn f(&self) -> f64 {
        self.g + self.h
    }
}

/// Min-heap adapter ordering by `(f, left)`.
#[derive(Clone, Debug)]
struct Ranked(HeapEntry);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .f()
            .total_cmp(&self.0.f())
            .then_with(|| other.0.left.cmp(&self.0.left))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Priority queue of candidate splits for one node.
#[derive(Clone, Debug, Default)]
pub struct SplitQueue {
    heap: BinaryHeap<Ranked>,
}

impl SplitQueue {
    pub fn peek(&self) -> Option<&HeapEntry> {
        self.heap.peek().map(|r| &r.0)
    }

    pub fn pop(&mut self) -> Option<HeapEntry> {
        self.heap.pop().map(|r| r.0)
    }

    pub fn push(&mut self, entry: HeapEntry) {
        self.heap.push(Ranked(entry));
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HeapEntry> {
        self.heap.iter().map(|r| &r.0)
    }
}

#[derive(Clone, Debug)]
pub struct TrellisNode {
    pub cluster: Cluster,
    queue: Option<SplitQueue>,
    /// Recorded child pairs (sparse trellises only).
    splits: Vec<(Cluster, Cluster)>,
    split_keys: FxHashSet<Cluster>,
}

impl TrellisNode {
    fn new(cluster: Cluster) -> Self {
        TrellisNode {
            cluster,
            queue: None,
            splits: Vec::new(),
            split_keys: FxHashSet::default(),
        }
    }

    pub fn queue(&self) -> Option<&SplitQueue> {
        self.queue.as_ref()
    }

    pub fn is_explored(&self) -> bool {
        self.queue.is_some()
    }

    /// `(left, right)` of the queue minimum.
    pub fn best_split(&self) -> Option<(&Cluster, &Cluster)> {
        self.queue.as_ref()?.peek().map(|e| (&e.left, &e.right))
    }

    /// `f` of the queue minimum.
    pub fn best_value(&self) -> Option<f64> {
        self.queue.as_ref()?.peek().map(HeapEntry::f)
    }

    pub fn recorded_splits(&self) -> &[(Cluster, Cluster)] {
        &self.splits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrellisKind {
    Full,
    Sparse,
}

/// Largest dataset for which a full trellis can be addressed.
pub const FULL_TRELLIS_CAP: usize = INLINE_CAPACITY;

/// Environment variable capping the number of materialized trellis nodes.
pub const MAX_NODES_ENV: &str = "TRELLIS_ASTAR_MAX_NODES";

#[derive(Clone, Debug)]
pub struct Trellis {
    kind: TrellisKind,
    n: usize,
    root: Cluster,
    nodes: FxHashMap<Cluster, TrellisNode>,
    max_nodes: Option<usize>,
}

impl Trellis {
    /// The powerset trellis over `n` elements.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a trellis needs at least one element".into()));
        }
        if n > FULL_TRELLIS_CAP {
            return Err(Error::Capacity(format!(
                "full trellis supports at most {FULL_TRELLIS_CAP} elements, got {n}"
            )));
        }
        Ok(Trellis::with_root(TrellisKind::Full, n))
    }

    /// A trellis containing only the root.
    pub fn sparse(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a trellis needs at least one element".into()));
        }
        Ok(Trellis::with_root(TrellisKind::Sparse, n))
    }

    fn with_root(kind: TrellisKind, n: usize) -> Self {
        let root = Cluster::full(n);
        let mut nodes = FxHashMap::default();
        nodes.insert(root.clone(), TrellisNode::new(root.clone()));
        Trellis {
            kind,
            n,
            root,
            nodes,
            max_nodes: max_nodes_from_env(),
        }
    }

    /// Overrides the node cap taken from the environment.
    pub fn set_max_nodes(&mut self, cap: Option<usize>) {
        self.max_nodes = cap;
    }

    pub fn kind(&self) -> TrellisKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Cluster {
        &self.root
    }

    /// Number of clusters in the trellis; for a full trellis `2^n − 1`
    /// (saturating), whether or not they are materialized.
    pub fn node_count(&self) -> u128 {
        match self.kind {
            TrellisKind::Full if self.n >= 128 => u128::MAX,
            TrellisKind::Full => (1u128 << self.n) - 1,
            TrellisKind::Sparse => self.nodes.len() as u128,
        }
    }

    /// Number of nodes currently held in memory.
    pub fn materialized_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, c: &Cluster) -> bool {
        match self.kind {
            TrellisKind::Full => !c.is_empty() && c.is_subset(&self.root),
            TrellisKind::Sparse => self.nodes.contains_key(c),
        }
    }

    pub fn node(&self, c: &Cluster) -> Option<&TrellisNode> {
        self.nodes.get(c)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TrellisNode> {
        self.nodes.values()
    }

    fn node_mut(&mut self, c: &Cluster) -> Result<&mut TrellisNode> {
        if !self.nodes.contains_key(c) {
            if !self.contains(c) {
                return Err(Error::MissingNode(format!("{c:?}")));
            }
            self.check_capacity(1)?;
            self.nodes.insert(c.clone(), TrellisNode::new(c.clone()));
        }
        Ok(self.nodes.get_mut(c).expect("inserted above"))
    }

    fn check_capacity(&self, extra: usize) -> Result<()> {
        match self.max_nodes {
            Some(cap) if self.nodes.len() + extra > cap => Err(Error::Capacity(format!(
                "trellis would exceed {cap} nodes (set {MAX_NODES_ENV} to raise the cap)"
            ))),
            _ => Ok(()),
        }
    }

    fn ensure_node(&mut self, c: &Cluster) -> Result<()> {
        if !self.nodes.contains_key(c) {
            self.check_capacity(1)?;
            self.nodes.insert(c.clone(), TrellisNode::new(c.clone()));
        }
        Ok(())
    }

    /// Records `left | right` as a child pair of their union. Both halves
    /// and the parent become nodes. Returns `false` if already recorded.
    /// Full trellises already contain every split and ignore this.
    pub fn add_split(&mut self, left: Cluster, right: Cluster) -> Result<bool> {
        if left.is_empty() || right.is_empty() || !left.is_disjoint(&right) {
            return Err(Error::Domain(format!(
                "{left:?} | {right:?} is not a two-partition"
            )));
        }
        let parent = left.union(&right);
        if !parent.is_subset(&self.root) {
            return Err(Error::Domain(format!("{parent:?} is outside the dataset")));
        }
        if self.kind == TrellisKind::Full {
            return Ok(false);
        }
        let (left, right) = Cluster::canonical_pair(left, right);
        self.ensure_node(&parent)?;
        self.ensure_node(&left)?;
        self.ensure_node(&right)?;
        let node = self.nodes.get_mut(&parent).expect("ensured");
        if !node.split_keys.insert(left.clone()) {
            return Ok(false);
        }
        node.splits.push((left, right));
        Ok(true)
    }

    /// Child pairs of `c`: every canonical two-partition for a full trellis,
    /// the recorded pairs for a sparse one.
    pub fn children_pairs(&self, c: &Cluster) -> Result<Vec<(Cluster, Cluster)>> {
        if !self.contains(c) {
            return Err(Error::MissingNode(format!("{c:?}")));
        }
        match self.kind {
            TrellisKind::Full => {
                if c.len() > 64 {
                    return Err(Error::Capacity(format!(
                        "cannot enumerate the splits of a {}-element cluster",
                        c.len()
                    )));
                }
                Ok(TwoPartitions::new(c).collect())
            }
            TrellisKind::Sparse => Ok(self.nodes[c].splits.clone()),
        }
    }

    /// Instantiates the queue of `c` with the given entries.
    pub fn instantiate(&mut self, c: &Cluster, entries: Vec<HeapEntry>) -> Result<()> {
        let node = self.node_mut(c)?;
        let mut queue = SplitQueue::default();
        for e in entries {
            debug_assert_eq!(e.left.union(&e.right), node.cluster);
            queue.push(e);
        }
        node.queue = Some(queue);
        Ok(())
    }

    pub(crate) fn queue_mut(&mut self, c: &Cluster) -> Option<&mut SplitQueue> {
        self.nodes.get_mut(c)?.queue.as_mut()
    }

    /// Top entry of `c`'s queue, if instantiated and nonempty.
    pub fn top(&self, c: &Cluster) -> Option<&HeapEntry> {
        self.nodes.get(c)?.queue.as_ref()?.peek()
    }

    /// `Some(queue_is_empty)` if instantiated.
    pub fn explored_state(&self, c: &Cluster) -> Option<bool> {
        self.nodes.get(c)?.queue.as_ref().map(SplitQueue::is_empty)
    }

    /// Drops every queue, keeping nodes and recorded splits.
    pub fn reset_queues(&mut self) {
        for node in self.nodes.values_mut() {
            node.queue = None;
        }
    }

    /// Follows best-split pointers from the root.
    pub fn extract_state(&self) -> Result<PartialHierarchy> {
        let mut state = PartialHierarchy::default();
        let mut stack = vec![self.root.clone()];
        while let Some(c) = stack.pop() {
            state.clusters.push(c.clone());
            if c.is_singleton() {
                continue;
            }
            match self.nodes.get(&c).and_then(|n| n.queue.as_ref()) {
                None => state.frontier.push(c),
                Some(q) => match q.peek() {
                    None => return Err(Error::SearchExhausted),
                    Some(top) => {
                        state.pairs.push((top.left.clone(), top.right.clone()));
                        stack.push(top.right.clone());
                        stack.push(top.left.clone());
                    }
                },
            }
        }
        Ok(state)
    }

    /// Total entries across all instantiated queues.
    pub fn heap_entry_count(&self) -> u64 {
        self.nodes
            .values()
            .filter_map(|n| n.queue.as_ref())
            .map(|q| q.len() as u64)
            .sum()
    }

    /// log10 of the number of complete hierarchies formed only from
    /// explored nodes' queue entries; `-inf` when there are none.
    pub fn log10_trees_explored(&self) -> f64 {
        let mut memo = FxHashMap::default();
        let ln = self.ln_count(&self.root, &mut memo, &|node: &TrellisNode| {
            node.queue
                .as_ref()
                .map(|q| q.iter().map(|e| (e.left.clone(), e.right.clone())).collect())
        });
        ln / std::f64::consts::LN_10
    }

    /// log10 of the number of hierarchies representable through recorded
    /// splits of a sparse trellis.
    pub fn log10_trees_recorded(&self) -> f64 {
        let mut memo = FxHashMap::default();
        let ln = self.ln_count(&self.root, &mut memo, &|node: &TrellisNode| {
            Some(node.splits.clone())
        });
        ln / std::f64::consts::LN_10
    }

    fn ln_count(
        &self,
        c: &Cluster,
        memo: &mut FxHashMap<Cluster, f64>,
        children: &dyn Fn(&TrellisNode) -> Option<Vec<(Cluster, Cluster)>>,
    ) -> f64 {
        if c.is_singleton() {
            return 0.0;
        }
        if let Some(v) = memo.get(c) {
            return *v;
        }
        let pairs = self.nodes.get(c).and_then(children).unwrap_or_default();
        let terms: Vec<f64> = pairs
            .iter()
            .map(|(l, r)| self.ln_count(l, memo, children) + self.ln_count(r, memo, children))
            .filter(|t| t.is_finite())
            .collect();
        let v = log_sum_exp(&terms);
        memo.insert(c.clone(), v);
        v
    }

    /// Debug snapshot keyed by the hex bit pattern of each materialized node.
    pub fn snapshot(&self) -> serde_json::Value {
        let mut keys: Vec<&Cluster> = self.nodes.keys().collect();
        keys.sort();
        let mut map = serde_json::Map::new();
        for c in keys {
            let node = &self.nodes[c];
            let best_split = node
                .best_split()
                .map(|(l, r)| serde_json::json!([l.to_hex(), r.to_hex()]));
            map.insert(
                c.to_hex(),
                serde_json::json!({
                    "explored": node.is_explored(),
                    "best_split": best_split,
                    "best_value": node.best_value(),
                    "queue_size": node.queue.as_ref().map_or(0, SplitQueue::len),
                }),
            );
        }
        serde_json::Value::Object(map)
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn max_nodes_from_env() -> Option<usize> {
    std::env::var(MAX_NODES_ENV).ok()?.trim().parse().ok()
}

/// A partial hierarchy read off the trellis by following best splits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartialHierarchy {
    /// Clusters in preorder; every child appears after its parent.
    pub clusters: Vec<Cluster>,
    /// Sibling pairs realized so far.
    pub pairs: Vec<(Cluster, Cluster)>,
    /// Non-singleton leaves whose queues are not yet instantiated.
    pub frontier: Vec<Cluster>,
}

impl PartialHierarchy {
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }
}
