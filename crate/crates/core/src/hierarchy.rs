//! Binary hierarchies over a dataset and the sibling-decomposable tree cost.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::cost::CostModel;
use crate::error::{Error, Result};

/// A complete binary hierarchical clustering of `{0, .., n-1}`.
///
/// Stored as the map from every internal cluster to its canonical split.
/// Singletons are implicit leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    n: usize,
    splits: BTreeMap<Cluster, (Cluster, Cluster)>,
}

impl Hierarchy {
    /// The one-element hierarchy.
    pub fn leaf() -> Self {
        Hierarchy {
            n: 1,
            splits: BTreeMap::new(),
        }
    }

    /// Builds and validates a hierarchy from its parent-to-children splits.
    /// The orientation of each pair is normalized.
    pub fn from_splits<I>(n: usize, splits: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Cluster, Cluster)>,
    {
        if n == 0 {
            return Err(Error::Domain("a hierarchy needs at least one element".into()));
        }
        let mut map = BTreeMap::new();
        for (a, b) in splits {
            if a.is_empty() || b.is_empty() || !a.is_disjoint(&b) {
                return Err(Error::Domain(format!(
                    "split {a:?} | {b:?} is not a two-partition"
                )));
            }
            let parent = a.union(&b);
            let pair = Cluster::canonical_pair(a, b);
            if let Some(existing) = map.insert(parent.clone(), pair.clone()) {
                if existing != pair {
                    return Err(Error::Domain(format!(
                        "cluster {parent:?} has two different splits"
                    )));
                }
            }
        }
        let h = Hierarchy { n, splits: map };
        h.validate()?;
        Ok(h)
    }

    /// Builds a hierarchy from an agglomeration sequence: each merge joins two
    /// currently active clusters.
    pub fn from_merges(n: usize, merges: &[(Cluster, Cluster)]) -> Result<Self> {
        Hierarchy::from_splits(n, merges.iter().cloned())
    }

    fn validate(&self) -> Result<()> {
        let root = Cluster::full(self.n);
        let mut visited = 0usize;
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            if c.is_singleton() {
                continue;
            }
            let (l, r) = self.splits.get(&c).ok_or_else(|| {
                Error::Domain(format!("cluster {c:?} has no split"))
            })?;
            visited += 1;
            stack.push(l.clone());
            stack.push(r.clone());
        }
        if visited != self.splits.len() {
            return Err(Error::Domain(format!(
                "{} splits are not reachable from the root",
                self.splits.len() - visited
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> Cluster {
        Cluster::full(self.n)
    }

    /// The split of an internal cluster, or `None` for leaves and non-members.
    pub fn split(&self, c: &Cluster) -> Option<&(Cluster, Cluster)> {
        self.splits.get(c)
    }

    /// All `2n - 1` clusters, sorted by bit pattern.
    pub fn clusters(&self) -> Vec<Cluster> {
        let mut out: Vec<Cluster> = (0..self.n).map(Cluster::singleton).collect();
        out.extend(self.splits.keys().cloned());
        out.sort();
        out
    }

    /// The `n - 1` sibling pairs, ordered by parent bit pattern.
    pub fn sibling_pairs(&self) -> Vec<(Cluster, Cluster)> {
        self.splits.values().cloned().collect()
    }

    /// Internal clusters with their splits, ordered by parent bit pattern.
    pub fn internal(&self) -> impl Iterator<Item = (&Cluster, &(Cluster, Cluster))> {
        self.splits.iter()
    }

    /// Nested `{members, children}` form used in result files.
    pub fn to_tree_node(&self) -> TreeNode {
        self.node_of(&self.root())
    }

    fn node_of(&self, c: &Cluster) -> TreeNode {
        let children = match self.splits.get(c) {
            Some((l, r)) => vec![self.node_of(l), self.node_of(r)],
            None => Vec::new(),
        };
        TreeNode {
            members: c.to_vec(),
            children,
        }
    }

    pub fn from_tree_node(node: &TreeNode) -> Result<Self> {
        let n = node.members.len();
        let root: Cluster = node.members.iter().copied().collect();
        if root != Cluster::full(n) || root.len() != n {
            return Err(Error::parse(
                "tree",
                "root members must be exactly 0..n without repeats",
            ));
        }
        let mut splits = Vec::new();
        let mut stack = vec![node];
        while let Some(t) = stack.pop() {
            match t.children.as_slice() {
                [] => {
                    if t.members.len() != 1 {
                        return Err(Error::parse("tree", "leaf node with more than one member"));
                    }
                }
                [l, r] => {
                    let parent: Cluster = t.members.iter().copied().collect();
                    let lc: Cluster = l.members.iter().copied().collect();
                    let rc: Cluster = r.members.iter().copied().collect();
                    if lc.union(&rc) != parent {
                        return Err(Error::parse("tree", "children do not cover their parent"));
                    }
                    splits.push((lc, rc));
                    stack.push(l);
                    stack.push(r);
                }
                _ => return Err(Error::parse("tree", "every internal node needs two children")),
            }
        }
        Hierarchy::from_splits(n, splits)
    }

    /// Nested-array form: a leaf is its index, an internal node `[left, right]`.
    pub fn to_nested_array(&self) -> serde_json::Value {
        self.array_of(&self.root())
    }

    fn array_of(&self, c: &Cluster) -> serde_json::Value {
        match self.splits.get(c) {
            Some((l, r)) => serde_json::Value::Array(vec![self.array_of(l), self.array_of(r)]),
            None => serde_json::Value::from(c.first().unwrap_or(0)),
        }
    }

    pub fn from_nested_array(value: &serde_json::Value) -> Result<Self> {
        fn walk(v: &serde_json::Value, splits: &mut Vec<(Cluster, Cluster)>) -> Result<Cluster> {
            match v {
                serde_json::Value::Number(num) => num
                    .as_u64()
                    .map(|i| Cluster::singleton(i as usize))
                    .ok_or_else(|| Error::parse("tree", format!("bad leaf index {num}"))),
                serde_json::Value::Array(items) if items.len() == 2 => {
                    let l = walk(&items[0], splits)?;
                    let r = walk(&items[1], splits)?;
                    if !l.is_disjoint(&r) {
                        return Err(Error::parse("tree", "a leaf index appears twice"));
                    }
                    let parent = l.union(&r);
                    splits.push((l, r));
                    Ok(parent)
                }
                other => Err(Error::parse("tree", format!("unexpected node {other}"))),
            }
        }
        let mut splits = Vec::new();
        let root = walk(value, &mut splits)?;
        let n = root.len();
        if root != Cluster::full(n) {
            return Err(Error::parse("tree", "leaf indices must be exactly 0..n"));
        }
        Hierarchy::from_splits(n, splits)
    }
}

/// Serialized tree node: `{"members": [...], "children": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub members: Vec<usize>,
    #[serde(default)]
    pub children: Vec<TreeNode>,
}

/// Sum of the sibling cost over every sibling pair of the hierarchy.
pub fn tree_cost(h: &Hierarchy, model: &dyn CostModel) -> f64 {
    h.internal().map(|(_, (l, r))| model.psi(l, r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(ix: &[usize]) -> Cluster {
        ix.iter().copied().collect()
    }

    fn three_merge_01() -> Hierarchy {
        Hierarchy::from_splits(3, [(c(&[0]), c(&[1])), (c(&[0, 1]), c(&[2]))]).unwrap()
    }

    #[test]
    fn sizes() {
        let h = three_merge_01();
        assert_eq!(h.clusters().len(), 5);
        assert_eq!(h.sibling_pairs().len(), 2);
        assert_eq!(Hierarchy::leaf().sibling_pairs(), vec![]);
        assert_eq!(Hierarchy::leaf().clusters(), vec![c(&[0])]);
    }

    #[test]
    fn sibling_pairs_sorted_by_parent() {
        let h = three_merge_01();
        assert_eq!(
            h.sibling_pairs(),
            vec![(c(&[0]), c(&[1])), (c(&[0, 1]), c(&[2]))]
        );
        let two = Hierarchy::from_splits(2, [(c(&[1]), c(&[0]))]).unwrap();
        assert_eq!(two.sibling_pairs(), vec![(c(&[0]), c(&[1]))]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(Hierarchy::from_splits(3, [(c(&[0]), c(&[1]))]).is_err());
        assert!(Hierarchy::from_splits(2, [(c(&[0]), c(&[0, 1]))]).is_err());
        assert!(Hierarchy::from_splits(
            3,
            [(c(&[0]), c(&[1])), (c(&[0, 1]), c(&[2])), (c(&[1]), c(&[2]))]
        )
        .is_err());
        assert!(Hierarchy::from_splits(0, []).is_err());
    }

    #[test]
    fn nested_forms_round_trip() {
        let h = three_merge_01();
        let node = h.to_tree_node();
        assert_eq!(node.members, vec![0, 1, 2]);
        assert_eq!(Hierarchy::from_tree_node(&node).unwrap(), h);
        let arr = h.to_nested_array();
        assert_eq!(arr, serde_json::json!([[0, 1], 2]));
        assert_eq!(Hierarchy::from_nested_array(&arr).unwrap(), h);
        assert!(Hierarchy::from_nested_array(&serde_json::json!([[0, 0], 1])).is_err());
        assert!(Hierarchy::from_nested_array(&serde_json::json!([0, 2])).is_err());
    }
}
