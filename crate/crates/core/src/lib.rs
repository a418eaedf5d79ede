//! Minimum-cost hierarchical clustering by A* search over a cluster trellis.
//!
//! A hierarchy's cost is a sum of a sibling cost `ψ(left, right)` over its
//! sibling pairs. [`search::astar_search`] finds the cheapest hierarchy
//! representable in a [`trellis::Trellis`]; on a full trellis that is the
//! global optimum, on a sparse one built by [`construct`] it is an
//! approximation that can only improve as the trellis grows.

pub mod baselines;
pub mod bench;
pub mod cluster;
pub mod construct;
pub mod cost;
pub mod error;
pub mod ginkgo;
pub mod graph;
pub mod hierarchy;
pub mod instance;
pub mod report;
pub mod rng;
pub mod search;
pub mod trellis;

pub use cluster::Cluster;
pub use cost::{CostKind, CostModel, HeuristicKind};
pub use error::{Error, Result};
pub use hierarchy::{tree_cost, Hierarchy};
pub use search::{astar_search, exhaustive_search, SearchResult, SearchStats};
pub use trellis::Trellis;
