//! The cost-model contract shared by search, baselines and the oracle.

use crate::cluster::Cluster;

/// A sibling-decomposable clustering objective paired with a heuristic.
///
/// `psi` is the cost charged to one sibling pair; the cost of a hierarchy
/// is the sum of `psi` over its sibling pairs. `heuristic` estimates the
/// minimal cost of any hierarchy over the given cluster and must return 0
/// for singletons. A* is exact when the heuristic never overestimates.
///
/// Implementations may memoize internally and so are not required to be
/// `Sync`; build one model per worker.
pub trait CostModel {
    /// Number of elements in the underlying dataset.
    fn element_count(&self) -> usize;

    /// Cost of the sibling pair `(left, right)`. Must be symmetric. May be
    /// `+inf` for impossible splits; never NaN.
    fn psi(&self, left: &Cluster, right: &Cluster) -> f64;

    fn heuristic(&self, cluster: &Cluster) -> f64;
}

/// Cost names accepted on the command line and in manifests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Hcc,
    Dasgupta,
    Ginkgo,
}

/// Heuristic names accepted on the command line and in manifests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicKind {
    Zero,
    Hcc,
    Dasgupta,
    H0,
    H1,
}

impl CostKind {
    /// The admissible heuristic paired with this cost by default.
    pub fn default_heuristic(self) -> HeuristicKind {
        match self {
            CostKind::Hcc => HeuristicKind::Hcc,
            CostKind::Dasgupta => HeuristicKind::Dasgupta,
            CostKind::Ginkgo => HeuristicKind::H1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Hcc => "hcc",
            CostKind::Dasgupta => "dasgupta",
            CostKind::Ginkgo => "ginkgo",
        }
    }
}

impl HeuristicKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicKind::Zero => "zero",
            HeuristicKind::Hcc => "hcc",
            HeuristicKind::Dasgupta => "dasgupta",
            HeuristicKind::H0 => "h0",
            HeuristicKind::H1 => "h1",
        }
    }
}

impl std::str::FromStr for CostKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hcc" => Ok(CostKind::Hcc),
            "dasgupta" => Ok(CostKind::Dasgupta),
            "ginkgo" => Ok(CostKind::Ginkgo),
            other => Err(format!("unknown cost '{other}' (expected hcc, dasgupta or ginkgo)")),
        }
    }
}

impl std::str::FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zero" => Ok(HeuristicKind::Zero),
            "hcc" => Ok(HeuristicKind::Hcc),
            "dasgupta" => Ok(HeuristicKind::Dasgupta),
            "h0" => Ok(HeuristicKind::H0),
            "h1" => Ok(HeuristicKind::H1),
            other => Err(format!(
                "unknown heuristic '{other}' (expected zero, hcc, dasgupta, h0 or h1)"
            )),
        }
    }
}

/// Replaces NaN with `+inf` so that broken splits are never preferred.
pub(crate) fn sanitize(cost: f64) -> f64 {
    if cost.is_nan() {
        f64::INFINITY
    } else {
        cost
    }
}
