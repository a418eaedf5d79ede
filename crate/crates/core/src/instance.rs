//! Loading datasets and pairing them with a cost model.

use std::path::Path;
use std::sync::Arc;

use crate::cost::{CostKind, CostModel, HeuristicKind};
use crate::error::{Error, Result};
use crate::ginkgo::{GinkgoHeuristic, GinkgoModel, JetEvent};
use crate::graph::{DasguptaModel, GraphHeuristic, HccModel, SimilarityGraph};

/// How a graph-objective input file is interpreted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GraphFormat {
    /// `n m` header followed by `i j w` edge lines.
    #[default]
    Edges,
    /// Headerless CSV of feature vectors, turned into a mean-centered
    /// cosine-similarity graph.
    Points,
}

/// A dataset in memory. Cheap to clone; models built from it share the data.
#[derive(Clone, Debug)]
pub enum Instance {
    Graph(Arc<SimilarityGraph>),
    Jet(Arc<JetEvent>),
}

impl Instance {
    /// Reads a jet file for the Ginkgo cost and a graph file otherwise.
    pub fn load(path: impl AsRef<Path>, cost: CostKind, format: GraphFormat) -> Result<Self> {
        let path = path.as_ref();
        Ok(match (cost, format) {
            (CostKind::Ginkgo, _) => Instance::Jet(Arc::new(JetEvent::read(path)?)),
            (_, GraphFormat::Edges) => Instance::Graph(Arc::new(SimilarityGraph::read(path)?)),
            (_, GraphFormat::Points) => Instance::Graph(Arc::new(SimilarityGraph::read_points(path)?)),
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Graph(g) => g.n(),
            Instance::Jet(e) => e.n(),
        }
    }

    /// Builds the cost model; `heuristic` defaults to the cost's own.
    pub fn model(&self, cost: CostKind, heuristic: Option<HeuristicKind>) -> Result<Box<dyn CostModel>> {
        let heuristic = heuristic.unwrap_or(cost.default_heuristic());
        let bad = || {
            Error::Domain(format!(
                "heuristic {} does not apply to cost {}",
                heuristic.as_str(),
                cost.as_str()
            ))
        };
        match (self, cost) {
            (Instance::Graph(g), CostKind::Hcc) => {
                let h = match heuristic {
                    HeuristicKind::Zero => GraphHeuristic::Zero,
                    HeuristicKind::Hcc => GraphHeuristic::Native,
                    _ => return Err(bad()),
                };
                Ok(Box::new(HccModel::new(g.clone(), h)))
            }
            (Instance::Graph(g), CostKind::Dasgupta) => {
                let h = match heuristic {
                    HeuristicKind::Zero => GraphHeuristic::Zero,
                    HeuristicKind::Dasgupta => GraphHeuristic::Native,
                    _ => return Err(bad()),
                };
                Ok(Box::new(DasguptaModel::new(g.clone(), h)?))
            }
            (Instance::Jet(e), CostKind::Ginkgo) => {
                let h = match heuristic {
                    HeuristicKind::Zero => GinkgoHeuristic::Zero,
                    HeuristicKind::H0 => GinkgoHeuristic::H0,
                    HeuristicKind::H1 => GinkgoHeuristic::H1,
                    _ => return Err(bad()),
                };
                Ok(Box::new(GinkgoModel::new(e.clone(), h)))
            }
            (Instance::Graph(_), CostKind::Ginkgo) => Err(Error::ObjectiveMismatch(
                "the ginkgo cost needs a jet, not a similarity graph".into(),
            )),
            (Instance::Jet(_), _) => Err(Error::ObjectiveMismatch(format!(
                "the {} cost needs a similarity graph, not a jet",
                cost.as_str()
            ))),
        }
    }
}
