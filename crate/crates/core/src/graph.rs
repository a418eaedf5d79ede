//! Similarity graphs and their two objectives: hierarchical correlation
//! clustering and Dasgupta's cost.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::cluster::Cluster;
use crate::cost::CostModel;
use crate::error::{Error, Result};

/// Symmetric weighted graph over `n` elements, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityGraph {
    n: usize,
    weights: Vec<f64>,
}

impl SimilarityGraph {
    /// A graph with every weight 0.
    pub fn new(n: usize) -> Self {
        SimilarityGraph {
            n,
            weights: vec![0.0; n * n],
        }
    }

    /// Builds a graph from `(i, j, w)` triples. Pairs not listed are 0.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = SimilarityGraph::new(n);
        for (i, j, w) in edges {
            g.set(i, j, w)?;
        }
        Ok(g)
    }

    pub fn set(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if i == j {
            return Err(Error::Domain(format!("self-edge on element {i}")));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::Domain(format!(
                "edge ({i}, {j}) out of range for {} elements",
                self.n
            )));
        }
        if !w.is_finite() {
            return Err(Error::Domain(format!("edge ({i}, {j}) has non-finite weight")));
        }
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Iterates `(i, j, w)` for `i < j`, including zero weights.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.weight(i, j))))
    }

    /// Cosine similarity between rows of `points`. Zero vectors are rejected.
    pub fn cosine(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut norms = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::parse(
                    "points",
                    format!("row {i} has {} columns, expected {dim}", p.len()),
                ));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse("points", format!("row {i} has a non-finite value")));
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Domain(format!("row {i} is a zero vector")));
            }
            norms.push(norm);
        }
        let mut g = SimilarityGraph::new(points.len());
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let dot: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
                g.set(i, j, dot / (norms[i] * norms[j]))?;
            }
        }
        Ok(g)
    }

    /// Subtracts the mean pairwise weight from every pair.
    pub fn mean_center(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::Domain("mean-centering needs at least two elements".into()));
        }
        let count = (self.n * (self.n - 1) / 2) as f64;
        let mean = self.pairs().map(|(_, _, w)| w).sum::<f64>() / count;
        let mut g = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.weight(i, j) - mean;
                g.weights[i * self.n + j] = w;
                g.weights[j * self.n + i] = w;
            }
        }
        Ok(g)
    }

    /// Parses the text format: a header `n m`, then `m` lines `i j w`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse("graph file", "missing header line"))?;
        let mut head = header.split_whitespace();
        let n: usize = parse_field(head.next(), "graph header n")?;
        let m: usize = parse_field(head.next(), "graph header m")?;
        if head.next().is_some() {
            return Err(Error::parse("graph file", "header must be exactly `n m`"));
        }
        let mut g = SimilarityGraph::new(n);
        let mut seen = std::collections::HashSet::new();
        let mut edges = 0usize;
        for (lineno, line) in lines {
            let mut fields = line.split_whitespace();
            let i: usize = parse_field(fields.next(), "edge i")?;
            let j: usize = parse_field(fields.next(), "edge j")?;
            let w: f64 = parse_field(fields.next(), "edge weight")?;
            if fields.next().is_some() {
                return Err(Error::parse(
                    "graph file",
                    format!("line {}: expected `i j w`", lineno + 1),
                ));
            }
            if i >= j {
                return Err(Error::parse(
                    "graph file",
                    format!("line {}: edges must satisfy i < j", lineno + 1),
                ));
            }
            if !seen.insert((i, j)) {
                return Err(Error::parse(
                    "graph file",
                    format!("line {}: duplicate edge ({i}, {j})", lineno + 1),
                ));
            }
            g.set(i, j, w).map_err(|e| Error::parse("graph file", e.to_string()))?;
            edges += 1;
        }
        if edges != m {
            return Err(Error::parse(
                "graph file",
                format!("header announces {m} edges, found {edges}"),
            ));
        }
        Ok(g)
    }

    /// Renders the text format, listing every nonzero pair.
    pub fn to_text(&self) -> String {
        let edges: Vec<_> = self.pairs().filter(|(_, _, w)| *w != 0.0).collect();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (i, j, w) in edges {
            let _ = writeln!(out, "{i} {j} {w:?}");
        }
        out
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        SimilarityGraph::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(&path, self.to_text()).map_err(|e| Error::io(&path, e))
    }

    /// Parses a headerless CSV of point coordinates, one row per element.
    pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::parse("points", e.to_string()))?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse("points", format!("row {i}: bad number '{f}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(rows)
    }

    /// Reads a points CSV and applies cosine similarity then mean-centering.
    pub fn read_points(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        SimilarityGraph::cosine(&SimilarityGraph::parse_points(&text)?)?.mean_center()
    }

    /// `(positive, negative-magnitude, total)` weight between two disjoint clusters.
    pub fn cross_sums(&self, a: &Cluster, b: &Cluster) -> (f64, f64, f64) {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let large: Vec<usize> = large.to_vec();
        let (mut pos, mut neg, mut total) = (0.0, 0.0, 0.0);
        for i in small.iter() {
            let row = &self.weights[i * self.n..(i + 1) * self.n];
            for &j in &large {
                let w = row[j];
                total += w;
                if w > 0.0 {
                    pos += w;
                } else {
                    neg -= w;
                }
            }
        }
        (pos, neg, total)
    }

    fn has_negative_weight(&self) -> Option<(usize, usize, f64)> {
        self.pairs().find(|(_, _, w)| *w < 0.0)
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &'static str) -> Result<T> {
    let f = field.ok_or_else(|| Error::parse("graph file", format!("missing {what}")))?;
    f.parse()
        .map_err(|_| Error::parse("graph file", format!("bad {what} '{f}'")))
}

/// Within-cluster weight sums.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClusterAggregates {
    /// Sum of positive weights inside the cluster.
    pub pos_within: f64,
    /// Sum of |w| over negative weights inside the cluster.
    pub neg_within: f64,
    pub total_within: f64,
}

impl ClusterAggregates {
    pub fn compute(c: &Cluster, g: &SimilarityGraph) -> Self {
        let members = c.to_vec();
        let mut agg = ClusterAggregates::default();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let w = g.weight(i, j);
                agg.total_within += w;
                if w > 0.0 {
                    agg.pos_within += w;
                } else {
                    agg.neg_within -= w;
                }
            }
        }
        agg
    }

    /// Aggregates of `left ∪ right` from the parts and their cross sums.
    pub fn merge(left: &Self, right: &Self, cross: (f64, f64, f64)) -> Self {
        ClusterAggregates {
            pos_within: left.pos_within + right.pos_within + cross.0,
            neg_within: left.neg_within + right.neg_within + cross.1,
            total_within: left.total_within + right.total_within + cross.2,
        }
    }
}

#[derive(Default)]
struct AggregateCache {
    map: RefCell<HashMap<Cluster, ClusterAggregates>>,
}

impl AggregateCache {
    fn get(&self, c: &Cluster, g: &SimilarityGraph) -> ClusterAggregates {
        if c.len() < 2 {
            return ClusterAggregates::default();
        }
        if let Some(a) = self.map.borrow().get(c) {
            return *a;
        }
        let a = ClusterAggregates::compute(c, g);
        self.map.borrow_mut().insert(c.clone(), a);
        a
    }
}

/// Which heuristic a graph objective uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphHeuristic {
    Zero,
    /// The objective's own admissible bound.
    Native,
}

/// Hierarchical correlation clustering: each sibling pair pays for positive
/// edges crossing the cut plus |negative| edges inside either side.
pub struct HccModel {
    graph: Arc<SimilarityGraph>,
    heuristic: GraphHeuristic,
    cache: AggregateCache,
}

impl HccModel {
    pub fn new(graph: Arc<SimilarityGraph>, heuristic: GraphHeuristic) -> Self {
        HccModel {
            graph,
            heuristic,
            cache: AggregateCache::default(),
        }
    }

    pub fn graph(&self) -> &SimilarityGraph {
        &self.graph
    }
}

/// `Σ w⁺` over crossing pairs plus `Σ |w⁻|` within each side.
pub fn hcc_psi(left: &Cluster, right: &Cluster, g: &SimilarityGraph) -> f64 {
    let (pos, _, _) = g.cross_sums(left, right);
    pos + ClusterAggregates::compute(left, g).neg_within
        + ClusterAggregates::compute(right, g).neg_within
}

/// Sum of positive weights inside the cluster.
pub fn hcc_heuristic(c: &Cluster, g: &SimilarityGraph) -> f64 {
    ClusterAggregates::compute(c, g).pos_within
}

impl CostModel for HccModel {
    fn element_count(&self) -> usize {
        self.graph.n()
    }

    fn psi(&self, left: &Cluster, right: &Cluster) -> f64 {
        let (pos, _, _) = self.graph.cross_sums(left, right);
        pos + self.cache.get(left, &self.graph).neg_within
            + self.cache.get(right, &self.graph).neg_within
    }

    fn heuristic(&self, cluster: &Cluster) -> f64 {
        match self.heuristic {
            GraphHeuristic::Zero => 0.0,
            GraphHeuristic::Native => self.cache.get(cluster, &self.graph).pos_within,
        }
    }
}

/// Dasgupta's cost restricted to binary trees: `(|L| + |R|) · Σ` crossing weight.
pub struct DasguptaModel {
    graph: Arc<SimilarityGraph>,
    heuristic: GraphHeuristic,
    cache: AggregateCache,
}

impl DasguptaModel {
    /// Fails when the graph has a negative weight.
    pub fn new(graph: Arc<SimilarityGraph>, heuristic: GraphHeuristic) -> Result<Self> {
        if let Some((i, j, w)) = graph.has_negative_weight() {
            return Err(Error::ObjectiveMismatch(format!(
                "Dasgupta's cost needs nonnegative weights; edge ({i}, {j}) has {w}"
            )));
        }
        Ok(DasguptaModel {
            graph,
            heuristic,
            cache: AggregateCache::default(),
        })
    }
}

pub fn dasgupta_psi(left: &Cluster, right: &Cluster, g: &SimilarityGraph) -> f64 {
    let (_, _, total) = g.cross_sums(left, right);
    (left.len() + right.len()) as f64 * total
}

/// Total weight inside the cluster: every inner edge is cut at least once
/// with a multiplier of at least one.
pub fn dasgupta_heuristic(c: &Cluster, g: &SimilarityGraph) -> f64 {
    ClusterAggregates::compute(c, g).total_within
}

impl CostModel for DasguptaModel {
    fn element_count(&self) -> usize {
        self.graph.n()
    }

    fn psi(&self, left: &Cluster, right: &Cluster) -> f64 {
        dasgupta_psi(left, right, &self.graph)
    }

    fn heuristic(&self, cluster: &Cluster) -> f64 {
        match self.heuristic {
            GraphHeuristic::Zero => 0.0,
            GraphHeuristic::Native => self.cache.get(cluster, &self.graph).total_within,
        }
    }
}
