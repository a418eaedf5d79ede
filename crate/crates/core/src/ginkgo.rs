//! Ginkgo toy jet-shower likelihood as a clustering cost.
//!
//! Every cluster is a particle whose four-vector is the sum of its member
//! leaves. A sibling pair pays the negative log-likelihood of both children
//! given the parent's squared mass `t_P`: internal children use the
//! truncated-exponential density, singleton children use its integral from
//! 0 to `t_cut`. Splits that the model cannot produce cost `+inf`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::cost::{sanitize, CostModel};
use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;

/// Exponents are floored here before exponentiation.
const EXP_FLOOR: f64 = -745.0;

fn exp_floored(x: f64) -> f64 {
    x.max(EXP_FLOOR).exp()
}

/// Energy-momentum four-vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector {
    pub e: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl FourVector {
    pub fn new(e: f64, px: f64, py: f64, pz: f64) -> Self {
        FourVector { e, px, py, pz }
    }

    /// Squared invariant mass `E² − |p|²`.
    pub fn t(&self) -> f64 {
        self.e * self.e - (self.px * self.px + self.py * self.py + self.pz * self.pz)
    }

    fn p2(&self) -> f64 {
        self.px * self.px + self.py * self.py + self.pz * self.pz
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;

    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.e + o.e, self.px + o.px, self.py + o.py, self.pz + o.pz)
    }
}

impl From<[f64; 4]> for FourVector {
    fn from(v: [f64; 4]) -> Self {
        FourVector::new(v[0], v[1], v[2], v[3])
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> Self {
        [v.e, v.px, v.py, v.pz]
    }
}

/// One jet: observed leaves plus the model constants.
#[derive(Clone, Debug, PartialEq)]
pub struct JetEvent {
    pub leaves: Vec<FourVector>,
    pub lambda: f64,
    pub t_cut: f64,
    /// Generating hierarchy, when known.
    pub truth: Option<Hierarchy>,
}

#[derive(Serialize, Deserialize)]
struct JetFile {
    lambda: f64,
    t_cut: f64,
    leaves: Vec<FourVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truth_tree: Option<serde_json::Value>,
}

impl JetEvent {
    pub fn new(leaves: Vec<FourVector>, lambda: f64, t_cut: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        if !(t_cut > 0.0 && t_cut.is_finite()) {
            return Err(Error::Domain(format!("t_cut must be positive, got {t_cut}")));
        }
        if leaves.is_empty() {
            return Err(Error::Domain("a jet needs at least one leaf".into()));
        }
        if leaves
            .iter()
            .any(|v| !(v.e.is_finite() && v.px.is_finite() && v.py.is_finite() && v.pz.is_finite()))
        {
            return Err(Error::Domain("leaf four-vectors must be finite".into()));
        }
        Ok(JetEvent {
            leaves,
            lambda,
            t_cut,
            truth: None,
        })
    }

    pub fn n(&self) -> usize {
        self.leaves.len()
    }

    /// Sum of the member leaves' four-vectors.
    pub fn momentum(&self, c: &Cluster) -> FourVector {
        c.iter().fold(FourVector::default(), |acc, i| acc + self.leaves[i])
    }

    pub fn to_json(&self) -> String {
        let file = JetFile {
            lambda: self.lambda,
            t_cut: self.t_cut,
            leaves: self.leaves.clone(),
            truth_tree: self.truth.as_ref().map(Hierarchy::to_nested_array),
        };
        serde_json::to_string_pretty(&file).expect("jet serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: JetFile =
            serde_json::from_str(text).map_err(|e| Error::parse("jet file", e.to_string()))?;
        let mut jet = JetEvent::new(file.leaves, file.lambda, file.t_cut)
            .map_err(|e| Error::parse("jet file", e.to_string()))?;
        if let Some(tree) = file.truth_tree {
            let h = Hierarchy::from_nested_array(&tree)?;
            if h.n() != jet.n() {
                return Err(Error::parse("jet file", "truth_tree does not cover every leaf"));
            }
            jet.truth = Some(h);
        }
        Ok(jet)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        JetEvent::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(&path, self.to_json()).map_err(|e| Error::io(&path, e))
    }

    /// Negative log of the normalization `1 / (1 − e^{−λ})`'s reciprocal.
    fn log_norm(&self) -> f64 {
        -(-(-self.lambda).exp_m1()).ln()
    }

    /// Log density of an internal child with squared mass `t` under parent `t_p`.
    pub fn log_internal(&self, t: f64, t_p: f64) -> f64 {
        self.log_norm() + self.lambda.ln() - t_p.ln() - self.lambda * t / t_p
    }

    /// Log probability that a child under parent `t_p` falls below `t_cut`.
    pub fn log_leaf(&self, t_p: f64) -> f64 {
        self.log_norm() + (1.0 - exp_floored(-self.lambda * self.t_cut / t_p)).ln()
    }
}

/// Negative log-likelihood of splitting `left ∪ right` into the two children.
pub fn split_nll(left: &Cluster, right: &Cluster, e: &JetEvent) -> f64 {
    let pl = e.momentum(left);
    let pr = e.momentum(right);
    let t_p = (pl + pr).t();
    if !(t_p > e.t_cut) {
        return f64::INFINITY;
    }
    let child = |c: &Cluster, p: &FourVector| -> f64 {
        if c.is_singleton() {
            -e.log_leaf(t_p)
        } else {
            let t = p.t();
            if !(t > e.t_cut) || t >= t_p {
                f64::INFINITY
            } else {
                -e.log_internal(t, t_p)
            }
        }
    };
    sanitize(child(left, &pl) + child(right, &pr))
}

/// Level-by-level lower bound on the squared masses of the `n − 2`
/// non-root internal nodes of any binary tree over `n` elements.
///
/// `t_min` must be sorted ascending and have length `n`.
pub fn lower_bound_t(t_min: &[f64], t_p0: f64, t_tilde: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!("lower bound needs n >= 2, got {n}")));
    }
    if t_min.len() < n / 2 {
        return Err(Error::Domain("t_min is shorter than n / 2".into()));
    }
    let target = n - 2;
    let mut bound: Vec<f64> = t_min[..n / 2].to_vec();
    bound.truncate(target);
    let mut i = 3usize;
    let mut j = n % 2 + n / 2;
    while bound.len() < target {
        let v = t_tilde * (i % 2) as f64 + t_p0 * (i / 2) as f64;
        if j / 2 == 0 {
            // only the root remains above this level; cannot happen for
            // consistent inputs, but never loop forever
            bound.resize(target, v);
            break;
        }
        for _ in 0..j / 2 {
            if bound.len() == target {
                break;
            }
            bound.push(v);
        }
        j = j % 2 + j / 2;
        i += 1;
    }
    Ok(bound)
}

/// Per-cluster quantities feeding the Ginkgo heuristics.
#[derive(Clone, Debug, PartialEq)]
pub struct GinkgoHeuristicTables {
    pub t_root: f64,
    /// Per element: smallest pair squared mass above `t_cut`, else `t_cut`. Ascending.
    pub t_min: Vec<f64>,
    /// Smallest `t_min` entry above `t_cut`, else `t_cut`.
    pub t_p0: f64,
    /// Smallest leaf squared mass, floored at 0.
    pub t_tilde: f64,
    /// Largest leaf squared mass.
    pub t_max_leaf: f64,
    pub leaf_t: Vec<f64>,
    pub t_bound: Vec<f64>,
}

impl GinkgoHeuristicTables {
    /// Requires `|c| >= 2`.
    pub fn compute(c: &Cluster, e: &JetEvent) -> Self {
        let members = c.to_vec();
        let n = members.len();
        assert!(n >= 2, "heuristic tables need at least two elements");
        let leaf_t: Vec<f64> = members.iter().map(|&i| e.leaves[i].t()).collect();
        let mut t_min = Vec::with_capacity(n);
        for &i in &members {
            let mut best = f64::INFINITY;
            for &j in &members {
                if i != j {
                    let t = (e.leaves[i] + e.leaves[j]).t();
                    if t > e.t_cut && t < best {
                        best = t;
                    }
                }
            }
            t_min.push(if best.is_finite() { best } else { e.t_cut });
        }
        t_min.sort_by(f64::total_cmp);
        let t_p0 = t_min
            .iter()
            .copied()
            .find(|&t| t > e.t_cut)
            .unwrap_or(e.t_cut);
        let t_tilde = leaf_t.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        let t_max_leaf = leaf_t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let t_bound =
            lower_bound_t(&t_min, t_p0, t_tilde, n).expect("n >= 2 and t_min has n entries");
        GinkgoHeuristicTables {
            t_root: e.momentum(c).t(),
            t_min,
            t_p0,
            t_tilde,
            t_max_leaf,
            leaf_t,
            t_bound,
        }
    }
}

/// Which bound to use for the parent mass in the density's prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GinkgoHeuristic {
    Zero,
    /// Admissible bound: `t_bound + t̃`.
    H0,
    /// Tighter, unproven bound: `t_bound + 2 t_p0`.
    H1,
}

fn ginkgo_bound(c: &Cluster, e: &JetEvent, which: GinkgoHeuristic) -> f64 {
    if c.len() < 2 || which == GinkgoHeuristic::Zero {
        return 0.0;
    }
    let tables = GinkgoHeuristicTables::compute(c, e);
    if !(tables.t_root > e.t_cut) {
        // no split of this cluster has finite cost
        return f64::INFINITY;
    }
    let log_norm = e.log_norm();
    let internal: f64 = tables
        .t_bound
        .iter()
        .map(|&tb| {
            let t_parent = match which {
                GinkgoHeuristic::H0 if tb < tables.t_max_leaf => tb,
                GinkgoHeuristic::H0 => tb + tables.t_tilde,
                _ => tb + 2.0 * tables.t_p0,
            };
            log_norm + e.lambda.ln() - t_parent.ln() - e.lambda * tb / tables.t_root
        })
        .sum();
    let sqrt_p0 = tables.t_p0.sqrt();
    let heaviest = tables
        .leaf_t
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let leaves: f64 = tables
        .leaf_t
        .iter()
        .enumerate()
        .map(|(k, &ti)| {
            let t_parent = if k == heaviest {
                tables.t_p0
            } else {
                (sqrt_p0 - ti.max(0.0).sqrt()).powi(2)
            };
            e.log_leaf(t_parent)
        })
        .sum();
    sanitize(-(internal + leaves))
}

/// Admissible lower bound on the NLL of any hierarchy over `c`.
pub fn ginkgo_h0(c: &Cluster, e: &JetEvent) -> f64 {
    ginkgo_bound(c, e, GinkgoHeuristic::H0)
}

/// Tighter approximate bound; not proven admissible.
pub fn ginkgo_h1(c: &Cluster, e: &JetEvent) -> f64 {
    ginkgo_bound(c, e, GinkgoHeuristic::H1)
}

/// Ginkgo cost model with a memoized heuristic.
pub struct GinkgoModel {
    event: Arc<JetEvent>,
    heuristic: GinkgoHeuristic,
    memo: RefCell<HashMap<Cluster, f64>>,
}

impl GinkgoModel {
    pub fn new(event: Arc<JetEvent>, heuristic: GinkgoHeuristic) -> Self {
        GinkgoModel {
            event,
            heuristic,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn event(&self) -> &JetEvent {
        &self.event
    }
}

impl CostModel for GinkgoModel {
    fn element_count(&self) -> usize {
        self.event.n()
    }

    fn psi(&self, left: &Cluster, right: &Cluster) -> f64 {
        split_nll(left, right, &self.event)
    }

    fn heuristic(&self, cluster: &Cluster) -> f64 {
        if cluster.len() < 2 || self.heuristic == GinkgoHeuristic::Zero {
            return 0.0;
        }
        if let Some(v) = self.memo.borrow().get(cluster) {
            return *v;
        }
        let v = ginkgo_bound(cluster, &self.event, self.heuristic);
        self.memo.borrow_mut().insert(cluster.clone(), v);
        v
    }
}

/// Parameters of the toy shower generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub lambda: f64,
    pub t_root: f64,
    pub t_cut: f64,
    pub max_leaves: usize,
}

impl GeneratorParams {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.t_cut > 0.0 && self.t_cut < self.t_root && self.t_root.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < t_cut < t_root, got t_cut={} t_root={}",
                self.t_cut, self.t_root
            )));
        }
        if self.max_leaves < 2 {
            return Err(Error::Domain("max_leaves must be at least 2".into()));
        }
        Ok(())
    }
}

const MAX_EVENT_ATTEMPTS: usize = 10_000;

/// Samples a jet whose leaf count is at most `max_leaves`.
///
/// Each internal particle draws both child squared masses from the
/// truncated exponential on `(0, t_P)` (rejecting draws with
/// `√t_L + √t_R ≥ √t_P`), decays isotropically in its rest frame, and a
/// branch stops once its squared mass falls below `t_cut`. Events that
/// exceed `max_leaves` are redrawn.
pub fn generate_jet(params: GeneratorParams, seed: u64) -> Result<JetEvent> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_EVENT_ATTEMPTS {
        if let Some(jet) = sample_event(&params, &mut rng)? {
            return Ok(jet);
        }
    }
    Err(Error::Domain(format!(
        "no event with at most {} leaves in {MAX_EVENT_ATTEMPTS} attempts",
        params.max_leaves
    )))
}

/// Samples until an event has exactly `leaves` leaves.
pub fn generate_jet_with_leaves(
    lambda: f64,
    t_root: f64,
    t_cut: f64,
    leaves: usize,
    seed: u64,
) -> Result<JetEvent> {
    let params = GeneratorParams {
        lambda,
        t_root,
        t_cut,
        max_leaves: leaves.max(2),
    };
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_EVENT_ATTEMPTS * 10 {
        if let Some(jet) = sample_event(&params, &mut rng)? {
            if jet.n() == leaves {
                return Ok(jet);
            }
        }
    }
    Err(Error::Domain(format!(
        "no event with exactly {leaves} leaves; adjust t_root / t_cut"
    )))
}

fn sample_child_t(t_p: f64, lambda: f64, rng: &mut ChaCha8Rng) -> f64 {
    // inverse CDF of λ/t_P · e^{−λ t / t_P} truncated to (0, t_P)
    let u: f64 = rng.gen();
    let mass = -(-lambda).exp_m1();
    -(t_p / lambda) * (-u * mass).ln_1p()
}

fn sample_masses(t_p: f64, lambda: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let m = t_p.sqrt();
    for _ in 0..1000 {
        let tl = sample_child_t(t_p, lambda, rng);
        let tr = sample_child_t(t_p, lambda, rng);
        if tl.sqrt() + tr.sqrt() < m {
            return (tl, tr);
        }
    }
    let tl = sample_child_t(t_p, lambda, rng);
    let tr = sample_child_t((m - tl.sqrt()).powi(2), lambda, rng);
    (tl, tr)
}

/// Two-body decay of `parent` (mass² `t_p`) into masses² `tl`, `tr`.
fn decay(parent: FourVector, t_p: f64, tl: f64, tr: f64, rng: &mut ChaCha8Rng) -> (FourVector, FourVector) {
    let m = t_p.sqrt();
    let (m1, m2) = (tl.sqrt(), tr.sqrt());
    let e1 = (t_p + tl - tr) / (2.0 * m);
    let e2 = m - e1;
    let k = ((t_p - (m1 + m2).powi(2)) * (t_p - (m1 - m2).powi(2))).max(0.0).sqrt() / (2.0 * m);
    let cos_theta: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let phi: f64 = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let dir = [sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta];
    let a = FourVector::new(e1, k * dir[0], k * dir[1], k * dir[2]);
    let b = FourVector::new(e2, -k * dir[0], -k * dir[1], -k * dir[2]);
    (boost(a, parent, m), boost(b, parent, m))
}

/// Boosts a rest-frame vector into the frame where the parent has momentum `parent`.
fn boost(v: FourVector, parent: FourVector, parent_mass: f64) -> FourVector {
    let p2 = parent.p2();
    if p2 == 0.0 {
        return v;
    }
    let beta = [parent.px / parent.e, parent.py / parent.e, parent.pz / parent.e];
    let gamma = parent.e / parent_mass;
    let beta2 = p2 / (parent.e * parent.e);
    let bp = beta[0] * v.px + beta[1] * v.py + beta[2] * v.pz;
    let coef = (gamma - 1.0) * bp / beta2 + gamma * v.e;
    FourVector::new(
        gamma * (v.e + bp),
        v.px + coef * beta[0],
        v.py + coef * beta[1],
        v.pz + coef * beta[2],
    )
}

fn sample_event(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<Option<JetEvent>> {
    enum Node {
        Leaf(FourVector),
        Split(Box<Node>, Box<Node>),
    }

    fn grow(
        p: FourVector,
        t: f64,
        params: &GeneratorParams,
        rng: &mut ChaCha8Rng,
        leaves: &mut usize,
    ) -> Option<Node> {
        if t < params.t_cut {
            *leaves += 1;
            return (*leaves <= params.max_leaves).then_some(Node::Leaf(p));
        }
        let (tl, tr) = sample_masses(t, params.lambda, rng);
        let (pl, pr) = decay(p, t, tl, tr, rng);
        let l = grow(pl, tl, params, rng, leaves)?;
        let r = grow(pr, tr, params, rng, leaves)?;
        Some(Node::Split(Box::new(l), Box::new(r)))
    }

    fn flatten(
        node: &Node,
        leaves: &mut Vec<FourVector>,
        splits: &mut Vec<(Cluster, Cluster)>,
    ) -> Cluster {
        match node {
            Node::Leaf(p) => {
                leaves.push(*p);
                Cluster::singleton(leaves.len() - 1)
            }
            Node::Split(l, r) => {
                let lc = flatten(l, leaves, splits);
                let rc = flatten(r, leaves, splits);
                let parent = lc.union(&rc);
                splits.push((lc, rc));
                parent
            }
        }
    }

    let root = FourVector::new(params.t_root.sqrt(), 0.0, 0.0, 0.0);
    let mut count = 0;
    let Some(tree) = grow(root, params.t_root, params, rng, &mut count) else {
        return Ok(None);
    };
    let mut leaves = Vec::new();
    let mut splits = Vec::new();
    flatten(&tree, &mut leaves, &mut splits);
    let n = leaves.len();
    let mut jet = JetEvent::new(leaves, params.lambda, params.t_cut)?;
    jet.truth = Some(Hierarchy::from_splits(n, splits)?);
    Ok(Some(jet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::tree_cost;

    fn c(ix: &[usize]) -> Cluster {
        ix.iter().copied().collect()
    }

    fn params() -> GeneratorParams {
        GeneratorParams {
            lambda: 1.5,
            t_root: 100.0,
            t_cut: 4.0,
            max_leaves: 12,
        }
    }

    #[test]
    fn lower_bound_boundaries() {
        assert!(lower_bound_t(&[1.0], 1.0, 0.1, 1).is_err());
        assert_eq!(lower_bound_t(&[5.0, 6.0], 5.0, 0.1, 2).unwrap(), Vec::<f64>::new());
        assert_eq!(lower_bound_t(&[5.0, 6.0, 7.0], 5.0, 0.1, 3).unwrap(), vec![5.0]);
        assert_eq!(
            lower_bound_t(&[5.0, 6.0, 7.0, 8.0], 5.0, 0.1, 4).unwrap(),
            vec![5.0, 6.0]
        );
        // n = 5: two seeds, then one node bounded by t̃ + t_p0
        assert_eq!(
            lower_bound_t(&[5.0, 6.0, 7.0, 8.0, 9.0], 5.0, 0.5, 5).unwrap(),
            vec![5.0, 6.0, 5.5]
        );
        // n = 9: four seeds, two at i = 3, one at i = 4 (2·t_p0)
        let tm: Vec<f64> = (0..9).map(|k| 5.0 + k as f64).collect();
        assert_eq!(
            lower_bound_t(&tm, 5.0, 0.5, 9).unwrap(),
            vec![5.0, 6.0, 7.0, 8.0, 5.5, 5.5, 10.0]
        );
        for n in 2..60 {
            let tm: Vec<f64> = (0..n).map(|k| 5.0 + k as f64).collect();
            assert_eq!(lower_bound_t(&tm, 5.0, 0.5, n).unwrap().len(), n - 2);
        }
    }

    #[test]
    fn jet_file_round_trip() {
        let jet = generate_jet(params(), 7).unwrap();
        let back = JetEvent::from_json(&jet.to_json()).unwrap();
        assert_eq!(back, jet);
        assert!(JetEvent::from_json("{\"lambda\": 1.0}").is_err());
        assert!(JetEvent::from_json("{\"lambda\": -1.0, \"t_cut\": 1.0, \"leaves\": [[1,0,0,0]]}").is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_jet(params(), 7).unwrap().to_json();
        let b = generate_jet(params(), 7).unwrap().to_json();
        assert_eq!(a, b);
        assert!(generate_jet(GeneratorParams { t_cut: 200.0, ..params() }, 1).is_err());
        assert!(generate_jet(GeneratorParams { lambda: 0.0, ..params() }, 1).is_err());
    }

    #[test]
    fn generated_jets_conserve_momentum_and_respect_cut() {
        for seed in 0..50 {
            let jet = generate_jet(params(), seed).unwrap();
            assert!(jet.n() <= 12);
            for leaf in &jet.leaves {
                assert!(leaf.t() < jet.t_cut);
            }
            let total = jet.momentum(&Cluster::full(jet.n()));
            assert!((total.t() - 100.0).abs() < 1e-6, "seed {seed}: {}", total.t());
            let truth = jet.truth.clone().unwrap();
            let model = GinkgoModel::new(Arc::new(jet), GinkgoHeuristic::H0);
            assert!(tree_cost(&truth, &model).is_finite());
        }
    }

    #[test]
    fn exact_leaf_count() {
        let jet = generate_jet_with_leaves(1.5, 40.0, 4.0, 5, 3).unwrap();
        assert_eq!(jet.n(), 5);
    }

    #[test]
    fn split_support_violations_are_infinite() {
        let jet = JetEvent::new(
            vec![
                FourVector::new(3.0, 0.0, 0.0, 0.0),
                FourVector::new(3.0, 0.0, 0.0, 2.0),
                FourVector::new(1.0, 0.0, 0.0, 0.0),
            ],
            1.5,
            1.0,
        )
        .unwrap();
        // t({0,1}) = 32, t({0,1,2}) = 45
        assert!(split_nll(&c(&[0]), &c(&[1]), &jet).is_finite());
        assert!(split_nll(&c(&[0, 1]), &c(&[2]), &jet).is_finite());
        // internal child {0,1} below a raised t_cut
        assert_eq!(split_nll(&c(&[0, 1]), &c(&[2]), &JetEvent { t_cut: 40.0, ..jet.clone() }), f64::INFINITY);
        // parent below cut
        let soft = JetEvent::new(
            vec![FourVector::new(0.5, 0.0, 0.0, 0.0), FourVector::new(0.4, 0.0, 0.0, 0.0)],
            1.5,
            1.0,
        )
        .unwrap();
        assert_eq!(split_nll(&c(&[0]), &c(&[1]), &soft), f64::INFINITY);
    }

    #[test]
    fn h1_dominates_h0_on_generated_jets() {
        for seed in 0..30 {
            let jet = generate_jet(params(), seed).unwrap();
            let n = jet.n();
            for bits in 1u32..(1 << n.min(10)) {
                let cl = Cluster::from_bits(bits as u128);
                let h0 = ginkgo_h0(&cl, &jet);
                let h1 = ginkgo_h1(&cl, &jet);
                assert!(h1 >= h0 - 1e-12, "seed {seed} cluster {cl:?}: h1 {h1} < h0 {h0}");
            }
            assert_eq!(ginkgo_h0(&c(&[0]), &jet), 0.0);
            assert_eq!(ginkgo_h1(&c(&[0]), &jet), 0.0);
        }
    }
}
