//! Sparse-trellis construction: seeding from known trees, extending nodes
//! with sampled splits while searching, and the multi-round driver.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{beam_search, default_beam_width};
use crate::cluster::{Cluster, TwoPartitions};
use crate::cost::{sanitize, CostModel};
use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::rng::derive_seed;
use crate::search::{astar_search, SearchResult};
use crate::trellis::Trellis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMode {
    /// Keep the `k` candidates with the smallest sibling cost.
    BestK,
    /// Draw `k` candidates without replacement, weighted by `exp(−ψ)`.
    Importance,
}

impl std::str::FromStr for SamplerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "best-k" | "best_k" => Ok(SamplerMode::BestK),
            "importance" => Ok(SamplerMode::Importance),
            other => Err(format!("unknown sampler '{other}' (expected best-k or importance)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExtenderConfig {
    pub mode: SamplerMode,
    /// Splits kept per explored node.
    pub k: usize,
    /// Candidate splits drawn per explored node before selection.
    pub pool: usize,
}

impl Default for ExtenderConfig {
    fn default() -> Self {
        ExtenderConfig {
            mode: SamplerMode::BestK,
            k: 5,
            pool: 1000,
        }
    }
}

impl ExtenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.pool {
            return Err(Error::Domain(format!(
                "extender needs 1 <= k <= pool, got k={} pool={}",
                self.k, self.pool
            )));
        }
        Ok(())
    }
}

/// Samples extra child splits for nodes of a sparse trellis at exploration time.
#[derive(Clone, Debug)]
pub struct Extender {
    config: ExtenderConfig,
    rng: ChaCha8Rng,
}

impl Extender {
    pub fn new(config: ExtenderConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Extender {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn config(&self) -> &ExtenderConfig {
        &self.config
    }

    /// Draws candidate splits of `c` uniformly (all of them when there are
    /// at most `pool`), then keeps `k` by the configured rule.
    pub fn sample_splits(&mut self, c: &Cluster, model: &dyn CostModel) -> Vec<(Cluster, Cluster)> {
        if c.len() < 2 {
            return Vec::new();
        }
        let candidates = self.candidate_pool(c);
        let scored: Vec<(f64, (Cluster, Cluster))> = candidates
            .into_iter()
            .map(|(l, r)| (sanitize(model.psi(&l, &r)), (l, r)))
            .collect();
        match self.config.mode {
            SamplerMode::BestK => best_k(scored, self.config.k),
            SamplerMode::Importance => self.importance(scored),
        }
    }

    fn candidate_pool(&mut self, c: &Cluster) -> Vec<(Cluster, Cluster)> {
        let total = if c.len() > 128 {
            u128::MAX
        } else {
            TwoPartitions::count(c.len())
        };
        if total <= self.config.pool as u128 {
            return TwoPartitions::new(c).collect();
        }
        let mut members = c.to_vec();
        members.pop();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(self.config.pool);
        while out.len() < self.config.pool {
            let mut left = Cluster::empty();
            for chunk in members.chunks(64) {
                let bits: u64 = self.rng.gen();
                for (k, &m) in chunk.iter().enumerate() {
                    if bits >> k & 1 == 1 {
                        left.insert(m);
                    }
                }
            }
            if left.is_empty() || !seen.insert(left.clone()) {
                continue;
            }
            let right = c.difference(&left);
            out.push((left, right));
        }
        out
    }

    fn importance(&mut self, scored: Vec<(f64, (Cluster, Cluster))>) -> Vec<(Cluster, Cluster)> {
        let k = self.config.k;
        let min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return best_k(scored, k);
        }
        let weighted: Vec<(f64, (Cluster, Cluster))> = scored
            .into_iter()
            .map(|(psi, pair)| ((-(psi - min)).exp(), pair))
            .filter(|(w, _)| *w > 0.0)
            .collect();
        if weighted.len() <= k {
            return weighted.into_iter().map(|(_, p)| p).collect();
        }
        weighted
            .choose_multiple_weighted(&mut self.rng, k, |item| item.0)
            .expect("weights are finite and positive")
            .map(|(_, p)| p.clone())
            .collect()
    }
}

fn best_k(mut scored: Vec<(f64, (Cluster, Cluster))>, k: usize) -> Vec<(Cluster, Cluster)> {
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1 .0.cmp(&b.1 .0)));
    scored.truncate(k);
    scored.into_iter().map(|(_, p)| p).collect()
}

/// A sparse trellis holding every cluster and parent-child split of the trees.
pub fn init_from_trees(trees: &[Hierarchy], n: usize) -> Result<Trellis> {
    if trees.is_empty() {
        return Err(Error::Domain("need at least one tree to seed the trellis".into()));
    }
    if let Some(bad) = trees.iter().find(|t| t.n() != n) {
        return Err(Error::Domain(format!(
            "tree over {} elements does not match dataset of {n}",
            bad.n()
        )));
    }
    let mut trellis = Trellis::sparse(n)?;
    for tree in trees {
        for (_, (l, r)) in tree.internal() {
            trellis.add_split(l.clone(), r.clone())?;
        }
    }
    Ok(trellis)
}

/// Runs A* for `rounds` rounds on a growing trellis. Each round starts from
/// the previous round's trellis with fresh queues and a fresh sampler seed.
pub fn iterative_search(
    trellis: &mut Trellis,
    model: &dyn CostModel,
    rounds: usize,
    config: ExtenderConfig,
    seed: u64,
) -> Result<Vec<SearchResult>> {
    if rounds == 0 {
        return Err(Error::Domain("need at least one round".into()));
    }
    let mut results = Vec::with_capacity(rounds);
    for round in 0..rounds {
        trellis.reset_queues();
        let mut ext = Extender::new(config, derive_seed(seed, "sampler", round as u64))?;
        results.push(astar_search(trellis, model, Some(&mut ext))?);
    }
    Ok(results)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ApproxConfig {
    /// Beam width used to seed the trellis; `None` picks the default rule.
    pub beam_width: Option<usize>,
    pub extender: ExtenderConfig,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            beam_width: None,
            extender: ExtenderConfig::default(),
            rounds: 1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproxOutcome {
    /// The last round's result, which is the cheapest when the heuristic is admissible.
    pub result: SearchResult,
    pub rounds: Vec<SearchResult>,
    /// Cost of the best beam-search tree used for seeding.
    pub beam_cost: f64,
}

/// Beam search seeds a sparse trellis, then iterative A* extends it.
pub fn approximate_search(model: &dyn CostModel, config: ApproxConfig) -> Result<ApproxOutcome> {
    let n = model.element_count();
    let width = config.beam_width.unwrap_or_else(|| default_beam_width(n));
    let beam = beam_search(model, width)?;
    let trees: Vec<Hierarchy> = beam.trees.iter().map(|(_, t)| t.clone()).collect();
    let mut trellis = init_from_trees(&trees, n)?;
    let rounds = iterative_search(&mut trellis, model, config.rounds, config.extender, config.seed)?;
    let result = rounds.last().cloned().expect("rounds >= 1");
    Ok(ApproxOutcome {
        result,
        rounds,
        beam_cost: beam.best.cost,
    })
}
