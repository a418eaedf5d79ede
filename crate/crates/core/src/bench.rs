//! Benchmark harness: runs algorithms over a manifest of instances and
//! reports one CSV row per (instance, repetition, algorithm) plus per
//! (n, algorithm) means and standard errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{beam_search, brute_force_map, default_beam_width, greedy, log10_hierarchy_count};
use crate::construct::{approximate_search, ApproxConfig, ExtenderConfig, SamplerMode};
use crate::cost::{CostKind, CostModel, HeuristicKind};
use crate::error::{Error, Result};
use crate::instance::{GraphFormat, Instance};
use crate::rng::derive_seed;
use crate::search::astar_search;
use crate::trellis::Trellis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Beam,
    ApproxAstar,
    ExactAstar,
    Oracle,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Beam => "beam",
            Algorithm::ApproxAstar => "approx-astar",
            Algorithm::ExactAstar => "exact-astar",
            Algorithm::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestInstance {
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub name: Option<String>,
    pub cost: CostKind,
    #[serde(default)]
    pub heuristic: Option<HeuristicKind>,
    /// Read a graph instance as a points CSV.
    #[serde(default)]
    pub points: bool,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub instances: Vec<ManifestInstance>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub beam_width: Option<usize>,
    #[serde(default = "one")]
    pub rounds: usize,
    #[serde(default)]
    pub pool: Option<usize>,
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub sampler: Option<SamplerMode>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| Error::parse("manifest", e.to_string()))?;
        if m.repetitions == 0 {
            return Err(Error::parse("manifest", "repetitions must be at least 1"));
        }
        if m.algorithms.is_empty() {
            return Err(Error::parse("manifest", "no algorithms listed"));
        }
        Ok(m)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Manifest::parse(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    fn approx_config(&self, seed: u64) -> ApproxConfig {
        let defaults = ExtenderConfig::default();
        ApproxConfig {
            beam_width: self.beam_width,
            extender: ExtenderConfig {
                mode: self.sampler.unwrap_or(defaults.mode),
                k: self.top_k.unwrap_or(defaults.k),
                pool: self.pool.unwrap_or(defaults.pool),
            },
            rounds: self.rounds,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: Option<usize>,
    pub algorithm: Algorithm,
    pub cost: Option<f64>,
    pub cost_minus_greedy: Option<f64>,
    pub nodes_explored: Option<u64>,
    pub log10_trees_explored_minus_n_log10_3: Option<f64>,
    pub wall_ms: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub n: usize,
    pub algorithm: Algorithm,
    pub count: usize,
    pub mean_cost_minus_greedy: f64,
    pub stderr_cost_minus_greedy: f64,
    pub mean_log10_trees_explored_minus_n_log10_3: f64,
    pub stderr_log10_trees_explored_minus_n_log10_3: f64,
    pub mean_wall_ms: f64,
    pub stderr_wall_ms: f64,
}

struct Outcome {
    cost: f64,
    nodes_explored: Option<u64>,
    log10_trees: f64,
}

fn run_algorithm(
    algorithm: Algorithm,
    model: &dyn CostModel,
    manifest: &Manifest,
    seed: u64,
) -> Result<Outcome> {
    let n = model.element_count();
    Ok(match algorithm {
        Algorithm::Greedy => {
            let g = greedy(model)?;
            Outcome {
                cost: g.cost,
                nodes_explored: Some(n.saturating_sub(1) as u64),
                log10_trees: 0.0,
            }
        }
        Algorithm::Beam => {
            let b = beam_search(model, manifest.beam_width.unwrap_or_else(|| default_beam_width(n)))?;
            Outcome {
                cost: b.best.cost,
                nodes_explored: Some(b.states_expanded),
                log10_trees: (b.trees.len() as f64).log10(),
            }
        }
        Algorithm::ApproxAstar => {
            let r = approximate_search(model, manifest.approx_config(seed))?.result;
            Outcome {
                cost: r.cost,
                nodes_explored: Some(r.stats.nodes_explored),
                log10_trees: r.stats.trees_in_trellis_log10,
            }
        }
        Algorithm::ExactAstar => {
            let mut trellis = Trellis::full(n)?;
            let r = astar_search(&mut trellis, model, None)?;
            Outcome {
                cost: r.cost,
                nodes_explored: Some(r.stats.nodes_explored),
                log10_trees: r.stats.trees_in_trellis_log10,
            }
        }
        Algorithm::Oracle => {
            let o = brute_force_map(model)?;
            Outcome {
                cost: o.cost,
                nodes_explored: None,
                log10_trees: log10_hierarchy_count(n),
            }
        }
    })
}

fn instance_name(inst: &ManifestInstance) -> String {
    inst.name.clone().unwrap_or_else(|| inst.path.display().to_string())
}

fn run_job(inst: &ManifestInstance, base: &Path, manifest: &Manifest, seed: u64) -> Vec<BenchRow> {
    let name = instance_name(inst);
    let error_rows = |msg: String, n: Option<usize>| -> Vec<BenchRow> {
        manifest
            .algorithms
            .iter()
            .map(|&algorithm| BenchRow {
                instance: name.clone(),
                n,
                algorithm,
                cost: None,
                cost_minus_greedy: None,
                nodes_explored: None,
                log10_trees_explored_minus_n_log10_3: None,
                wall_ms: None,
                seed,
                error: Some(msg.clone()),
            })
            .collect()
    };
    let format = if inst.points { GraphFormat::Points } else { GraphFormat::Edges };
    let instance = match Instance::load(base.join(&inst.path), inst.cost, format) {
        Ok(i) => i,
        Err(e) => return error_rows(e.to_string(), None),
    };
    let n = instance.n();
    let model = match instance.model(inst.cost, inst.heuristic) {
        Ok(m) => m,
        Err(e) => return error_rows(e.to_string(), Some(n)),
    };
    let greedy_cost = greedy(model.as_ref()).map(|g| g.cost).ok();
    let n_log10_3 = n as f64 * 3f64.log10();
    manifest
        .algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            let outcome = run_algorithm(algorithm, model.as_ref(), manifest, seed);
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok(o) => BenchRow {
                    instance: name.clone(),
                    n: Some(n),
                    algorithm,
                    cost: Some(o.cost),
                    cost_minus_greedy: greedy_cost.map(|g| {
                        if algorithm == Algorithm::Greedy {
                            0.0
                        } else {
                            o.cost - g
                        }
                    }),
                    nodes_explored: o.nodes_explored,
                    log10_trees_explored_minus_n_log10_3: Some(o.log10_trees - n_log10_3),
                    wall_ms: Some(wall_ms),
                    seed,
                    error: None,
                },
                Err(e) => BenchRow {
                    instance: name.clone(),
                    n: Some(n),
                    algorithm,
                    cost: None,
                    cost_minus_greedy: None,
                    nodes_explored: None,
                    log10_trees_explored_minus_n_log10_3: None,
                    wall_ms: Some(wall_ms),
                    seed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Runs every (instance, repetition) job on at most `workers` threads. Rows
/// come back in manifest order regardless of scheduling. Failures become
/// rows with the `error` column set.
pub fn run_bench(manifest: &Manifest, base_dir: &Path, workers: usize) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(usize, usize)> = (0..manifest.instances.len())
        .flat_map(|i| (0..manifest.repetitions).map(move |r| (i, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<BenchRow>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, r)| {
                let seed = derive_seed(manifest.seed, "repetition", r as u64);
                run_job(&manifest.instances[i], base_dir, manifest, seed)
            })
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Mean and standard error per (n, algorithm) over the rows without errors.
pub fn aggregate(rows: &[BenchRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(usize, Algorithm), Vec<&BenchRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.error.is_none()) {
        if let Some(n) = row.n {
            groups.entry((n, row.algorithm)).or_default().push(row);
        }
    }
    groups
        .into_iter()
        .map(|((n, algorithm), rows)| {
            let pick = |f: fn(&BenchRow) -> Option<f64>| -> Vec<f64> { rows.iter().filter_map(|r| f(r)).collect() };
            let (mc, sc) = mean_stderr(&pick(|r| r.cost_minus_greedy));
            let (mt, st) = mean_stderr(&pick(|r| r.log10_trees_explored_minus_n_log10_3));
            let (mw, sw) = mean_stderr(&pick(|r| r.wall_ms));
            AggregateRow {
                n,
                algorithm,
                count: rows.len(),
                mean_cost_minus_greedy: mc,
                stderr_cost_minus_greedy: sc,
                mean_log10_trees_explored_minus_n_log10_3: mt,
                stderr_log10_trees_explored_minus_n_log10_3: st,
                mean_wall_ms: mw,
                stderr_wall_ms: sw,
            }
        })
        .collect()
}

/// Data rows as CSV, a blank line, then the aggregate block as CSV.
pub fn write_report<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Domain(format!("cannot write report: {e}"));
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("cannot write report: {e}")))?;
    let mut out = w.into_inner().map_err(|e| Error::Domain(format!("cannot write report: {e}")))?;
    writeln!(out).map_err(|e| Error::Domain(format!("cannot write report: {e}")))?;
    let mut w = csv::Writer::from_writer(out);
    for row in aggregate(rows) {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("cannot write report: {e}")))?;
    Ok(())
}
