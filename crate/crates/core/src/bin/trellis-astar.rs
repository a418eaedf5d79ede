use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use trellis_astar::baselines::{beam_search_with, brute_force_map, default_beam_width, greedy};
use trellis_astar::bench::{run_bench, write_report, Manifest};
use trellis_astar::construct::{init_from_trees, iterative_search, ApproxConfig, ExtenderConfig, SamplerMode};
use trellis_astar::ginkgo::{generate_jet, generate_jet_with_leaves, GeneratorParams};
use trellis_astar::instance::{GraphFormat, Instance};
use trellis_astar::report::Report;
use trellis_astar::rng::derive_seed;
use trellis_astar::{astar_search, exhaustive_search, CostKind, CostModel, Error, HeuristicKind, Result, Trellis};

#[derive(Parser)]
#[command(name = "trellis-astar", version, about = "Exact and approximate minimum-cost hierarchical clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// A* search over a trellis.
    #[command(subcommand)]
    Cluster(ClusterMode),
    /// Agglomerative baselines.
    #[command(subcommand)]
    Baseline(BaselineKind),
    /// Brute-force optimum over every hierarchy (at most 10 elements).
    Oracle(Common),
    /// Synthetic data.
    #[command(subcommand)]
    Gen(GenKind),
    /// Run a benchmark manifest and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum ClusterMode {
    /// Optimal hierarchy via the full trellis.
    Exact(ExactArgs),
    /// Beam-seeded sparse trellis extended during search.
    Approx(ApproxArgs),
}

#[derive(Subcommand)]
enum BaselineKind {
    Greedy(Common),
    Beam(BeamArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// Toy jet shower with truncated-exponential mass splittings.
    Ginkgo(GinkgoArgs),
}

#[derive(Args, Serialize)]
struct Common {
    #[arg(long)]
    cost: CostKind,
    /// Defaults to the cost's own admissible heuristic (h1 for ginkgo).
    #[arg(long)]
    heuristic: Option<HeuristicKind>,
    /// Jet JSON for ginkgo; graph text (or points CSV with --points) otherwise.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: PathBuf,
    /// Result JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Treat --in as a headerless CSV of feature vectors.
    #[arg(long)]
    points: bool,
}

impl Common {
    fn model(&self) -> Result<(usize, Box<dyn CostModel>)> {
        let format = if self.points { GraphFormat::Points } else { GraphFormat::Edges };
        let instance = Instance::load(&self.input, self.cost, format)?;
        Ok((instance.n(), instance.model(self.cost, self.heuristic)?))
    }
}

#[derive(Args, Serialize)]
struct ExactArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Explore every node bottom-up instead of running A* best-first.
    #[arg(long)]
    exhaustive: bool,
    /// Skip the h0 comparison run reported when searching with h1.
    #[arg(long)]
    no_h1_diagnostic: bool,
    /// Write the final trellis as JSON keyed by hex cluster bits.
    #[arg(long)]
    trellis_snapshot: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ApproxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Candidate splits drawn per explored node.
    #[arg(long, default_value_t = 1000)]
    pool: usize,
    /// Splits kept per explored node.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    #[arg(long, default_value = "best-k")]
    sampler: SamplerMode,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Beam width for seeding; 1000 above 40 elements, n(n-1)/2 otherwise.
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    trellis_snapshot: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BeamArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(long)]
    width: Option<usize>,
    /// Keep candidates whose accumulated costs coincide.
    #[arg(long)]
    no_dedup: bool,
}

#[derive(Args, Serialize)]
struct GinkgoArgs {
    #[arg(long, default_value_t = 1.5)]
    lambda: f64,
    #[arg(long)]
    t_root: f64,
    #[arg(long)]
    t_cut: f64,
    /// Upper bound on leaves; larger events are redrawn.
    #[arg(long, default_value_t = 100)]
    max_leaves: usize,
    /// Redraw until the event has exactly this many leaves.
    #[arg(long)]
    leaves: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Overrides the manifest's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => write_stdout(text),
    }
}

fn write_stdout(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn write_snapshot(path: Option<&Path>, trellis: &Trellis) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(&trellis.snapshot()).expect("snapshot serializes");
        write_output(Some(path), &(text + "\n"))?;
    }
    Ok(())
}

fn config<T: Serialize>(command: &str, args: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    v["command"] = json!(command);
    v
}

fn cluster_exact(args: &ExactArgs) -> Result<()> {
    let (n, model) = args.common.model()?;
    let mut trellis = Trellis::full(n)?;
    let result = if args.exhaustive {
        exhaustive_search(&mut trellis, model.as_ref())?
    } else {
        astar_search(&mut trellis, model.as_ref(), None)?
    };
    let mut stats = serde_json::to_value(&result.stats).expect("stats serialize");
    stats["heap_entries"] = json!(trellis.heap_entry_count());
    stats["trellis_nodes_materialized"] = json!(trellis.materialized_nodes());
    let h = args.common.heuristic.unwrap_or(args.common.cost.default_heuristic());
    if h == HeuristicKind::H1 && !args.no_h1_diagnostic {
        // h1 is not known to be admissible; compare against the h0 result.
        let instance = Instance::load(&args.common.input, args.common.cost, GraphFormat::Edges)?;
        let h0 = instance.model(args.common.cost, Some(HeuristicKind::H0))?;
        let mut t0 = Trellis::full(n)?;
        let r0 = astar_search(&mut t0, h0.as_ref(), None)?;
        stats["h0_cost"] = json!(r0.cost);
        stats["h1_exceeds_h0"] = json!(result.cost > r0.cost + 1e-9 * r0.cost.abs().max(1.0));
    }
    write_snapshot(args.trellis_snapshot.as_deref(), &trellis)?;
    let report = Report::new(result.cost, &result.tree, stats, config("cluster exact", args));
    write_output(args.common.out.as_deref(), &(report.to_json() + "\n"))
}

fn cluster_approx(args: &ApproxArgs) -> Result<()> {
    let (n, model) = args.common.model()?;
    let cfg = ApproxConfig {
        beam_width: args.beam_width,
        extender: ExtenderConfig {
            mode: args.sampler,
            k: args.top_k,
            pool: args.pool,
        },
        rounds: args.rounds,
        seed: args.common.seed,
    };
    cfg.extender.validate()?;
    let width = cfg.beam_width.unwrap_or_else(|| default_beam_width(n));
    let beam = trellis_astar::baselines::beam_search(model.as_ref(), width)?;
    let trees: Vec<_> = beam.trees.iter().map(|(_, t)| t.clone()).collect();
    let mut trellis = init_from_trees(&trees, n)?;
    let rounds = iterative_search(&mut trellis, model.as_ref(), cfg.rounds, cfg.extender, cfg.seed)?;
    let result = rounds.last().expect("at least one round");
    let mut stats = serde_json::to_value(&result.stats).expect("stats serialize");
    stats["beam_cost"] = json!(beam.best.cost);
    stats["round_costs"] = json!(rounds.iter().map(|r| r.cost).collect::<Vec<_>>());
    stats["trellis_nodes_materialized"] = json!(trellis.materialized_nodes());
    write_snapshot(args.trellis_snapshot.as_deref(), &trellis)?;
    let report = Report::new(result.cost, &result.tree, stats, config("cluster approx", args));
    write_output(args.common.out.as_deref(), &(report.to_json() + "\n"))
}

fn baseline_greedy(args: &Common) -> Result<()> {
    let (_, model) = args.model()?;
    let start = std::time::Instant::now();
    let g = greedy(model.as_ref())?;
    let stats = json!({ "wall_ms": start.elapsed().as_secs_f64() * 1e3 });
    let report = Report::new(g.cost, &g.tree, stats, config("baseline greedy", args));
    write_output(args.out.as_deref(), &(report.to_json() + "\n"))
}

fn baseline_beam(args: &BeamArgs) -> Result<()> {
    let (n, model) = args.common.model()?;
    let width = args.width.unwrap_or_else(|| default_beam_width(n));
    let start = std::time::Instant::now();
    let b = beam_search_with(model.as_ref(), width, !args.no_dedup)?;
    let stats = json!({
        "wall_ms": start.elapsed().as_secs_f64() * 1e3,
        "width": width,
        "final_trees": b.trees.len(),
        "states_expanded": b.states_expanded,
    });
    let report = Report::new(b.best.cost, &b.best.tree, stats, config("baseline beam", args));
    write_output(args.common.out.as_deref(), &(report.to_json() + "\n"))
}

fn oracle(args: &Common) -> Result<()> {
    let (_, model) = args.model()?;
    let start = std::time::Instant::now();
    let o = brute_force_map(model.as_ref())?;
    let stats = json!({
        "wall_ms": start.elapsed().as_secs_f64() * 1e3,
        "tree_count": o.tree_count,
    });
    let report = Report::new(o.cost, &o.tree, stats, config("oracle", args));
    write_output(args.out.as_deref(), &(report.to_json() + "\n"))
}

fn gen_ginkgo(args: &GinkgoArgs) -> Result<()> {
    let seed = derive_seed(args.seed, "generator", 0);
    let jet = match args.leaves {
        Some(leaves) => generate_jet_with_leaves(args.lambda, args.t_root, args.t_cut, leaves, seed)?,
        None => generate_jet(
            GeneratorParams {
                lambda: args.lambda,
                t_root: args.t_root,
                t_cut: args.t_cut,
                max_leaves: args.max_leaves,
            },
            seed,
        )?,
    };
    write_output(args.out.as_deref(), &(jet.to_json() + "\n"))
}

fn bench(args: &BenchArgs) -> Result<()> {
    let mut manifest = Manifest::read(&args.manifest)?;
    if let Some(seed) = args.seed {
        manifest.seed = seed;
    }
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let rows = run_bench(&manifest, base, args.workers)?;
    let mut buf = Vec::new();
    write_report(&rows, &mut buf)?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    write_output(args.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Cluster(ClusterMode::Exact(a)) => cluster_exact(a),
        Command::Cluster(ClusterMode::Approx(a)) => cluster_approx(a),
        Command::Baseline(BaselineKind::Greedy(a)) => baseline_greedy(a),
        Command::Baseline(BaselineKind::Beam(a)) => baseline_beam(a),
        Command::Oracle(a) => oracle(a),
        Command::Gen(GenKind::Ginkgo(a)) => gen_ginkgo(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
