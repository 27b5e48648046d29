//! Command-line driver: load a Matrix Market graph, run SSSP or BFS under a
//! chosen execution configuration, optionally check the result against
//! sequential Dijkstra, and report distances and timings.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use native_graph::{
    bfs, check_predecessor_tree, parse_matrix_market, reference_dijkstra, sssp, write_distances,
    Direction, DistanceMap, ExecutionPolicy, Graph, Mode, ParseOptions, PredecessorMap,
    Representation, RunStats, SsspConfig,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Sssp,
    Bfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Seq,
    Par,
    ParNosync,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Push,
    Pull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontierArg {
    Sparse,
    Dense,
    Queue,
}

#[derive(Debug, Parser)]
#[command(
    name = "native-graph",
    version,
    about = "Run SSSP or BFS on a Matrix Market graph under a chosen execution configuration"
)]
pub struct Args {
    /// Matrix Market (.mtx) coordinate file
    #[arg(long, value_name = "PATH")]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Sssp)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Par)]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Push)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = FrontierArg::Sparse)]
    pub frontier: FrontierArg,
    /// Worker threads for parallel policies [default: available parallelism]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Distance table destination [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Compare the result with sequential Dijkstra
    #[arg(long)]
    pub validate: bool,
    /// Seed for random vertex partition metadata (k = workers)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mirror the entries of symmetric files
    #[arg(long)]
    pub undirected: bool,
    /// Deduplicate sparse frontiers after every superstep
    #[arg(long)]
    pub uniquify: bool,
    /// Write run statistics as JSON
    #[arg(long, value_name = "PATH")]
    pub stats_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub graph: String,
    pub algorithm: Algorithm,
    pub source: usize,
    pub policy: PolicyArg,
    pub direction: DirectionArg,
    pub frontier: FrontierArg,
    pub workers: usize,
    pub uniquify: bool,
    pub undirected: bool,
    pub seed: Option<u64>,
    pub partition_sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Skipped,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Pass => s.serialize_str("pass"),
            Verdict::Skipped => s.serialize_str("skipped"),
            Verdict::Fail(reason) => s.serialize_str(&format!("fail: {reason}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub load_ms: f64,
    pub build_ms: f64,
    pub algo_ms: f64,
    pub supersteps: usize,
    pub relaxations: u64,
    pub verdict: Verdict,
}

/// Builds the algorithm configuration, rejecting invalid flag combinations.
pub fn resolve_config(args: &Args) -> Result<SsspConfig, String> {
    let workers = args.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    let policy = match args.policy {
        PolicyArg::Seq => ExecutionPolicy::seq(),
        PolicyArg::Par => ExecutionPolicy::par(workers),
        PolicyArg::ParNosync => ExecutionPolicy::par_nosync(workers),
    };
    let direction = match args.direction {
        DirectionArg::Push => Direction::Push,
        DirectionArg::Pull => Direction::Pull,
    };
    let frontier = match args.frontier {
        FrontierArg::Sparse => Representation::Sparse,
        FrontierArg::Dense => Representation::Bitmap,
        FrontierArg::Queue => Representation::Queue,
    };
    match (args.policy, args.frontier) {
        (PolicyArg::ParNosync, FrontierArg::Sparse | FrontierArg::Dense) => {
            return Err("--policy par-nosync requires --frontier queue".into())
        }
        (PolicyArg::Seq | PolicyArg::Par, FrontierArg::Queue) => {
            return Err("--frontier queue requires --policy par-nosync".into())
        }
        _ => {}
    }
    if args.frontier == FrontierArg::Queue && args.direction == DirectionArg::Pull {
        return Err("--frontier queue supports only --direction push".into());
    }
    if args.algorithm == Algorithm::Bfs && args.frontier == FrontierArg::Queue {
        return Err("--algorithm bfs cannot use --frontier queue (levels need supersteps)".into());
    }
    let mut cfg = SsspConfig::new(policy, direction, frontier);
    cfg.uniquify = args.uniquify;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

struct Outcome {
    dist: DistanceMap,
    pred: PredecessorMap,
    stats: RunStats,
}

/// Compares a result with sequential Dijkstra (unit weights for BFS).
/// SSSP predecessors must also form a shortest-path tree.
pub fn validate_result(
    g: &Graph,
    algorithm: Algorithm,
    source: usize,
    dist: &[f64],
    pred: &[Option<usize>],
) -> Verdict {
    let oracle = match algorithm {
        Algorithm::Sssp => reference_dijkstra(g, source),
        Algorithm::Bfs => {
            let unit: Vec<_> = g.edges().map(|(u, v, _)| (u, v, 1.0)).collect();
            let unit = Graph::from_edges(&unit, g.num_vertices()).expect("unit weights are valid");
            reference_dijkstra(&unit, source)
        }
    };
    let oracle = match oracle {
        Ok(o) => o,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    if dist.len() != oracle.dist.len() {
        return Verdict::Fail(format!(
            "{} distances for {} vertices",
            dist.len(),
            oracle.dist.len()
        ));
    }
    if let Some(v) = (0..dist.len()).find(|&v| dist[v] != oracle.dist[v]) {
        return Verdict::Fail(format!(
            "vertex {v}: distance {} but reference gives {}",
            dist[v], oracle.dist[v]
        ));
    }
    if algorithm == Algorithm::Sssp {
        if let Err(reason) = check_predecessor_tree(g, source, dist, pred) {
            return Verdict::Fail(reason);
        }
    }
    Verdict::Pass
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code. The distance table goes to `stdout` unless
/// `--output` is given; diagnostics go to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&args, stdout, stderr) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn execute(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, String> {
    let cfg = resolve_config(args)?;

    let start = Instant::now();
    let file = File::open(&args.graph)
        .map_err(|e| format!("cannot open {}: {e}", args.graph.display()))?;
    let options = ParseOptions {
        force_unit_weights: false,
        expand_symmetric: args.undirected,
    };
    let edges = parse_matrix_market(BufReader::new(file), options)
        .map_err(|e| format!("{}: {e}", args.graph.display()))?;
    let load_ms = millis(start);

    let start = Instant::now();
    let mut g = edges.into_graph().map_err(|e| e.to_string())?;
    if cfg.direction == Direction::Pull {
        g = g.build_transpose();
    }
    let mut partition_sizes = None;
    if let Some(seed) = args.seed {
        let k = cfg.policy.workers();
        g = g.random_partition(k, seed).map_err(|e| e.to_string())?;
        let mut sizes = vec![0; k];
        for &p in g.partition().unwrap_or_default() {
            sizes[p as usize] += 1;
        }
        partition_sizes = Some(sizes);
    }
    let build_ms = millis(start);

    if args.source >= g.num_vertices() {
        return Err(format!(
            "--source {} out of range for {} vertices",
            args.source,
            g.num_vertices()
        ));
    }

    let start = Instant::now();
    let outcome = match args.algorithm {
        Algorithm::Sssp => {
            let r = sssp(&g, args.source, &cfg).map_err(|e| e.to_string())?;
            Outcome {
                dist: r.dist,
                pred: r.pred,
                stats: r.stats,
            }
        }
        Algorithm::Bfs => {
            let r = bfs(&g, args.source, &cfg).map_err(|e| e.to_string())?;
            Outcome {
                dist: r.distances(),
                pred: r.parent,
                stats: r.stats,
            }
        }
    };
    let algo_ms = millis(start);

    let verdict = if args.validate {
        validate_result(&g, args.algorithm, args.source, &outcome.dist, &outcome.pred)
    } else {
        Verdict::Skipped
    };

    match &args.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            write_distances(&outcome.dist, &outcome.pred, BufWriter::new(file))
        }
        None => write_distances(&outcome.dist, &outcome.pred, &mut *stdout),
    }
    .map_err(|e| format!("writing distances: {e}"))?;

    let report = RunReport {
        config: ConfigEcho {
            graph: args.graph.display().to_string(),
            algorithm: args.algorithm,
            source: args.source,
            policy: args.policy,
            direction: args.direction,
            frontier: args.frontier,
            workers: if cfg.policy.mode() == Mode::Sequential {
                1
            } else {
                cfg.policy.workers()
            },
            uniquify: args.uniquify,
            undirected: args.undirected,
            seed: args.seed,
            partition_sizes,
        },
        load_ms,
        build_ms,
        algo_ms,
        supersteps: outcome.stats.supersteps,
        relaxations: outcome.stats.relaxations,
        verdict,
    };
    if let Some(path) = &args.stats_json {
        let json = serde_json::to_string(&report).map_err(|e| e.to_string())?;
        std::fs::write(path, json + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    let _ = writeln!(
        stderr,
        "{}: {} vertices, {} edges, {} supersteps, {} relaxations, {:.3} ms",
        cfg,
        g.num_vertices(),
        g.num_edges(),
        report.supersteps,
        report.relaxations,
        report.algo_ms
    );
    Ok(match &report.verdict {
        Verdict::Pass => {
            let _ = writeln!(stderr, "verdict: pass");
            EXIT_OK
        }
        Verdict::Fail(reason) => {
            let _ = writeln!(stderr, "verdict: fail ({reason})");
            EXIT_VALIDATION
        }
        Verdict::Skipped => EXIT_OK,
    })
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
