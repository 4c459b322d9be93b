use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dnml_sbm::io::{
    guess_is_adjacency, load_adjacency_csv, load_edge_list, EdgeListOptions, Indexing,
};
use dnml_sbm::selector::default_k_max;
use dnml_sbm::simulate::{self, Proportions, ScenarioConfig, ScenarioKind};
use dnml_sbm::{select_k, DetectorConfig, Error, Graph, Method, PenaltyConfig, Seed};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "dnml-sbm",
    version,
    about = "Estimate the number of communities in a network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select the number of communities of a graph read from disk.
    Estimate(EstimateArgs),
    /// Run replicated stochastic block model simulations.
    Simulate(SimulateArgs),
    /// Time detection and criterion evaluation over a grid of graph sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Edgelist,
    Adjcsv,
}

#[derive(Args)]
struct Common {
    /// Seed for all randomness; a generated seed is reported on stderr when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Destination file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Input format; guessed from the extension (.csv is adjacency) when absent.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Edge-list node ids start at 0 instead of 1.
    #[arg(long)]
    zero_indexed: bool,
    /// Largest candidate number of communities [default: min(n, 10)].
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value = "dnml", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Multiplier of the corrected-BIC penalty.
    #[arg(long, default_value_t = 1.0)]
    cbic_lambda: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_scenario)]
    scenario: ScenarioKind,
    /// Node counts (comma separated); a single value except for vary-n.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    k0: usize,
    /// Community proportions (comma separated); balanced when absent.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<f64>>,
    /// Within-community edge probability (sparsity: diagonal of S).
    #[arg(long, default_value_t = 0.8)]
    a: f64,
    /// Between-community edge probability (sparsity: off-diagonal of S).
    #[arg(long, default_value_t = 0.3)]
    b: f64,
    /// Values of b swept by vary-b.
    #[arg(long, value_delimiter = ',')]
    b_grid: Vec<f64>,
    /// Scalings of S swept by sparsity.
    #[arg(long, value_delimiter = ',')]
    rho_grid: Vec<f64>,
    #[arg(long, short = 'r', default_value_t = 20)]
    replications: usize,
    #[arg(long, value_delimiter = ',', default_value = "dnml", value_parser = parse_method)]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    cbic_lambda: f64,
    /// Largest candidate number of communities [default: min(n, 10)].
    #[arg(long)]
    kmax: Option<usize>,
    /// Also write mean selected k per setting and method to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write per-replication wall times to this file.
    #[arg(long)]
    timings: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    /// Node counts (comma separated).
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Criterion-phase repetitions per size; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[command(flatten)]
    common: Common,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status 1 for bad arguments, 2 for files that cannot be read or written.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

fn file_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn classify(error: Error) -> Failure {
    match error {
        Error::Io { .. } | Error::Parse { .. } => file_error(error),
        _ => usage(error),
    }
}

fn resolve_seed(seed: Option<u64>) -> Seed {
    Seed(seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    }))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(file_error)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct JsonTable<'a, M: Serialize, R: Serialize> {
    schema: String,
    #[serde(flatten)]
    meta: M,
    rows: &'a [R],
}

/// Writes rows as CSV preceded by a `# schema` comment, or as JSON carrying the
/// same rows plus `meta`.
fn write_table<M: Serialize, R: Serialize>(
    path: Option<&Path>,
    kind: &str,
    json: bool,
    meta: M,
    rows: &[R],
) -> Result<(), Failure> {
    let schema = format!("dnml-sbm {kind} v{SCHEMA_VERSION}");
    let mut out = open_output(path)?;
    let result = if json {
        serde_json::to_writer_pretty(&mut out, &JsonTable { schema, meta, rows })
            .map_err(anyhow::Error::from)
            .and_then(|_| writeln!(out).map_err(Into::into))
    } else {
        writeln!(out, "# {schema}")
            .map_err(anyhow::Error::from)
            .and_then(|_| {
                let mut w = csv::Writer::from_writer(&mut out);
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
                Ok(())
            })
    };
    result
        .and_then(|_| out.flush().map_err(Into::into))
        .context("cannot write output")
        .map_err(file_error)
}

#[derive(Serialize)]
struct EstimateRow {
    method: Method,
    k: usize,
    log_score: Option<f64>,
    penalty: Option<f64>,
    penalized: Option<f64>,
    selected: bool,
    failure: Option<String>,
}

#[derive(Serialize)]
struct EstimateMeta<'a> {
    input: &'a Path,
    nodes: usize,
    edges: usize,
    seed: u64,
    k_max: usize,
    method: Method,
    k_hat: usize,
}

fn load_graph(args: &EstimateArgs) -> Result<Graph, Failure> {
    let adjacency = match args.format {
        Some(Format::Adjcsv) => true,
        Some(Format::Edgelist) => false,
        None => guess_is_adjacency(&args.input),
    };
    if adjacency {
        return load_adjacency_csv(&args.input).map_err(classify);
    }
    let options = EdgeListOptions {
        indexing: if args.zero_indexed {
            Indexing::Zero
        } else {
            Indexing::One
        },
        ..Default::default()
    };
    let loaded = load_edge_list(&args.input, &options).map_err(file_error)?;
    Ok(loaded.graph)
}

fn estimate(args: EstimateArgs) -> Result<(), Failure> {
    let penalty = PenaltyConfig {
        epsilon: args.epsilon,
        cbic_lambda: args.cbic_lambda,
    };
    penalty.validate().map_err(usage)?;
    if args.kmax == Some(0) {
        return Err(usage(anyhow::anyhow!("--kmax must be at least 1")));
    }
    let graph = load_graph(&args)?;
    let k_max = args
        .kmax
        .unwrap_or_else(|| default_k_max(graph.node_count()));
    let seed = resolve_seed(args.common.seed);
    let result = select_k(
        &graph,
        k_max,
        args.method,
        &penalty,
        &DetectorConfig::with_seed(seed),
    )
    .map_err(classify)?;
    log::info!("k_hat = {}", result.k_hat);
    let rows: Vec<EstimateRow> = result
        .records
        .iter()
        .map(|r| EstimateRow {
            method: result.method,
            k: r.k,
            log_score: r.score.as_ref().map(|s| s.log_score),
            penalty: r.score.as_ref().map(|s| s.penalty),
            penalized: r.score.as_ref().map(|s| s.penalized),
            selected: r.k == result.k_hat,
            failure: r.failure.clone(),
        })
        .collect();
    let meta = EstimateMeta {
        input: &args.input,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        seed: seed.0,
        k_max,
        method: result.method,
        k_hat: result.k_hat,
    };
    write_table(
        args.common.output.as_deref(),
        "estimate",
        args.common.json,
        meta,
        &rows,
    )?;
    if args.common.output.is_some() {
        println!("k_hat = {}", result.k_hat);
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateRow {
    setting: usize,
    n: usize,
    k0: usize,
    a: f64,
    b: f64,
    rho: Option<f64>,
    replication: usize,
    seed: u64,
    method: Method,
    k_hat: usize,
}

#[derive(Serialize)]
struct TimingRow {
    setting: usize,
    replication: usize,
    method: Method,
    detection_ns: u64,
    criterion_ns: u64,
}

#[derive(Serialize)]
struct SimulateMeta {
    scenario: ScenarioKind,
    seed: u64,
    replications: usize,
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let seed = resolve_seed(args.common.seed);
    let config = ScenarioConfig {
        kind: args.scenario,
        n_grid: args.n,
        k0: args.k0,
        pi: args.pi.map_or(Proportions::Balanced, Proportions::Explicit),
        a: args.a,
        b: args.b,
        b_grid: args.b_grid,
        rho_grid: args.rho_grid,
        replications: args.replications,
        seed,
        methods: args.methods,
        penalty: PenaltyConfig {
            epsilon: args.epsilon,
            cbic_lambda: args.cbic_lambda,
        },
        k_max: args.kmax,
    };
    let results = simulate::run(&config).map_err(usage)?;
    let meta = || SimulateMeta {
        scenario: config.kind,
        seed: seed.0,
        replications: config.replications,
    };
    let rows: Vec<SimulateRow> = results
        .iter()
        .map(|r| SimulateRow {
            setting: r.setting,
            n: r.n,
            k0: r.k0,
            a: r.a,
            b: r.b,
            rho: r.rho,
            replication: r.replication,
            seed: r.seed,
            method: r.method,
            k_hat: r.k_hat,
        })
        .collect();
    let json = args.common.json;
    write_table(
        args.common.output.as_deref(),
        "simulate",
        json,
        meta(),
        &rows,
    )?;
    if let Some(path) = &args.summary {
        let summary = simulate::summarize(&results);
        write_table(Some(path), "simulate-summary", json, meta(), &summary)?;
    }
    if let Some(path) = &args.timings {
        let timings: Vec<TimingRow> = results
            .iter()
            .map(|r| TimingRow {
                setting: r.setting,
                replication: r.replication,
                method: r.method,
                detection_ns: r.detection_ns,
                criterion_ns: r.criterion_ns,
            })
            .collect();
        write_table(Some(path), "simulate-timings", json, meta(), &timings)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchMeta {
    seed: u64,
    repeats: usize,
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    if args.n_grid.is_empty() {
        return Err(usage(anyhow::anyhow!("--n-grid needs at least one size")));
    }
    let seed = resolve_seed(args.common.seed);
    let rows = simulate::bench(&args.n_grid, args.kmax, seed, args.repeats).map_err(usage)?;
    let meta = BenchMeta {
        seed: seed.0,
        repeats: args.repeats,
    };
    write_table(
        args.common.output.as_deref(),
        "bench",
        args.common.json,
        meta,
        &rows,
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            if f.code == 1 {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
