use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use qrelax::bench::{run_algorithm, run_bench, save_records, Algorithm, BenchConfig, DEFAULT_TIMEOUT};
use qrelax::quality::{compute_quality, QualityRecord};
use qrelax::workload::{gen_clustered_queries, gen_random_queries, QueryKind, Workload};
use qrelax::{load_graph, DistanceIndex, EntityGraph, GraphFormat, Query, RelaxOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;

#[derive(Parser)]
#[command(name = "qrelax", version, about = "Relax failing relationship queries over entity-relation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph statistics as JSON
    LoadStats {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Build a distance index and write it to a file
    BuildIndex {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relax a single query
    Relax(RelaxArgs),
    /// Generate a query workload
    GenQueries(GenArgs),
    /// Compute D_min and N_min for every workload query
    Quality(QualityArgs),
    /// Time algorithms over a workload
    Bench(BenchArgs),
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Input format; guessed from the file extension when omitted
    #[arg(long, value_parser = parse_format)]
    format: Option<GraphFormat>,
}

#[derive(Args)]
struct RelaxArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Distance index; built in memory when omitted
    #[arg(long)]
    index: Option<PathBuf>,
    /// Comma-separated entity identifiers
    #[arg(long, value_delimiter = ',', required = true)]
    query: Vec<String>,
    #[arg(long)]
    diameter: u32,
    #[arg(long, default_value = "certqr+", value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Include a materialized semantic association
    #[arg(long)]
    witness: bool,
    #[arg(long)]
    json: bool,
    /// Seconds before the run gives up
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
    timeout: f64,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_parser = parse_kind)]
    kind: QueryKind,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    n: usize,
    /// Neighborhood radius for clustered queries
    #[arg(long, default_value_t = 2)]
    hops: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QualityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    workload: PathBuf,
    #[arg(long = "ref-d")]
    ref_d: u32,
    #[arg(long)]
    ceiling: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    workload: PathBuf,
    /// Comma-separated: certqr, certqr+, dg, ds, dgs, bsl, brute
    #[arg(long, value_parser = parse_algorithms)]
    algos: AlgorithmList,
    #[arg(long = "d-list", value_delimiter = ',', required = true)]
    d_list: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
    timeout: f64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Records go to <out>.csv and <out>.json
    #[arg(long)]
    out: PathBuf,
    /// Run cells one at a time for low-noise timings
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone)]
struct AlgorithmList(Vec<Algorithm>);

fn parse_format(s: &str) -> Result<GraphFormat, String> {
    s.parse().map_err(|e: qrelax::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: qrelax::Error| e.to_string())
}

fn parse_algorithms(s: &str) -> Result<AlgorithmList, String> {
    Algorithm::parse_list(s).map(AlgorithmList).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<QueryKind, String> {
    s.parse().map_err(|e: qrelax::Error| e.to_string())
}

fn seconds(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| qrelax::Error::Argument(format!("invalid timeout {secs}")).into())
}

fn load(args: &GraphArgs) -> Result<EntityGraph> {
    let g = load_graph(&args.graph, args.format).with_context(|| format!("loading {}", args.graph.display()))?;
    info!("loaded {} entities, {} arcs", g.entity_count(), g.arc_count());
    Ok(g)
}

fn index_for(g: &EntityGraph, path: Option<&Path>) -> Result<DistanceIndex> {
    match path {
        Some(p) => DistanceIndex::load(p, g).with_context(|| format!("loading index {}", p.display())),
        None => {
            let index = DistanceIndex::build(g);
            info!("built index in {:?}", index.stats().build_time);
            Ok(index)
        }
    }
}

/// Writes to stdout; a reader that hung up early is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_quality(path: &Path, records: &[QualityRecord]) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), records)?;
    Ok(())
}

fn relax(args: RelaxArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let index = index_for(&g, args.index.as_deref())?;
    let query = Query::from_names(&g, &args.query)?;
    let opts = RelaxOptions { witness: args.witness, ..Default::default() };
    let outcome = run_algorithm(&g, &index, args.algo, args.diameter, &query, &opts, Some(seconds(args.timeout)?))?;
    let report = outcome.to_json(&g);
    let mut text = String::new();
    if args.json {
        writeln!(text, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(text, "status: {}", serde_json::to_value(report.status)?.as_str().unwrap_or_default())?;
        writeln!(text, "q_max: {}", report.q_max.join(", "))?;
        writeln!(text, "removed: {}", report.removed.join(", "))?;
        if let Some(cert) = &report.certificate {
            match &cert.companion {
                Some(c2) => writeln!(text, "certificate: {} + {}", cert.center, c2)?,
                None => writeln!(text, "certificate: {}", cert.center)?,
            }
        }
        if let Some(sa) = &report.witness {
            writeln!(text, "witness (diameter {}):", sa.diameter)?;
            for arc in &sa.arcs {
                writeln!(text, "  {} --{}--> {}", arc.tail, arc.label, arc.head)?;
            }
        }
        let s = &outcome.stats;
        writeln!(
            text,
            "stats: visited={} checks={} priorities={} distance_calls={} queue_ops={} time={:.6}s{}",
            s.entities_visited,
            s.opt_with_cert_calls,
            s.priority_computations,
            s.distance_calls,
            s.queue_operations,
            s.wall_time.as_secs_f64(),
            if s.terminated_early { " (timed out)" } else { "" }
        )?;
    }
    emit(&text)?;
    Ok(if outcome.q_max.is_empty() { ExitCode::from(EXIT_NO_SOLUTION) } else { ExitCode::SUCCESS })
}

fn gen_queries(args: GenArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let workload = match args.kind {
        QueryKind::Random => gen_random_queries(&g, args.count, args.n, args.seed)?,
        QueryKind::Clustered => gen_clustered_queries(&g, args.count, args.n, args.hops, args.seed)?,
    };
    workload.save(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    info!("wrote {} queries", workload.len());
    Ok(())
}

fn quality(args: QualityArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let index = index_for(&g, args.index.as_deref())?;
    let workload = Workload::load(&args.workload).with_context(|| format!("reading {}", args.workload.display()))?;
    let records = workload
        .resolve(&g)?
        .iter()
        .map(|(id, q)| compute_quality(&g, &index, id, q, args.ref_d, args.ceiling))
        .collect::<qrelax::Result<Vec<QualityRecord>>>()?;
    write_quality(&args.out, &records)
}

fn bench(args: BenchArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let index = index_for(&g, args.index.as_deref())?;
    let workload = Workload::load(&args.workload).with_context(|| format!("reading {}", args.workload.display()))?;
    let cfg = BenchConfig {
        algorithms: args.algos.0,
        d_list: args.d_list,
        timeout: seconds(args.timeout)?,
        repetitions: args.reps,
        parallel: !args.sequential,
    };
    let records = run_bench(&g, &index, &workload, &cfg)?;
    save_records(&records, &args.out)?;
    info!("wrote {} records", records.len());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::LoadStats { graph } => {
            let g = load(&graph)?;
            emit(&format!("{}\n", serde_json::to_string_pretty(&g.stats())?))?;
        }
        Command::BuildIndex { graph, out } => {
            let g = load(&graph)?;
            let index = DistanceIndex::build(&g);
            index.save(&out).with_context(|| format!("writing {}", out.display()))?;
            info!("{} label entries in {:?}", index.stats().label_entries, index.stats().build_time);
        }
        Command::Relax(args) => return relax(args),
        Command::GenQueries(args) => gen_queries(args)?,
        Command::Quality(args) => quality(args)?,
        Command::Bench(args) => bench(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qrelax::Error>() {
        Some(qrelax::Error::Argument(_) | qrelax::Error::UnknownEntity(_) | qrelax::Error::InvalidEntity(_)) => {
            EXIT_USAGE
        }
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
