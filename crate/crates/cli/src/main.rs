mod files;
mod settings;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use causal_hierarchy::hierarchy::{
    generate_hierarchy, write_edge_list, Ambiguity, GeneratorParams, GraphMode, GraphSummary,
};
use causal_hierarchy::metrics::evaluate_with;
use causal_hierarchy::repair::{perfect_embed_with, verify_all, IterationStats, RepairConfig};
use causal_hierarchy::retrieval::ParentTable;
use causal_hierarchy::{EmbeddingConfig, EmbeddingFile, Execution, TokenId};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use files::{LabeledReport, LoadedGraph};
use settings::{EmbeddingSection, SettingsFile};

/// Exit status for a run that finished but left mismatched tokens.
const NOT_PERFECT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "causal-embed",
    version,
    about = "Embed hierarchies as causal structure in Minkowski spacetime"
)]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic hierarchy as a tab-separated edge list.
    Gen(GenArgs),
    /// Embed a hierarchy and repair it until every chain is retrieved.
    Embed(EmbedArgs),
    /// Check an embedding against its edge list.
    Verify(GraphArgs),
    /// Print retrieved ancestor chains as JSON lines.
    Query(QueryArgs),
    /// Mean rank and MAP of true parents.
    Eval(EvalArgs),
    /// Write CSV files for plotting.
    ExportPlot(PlotArgs),
}

#[derive(Args)]
struct ModeArgs {
    /// Require a tree: one parent per token and a single root.
    #[arg(long, conflicts_with = "multi_root")]
    tree: bool,
    /// Allow several root tokens.
    #[arg(long)]
    multi_root: bool,
}

impl ModeArgs {
    fn mode(&self) -> GraphMode {
        if self.tree {
            GraphMode::Tree
        } else {
            GraphMode::Dag {
                multiple_roots: self.multi_root,
            }
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    /// Maximum children per token.
    #[arg(long, default_value_t = 64)]
    branching: usize,
    /// Number of leaves given a second parent.
    #[arg(long, conflicts_with = "two_parent_fraction")]
    two_parent: Option<usize>,
    /// Fraction of eligible leaves given a second parent.
    #[arg(long)]
    two_parent_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

impl GenArgs {
    fn params(&self) -> GeneratorParams {
        let ambiguity = match (self.two_parent, self.two_parent_fraction) {
            (Some(k), _) => Ambiguity::Count(k),
            (None, Some(f)) => Ambiguity::Fraction(f),
            (None, None) => Ambiguity::None,
        };
        GeneratorParams {
            n: self.n,
            max_depth: self.depth,
            branching: self.branching,
            ambiguity,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge list, one `child<TAB>parent` per line.
    #[arg(long, required_unless_present = "gen", conflicts_with = "gen")]
    pairs: Option<PathBuf>,
    /// Generate the input instead, e.g. `n=1182,depth=10,two_parent=10`.
    #[arg(long)]
    gen: Option<String>,
    /// Total spacetime dimension (time plus space).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// TOML file with `[embedding]` and `[repair]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    emb: PathBuf,
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    emb: PathBuf,
    /// Token label to query; repeatable.
    #[arg(long = "token", required_unless_present = "all")]
    tokens: Vec<String>,
    #[arg(long, conflicts_with = "tokens")]
    all: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Also write one `child,parent,rank` row per edge.
    #[arg(long)]
    ranks_csv: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    emb: PathBuf,
    /// Output directory for points.csv and edges.csv.
    #[arg(long)]
    out: PathBuf,
    /// Also write cones.csv with this many samples per past light cone.
    #[arg(long)]
    cones: Option<usize>,
    /// Time offset below each token at which its cone is sampled.
    #[arg(long, default_value_t = 0.1)]
    cone_depth: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Embed(a) => embed(&a, exec),
        Command::Verify(a) => verify(&a),
        Command::Query(a) => query(&a, exec),
        Command::Eval(a) => eval(&a, exec),
        Command::ExportPlot(a) => export_plot(&a, exec),
    };
    match outcome {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .is_some_and(|j| j.io_error_kind() == Some(io::ErrorKind::BrokenPipe))
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn edge_list_bytes(graph: &causal_hierarchy::HierarchyGraph) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_edge_list(graph, &mut buf)?;
    Ok(buf)
}

fn gen(a: &GenArgs) -> Result<ExitCode> {
    let graph = generate_hierarchy(&a.params())?;
    files::write_text(&a.out, std::str::from_utf8(&edge_list_bytes(&graph)?)?)?;
    print_json(&GraphSummary::of(&graph))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_gen_spec(spec: &str) -> Result<GeneratorParams> {
    let mut params = GeneratorParams::default();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("expected key=value, got `{item}`"))?;
        let bad = || format!("invalid value for `{key}`: `{value}`");
        match key.trim() {
            "n" => params.n = value.parse().with_context(bad)?,
            "depth" => params.max_depth = value.parse().with_context(bad)?,
            "branching" => params.branching = value.parse().with_context(bad)?,
            "seed" => params.seed = value.parse().with_context(bad)?,
            "two_parent" => params.ambiguity = Ambiguity::Count(value.parse().with_context(bad)?),
            "two_parent_fraction" => {
                params.ambiguity = Ambiguity::Fraction(value.parse().with_context(bad)?)
            }
            other => bail!("unknown generator key `{other}`"),
        }
    }
    Ok(params)
}

#[derive(Serialize)]
struct InputInfo {
    source: String,
    sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorParams>,
    summary: GraphSummary,
}

#[derive(Serialize)]
struct Timings {
    load_seconds: f64,
    embed_seconds: f64,
    total_seconds: f64,
}

#[derive(Serialize)]
struct Outcome {
    perfect: bool,
    initial_perfect_fraction: f64,
    final_perfect_fraction: f64,
    repair_rounds: usize,
    converged: bool,
    sweeps_run: usize,
}

#[derive(Serialize)]
struct RunManifest {
    version: &'static str,
    parallel: bool,
    input: InputInfo,
    config: EmbeddingConfig,
    repair: RepairConfig,
    timings: Timings,
    outcome: Outcome,
}

#[derive(Serialize)]
struct EmbedReport<'a> {
    initial: LabeledReport,
    #[serde(rename = "final")]
    last: LabeledReport,
    rounds: &'a [IterationStats],
}

fn embed(a: &EmbedArgs, exec: Execution) -> Result<ExitCode> {
    let started = Instant::now();
    let file_settings = match &a.config {
        Some(p) => SettingsFile::load(p)?,
        None => SettingsFile::default(),
    };
    let flags = EmbeddingSection {
        dim: a.dim,
        eps1: a.eps1,
        eps2: a.eps2,
        seed: a.seed,
        max_sweeps: a.max_sweeps,
    };
    let config = settings::resolve(&flags, &file_settings)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let (loaded, source, generator) = match (&a.pairs, &a.gen) {
        (Some(path), _) => (
            files::read_graph(path, a.mode.mode())?,
            path.display().to_string(),
            None,
        ),
        (None, Some(spec)) => {
            let params = parse_gen_spec(spec)?;
            let bytes = edge_list_bytes(&generate_hierarchy(&params)?)?;
            let path = a.out.join("edges.tsv");
            fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            (
                files::parse_graph(&bytes, a.mode.mode(), "generated graph")?,
                path.display().to_string(),
                Some(params),
            )
        }
        (None, None) => bail!("either --pairs or --gen is required"),
    };
    let LoadedGraph { graph, digest } = &loaded;
    let load_seconds = started.elapsed().as_secs_f64();

    let embed_start = Instant::now();
    let result = perfect_embed_with(graph, &config, &file_settings.repair, exec)?;
    let embed_seconds = embed_start.elapsed().as_secs_f64();

    let emb_file = EmbeddingFile::new(&result.embedding, graph.labels(), Some(digest.clone()))?;
    files::write_text(&a.out.join("embedding.json"), &emb_file.to_json()?)?;
    let report = EmbedReport {
        initial: LabeledReport::new(&result.initial_report, graph.labels()),
        last: LabeledReport::new(&result.report, graph.labels()),
        rounds: &result.history,
    };
    files::write_text(
        &a.out.join("report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        parallel: exec == Execution::Parallel,
        input: InputInfo {
            source,
            sha256: digest.clone(),
            generator,
            summary: GraphSummary::of(graph),
        },
        config,
        repair: file_settings.repair.clone(),
        timings: Timings {
            load_seconds,
            embed_seconds,
            total_seconds: started.elapsed().as_secs_f64(),
        },
        outcome: Outcome {
            perfect: result.is_perfect(),
            initial_perfect_fraction: result.initial_report.perfect_fraction(),
            final_perfect_fraction: result.report.perfect_fraction(),
            repair_rounds: result.history.len(),
            converged: result.embedding.converged(),
            sweeps_run: result.embedding.sweeps_run(),
        },
    };
    files::write_text(
        &a.out.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )?;

    println!(
        "{} tokens, {} perfect before repair, {} after {} rounds",
        result.report.total,
        result.initial_report.perfect,
        result.report.perfect,
        result.history.len()
    );
    Ok(if result.is_perfect() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_PERFECT)
    })
}

fn load_pair(a: &GraphArgs) -> Result<(LoadedGraph, causal_hierarchy::Embedding)> {
    let loaded = files::read_graph(&a.pairs, a.mode.mode())?;
    let (file, _, _) = files::read_embedding(&a.emb)?;
    let emb = files::align(&file, &loaded)?;
    Ok((loaded, emb))
}

fn verify(a: &GraphArgs) -> Result<ExitCode> {
    let (loaded, emb) = load_pair(a)?;
    let report = verify_all(&emb, &loaded.graph);
    print_json(&LabeledReport::new(&report, loaded.graph.labels()))?;
    Ok(if report.is_perfect() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_PERFECT)
    })
}

#[derive(Serialize)]
struct QueryLine<'a> {
    query: &'a str,
    chain: Vec<&'a str>,
    /// Detected parents at each step of the chain.
    parents: Vec<Vec<&'a str>>,
}

fn query(a: &QueryArgs, exec: Execution) -> Result<ExitCode> {
    let (_, emb, labels) = files::read_embedding(&a.emb)?;
    let ids: Vec<TokenId> = if a.all {
        (0..labels.len()).map(TokenId::from).collect()
    } else {
        a.tokens
            .iter()
            .map(|l| files::lookup(&labels, l))
            .collect::<Result<_>>()?
    };
    let table = ParentTable::build_with(&emb, exec);
    let mut out = io::stdout().lock();
    for id in ids {
        let result = table.chain(id)?;
        let name = |t: TokenId| labels[t.index()].as_str();
        let parents = result
            .chain
            .windows(2)
            .zip(&result.extra_parents)
            .map(|(w, extra)| std::iter::once(w[1]).chain(*extra).map(name).collect())
            .collect();
        let line = QueryLine {
            query: name(id),
            chain: result.chain.iter().map(|&t| name(t)).collect(),
            parents,
        };
        serde_json::to_writer(&mut out, &line)?;
        writeln!(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EvalSummary {
    edges: usize,
    mean_rank: f64,
    map: f64,
}

fn eval(a: &EvalArgs, exec: Execution) -> Result<ExitCode> {
    let (loaded, emb) = load_pair(&a.graph)?;
    let result = evaluate_with(&emb, &loaded.graph, exec)?;
    if let Some(path) = &a.ranks_csv {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["child", "parent", "rank"])?;
        for r in &result.per_token_ranks {
            let labels = loaded.graph.labels();
            w.write_record([
                &labels[r.child.index()],
                &labels[r.parent.index()],
                &r.rank.to_string(),
            ])?;
        }
        w.flush()?;
    }
    print_json(&EvalSummary {
        edges: result.per_token_ranks.len(),
        mean_rank: result.mean_rank,
        map: result.map,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn export_plot(a: &PlotArgs, exec: Execution) -> Result<ExitCode> {
    let (_, emb, labels) = files::read_embedding(&a.emb)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let d = emb.dim();

    let mut points = csv_writer(&a.out.join("points.csv"))?;
    let header: Vec<String> = ["label".to_string(), "t".to_string()]
        .into_iter()
        .chain((1..=d).map(|k| format!("x{k}")))
        .collect();
    points.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let id = TokenId::from(i);
        let row = std::iter::once(label.clone())
            .chain(std::iter::once(emb.time(id).to_string()))
            .chain(emb.position(id).iter().map(f64::to_string));
        points.write_record(row)?;
    }
    points.flush()?;

    let table = ParentTable::build_with(&emb, exec);
    let mut edges = csv_writer(&a.out.join("edges.csv"))?;
    edges.write_record(["child", "parent"])?;
    for (i, label) in labels.iter().enumerate() {
        for p in table.parents(TokenId::from(i)) {
            edges.write_record([label, &labels[p.index()]])?;
        }
    }
    edges.flush()?;

    if let Some(samples) = a.cones {
        if a.cone_depth.is_nan() || a.cone_depth <= 0.0 {
            bail!("--cone-depth must be positive");
        }
        let mut cones = csv_writer(&a.out.join("cones.csv"))?;
        cones.write_record(&header)?;
        for (i, label) in labels.iter().enumerate() {
            let id = TokenId::from(i);
            let t = (emb.time(id) - a.cone_depth).to_string();
            for point in cone_ring(emb.position(id), a.cone_depth, samples) {
                cones.write_record(
                    [label.clone(), t.clone()]
                        .into_iter()
                        .chain(point.iter().map(f64::to_string)),
                )?;
            }
        }
        cones.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))
}

/// Points at distance `radius` from `center`, spread over the first two axes.
fn cone_ring(center: &[f64], radius: f64, samples: usize) -> Vec<Vec<f64>> {
    if center.len() == 1 {
        return vec![vec![center[0] - radius], vec![center[0] + radius]];
    }
    (0..samples)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / samples as f64;
            let mut p = center.to_vec();
            p[0] += radius * angle.cos();
            p[1] += radius * angle.sin();
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_spec() {
        let p = parse_gen_spec("n=1182, depth=10,two_parent=10,seed=3").unwrap();
        assert_eq!((p.n, p.max_depth, p.seed, p.branching), (1182, 10, 3, 64));
        assert_eq!(p.ambiguity, Ambiguity::Count(10));
        assert!(parse_gen_spec("n=10,size=3").is_err());
        assert!(parse_gen_spec("n=ten").is_err());
    }

    #[test]
    fn ring_points_sit_on_the_cone() {
        for p in cone_ring(&[1.0, 2.0, 3.0], 0.5, 8) {
            let r = ((p[0] - 1.0).powi(2) + (p[1] - 2.0).powi(2)).sqrt();
            assert!((r - 0.5).abs() < 1e-12 && p[2] == 3.0);
        }
        assert_eq!(cone_ring(&[0.0], 1.0, 8).len(), 2);
    }
}
