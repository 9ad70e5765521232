//! The `founderrank` command line: one subcommand per pipeline stage.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported as one JSON line
//! on stderr), 2 on a usage error. Every parsed run appends a manifest line
//! to `runs.jsonl` in the config directory.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analytics::{analyze, read_timelines};
use crate::catalog::{
    Catalog, FundStage, Industry, COMPANY_COLUMNS, FIRM_COLUMNS, INVESTOR_COLUMNS,
};
use crate::centrality::{
    compute_metrics, read_metrics, write_metrics, MetricVector, PageRankConfig,
};
use crate::communities::{community_stats, detect, modularity, Method};
use crate::error::{Error, Result};
use crate::founder_rank::{
    baseline_rank, build_funding_graph, fri_baseline, nfr_rank, overlay, random_rank,
    read_funding_records, read_profiles, wfr_rank, BaselineWeights, FounderProfile,
};
use crate::graph::{read_labels, CommGraph, GraphDelta, Label, NodeId};
use crate::ingest::{
    ingest_events, normalize_address, parse_log, IngestConfig, IngestState, LogRecord,
};
use crate::intro_paths::{
    firm_intro_paths, top_intro_paths, IntroPath, DEFAULT_K, DEFAULT_MAX_HOPS,
};
use crate::rank_eval::{evaluate, EvalOptions, Gain};
use crate::ranking::Ranking;
use crate::search::{
    best_partner_match, filter_and_search, guess_column_mapping, ColumnSort, FilterQuery,
    FounderContext, SortColumn,
};
use crate::synth::{generate, write_world, SynthSpec};

/// Environment variable naming the default config directory.
pub const CONFIG_DIR_ENV: &str = "FOUNDERRANK_CONFIG_DIR";
pub const RUN_LOG: &str = "runs.jsonl";
pub const INGEST_CONFIG_FILE: &str = "ingest.toml";
pub const WEIGHTS_FILE: &str = "weights.txt";
pub const STATE_FILE: &str = "state.json";

#[derive(Debug, Parser)]
#[command(name = "founderrank", version, about = "Fundraising graph analytics")]
pub struct Cli {
    /// Seed for every random choice the subcommand makes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Config directory; defaults to $FOUNDERRANK_CONFIG_DIR.
    #[arg(long, global = true)]
    pub config_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn one founder's email log into a graph delta.
    Ingest(IngestArgs),
    /// Apply deltas and labels to produce a graph snapshot.
    Build(BuildArgs),
    /// Compute scaled centrality metrics for every node.
    Metrics(MetricsArgs),
    /// Partition the graph into communities.
    Communities(CommunitiesArgs),
    /// Rank founders.
    Rank(RankArgs),
    /// Compare a candidate ranking with a baseline ranking.
    Eval(EvalArgs),
    /// Strongest warm-introduction paths to an investor or firm.
    Path(PathArgs),
    /// Filter, search and rank firms in a catalog.
    Filter(FilterArgs),
    /// Fundraising-period statistics and the email-volume curve.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic world.
    Synth(SynthArgs),
    /// Map the headers of a foreign CSV onto catalog columns.
    Import(ImportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Build(_) => "build",
            Command::Metrics(_) => "metrics",
            Command::Communities(_) => "communities",
            Command::Rank(_) => "rank",
            Command::Eval(_) => "eval",
            Command::Path(_) => "path",
            Command::Filter(_) => "filter",
            Command::Analyze(_) => "analyze",
            Command::Synth(_) => "synth",
            Command::Import(_) => "import",
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub founder: String,
    /// Directory holding the import state between runs.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Ingest config TOML; defaults to ingest.toml in the config directory.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Wishlist investor addresses, one per line.
    #[arg(long)]
    pub targets: Option<PathBuf>,
    /// Skip events before this Unix time.
    #[arg(long)]
    pub since: Option<i64>,
    /// Skip events at or after this Unix time.
    #[arg(long)]
    pub until: Option<i64>,
    /// Also write the stats summary here.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub deltas: Vec<PathBuf>,
    /// CSV with columns node_id, label, employed_by_fund.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Snapshot to apply the deltas to; empty graph otherwise.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub prune_orphans: bool,
    /// Drop nodes whose in- or out-degree exceeds this percentile.
    #[arg(long)]
    pub outlier_percentile: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::centrality::DEFAULT_DAMPING)]
    pub damping: f64,
    #[arg(long, default_value_t = crate::centrality::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::centrality::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Lpa,
    Louvain,
}

#[derive(Debug, Args)]
pub struct CommunitiesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "lpa")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMethod {
    Baseline,
    FriBaseline,
    Random,
    Nfr,
    Wfr,
}

impl RankMethod {
    fn name(self) -> &'static str {
        match self {
            RankMethod::Baseline => "baseline",
            RankMethod::FriBaseline => "fri-baseline",
            RankMethod::Random => "random",
            RankMethod::Nfr => "nfr",
            RankMethod::Wfr => "wfr",
        }
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_enum)]
    pub method: RankMethod,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Founder profiles CSV; the founder set when given.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Precomputed metrics; computed from the graph otherwise.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Baseline weights file; defaults to weights.txt in the config
    /// directory, then the email baseline weights.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Public funding records (kind,a,b) to overlay on the graph.
    #[arg(long)]
    pub funding: Option<PathBuf>,
    /// CSV person_id,address mapping funding people onto email nodes.
    #[arg(long)]
    pub identity: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GainArg {
    Exponential,
    Linear,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long = "p-at", value_delimiter = ',', default_values_t = [5usize, 10, 20])]
    pub p_at: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "exponential")]
    pub gain: GainArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub from: String,
    /// Investor address, or a firm id when --catalog is given.
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    /// Query TOML; flags below add to it.
    #[arg(long)]
    pub query: Option<PathBuf>,
    #[arg(long = "stage")]
    pub stages: Vec<String>,
    #[arg(long = "industry")]
    pub industries: Vec<String>,
    #[arg(long)]
    pub industries_and: bool,
    #[arg(long = "city")]
    pub cities: Vec<String>,
    #[arg(long = "topic")]
    pub topics: Vec<String>,
    #[arg(long)]
    pub us_only: bool,
    #[arg(long)]
    pub search: Option<String>,
    /// Column sort: firm, location, pace or stage, optionally `:desc`.
    #[arg(long)]
    pub sort: Option<String>,
    /// Founder context TOML (industries, cities) for personalized ranking.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub timelines: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Spec TOML; defaults apply when absent. --seed overrides its seed.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output directory; must be absent or empty.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ImportKind {
    Firms,
    Investors,
    Companies,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum, default_value = "firms")]
    pub kind: ImportKind,
    /// Print the guessed header mapping.
    #[arg(long)]
    pub mapping_preview: bool,
    /// Write the CSV with catalog headers and column order.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<PathBuf>,
    /// SHA-256 of the canonical JSON form of the effective settings.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_ms: u128,
    pub exit_code: i32,
}

/// Hash of a settings value. Object keys are sorted, so settings that
/// parse to the same value hash the same regardless of source layout.
pub fn config_hash(settings: &Value) -> String {
    hex::encode(Sha256::digest(settings.to_string().as_bytes()))
}

/// What a subcommand reports back for the manifest.
struct RunInfo {
    inputs: Vec<PathBuf>,
    settings: Value,
    seed: Option<u64>,
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let config_dir = cli.config_dir.clone().or_else(default_config_dir);
    let mut info = RunInfo {
        inputs: Vec::new(),
        settings: Value::Null,
        seed: cli.seed,
    };
    let code = match dispatch(&cli, config_dir.as_deref(), &mut info) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            1
        }
    };
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        inputs: info.inputs,
        config_hash: config_hash(&info.settings),
        seed: info.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_ms: started.elapsed().as_millis(),
        exit_code: code,
    };
    if let Some(dir) = config_dir {
        if let Err(e) = append_manifest(&dir, &manifest) {
            eprintln!("warning: run log not written: {e}");
        }
    }
    code
}

fn default_config_dir() -> Option<PathBuf> {
    std::env::var_os(CONFIG_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| {
            std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".config").join("founderrank"))
        })
}

pub fn append_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(RUN_LOG);
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(&path, e))?;
    let line = serde_json::to_string(manifest)? + "\n";
    f.write_all(line.as_bytes())
        .map_err(|e| Error::io(&path, e))
}

fn dispatch(cli: &Cli, config_dir: Option<&Path>, info: &mut RunInfo) -> Result<()> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a, config_dir, info),
        Command::Build(a) => cmd_build(a, info),
        Command::Metrics(a) => cmd_metrics(a, info),
        Command::Communities(a) => cmd_communities(a, cli.seed.unwrap_or(0), info),
        Command::Rank(a) => cmd_rank(a, cli.seed.unwrap_or(0), config_dir, info),
        Command::Eval(a) => cmd_eval(a, cli.seed.unwrap_or(0), info),
        Command::Path(a) => cmd_path(a, info),
        Command::Filter(a) => cmd_filter(a, info),
        Command::Analyze(a) => cmd_analyze(a, info),
        Command::Synth(a) => cmd_synth(a, cli.seed, info),
        Command::Import(a) => cmd_import(a, info),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file in the target directory, then renames
/// it over `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<CommGraph> {
    CommGraph::load(open(path)?)
}

fn cmd_ingest(a: &IngestArgs, config_dir: Option<&Path>, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.events.clone());
    let config_path = a.config.clone().or_else(|| {
        config_dir
            .map(|d| d.join(INGEST_CONFIG_FILE))
            .filter(|p| p.exists())
    });
    let mut cfg = match &config_path {
        Some(p) => {
            info.inputs.push(p.clone());
            IngestConfig::from_toml(&read_text(p)?)?
        }
        None => IngestConfig::default(),
    };
    if let Some(t) = &a.targets {
        info.inputs.push(t.clone());
        let text = read_text(t)?;
        let lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        cfg = cfg.with_targets(lines)?;
    }
    let founder = normalize_address(&a.founder)
        .ok_or_else(|| Error::InvalidInput(format!("bad founder address {:?}", a.founder)))?;
    info.settings = json!({
        "config": serde_json::to_value(&cfg)?,
        "founder": founder,
        "since": a.since,
        "until": a.until,
    });

    let records: Vec<LogRecord> = parse_log(open(&a.events)?)?
        .into_iter()
        .filter(|r| match r {
            Ok(e) => {
                a.since.is_none_or(|s| e.timestamp >= s) && a.until.is_none_or(|u| e.timestamp < u)
            }
            Err(_) => true,
        })
        .collect();
    let state_path = a.state.join(STATE_FILE);
    let mut state = if state_path.exists() {
        IngestState::from_json(&read_text(&state_path)?)?
    } else {
        IngestState::default()
    };
    let outcome = ingest_events(&records, &founder, &mut state, &cfg)?;
    write_atomic(&a.out, |w| outcome.delta.write_to(w))?;
    write_atomic(&state_path, |w| {
        w.write_all(state.to_json().as_bytes())
            .map_err(|e| Error::io(&state_path, e))
    })?;
    let summary = outcome.stats.summary();
    if let Some(p) = &a.stats {
        write_atomic(p, |w| {
            w.write_all(summary.as_bytes()).map_err(|e| Error::io(p, e))
        })?;
    }
    print!("{summary}");
    for m in &outcome.stats.malformed_records {
        eprintln!("malformed record {}: {}", m.index, m.reason);
    }
    Ok(())
}

fn cmd_build(a: &BuildArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.extend(a.base.iter().cloned());
    info.inputs.extend(a.deltas.iter().cloned());
    info.inputs.extend(a.labels.iter().cloned());
    info.settings =
        json!({"prune_orphans": a.prune_orphans, "outlier_percentile": a.outlier_percentile});
    let mut g = match &a.base {
        Some(p) => load_graph(p)?,
        None => CommGraph::new(),
    };
    let mut delta = GraphDelta::default();
    for p in &a.deltas {
        delta.merge(&GraphDelta::read_from(open(p)?)?);
    }
    g.apply_delta_in_place(&delta);
    if let Some(p) = &a.labels {
        let claims = read_labels(open(p)?)?;
        let mut unknown = 0;
        for (n, c) in claims {
            // labels describe nodes; they never create them
            if g.contains(&n) {
                g.claim(n, c);
            } else {
                unknown += 1;
            }
        }
        if unknown > 0 {
            eprintln!("labels for {unknown} nodes absent from the graph were ignored");
        }
    }
    if let Some(pct) = a.outlier_percentile {
        if !(0.0..=100.0).contains(&pct) {
            return Err(Error::InvalidInput(format!(
                "outlier percentile {pct} outside [0, 100]"
            )));
        }
        g = g.remove_degree_outliers(pct);
    }
    if a.prune_orphans {
        g = g.remove_orphans();
    }
    write_atomic(&a.out, |w| g.save(w))?;
    println!(
        "nodes\t{}\nedges\t{}\ntotal_weight\t{}",
        g.node_count(),
        g.edge_count(),
        g.total_weight()
    );
    Ok(())
}

fn cmd_metrics(a: &MetricsArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.graph.clone());
    info.settings = json!({"damping": a.damping, "tol": a.tol, "max_iter": a.max_iter});
    let g = load_graph(&a.graph)?;
    let cfg = PageRankConfig {
        damping: a.damping,
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let metrics = compute_metrics(&g, cfg)?;
    write_atomic(&a.out, |w| write_metrics(&metrics, w))
}

fn cmd_communities(a: &CommunitiesArgs, seed: u64, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.graph.clone());
    info.seed = Some(seed);
    let method = match a.method {
        MethodArg::Lpa => Method::LabelPropagation,
        MethodArg::Louvain => Method::Louvain,
    };
    info.settings = json!({"method": format!("{method:?}"), "max_iter": a.max_iter});
    let g = load_graph(&a.graph)?;
    let p = detect(&g, method, seed, a.max_iter)?;
    write_atomic(&a.out, |w| p.write_to(w))?;
    let labels: BTreeMap<NodeId, Label> = g.labeled_nodes().map(|(n, l)| (n.clone(), l)).collect();
    let stats = community_stats(&p, &labels, 5)?;
    println!("communities\t{}", stats.community_count);
    println!("modularity\t{}", modularity(&g, &p));
    println!("mean_founders\t{}", stats.mean_founders);
    for (id, founders, size) in &stats.top {
        println!("top\t{id}\t{founders}\t{size}");
    }
    Ok(())
}

fn load_weights(
    a: &RankArgs,
    config_dir: Option<&Path>,
    info: &mut RunInfo,
) -> Result<BaselineWeights> {
    let path = a.weights.clone().or_else(|| {
        config_dir
            .map(|d| d.join(WEIGHTS_FILE))
            .filter(|p| p.exists())
    });
    match path {
        Some(p) => {
            info.inputs.push(p.clone());
            BaselineWeights::parse(&read_text(&p)?)
        }
        None => Ok(BaselineWeights::email()),
    }
}

fn read_identity_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut map = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        match (row.get(0), row.get(1)) {
            (Some(p), Some(a)) if !p.is_empty() && !a.is_empty() => {
                map.insert(p.to_string(), a.to_string());
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{}: rows need person_id,address",
                    path.display()
                )))
            }
        }
    }
    Ok(map)
}

/// Metrics for the ranking methods that need them: read from file, or
/// computed from the graph with any funding overlay applied.
fn rank_metrics(
    a: &RankArgs,
    info: &mut RunInfo,
) -> Result<(Option<CommGraph>, Vec<MetricVector>)> {
    if a.funding.is_some() && a.metrics.is_some() {
        return Err(Error::InvalidInput(
            "--funding needs metrics computed from the overlay graph, not --metrics".into(),
        ));
    }
    if let Some(p) = &a.metrics {
        info.inputs.push(p.clone());
        let g = a.graph.as_deref().map(load_graph).transpose()?;
        return Ok((g, read_metrics(open(p)?)?));
    }
    let gp = a
        .graph
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--graph or --metrics required".into()))?;
    let mut g = load_graph(gp)?;
    if let Some(fp) = &a.funding {
        info.inputs.push(fp.clone());
        let rec = read_funding_records(open(fp)?)?;
        let funding =
            build_funding_graph(&rec.investments, &rec.cofoundings, Some(&rec.coinvestings))?;
        let identity = match &a.identity {
            Some(ip) => {
                info.inputs.push(ip.clone());
                read_identity_map(ip)?
            }
            None => BTreeMap::new(),
        };
        g = overlay(&g, &funding, &identity)?;
    }
    let metrics = compute_metrics(&g, PageRankConfig::default())?;
    Ok((Some(g), metrics))
}

fn cmd_rank(a: &RankArgs, seed: u64, config_dir: Option<&Path>, info: &mut RunInfo) -> Result<()> {
    info.inputs.extend(a.graph.iter().cloned());
    info.inputs.extend(a.profiles.iter().cloned());
    let profiles: Option<Vec<FounderProfile>> = a
        .profiles
        .as_deref()
        .map(|p| read_profiles(open(p)?))
        .transpose()?;
    let need_profiles = || {
        profiles.as_deref().ok_or_else(|| {
            Error::InvalidInput(format!("--profiles required for {}", a.method.name()))
        })
    };
    let weights = match a.method {
        RankMethod::Baseline | RankMethod::Wfr => Some(load_weights(a, config_dir, info)?),
        _ => None,
    };
    info.settings = json!({
        "method": a.method.name(),
        "weights": weights.as_ref().map(|w| w.0.clone()),
        "funding_overlay": a.funding.is_some(),
    });
    let founders_of = |g: Option<&CommGraph>| -> Result<Vec<NodeId>> {
        match (&profiles, g) {
            (Some(p), _) => Ok(p.iter().map(|p| p.founder_id.clone()).collect()),
            (None, Some(g)) => Ok(g.nodes_with_label(Label::Founder)),
            (None, None) => Err(Error::InvalidInput("--profiles or --graph required".into())),
        }
    };
    let ranking = match a.method {
        RankMethod::Baseline => {
            baseline_rank(need_profiles()?, weights.as_ref().expect("loaded above"))?
        }
        RankMethod::FriBaseline => fri_baseline(need_profiles()?)?,
        RankMethod::Random => {
            info.seed = Some(seed);
            let g = match (&profiles, &a.graph) {
                (None, Some(p)) => Some(load_graph(p)?),
                _ => None,
            };
            random_rank(&founders_of(g.as_ref())?, seed)?
        }
        RankMethod::Nfr => {
            let (g, metrics) = rank_metrics(a, info)?;
            nfr_rank(&metrics, &founders_of(g.as_ref())?)?
        }
        RankMethod::Wfr => {
            let baseline =
                baseline_rank(need_profiles()?, weights.as_ref().expect("loaded above"))?;
            let (_, metrics) = rank_metrics(a, info)?;
            let (fit, ranking) = wfr_rank(&metrics, &baseline)?;
            for (name, c) in fit.feature_names.iter().zip(&fit.coefficients) {
                println!("coef\t{name}\t{c}");
            }
            println!("intercept\t{}", fit.intercept);
            println!("r_squared\t{}", fit.r_squared);
            ranking
        }
    };
    write_atomic(&a.out, |w| ranking.write_to(w, a.method.name()))
}

fn cmd_eval(a: &EvalArgs, seed: u64, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.candidate.clone());
    info.inputs.push(a.baseline.clone());
    info.seed = Some(seed);
    let gain = match a.gain {
        GainArg::Exponential => Gain::Exponential,
        GainArg::Linear => Gain::Linear,
    };
    info.settings = json!({"p_at": a.p_at, "trials": a.trials, "gain": format!("{gain:?}")});
    let x = Ranking::read_from(open(&a.candidate)?)?;
    let b = Ranking::read_from(open(&a.baseline)?)?;
    let opts = EvalOptions {
        precision_cutoffs: a.p_at.clone(),
        trials: a.trials,
        seed,
        gain,
    };
    let report = evaluate(&x, &b, &opts)?;
    write_atomic(&a.out, |w| report.write_to(w))
}

fn write_paths(paths: &[IntroPath], out: &mut dyn Write) -> Result<()> {
    let io = |e| Error::io("<paths>", e);
    writeln!(out, "hops\tstrength\tpath").map_err(io)?;
    for p in paths {
        let seq: Vec<&str> = p.nodes.iter().map(NodeId::as_str).collect();
        writeln!(
            out,
            "{}\t{}\t{}",
            p.hops(),
            p.total_strength,
            seq.join(" > ")
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn cmd_path(a: &PathArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.graph.clone());
    info.inputs.extend(a.catalog.iter().cloned());
    info.settings = json!({"from": a.from, "to": a.to, "max_hops": a.max_hops, "k": a.k});
    let g = load_graph(&a.graph)?;
    let node =
        |raw: &str| NodeId::new(normalize_address(raw).unwrap_or_else(|| raw.trim().to_string()));
    let from = node(&a.from);
    let paths = match (&a.catalog, a.to.contains('@')) {
        (Some(dir), false) => {
            let cat = Catalog::load(dir)?;
            let firm = cat
                .firm(&a.to)
                .ok_or_else(|| Error::InvalidInput(format!("unknown firm id {:?}", a.to)))?;
            let investors: Vec<NodeId> = firm
                .investors
                .iter()
                .filter_map(|i| i.email.as_deref())
                .map(NodeId::new)
                .filter(|n| g.contains(n))
                .collect();
            if investors.is_empty() {
                Vec::new()
            } else {
                firm_intro_paths(&g, &from, &investors, a.max_hops, a.k)?
            }
        }
        _ => top_intro_paths(&g, &from, &node(&a.to), a.max_hops, a.k)?,
    };
    match &a.out {
        Some(p) => write_atomic(p, |w| write_paths(&paths, w)),
        None => write_paths(&paths, &mut std::io::stdout().lock()),
    }
}

fn parse_sort(raw: &str) -> Result<ColumnSort> {
    let (col, desc) = match raw.split_once(':') {
        Some((c, "desc")) => (c, true),
        Some((c, "asc")) => (c, false),
        Some(_) => {
            return Err(Error::InvalidInput(format!(
                "bad sort {raw:?}; use column[:asc|:desc]"
            )))
        }
        None => (raw, false),
    };
    Ok(ColumnSort {
        column: col.parse::<SortColumn>()?,
        descending: desc,
    })
}

fn cmd_filter(a: &FilterArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.catalog.clone());
    let mut q = match &a.query {
        Some(p) => {
            info.inputs.push(p.clone());
            FilterQuery::from_toml(&read_text(p)?)?
        }
        None => FilterQuery::default(),
    };
    for s in &a.stages {
        q.stages.insert(s.parse::<FundStage>()?);
    }
    for i in &a.industries {
        q.industries.insert(i.parse::<Industry>()?);
    }
    q.industries_and |= a.industries_and;
    q.cities.extend(a.cities.iter().cloned());
    q.topics.extend(a.topics.iter().cloned());
    q.us_only |= a.us_only;
    if a.search.is_some() {
        q.search = a.search.clone();
    }
    if let Some(s) = &a.sort {
        q.sort = Some(parse_sort(s)?);
    }
    let founder = match &a.profile {
        Some(p) => {
            info.inputs.push(p.clone());
            toml::from_str::<FounderContext>(&read_text(p)?)
                .map_err(|e| Error::InvalidInput(format!("founder profile: {e}")))?
        }
        None => FounderContext::default(),
    };
    info.settings =
        json!({"query": serde_json::to_value(&q)?, "profile": serde_json::to_value(&founder)?});
    let cat = Catalog::load(&a.catalog)?;
    let firms = filter_and_search(&cat, &founder, &q)?;
    write_atomic(&a.out, |w| {
        let io = |e| Error::io("<results>", e);
        writeln!(w, "rank\tfirm_id\tname\thq_city\tpartner").map_err(io)?;
        for (i, f) in firms.iter().enumerate() {
            let partner = best_partner_match(f, &q)
                .map(|p| p.full_name())
                .unwrap_or_else(|| "-".into());
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                i + 1,
                f.firm_id,
                f.name,
                f.hq_city,
                partner
            )
            .map_err(io)?;
        }
        Ok(())
    })?;
    println!("matches\t{}", firms.len());
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.timelines.clone());
    let timelines = read_timelines(open(&a.timelines)?)?;
    let report = analyze(&timelines)?;
    write_atomic(&a.out, |w| report.write_to(w))
}

fn cmd_synth(a: &SynthArgs, seed: Option<u64>, info: &mut RunInfo) -> Result<()> {
    let mut spec = match &a.spec {
        Some(p) => {
            info.inputs.push(p.clone());
            SynthSpec::from_toml(&read_text(p)?)?
        }
        None => SynthSpec::default(),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    info.seed = Some(spec.seed);
    info.settings = serde_json::to_value(&spec)?;
    let world = generate(&spec)?;
    if a.out.exists() {
        let mut entries = std::fs::read_dir(&a.out).map_err(|e| Error::io(&a.out, e))?;
        if entries.next().is_some() {
            return Err(Error::InvalidInput(format!(
                "{} is not empty",
                a.out.display()
            )));
        }
    }
    // build beside the target and rename into place
    let parent = match a.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let tmp = tempfile::Builder::new()
        .prefix(".synth")
        .tempdir_in(&parent)
        .map_err(|e| Error::io(&parent, e))?;
    write_world(&world, tmp.path())?;
    if a.out.exists() {
        std::fs::remove_dir(&a.out).map_err(|e| Error::io(&a.out, e))?;
    }
    std::fs::rename(tmp.path(), &a.out).map_err(|e| Error::io(&a.out, e))?;
    let _ = tmp.keep();
    println!(
        "nodes\t{}\nedges\t{}\nevents\t{}\nfounders\t{}",
        world.graph.node_count(),
        world.graph.edge_count(),
        world.events.len(),
        world.profiles.len()
    );
    Ok(())
}

fn canonical_columns(kind: ImportKind) -> &'static [&'static str] {
    match kind {
        ImportKind::Firms => &FIRM_COLUMNS,
        ImportKind::Investors => &INVESTOR_COLUMNS,
        ImportKind::Companies => &COMPANY_COLUMNS,
    }
}

fn cmd_import(a: &ImportArgs, info: &mut RunInfo) -> Result<()> {
    info.inputs.push(a.csv.clone());
    info.settings = json!({"kind": format!("{:?}", a.kind)});
    if !a.mapping_preview && a.out.is_none() {
        return Err(Error::InvalidInput(
            "import needs --mapping-preview or --out".into(),
        ));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(open(&a.csv)?);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let canonical: Vec<String> = canonical_columns(a.kind)
        .iter()
        .map(|c| c.to_string())
        .collect();
    let mapping = guess_column_mapping(&headers, &canonical);
    if a.mapping_preview {
        let mut out = std::io::stdout().lock();
        let io = |e| Error::io("<stdout>", e);
        writeln!(out, "column\theader\tmaps_to").map_err(io)?;
        for (i, h) in headers.iter().enumerate() {
            writeln!(
                out,
                "{i}\t{h}\t{}",
                mapping.get(&i).map(String::as_str).unwrap_or("-")
            )
            .map_err(io)?;
        }
        let mapped: BTreeSet<&String> = mapping.values().collect();
        for c in canonical.iter().filter(|c| !mapped.contains(c)) {
            writeln!(out, "-\t-\t{c}").map_err(io)?;
        }
    }
    if let Some(out) = &a.out {
        let source: BTreeMap<&String, usize> = mapping.iter().map(|(i, c)| (c, *i)).collect();
        let rows: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
        write_atomic(out, |w| {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(&canonical)?;
            for row in &rows {
                cw.write_record(
                    canonical
                        .iter()
                        .map(|c| source.get(c).and_then(|&i| row.get(i)).unwrap_or("")),
                )?;
            }
            cw.flush().map_err(|e| Error::io("<import>", e))
        })?;
    }
    Ok(())
}

/// Reads a ranking file, for callers wiring subcommands together.
pub fn read_ranking(path: &Path) -> Result<Ranking> {
    Ranking::read_from(open(path)?)
}

/// Lines of a text file, for tests and examples that inspect outputs.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    open(path)?
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_hash_ignores_source_layout() {
        let a = FilterQuery::from_toml("us_only = true\nsearch = \"alpha\"\n").unwrap();
        let b = FilterQuery::from_toml("search   =   'alpha'\n\n# note\nus_only = true").unwrap();
        let h = |q: &FilterQuery| config_hash(&serde_json::to_value(q).unwrap());
        assert_eq!(h(&a), h(&b));
        let c = FilterQuery::from_toml("search = \"alpha\"").unwrap();
        assert_ne!(h(&a), h(&c));
    }

    #[test]
    fn sort_flag_parsing() {
        assert_eq!(
            parse_sort("pace:desc").unwrap(),
            ColumnSort {
                column: SortColumn::Pace,
                descending: true
            }
        );
        assert!(!parse_sort("firm").unwrap().descending);
        assert!(parse_sort("firm:sideways").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["founderrank", "frobnicate"]), 2);
        assert_eq!(run(["founderrank", "eval", "--candidate", "x"]), 2);
        assert_eq!(run(["founderrank", "--help"]), 0);
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, |w| w.write_all(b"first").map_err(|e| Error::io("t", e))).unwrap();
        let failed = write_atomic(&p, |w| {
            w.write_all(b"partial").map_err(|e| Error::io("t", e))?;
            Err(Error::InvalidInput("boom".into()))
        });
        assert!(failed.is_err());
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "first");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
