mod argv;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groupbias::ingest::{self, DatasetBundle, InputPaths};
use groupbias::model::validate_table;
use groupbias::report::{self, AnalysisConfig, OutputFormat};
use groupbias::stats;
use groupbias::synth::{self, SynthSpec};

/// Measures group bias in an attributed link graph and document corpus.
#[derive(Parser)]
#[command(name = "groupbias", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis and write a report.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic bundle with planted bias.
    Synth(SynthArgs),
    /// Load inputs and report ingest problems only.
    Validate(InputArgs),
    /// Run a single statistical test on supplied values.
    Stats(StatsArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Bundle directory in the standard layout; explicit paths override it.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[arg(long)]
    entities: Option<PathBuf>,
    /// Link file of one edition, `EDITION=PATH`; also `--edges-<edition> PATH`.
    #[arg(long = "edges", value_parser = argv::edition_path)]
    edges: Vec<(String, PathBuf)>,
    /// Corpus of one edition, `EDITION=PATH`; also `--corpus-<edition> PATH`.
    #[arg(long = "corpus", value_parser = argv::edition_path)]
    corpus: Vec<(String, PathBuf)>,
    #[arg(long)]
    featured: Option<PathBuf>,
    #[arg(long)]
    lexicons: Option<PathBuf>,
    #[arg(long)]
    external_ranking: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    CsvDir,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    inputs: InputArgs,
    /// Comma-separated editions; default all editions in the entity table.
    #[arg(long, value_delimiter = ',')]
    editions: Vec<String>,
    /// Comma-separated reference datasets; default all.
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, default_value = "female")]
    minority: String,
    #[arg(long, default_value = "male")]
    majority: String,
    #[arg(long, default_value_t = 10_000)]
    null_runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (json) or directory (csv-dir); json goes to stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    dedupe_edges: bool,
    #[arg(long)]
    token_frequency: bool,
    #[arg(long)]
    yates: bool,
    #[arg(long, default_value_t = groupbias::lexical::DEFAULT_MIN_DF)]
    min_df: u64,
    #[arg(long, default_value_t = groupbias::lexical::DEFAULT_TOP_N)]
    top_n: usize,
    #[arg(long)]
    visibility_edition: Option<String>,
    #[arg(long)]
    visibility_dataset: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON generator spec; missing fields take defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Nodes per group, minority first: `N_MINORITY,N_MAJORITY`.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    #[arg(long)]
    assortativity: Option<f64>,
    #[arg(long)]
    asymmetry: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    editions: Option<Vec<String>>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum TestKind {
    ChiSquare,
    Wilcoxon,
    Ks,
    Spearman,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(value_enum)]
    test: TestKind,
    /// 2×2 counts `a,b,c,d` for chi-square.
    #[arg(long, value_delimiter = ',')]
    table: Vec<u64>,
    #[arg(long)]
    yates: bool,
    /// First sample, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    /// Second sample, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    /// TSV file to read the samples from, using `--x-col` and `--y-col`.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    x_col: Option<String>,
    #[arg(long)]
    y_col: Option<String>,
}

/// Exit codes: fatal config or input error, partial section failure.
const FATAL: u8 = 1;
const PARTIAL: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(n) = std::env::var("GROUPBIAS_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring GROUPBIAS_THREADS={n:?}"),
        }
    }
    let cli = Cli::parse_from(argv::expand(std::env::args()));
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Stats(a) => stats_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(FATAL)
        }
    }
}

fn input_paths(args: &InputArgs) -> Result<InputPaths, String> {
    let mut paths = match (&args.bundle, &args.entities) {
        (_, Some(entities)) => {
            let mut p = match &args.bundle {
                Some(dir) => bundle_paths(dir)?,
                None => InputPaths {
                    entities: entities.clone(),
                    edges: BTreeMap::new(),
                    corpus: BTreeMap::new(),
                    featured: None,
                    lexicons: None,
                    external_ranking: None,
                },
            };
            p.entities = entities.clone();
            p
        }
        (Some(dir), None) => bundle_paths(dir)?,
        (None, None) => return Err("need --entities or --bundle".into()),
    };
    paths.edges.extend(args.edges.iter().cloned());
    paths.corpus.extend(args.corpus.iter().cloned());
    for (slot, given) in [
        (&mut paths.featured, &args.featured),
        (&mut paths.lexicons, &args.lexicons),
        (&mut paths.external_ranking, &args.external_ranking),
    ] {
        if given.is_some() {
            *slot = given.clone();
        }
    }
    Ok(paths)
}

fn bundle_paths(dir: &Path) -> Result<InputPaths, String> {
    let (table, _) = ingest::load_entities(&dir.join(ingest::layout::ENTITIES)).map_err(|e| e.to_string())?;
    Ok(InputPaths::from_dir(dir, table.editions()))
}

fn load(args: &InputArgs) -> Result<(DatasetBundle, InputPaths), String> {
    let paths = input_paths(args)?;
    let (bundle, issues) = ingest::load_bundle(&paths).map_err(|e| e.to_string())?;
    if !issues.is_empty() {
        log::warn!("{} input issue(s):\n{issues}", issues.len());
    }
    Ok((bundle, paths))
}

fn analyze(a: AnalyzeArgs) -> Result<u8, String> {
    let (bundle, paths) = load(&a.inputs)?;
    let table = &bundle.table;
    let editions = if a.editions.is_empty() {
        table.editions().to_vec()
    } else {
        a.editions
    };
    let datasets = if a.datasets.is_empty() {
        table.datasets().into_iter().map(String::from).collect()
    } else {
        a.datasets
    };
    let config = AnalysisConfig {
        editions,
        datasets,
        minority: a.minority,
        majority: a.majority,
        n_null_runs: a.null_runs,
        seed: a.seed,
        min_df: a.min_df,
        top_n: a.top_n,
        dedupe_edges: a.dedupe_edges,
        token_frequency: a.token_frequency,
        yates: a.yates,
        visibility_edition: a.visibility_edition,
        visibility_dataset: a.visibility_dataset,
    };
    let hashes = report::hash_files(&paths.named()).map_err(|e| e.to_string())?;
    let rep = report::run_pipeline(&config, &bundle, hashes).map_err(|e| e.to_string())?;
    match (a.format, &a.out) {
        (Format::Json, None) => {
            let json = report::to_json(&rep).map_err(|e| e.to_string())?;
            io::stdout().write_all(json.as_bytes()).map_err(|e| e.to_string())?;
        }
        (Format::Json, Some(out)) => {
            report::emit(&rep, OutputFormat::Json, out).map_err(|e| e.to_string())?;
        }
        (Format::CsvDir, Some(out)) => {
            report::emit(&rep, OutputFormat::CsvDir, out).map_err(|e| e.to_string())?;
        }
        (Format::CsvDir, None) => return Err("--format csv-dir needs --out DIR".into()),
    }
    eprint!("{}", report::summary_text(&rep));
    Ok(if rep.any_failed() { PARTIAL } else { 0 })
}

fn synth_cmd(a: SynthArgs) -> Result<u8, String> {
    let mut spec = match &a.spec {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => SynthSpec::default(),
    };
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(n) = a.nodes {
        spec.n_nodes = n;
    }
    if let Some(r) = a.assortativity {
        spec.target_assortativity = r;
    }
    if let Some(x) = a.asymmetry {
        spec.target_asymmetry = x;
    }
    if let Some(e) = a.editions {
        spec.editions = e;
    }
    let out = synth::generate(&spec).map_err(|e| e.to_string())?;
    ingest::write_bundle(&out.bundle, &a.out).map_err(|e| e.to_string())?;
    let planted = serde_json::json!({ "spec": spec, "planted": out.planted });
    let path = a.out.join("planted.json");
    fs::write(&path, serde_json::to_string_pretty(&planted).unwrap() + "\n")
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(0)
}

fn validate(a: InputArgs) -> Result<u8, String> {
    let paths = input_paths(&a)?;
    let (bundle, issues) = ingest::load_bundle(&paths).map_err(|e| e.to_string())?;
    let findings = validate_table(&bundle.table);
    let mut out = io::stdout().lock();
    let _ = write!(out, "{issues}");
    for f in &findings {
        let _ = writeln!(out, "{}: {:?}: {}", f.entity.as_deref().unwrap_or("-"), f.rule, f.message);
    }
    let t = &bundle.table;
    let _ = writeln!(
        out,
        "{} entities, {} groups, editions {}, {} issue(s), {} finding(s)",
        t.len(),
        t.n_groups(),
        t.editions().join(","),
        issues.len(),
        findings.len()
    );
    Ok(if issues.is_empty() && findings.is_empty() { 0 } else { PARTIAL })
}

/// Reads a numeric TSV column; blank cells are skipped.
fn tsv_column(path: &Path, name: &str) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split('\t').collect();
    let col = header
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| format!("{}: no column {name:?}", path.display()))?;
    lines
        .enumerate()
        .filter_map(|(i, line)| {
            let cell = line.split('\t').nth(col).unwrap_or("").trim();
            (!cell.is_empty()).then(|| {
                cell.parse::<f64>()
                    .map_err(|_| format!("{}:{}: not a number: {cell:?}", path.display(), i + 2))
            })
        })
        .collect()
}

fn stats_cmd(a: StatsArgs) -> Result<u8, String> {
    let sample = |inline: &[f64], col: &Option<String>| -> Result<Vec<f64>, String> {
        match (&a.file, col) {
            (Some(f), Some(c)) => tsv_column(f, c),
            _ => Ok(inline.to_vec()),
        }
    };
    let result = match a.test {
        TestKind::ChiSquare => {
            let [x, y, z, w] = a.table[..] else {
                return Err("chi-square needs --table a,b,c,d".into());
            };
            stats::chi_square_2x2(x, y, z, w, a.yates)
        }
        kind => {
            let (x, y) = (sample(&a.x, &a.x_col)?, sample(&a.y, &a.y_col)?);
            match kind {
                TestKind::Wilcoxon => stats::wilcoxon_rank_sum(&x, &y),
                TestKind::Ks => stats::ks_two_sample(&x, &y),
                _ => stats::spearman(&x, &y),
            }
        }
    }
    .map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string_pretty(&result).unwrap());
    Ok(0)
}
