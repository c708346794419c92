//! Runs every analysis over a bundle and writes the results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coverage::{coverage_report, CoverageReport};
use crate::ingest::DatasetBundle;
use crate::lexical::{
    category_report, CategoryReport, CountMode, LexicalModel, LexicalOptions, StemmerRegistry, TokenizedCorpus,
    DEFAULT_MIN_DF, DEFAULT_TOP_N,
};
use crate::model::{GroupId, GroupRoles};
use crate::stats::{self, TestResult, MIN_ENVELOPE_RUNS};
use crate::structural::{centrality_profile, structural_analysis, CentralityProfile, StructuralResult};
use crate::visibility::{visibility_analysis, VisibilityReport};

/// Bumped whenever a serialized report field changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cross-lingual correlation needs at least 3 editions, got {0}")]
    TooFewEditions(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub editions: Vec<String>,
    pub datasets: Vec<String>,
    pub minority: String,
    pub majority: String,
    pub n_null_runs: usize,
    pub seed: u64,
    pub min_df: u64,
    pub top_n: usize,
    pub dedupe_edges: bool,
    pub token_frequency: bool,
    pub yates: bool,
    /// Edition and dataset of the visibility analysis; default to the
    /// first configured ones.
    pub visibility_edition: Option<String>,
    pub visibility_dataset: Option<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            editions: Vec::new(),
            datasets: Vec::new(),
            minority: "female".into(),
            majority: "male".into(),
            n_null_runs: 10_000,
            seed: 0,
            min_df: DEFAULT_MIN_DF,
            top_n: DEFAULT_TOP_N,
            dedupe_edges: false,
            token_frequency: false,
            yates: false,
            visibility_edition: None,
            visibility_dataset: None,
        }
    }
}

impl AnalysisConfig {
    /// Checks the config against the bundle and resolves the group roles.
    pub fn validate(&self, bundle: &DatasetBundle) -> Result<GroupRoles, ReportError> {
        let bad = |m: String| Err(ReportError::Config(m));
        let table = &bundle.table;
        let group = |name: &str| {
            table.group_by_name(name).ok_or_else(|| {
                let known: Vec<&str> = table.groups().iter().map(|g| g.name.as_str()).collect();
                ReportError::Config(format!("group {name:?} not in table (known: {})", known.join(", ")))
            })
        };
        let roles = GroupRoles::new(group(&self.minority)?, group(&self.majority)?);
        if roles.minority == roles.majority {
            return bad("minority and majority must be different groups".into());
        }
        if self.n_null_runs < MIN_ENVELOPE_RUNS {
            return bad(format!("n_null_runs must be at least {MIN_ENVELOPE_RUNS}, got {}", self.n_null_runs));
        }
        if self.top_n == 0 {
            return bad("top_n must be positive".into());
        }
        if self.editions.is_empty() {
            return bad("no editions configured".into());
        }
        if self.datasets.is_empty() {
            return bad("no datasets configured".into());
        }
        for ed in self.editions.iter().chain(&self.visibility_edition) {
            if !table.editions().contains(ed) {
                return bad(format!("edition {ed:?} not in entity table"));
            }
        }
        for ds in self.datasets.iter().chain(&self.visibility_dataset) {
            if !table.has_dataset(ds) {
                return bad(format!("dataset {ds:?} not in entity table"));
            }
        }
        Ok(roles)
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

/// Outcome of one report section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section<T> {
    Populated(T),
    /// Required input is absent.
    Skipped { reason: String },
    /// The analysis ran and returned an error.
    Failed { error: String },
}

impl<T> Section<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Populated(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Section::Failed { .. })
    }

    fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Section::Populated(v),
            Err(e) => Section::Failed { error: e.to_string() },
        }
    }

    fn skipped(reason: impl Into<String>) -> Self {
        Section::Skipped { reason: reason.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexicalRow {
    pub group: String,
    pub rank: usize,
    pub stem: String,
    pub score: f64,
    /// ln(P(stem | group) / P(stem)); `None` stands for −∞.
    pub llr: Option<f64>,
    /// Odds of the minority over the majority given the stem; `None` when
    /// the stem never occurs in the majority.
    pub posterior_odds: Option<f64>,
    pub category: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexicalSummary {
    pub doc_counts: Vec<usize>,
    pub vocabulary: usize,
    pub classifier_vocabulary: usize,
    pub rows: Vec<LexicalRow>,
    pub categories: CategoryReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossDimension {
    pub dimension: String,
    pub scalars: BTreeMap<String, f64>,
    pub test: Option<TestResult>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossLingual {
    pub external: BTreeMap<String, f64>,
    pub dimensions: Vec<CrossDimension>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub schema_version: u32,
    pub config_sha256: String,
    pub bundle_sha256: String,
    /// Role name (`entities`, `edges_en`, …) to file digest.
    pub input_files: BTreeMap<String, String>,
}

/// A published full-corpus figure kept next to the results for orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub dimension: String,
    pub quantity: String,
    pub published: String,
    pub reproducible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub config: AnalysisConfig,
    pub groups: Vec<String>,
    pub coverage: Section<CoverageReport>,
    pub structural: BTreeMap<String, Section<StructuralResult>>,
    pub centrality: BTreeMap<String, Section<CentralityProfile>>,
    pub lexical: BTreeMap<String, Section<LexicalSummary>>,
    pub visibility: Section<VisibilityReport>,
    pub cross_lingual: Section<CrossLingual>,
    pub provenance: Provenance,
    pub comparison_points: Vec<ComparisonPoint>,
}

impl BiasReport {
    pub fn any_failed(&self) -> bool {
        self.coverage.is_failed()
            || self.structural.values().any(Section::is_failed)
            || self.centrality.values().any(Section::is_failed)
            || self.lexical.values().any(Section::is_failed)
            || self.visibility.is_failed()
            || self.cross_lingual.is_failed()
    }
}

fn comparison_points() -> Vec<ComparisonPoint> {
    let p = |dimension: &str, quantity: &str, published: &str| ComparisonPoint {
        dimension: dimension.into(),
        quantity: quantity.into(),
        published: published.into(),
        reproducible: false,
    };
    vec![
        p("lexical", "en posterior odds of \"husband\" toward women", "9.2"),
        p("lexical", "en posterior odds of \"basebal\" toward men", "11.5"),
        p("lexical", "share of women's top-150 stems in a lexicon category, per edition", "0.23 to 0.32"),
        p("lexical", "share of men's top-150 stems in a lexicon category, per edition", "0.00 to 0.04"),
        p(
            "structural",
            "in-degree Wilcoxon direction (women vs men) en/es/de/fr/it/ru",
            "- + - - - -",
        ),
        p(
            "structural",
            "in-k-core Wilcoxon direction (women vs men) en/es/de/fr/it/ru",
            "- + - - + -",
        ),
        p(
            "structural",
            "in-degree Wilcoxon p-value bound en/es/de/fr/it/ru",
            "1e-15 / 0.17 / 1e-15 / 1e-9 / 1e-6 / 1e-4",
        ),
        p(
            "structural",
            "in-degree KS p-value bound en/es/de/fr/it/ru",
            "1e-15 / 0.02 / 1e-15 / 1e-5 / 1e-3 / 1e-7",
        ),
        p(
            "structural",
            "in-k-core Wilcoxon p-value bound en/es/de/fr/it/ru",
            "0.03 / 1e-4 / 1e-12 / 0.07 / 0.95 / 0.55",
        ),
        p(
            "structural",
            "in-k-core KS p-value bound en/es/de/fr/it/ru",
            "1e-4 / 1e-4 / 1e-8 / 0.09 / 1e-4 / 0.003",
        ),
        p(
            "cross_lingual",
            "Spearman vs external index: coverage / structural / lexical",
            "0.89 / 0.37 / 0.09",
        ),
        p("coverage", "en Jaccard of covered people, freebase/HA, freebase/pantheon, pantheon/HA", "0.016 / 0.035 / 0.097"),
    ]
}

/// Digest of the bundle contents in a canonical serialization.
pub fn bundle_sha256(bundle: &DatasetBundle) -> String {
    let t = &bundle.table;
    let groups: Vec<&str> = t.groups().iter().map(|g| g.name.as_str()).collect();
    let graphs: BTreeMap<&String, Vec<(String, String)>> =
        bundle.graphs.iter().map(|(ed, g)| (ed, g.edge_ids(t))).collect();
    let canonical = serde_json::to_vec(&(
        groups,
        t.editions(),
        t.entities(),
        graphs,
        &bundle.corpus,
        &bundle.featured_log,
        &bundle.lexicons,
        &bundle.external_ranking,
    ))
    .expect("bundle serializes");
    hex::encode(Sha256::digest(canonical))
}

/// SHA-256 of each named file.
pub fn hash_files(files: &[(String, PathBuf)]) -> Result<BTreeMap<String, String>, ReportError> {
    files
        .iter()
        .map(|(role, path)| {
            let bytes = fs::read(path).map_err(|source| ReportError::Io {
                path: path.clone(),
                source,
            })?;
            Ok((role.clone(), hex::encode(Sha256::digest(bytes))))
        })
        .collect()
}

fn lexical_section(
    config: &AnalysisConfig,
    bundle: &DatasetBundle,
    roles: GroupRoles,
    edition: &str,
    registry: &StemmerRegistry,
) -> Section<LexicalSummary> {
    let docs = match bundle.corpus.get(edition) {
        Some(d) if !d.is_empty() => d,
        _ => return Section::skipped(format!("no corpus for edition {edition}")),
    };
    let table = &bundle.table;
    let names: Vec<String> = table.groups().iter().map(|g| g.name.clone()).collect();
    let corpus = TokenizedCorpus::build(docs, table, edition, registry);
    let opts = LexicalOptions {
        min_df: config.min_df,
        mode: if config.token_frequency {
            CountMode::TokenFrequency
        } else {
            CountMode::Presence
        },
    };
    let model = match LexicalModel::train(&corpus, edition, &names, roles, &opts) {
        Ok(m) => m,
        Err(e) => return Section::Failed { error: e.to_string() },
    };
    let role_groups = [roles.minority, roles.majority];
    let categories = category_report(&model.ranking, &bundle.lexicons, config.top_n, &role_groups);
    let mut rows = Vec::new();
    for g in role_groups {
        let favored = model.ranking.iter().filter(|r| r.favored == g).take(config.top_n);
        for (i, r) in favored.enumerate() {
            let lik = model.likelihoods.get(&r.stem);
            rows.push(LexicalRow {
                group: table.group_name(g).to_string(),
                rank: i + 1,
                stem: r.stem.clone(),
                score: r.score,
                llr: lik.and_then(|l| l.llr[g.0]),
                posterior_odds: lik.and_then(|l| l.posterior_odds),
                category: bundle.lexicons.category(&r.stem).name().to_string(),
            });
        }
    }
    Section::Populated(LexicalSummary {
        doc_counts: model.doc_counts.clone(),
        vocabulary: corpus.vocab.len(),
        classifier_vocabulary: model.classifier.vocab.len(),
        rows,
        categories,
    })
}

/// Spearman correlation between the external ranking and each dimension's
/// per-edition scalar: coverage gap ratio (first dataset), asymmetry, and
/// the minority's in-category share of its top stems.
pub fn cross_lingual_correlation(
    report: &BiasReport,
    external: &BTreeMap<String, f64>,
) -> Result<CrossLingual, ReportError> {
    let editions = &report.config.editions;
    if editions.len() < 3 {
        return Err(ReportError::TooFewEditions(editions.len()));
    }
    let minority = &report.config.minority;
    let mut coverage = BTreeMap::new();
    if let (Some(c), Some(ds)) = (report.coverage.value(), report.config.datasets.first()) {
        for ed in editions {
            if let Some(gap) = c.cell(ds, ed).and_then(|cell| cell.gap_ratio) {
                coverage.insert(ed.clone(), gap);
            }
        }
    }
    let structural: BTreeMap<String, f64> = report
        .structural
        .iter()
        .filter_map(|(ed, s)| Some((ed.clone(), s.value()?.asymmetry?)))
        .collect();
    let lexical: BTreeMap<String, f64> = report
        .lexical
        .iter()
        .filter_map(|(ed, s)| {
            let minority_id = report.groups.iter().position(|g| g == minority)?;
            let share = s.value()?.categories.group(GroupId(minority_id))?.in_category_share();
            Some((ed.clone(), share))
        })
        .collect();

    let dimensions = [("coverage", coverage), ("structural", structural), ("lexical", lexical)]
        .into_iter()
        .map(|(name, scalars)| {
            let eds: Vec<&String> = scalars.keys().filter(|e| external.contains_key(*e)).collect();
            let (test, note) = if eds.len() < 3 {
                (None, Some(format!("only {} edition(s) with both values", eds.len())))
            } else {
                let x: Vec<f64> = eds.iter().map(|e| scalars[*e]).collect();
                let y: Vec<f64> = eds.iter().map(|e| external[*e]).collect();
                match stats::spearman(&x, &y) {
                    Ok(t) => (Some(t), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            };
            CrossDimension {
                dimension: name.to_string(),
                scalars,
                test,
                note,
            }
        })
        .collect();
    Ok(CrossLingual {
        external: external.clone(),
        dimensions,
    })
}

/// Runs coverage, structural, lexical, visibility and cross-lingual
/// analyses in that order. Only an invalid config is fatal; a section that
/// fails is recorded as such and the rest still run.
pub fn run_pipeline(
    config: &AnalysisConfig,
    bundle: &DatasetBundle,
    input_files: BTreeMap<String, String>,
) -> Result<BiasReport, ReportError> {
    let roles = config.validate(bundle)?;
    let table = &bundle.table;
    let registry = StemmerRegistry::default();

    log::info!("coverage");
    let coverage = Section::from_result(coverage_report(table, &config.datasets, &config.editions, roles, config.yates));

    let mut structural = BTreeMap::new();
    let mut centrality = BTreeMap::new();
    for ed in &config.editions {
        let Some(graph) = bundle.graphs.get(ed) else {
            structural.insert(ed.clone(), Section::skipped(format!("no link graph for edition {ed}")));
            centrality.insert(ed.clone(), Section::skipped(format!("no link graph for edition {ed}")));
            continue;
        };
        let graph = if config.dedupe_edges {
            graph.deduplicated()
        } else {
            graph.clone()
        };
        log::info!("structural {ed}: {} nodes, {} edges", graph.n_nodes(), graph.n_edges());
        structural.insert(
            ed.clone(),
            Section::from_result(structural_analysis(&graph, table, roles, config.n_null_runs, config.seed)),
        );
        centrality.insert(ed.clone(), Section::from_result(centrality_profile(&graph, table, roles)));
    }

    let mut lexical = BTreeMap::new();
    for ed in &config.editions {
        log::info!("lexical {ed}");
        lexical.insert(ed.clone(), lexical_section(config, bundle, roles, ed, &registry));
    }

    log::info!("visibility");
    let vis_edition = config.visibility_edition.as_ref().unwrap_or(&config.editions[0]);
    let vis_dataset = config.visibility_dataset.as_ref().unwrap_or(&config.datasets[0]);
    let visibility = if bundle.featured_log.is_empty() {
        Section::skipped("no featured log")
    } else {
        Section::from_result(visibility_analysis(
            table,
            &bundle.featured_log,
            vis_dataset,
            vis_edition,
            roles,
            config.yates,
        ))
    };

    let mut report = BiasReport {
        config: config.clone(),
        groups: table.groups().iter().map(|g| g.name.clone()).collect(),
        coverage,
        structural,
        centrality,
        lexical,
        visibility,
        cross_lingual: Section::skipped("pending"),
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            config_sha256: config.sha256(),
            bundle_sha256: bundle_sha256(bundle),
            input_files,
        },
        comparison_points: comparison_points(),
    };
    report.cross_lingual = match &bundle.external_ranking {
        None => Section::skipped("no external ranking"),
        Some(_) if config.editions.len() < 3 => Section::skipped(format!(
            "needs at least 3 editions, {} configured",
            config.editions.len()
        )),
        Some(ext) => Section::from_result(cross_lingual_correlation(&report, ext)),
    };
    Ok(report)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    CsvDir,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(OutputFormat::Json),
            "csv-dir" | "csv" => Some(OutputFormat::CsvDir),
            _ => None,
        }
    }
}

/// Canonical JSON: keys sorted, pretty-printed, trailing newline.
pub fn to_json(report: &BiasReport) -> Result<String, ReportError> {
    let value = serde_json::to_value(report)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(report: &BiasReport, format: OutputFormat, path: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let io = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    match format {
        OutputFormat::Json => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io)?;
            }
            let mut f = fs::File::create(path).map_err(io)?;
            f.write_all(to_json(report)?.as_bytes()).map_err(io)?;
            Ok(vec![path.to_path_buf()])
        }
        OutputFormat::CsvDir => {
            fs::create_dir_all(path).map_err(io)?;
            let mut written = Vec::new();
            for table in csv_tables(report) {
                let file = path.join(format!("{}.csv", table.name));
                let csv_err = |source| ReportError::Csv {
                    path: file.clone(),
                    source,
                };
                let mut w = csv::Writer::from_path(&file).map_err(csv_err)?;
                w.write_record(&table.header).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.flush().map_err(|source| ReportError::Io {
                    path: file.clone(),
                    source,
                })?;
                written.push(file);
            }
            Ok(written)
        }
    }
}

/// One flat CSV file: key columns followed by `measure,value`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    fn new(name: impl Into<String>, keys: &[&str]) -> Self {
        let mut header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        header.extend(["measure".to_string(), "value".to_string()]);
        CsvTable {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, keys: &[&str], measure: &str, value: String) {
        let mut row: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        row.push(measure.to_string());
        row.push(value);
        self.rows.push(row);
    }

    fn push_test(&mut self, keys: &[&str], prefix: &str, t: &TestResult) {
        self.push(keys, &format!("{prefix}_statistic"), num(t.statistic));
        self.push(keys, &format!("{prefix}_p_value"), num(t.p_value));
        self.push(keys, &format!("{prefix}_direction"), t.direction.symbol().to_string());
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Undefined statistic.
fn or_undefined(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "undefined".into())
}

/// A missing log ratio is a log of zero.
fn or_neg_inf(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-inf".into())
}

/// The flat tables of every populated section, in a fixed order.
pub fn csv_tables(report: &BiasReport) -> Vec<CsvTable> {
    let group = |g: GroupId| report.groups.get(g.0).cloned().unwrap_or_else(|| g.to_string());
    let mut out = Vec::new();

    if let Some(c) = report.coverage.value() {
        let mut t = CsvTable::new("coverage", &["edition", "dataset", "group"]);
        for cell in &c.cells {
            let (ed, ds) = (cell.edition.as_str(), cell.dataset.as_str());
            for gc in &cell.groups {
                let k = [ed, ds, &group(gc.group)];
                t.push(&k, "n_reference", gc.n_reference.to_string());
                t.push(&k, "n_covered", gc.n_covered.to_string());
                t.push(&k, "proportion", num(gc.proportion));
            }
            for l in &cell.lengths {
                let k = [ed, ds, &group(l.group)];
                for (m, v) in [("length_min", l.min), ("length_q1", l.q1), ("length_median", l.median), ("length_q3", l.q3), ("length_max", l.max)] {
                    t.push(&k, m, v.to_string());
                }
            }
            t.push(&[ed, ds, ""], "gap_ratio", or_undefined(cell.gap_ratio));
            if let Some(test) = &cell.test {
                t.push_test(&[ed, ds, ""], "chi_square", test);
            }
        }
        for j in &c.jaccard {
            t.push(&[&j.edition, &format!("{}|{}", j.d1, j.d2), ""], "jaccard", or_undefined(j.jaccard));
        }
        out.push(t);
    }

    for (ed, s) in &report.structural {
        let Some(r) = s.value() else { continue };
        let mut t = CsvTable::new(format!("structural_{ed}"), &["model", "from", "to"]);
        let g = r.matrix.n_groups();
        for a in 0..g {
            for b in 0..g {
                let k = ["", &group(GroupId(a)), &group(GroupId(b))];
                t.push(&k, "edge_count", r.matrix.edge_counts[a][b].to_string());
                t.push(&k, "L", or_undefined(r.matrix.l[a][b]));
            }
        }
        t.push(&["", "", ""], "assortativity", num(r.assortativity));
        t.push(&["", "", ""], "asymmetry", or_undefined(r.asymmetry));
        for env in &r.null_envelopes {
            let k = [env.model.name(), "", ""];
            for (stat, e, sig, undef) in [
                ("assortativity", &env.assortativity, env.assortativity_significant, env.undefined_assortativity),
                ("asymmetry", &env.asymmetry, env.asymmetry_significant, env.undefined_asymmetry),
            ] {
                t.push(&k, &format!("{stat}_mean"), or_undefined(e.map(|e| e.mean)));
                t.push(&k, &format!("{stat}_ci_low"), or_undefined(e.map(|e| e.ci_low)));
                t.push(&k, &format!("{stat}_ci_high"), or_undefined(e.map(|e| e.ci_high)));
                t.push(&k, &format!("{stat}_significant"), sig.map(|b| b.to_string()).unwrap_or_else(|| "undefined".into()));
                t.push(&k, &format!("{stat}_undefined_runs"), undef.to_string());
            }
        }
        out.push(t);
    }

    for (ed, s) in &report.centrality {
        let Some(p) = s.value() else { continue };
        let mut t = CsvTable::new(format!("centrality_{ed}"), &["metric", "group", "t"]);
        for gc in &p.groups {
            for (metric, ccdf) in [("in_degree", &gc.in_degree_ccdf), ("in_kcore", &gc.in_kcore_ccdf)] {
                for pt in ccdf {
                    t.push(&[metric, &group(gc.group), &pt.t.to_string()], "ccdf", num(pt.p));
                }
            }
        }
        t.push_test(&["in_degree", "", ""], "wilcoxon", &p.in_degree_wilcoxon);
        t.push_test(&["in_degree", "", ""], "ks", &p.in_degree_ks);
        t.push_test(&["in_kcore", "", ""], "wilcoxon", &p.in_kcore_wilcoxon);
        t.push_test(&["in_kcore", "", ""], "ks", &p.in_kcore_ks);
        out.push(t);
    }

    for (ed, s) in &report.lexical {
        let Some(l) = s.value() else { continue };
        let mut t = CsvTable::new(format!("lexical_{ed}"), &["group", "rank", "stem"]);
        for r in &l.rows {
            let rank = r.rank.to_string();
            let k = [r.group.as_str(), rank.as_str(), r.stem.as_str()];
            t.push(&k, "score", num(r.score));
            t.push(&k, "llr", or_neg_inf(r.llr));
            t.push(&k, "posterior_odds", r.posterior_odds.map(num).unwrap_or_else(|| "inf".into()));
            t.push(&k, "category", r.category.clone());
        }
        for gc in &l.categories.groups {
            let name = group(gc.group);
            for pt in &gc.curve {
                let n = pt.n.to_string();
                for (c, share) in crate::lexical::Category::ALL.iter().zip(pt.proportions) {
                    t.push(&[&name, &n, ""], &format!("share_{}", c.name().to_lowercase()), num(share));
                }
            }
        }
        out.push(t);
    }

    if let Some(v) = report.visibility.value() {
        let mut t = CsvTable::new("visibility", &["year", "group"]);
        for row in v.years.iter().chain(std::iter::once(&v.pooled)) {
            let year = row.year.map(|y| y.to_string()).unwrap_or_else(|| "pooled".into());
            for gv in &row.groups {
                let k = [year.as_str(), &group(gv.group)];
                t.push(&k, "n_covered", gv.n_covered.to_string());
                t.push(&k, "n_featured", gv.n_featured.to_string());
                t.push(&k, "proportion", num(gv.proportion));
            }
            match &row.test {
                crate::visibility::TestOutcome::Tested(r) => t.push_test(&[&year, ""], "chi_square", r),
                crate::visibility::TestOutcome::Degenerate(why) => t.push(&[&year, ""], "chi_square", format!("undefined: {why}")),
            }
        }
        out.push(t);
    }

    if let Some(c) = report.cross_lingual.value() {
        let mut t = CsvTable::new("cross_lingual", &["dimension", "edition"]);
        for (ed, v) in &c.external {
            t.push(&["external", ed], "value", num(*v));
        }
        for d in &c.dimensions {
            for (ed, v) in &d.scalars {
                t.push(&[&d.dimension, ed], "value", num(*v));
            }
            match &d.test {
                Some(test) => t.push_test(&[&d.dimension, ""], "spearman", test),
                None => t.push(&[&d.dimension, ""], "spearman", format!("undefined: {}", d.note.clone().unwrap_or_default())),
            }
        }
        out.push(t);
    }

    let mut t = CsvTable::new("provenance", &["item"]);
    let p = &report.provenance;
    t.push(&["tool"], "version", p.tool_version.clone());
    t.push(&["schema"], "version", p.schema_version.to_string());
    t.push(&["config"], "sha256", p.config_sha256.clone());
    t.push(&["bundle"], "sha256", p.bundle_sha256.clone());
    for (role, h) in &p.input_files {
        t.push(&[role], "sha256", h.clone());
    }
    out.push(t);

    let mut t = CsvTable::new("comparison_points", &["dimension", "quantity", "reproducible"]);
    for c in &report.comparison_points {
        t.push(&[&c.dimension, &c.quantity, &c.reproducible.to_string()], "published", c.published.clone());
    }
    out.push(t);
    out
}

/// Short human-readable overview for terminals.
pub fn summary_text(report: &BiasReport) -> String {
    let mut s = String::new();
    let status = |f: bool, ok: bool| if f { "failed" } else if ok { "ok" } else { "skipped" };
    let _ = writeln!(s, "coverage: {}", status(report.coverage.is_failed(), report.coverage.value().is_some()));
    for (ed, sec) in &report.structural {
        match sec {
            Section::Populated(r) => {
                let _ = writeln!(
                    s,
                    "structural {ed}: assortativity {:.4}, asymmetry {}",
                    r.assortativity,
                    r.asymmetry.map(|a| format!("{a:.4}")).unwrap_or_else(|| "undefined".into())
                );
            }
            Section::Skipped { reason } => {
                let _ = writeln!(s, "structural {ed}: skipped ({reason})");
            }
            Section::Failed { error } => {
                let _ = writeln!(s, "structural {ed}: failed ({error})");
            }
        }
    }
    for (ed, sec) in &report.lexical {
        let _ = writeln!(s, "lexical {ed}: {}", status(sec.is_failed(), sec.value().is_some()));
    }
    let _ = writeln!(s, "visibility: {}", status(report.visibility.is_failed(), report.visibility.value().is_some()));
    let _ = writeln!(
        s,
        "cross-lingual: {}",
        status(report.cross_lingual.is_failed(), report.cross_lingual.value().is_some())
    );
    s
}
