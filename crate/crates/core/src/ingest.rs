//! Reading and writing the on-disk dataset formats.
//!
//! | file | format |
//! |------|--------|
//! | entities | TSV with header `id gender datasets covered_<ed>… length_<ed>…` |
//! | edges | two-column TSV `from<TAB>to`, one file per edition |
//! | corpus | JSON lines `{"id":…,"edition":…,"text":…}` |
//! | featured log | two-column TSV `id<TAB>year` |
//! | lexicons | two-column TSV `stem<TAB>category` |
//! | external ranking | two-column TSV `edition<TAB>rank` |
//!
//! Row-level problems are collected in a [`LoadReport`]; only structural
//! problems (missing columns, overlapping lexicon entries, I/O) are errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexical::{Category, Lexicon};
use crate::model::{induced_graph, Document, Entity, EntityTable, GroupId, GroupLabel, LinkGraph};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: missing required column {column:?}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("lexicon stem {stem:?} assigned to both {first} and {second}")]
    LexiconOverlap {
        stem: String,
        first: Category,
        second: Category,
    },
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    /// 1-based line number, 0 when not tied to a line.
    pub line: usize,
    pub message: String,
}

/// Non-fatal problems found while loading one or more files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub entries: Vec<(String, Issue)>,
}

impl LoadReport {
    fn push(&mut self, source: &str, line: usize, message: impl Into<String>) {
        self.entries.push((
            source.to_string(),
            Issue {
                line,
                message: message.into(),
            },
        ));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn merge(&mut self, other: LoadReport) {
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (src, issue) in &self.entries {
            writeln!(f, "{}:{}: {}", src, issue.line, issue.message)?;
        }
        Ok(())
    }
}

/// Group values treated as "unknown" and excluded at load time.
const UNKNOWN_GROUP_VALUES: &[&str] = &["", "unknown", "na", "n/a", "none", "?"];

#[derive(Clone, Debug, Default)]
pub struct EntityLoadOptions {
    /// Explicit group vocabulary, ids assigned in this order. When `None`,
    /// every known value found in the file becomes a group, sorted by name.
    pub groups: Option<Vec<String>>,
}

fn read_text(path: &Path) -> Result<String, IngestError> {
    let bytes = fs::read(path).map_err(|e| IngestError::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| IngestError::Malformed {
        path: path.to_path_buf(),
        message: format!("not valid UTF-8: {e}"),
    })?;
    Ok(match text.strip_prefix('\u{feff}') {
        Some(rest) => rest.to_string(),
        None => text,
    })
}

/// Lines with CR stripped, paired with 1-based line numbers. A trailing
/// newline does not produce an empty last line.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_terminator('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" => Some(true),
        "0" | "false" | "no" | "n" | "f" | "" => Some(false),
        _ => None,
    }
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

pub fn load_entities(path: &Path) -> Result<(EntityTable, LoadReport), IngestError> {
    load_entities_with(path, &EntityLoadOptions::default())
}

pub fn load_entities_with(
    path: &Path,
    opts: &EntityLoadOptions,
) -> Result<(EntityTable, LoadReport), IngestError> {
    let text = read_text(path)?;
    parse_entities(&text, &source_name(path), path, opts)
}

struct RawEntity {
    line: usize,
    id: String,
    group: String,
    datasets: BTreeSet<String>,
    covered: BTreeMap<String, bool>,
    lengths: BTreeMap<String, u64>,
}

fn parse_entities(
    text: &str,
    src: &str,
    path: &Path,
    opts: &EntityLoadOptions,
) -> Result<(EntityTable, LoadReport), IngestError> {
    let mut report = LoadReport::default();
    let mut it = lines(text);
    let header: Vec<&str> = match it.next() {
        Some((_, h)) => h.split('\t').map(str::trim).collect(),
        None => {
            return Err(IngestError::MissingColumn {
                path: path.to_path_buf(),
                column: "id".into(),
            })
        }
    };
    let col = |name: &str| header.iter().position(|h| *h == name);
    let missing = |column: &str| IngestError::MissingColumn {
        path: path.to_path_buf(),
        column: column.into(),
    };
    let id_col = col("id").ok_or_else(|| missing("id"))?;
    let group_col = col("gender")
        .or_else(|| col("group"))
        .ok_or_else(|| missing("gender"))?;
    let ds_col = col("datasets").ok_or_else(|| missing("datasets"))?;

    let mut editions: Vec<String> = Vec::new();
    let mut covered_cols = Vec::new();
    let mut length_cols = Vec::new();
    for (i, h) in header.iter().enumerate() {
        if let Some(ed) = h.strip_prefix("covered_") {
            editions.push(ed.to_string());
            covered_cols.push((i, ed.to_string()));
        } else if let Some(ed) = h.strip_prefix("length_") {
            length_cols.push((i, ed.to_string()));
        }
    }
    for (_, ed) in &length_cols {
        if !editions.contains(ed) {
            return Err(missing(&format!("covered_{ed}")));
        }
    }

    let mut raws = Vec::new();
    let mut seen = BTreeSet::new();
    'rows: for (line, row) in it {
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != header.len() {
            report.push(
                src,
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            );
            continue;
        }
        let id = fields[id_col].trim();
        if id.is_empty() {
            report.push(src, line, "empty id");
            continue;
        }
        if !seen.insert(id.to_string()) {
            report.push(src, line, format!("duplicate id {id:?} skipped"));
            continue;
        }
        let mut covered = BTreeMap::new();
        for (i, ed) in &covered_cols {
            match parse_bool(fields[*i]) {
                Some(true) => {
                    covered.insert(ed.clone(), true);
                }
                Some(false) => {}
                None => {
                    report.push(src, line, format!("bad boolean {:?} in covered_{ed}", fields[*i]));
                    continue 'rows;
                }
            }
        }
        let mut lengths = BTreeMap::new();
        for (i, ed) in &length_cols {
            let v = fields[*i].trim();
            if v.is_empty() {
                continue;
            }
            match v.parse::<u64>() {
                Ok(n) => {
                    lengths.insert(ed.clone(), n);
                }
                Err(_) => {
                    report.push(src, line, format!("bad length {v:?} in length_{ed}"));
                    continue 'rows;
                }
            }
        }
        let datasets = fields[ds_col]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        raws.push(RawEntity {
            line,
            id: id.to_string(),
            group: fields[group_col].trim().to_string(),
            datasets,
            covered,
            lengths,
        });
    }

    let group_names: Vec<String> = match &opts.groups {
        Some(g) => g.clone(),
        None => raws
            .iter()
            .filter(|r| !is_unknown_group(&r.group))
            .map(|r| r.group.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };

    let mut entities = Vec::with_capacity(raws.len());
    for r in raws {
        let Some(g) = group_names.iter().position(|n| *n == r.group) else {
            report.push(src, r.line, format!("entity {:?} excluded: unknown group {:?}", r.id, r.group));
            continue;
        };
        entities.push(Entity {
            id: r.id,
            group: GroupId(g),
            datasets: r.datasets,
            covered: r.covered,
            article_length: r.lengths,
            featured_years: BTreeSet::new(),
        });
    }
    let groups = group_names
        .into_iter()
        .enumerate()
        .map(|(i, name)| GroupLabel { id: GroupId(i), name })
        .collect();
    Ok((EntityTable::from_parts(groups, editions, entities), report))
}

fn is_unknown_group(v: &str) -> bool {
    UNKNOWN_GROUP_VALUES.contains(&v.to_ascii_lowercase().as_str())
}

/// Writes the canonical entities TSV.
pub fn write_entities<W: Write>(table: &EntityTable, mut out: W) -> io::Result<()> {
    let eds = table.editions();
    let mut header = vec!["id".to_string(), "gender".into(), "datasets".into()];
    header.extend(eds.iter().map(|e| format!("covered_{e}")));
    header.extend(eds.iter().map(|e| format!("length_{e}")));
    writeln!(out, "{}", header.join("\t"))?;
    for e in table.entities() {
        let mut row = vec![
            e.id.clone(),
            table.group_name(e.group).to_string(),
            e.datasets.iter().cloned().collect::<Vec<_>>().join(","),
        ];
        row.extend(eds.iter().map(|ed| if e.is_covered(ed) { "1" } else { "0" }.to_string()));
        row.extend(
            eds.iter()
                .map(|ed| e.length(ed).map(|n| n.to_string()).unwrap_or_default()),
        );
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

/// Parses two tab-separated columns per line. Blank lines are skipped.
fn parse_pairs(text: &str, src: &str, report: &mut LoadReport) -> Vec<(usize, String, String)> {
    let mut out = Vec::new();
    for (line, row) in lines(text) {
        if row.trim().is_empty() {
            continue;
        }
        let mut parts = row.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                out.push((line, a.trim().to_string(), b.trim().to_string()))
            }
            _ => report.push(src, line, format!("expected two tab-separated fields: {row:?}")),
        }
    }
    out
}

pub type RawEdges = Vec<(String, String)>;

pub fn load_edges(path: &Path) -> Result<(RawEdges, LoadReport), IngestError> {
    let text = read_text(path)?;
    let mut report = LoadReport::default();
    let edges = parse_pairs(&text, &source_name(path), &mut report)
        .into_iter()
        .map(|(_, a, b)| (a, b))
        .collect();
    Ok((edges, report))
}

pub fn write_edges<W: Write>(edges: &[(String, String)], mut out: W) -> io::Result<()> {
    for (a, b) in edges {
        writeln!(out, "{a}\t{b}")?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct DocLine {
    id: String,
    edition: String,
    text: String,
}

pub fn load_corpus(path: &Path) -> Result<(Vec<Document>, LoadReport), IngestError> {
    let text = read_text(path)?;
    let src = source_name(path);
    let mut report = LoadReport::default();
    let mut docs = Vec::new();
    for (line, row) in lines(&text) {
        if row.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<DocLine>(row) {
            Ok(d) if d.text.is_empty() => report.push(&src, line, format!("document {:?} has empty text", d.id)),
            Ok(d) => docs.push(Document {
                entity_id: d.id,
                edition: d.edition,
                text: d.text,
            }),
            Err(e) => report.push(&src, line, format!("bad JSON document: {e}")),
        }
    }
    Ok((docs, report))
}

pub fn write_corpus<W: Write>(docs: &[Document], mut out: W) -> io::Result<()> {
    for d in docs {
        let line = serde_json::to_string(&DocLine {
            id: d.entity_id.clone(),
            edition: d.edition.clone(),
            text: d.text.clone(),
        })
        .map_err(io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub type FeaturedLog = Vec<(String, i32)>;

pub fn load_featured(path: &Path) -> Result<(FeaturedLog, LoadReport), IngestError> {
    let text = read_text(path)?;
    let src = source_name(path);
    let mut report = LoadReport::default();
    let mut log = Vec::new();
    for (line, id, year) in parse_pairs(&text, &src, &mut report) {
        match year.parse::<i32>() {
            Ok(y) => log.push((id, y)),
            Err(_) => report.push(&src, line, format!("bad year {year:?}")),
        }
    }
    Ok((log, report))
}

pub fn write_featured<W: Write>(log: &[(String, i32)], mut out: W) -> io::Result<()> {
    for (id, y) in log {
        writeln!(out, "{id}\t{y}")?;
    }
    Ok(())
}

/// Loads a stem → category lexicon. A stem listed under two different
/// categories is a fatal error; lines starting with `#` are comments.
pub fn load_lexicons(path: &Path) -> Result<(Lexicon, LoadReport), IngestError> {
    let text = read_text(path)?;
    let src = source_name(path);
    let mut report = LoadReport::default();
    let body: String = lines(&text)
        .map(|(_, l)| if l.trim_start().starts_with('#') { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let mut lexicon = Lexicon::default();
    for (line, stem, cat) in parse_pairs(&body, &src, &mut report) {
        let Some(category) = Category::parse(&cat) else {
            report.push(&src, line, format!("unknown category {cat:?}"));
            continue;
        };
        if category == Category::Others {
            report.push(&src, line, "category Others is implicit and cannot be listed");
            continue;
        }
        let stem = stem.to_lowercase();
        if let Some(first) = lexicon.get(&stem) {
            if first != category {
                return Err(IngestError::LexiconOverlap {
                    stem,
                    first,
                    second: category,
                });
            }
            continue;
        }
        lexicon.insert(stem, category);
    }
    Ok((lexicon, report))
}

pub fn write_lexicons<W: Write>(lexicon: &Lexicon, mut out: W) -> io::Result<()> {
    for (stem, cat) in lexicon.iter() {
        writeln!(out, "{stem}\t{}", cat.name())?;
    }
    Ok(())
}

pub fn load_external_ranking(path: &Path) -> Result<(BTreeMap<String, f64>, LoadReport), IngestError> {
    let text = read_text(path)?;
    let src = source_name(path);
    let mut report = LoadReport::default();
    let mut ranking = BTreeMap::new();
    for (line, ed, rank) in parse_pairs(&text, &src, &mut report) {
        match rank.parse::<f64>() {
            Ok(r) if r.is_finite() => {
                if ranking.insert(ed.clone(), r).is_some() {
                    report.push(&src, line, format!("edition {ed:?} listed twice; last value kept"));
                }
            }
            _ => report.push(&src, line, format!("bad rank {rank:?}")),
        }
    }
    Ok((ranking, report))
}

pub fn write_external_ranking<W: Write>(ranking: &BTreeMap<String, f64>, mut out: W) -> io::Result<()> {
    for (ed, r) in ranking {
        writeln!(out, "{ed}\t{r}")?;
    }
    Ok(())
}

/// Every input of an analysis, with references resolved against the table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetBundle {
    pub table: EntityTable,
    pub graphs: BTreeMap<String, LinkGraph>,
    pub corpus: BTreeMap<String, Vec<Document>>,
    pub featured_log: FeaturedLog,
    pub lexicons: Lexicon,
    pub external_ranking: Option<BTreeMap<String, f64>>,
}

impl Default for EntityTable {
    fn default() -> Self {
        EntityTable::new(&[], Vec::new(), Vec::new())
    }
}

/// Raw inputs before reference resolution.
#[derive(Clone, Debug, Default)]
pub struct RawInputs {
    pub edges: BTreeMap<String, RawEdges>,
    pub documents: Vec<Document>,
    pub featured_log: FeaturedLog,
    pub lexicons: Lexicon,
    pub external_ranking: Option<BTreeMap<String, f64>>,
}

impl DatasetBundle {
    /// Resolves raw inputs against `table`. Documents and featured entries
    /// that name an unknown entity are dropped with a report entry; edges go
    /// through [`induced_graph`]. Featured years are copied onto entities.
    pub fn assemble(mut table: EntityTable, raw: RawInputs) -> (Self, LoadReport) {
        let mut report = LoadReport::default();
        let mut featured_log = Vec::with_capacity(raw.featured_log.len());
        for (id, year) in raw.featured_log {
            match table.position(&id) {
                Some(pos) => {
                    table.entities_mut()[pos].featured_years.insert(year);
                    featured_log.push((id, year));
                }
                None => report.push("featured", 0, format!("featured entity {id:?} not in table")),
            }
        }
        let mut corpus: BTreeMap<String, Vec<Document>> = BTreeMap::new();
        for doc in raw.documents {
            if table.position(&doc.entity_id).is_none() {
                report.push("corpus", 0, format!("document for unknown entity {:?}", doc.entity_id));
                continue;
            }
            corpus.entry(doc.edition.clone()).or_default().push(doc);
        }
        let graphs = raw
            .edges
            .iter()
            .map(|(ed, edges)| {
                let g = induced_graph(&table, ed, edges);
                let dropped = edges.len() - g.n_edges();
                if dropped > 0 {
                    report.push(
                        &format!("edges_{ed}"),
                        0,
                        format!("{dropped} edge(s) dropped: unknown/uncovered endpoint or self-loop"),
                    );
                }
                (ed.clone(), g)
            })
            .collect();
        (
            DatasetBundle {
                table,
                graphs,
                corpus,
                featured_log,
                lexicons: raw.lexicons,
                external_ranking: raw.external_ranking,
            },
            report,
        )
    }
}

/// File names used when a bundle is stored as a directory.
pub mod layout {
    pub const ENTITIES: &str = "entities.tsv";
    pub const FEATURED: &str = "featured.tsv";
    pub const LEXICONS: &str = "lexicons.tsv";
    pub const EXTERNAL_RANKING: &str = "external_ranking.tsv";

    pub fn edges(edition: &str) -> String {
        format!("edges_{edition}.tsv")
    }

    pub fn corpus(edition: &str) -> String {
        format!("corpus_{edition}.jsonl")
    }
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>, IngestError> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| IngestError::io(path, e))
}

/// Writes a bundle into `dir` using the [`layout`] file names. Optional
/// parts that are empty are not written.
pub fn write_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<(), IngestError> {
    fs::create_dir_all(dir).map_err(|e| IngestError::io(dir, e))?;
    let finish = |path: &Path, w: io::BufWriter<fs::File>, r: io::Result<()>| -> Result<(), IngestError> {
        r.and_then(|_| w.into_inner().map(|_| ()).map_err(|e| e.into_error()))
            .map_err(|e| IngestError::io(path, e))
    };

    let path = dir.join(layout::ENTITIES);
    let mut w = create(&path)?;
    let r = write_entities(&bundle.table, &mut w);
    finish(&path, w, r)?;

    for (ed, g) in &bundle.graphs {
        let path = dir.join(layout::edges(ed));
        let mut w = create(&path)?;
        let r = write_edges(&g.edge_ids(&bundle.table), &mut w);
        finish(&path, w, r)?;
    }
    for (ed, docs) in &bundle.corpus {
        let path = dir.join(layout::corpus(ed));
        let mut w = create(&path)?;
        let r = write_corpus(docs, &mut w);
        finish(&path, w, r)?;
    }
    if !bundle.featured_log.is_empty() {
        let path = dir.join(layout::FEATURED);
        let mut w = create(&path)?;
        let r = write_featured(&bundle.featured_log, &mut w);
        finish(&path, w, r)?;
    }
    if !bundle.lexicons.is_empty() {
        let path = dir.join(layout::LEXICONS);
        let mut w = create(&path)?;
        let r = write_lexicons(&bundle.lexicons, &mut w);
        finish(&path, w, r)?;
    }
    if let Some(rank) = &bundle.external_ranking {
        let path = dir.join(layout::EXTERNAL_RANKING);
        let mut w = create(&path)?;
        let r = write_external_ranking(rank, &mut w);
        finish(&path, w, r)?;
    }
    Ok(())
}

/// Paths of every input file; anything but `entities` may be absent.
#[derive(Clone, Debug, Default)]
pub struct InputPaths {
    pub entities: PathBuf,
    pub edges: BTreeMap<String, PathBuf>,
    pub corpus: BTreeMap<String, PathBuf>,
    pub featured: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub external_ranking: Option<PathBuf>,
}

impl InputPaths {
    /// Discovers the files of a bundle directory written by [`write_bundle`].
    pub fn from_dir(dir: &Path, editions: &[String]) -> Self {
        let opt = |name: &str| {
            let p = dir.join(name);
            p.is_file().then_some(p)
        };
        InputPaths {
            entities: dir.join(layout::ENTITIES),
            edges: editions
                .iter()
                .filter_map(|ed| opt(&layout::edges(ed)).map(|p| (ed.clone(), p)))
                .collect(),
            corpus: editions
                .iter()
                .filter_map(|ed| opt(&layout::corpus(ed)).map(|p| (ed.clone(), p)))
                .collect(),
            featured: opt(layout::FEATURED),
            lexicons: opt(layout::LEXICONS),
            external_ranking: opt(layout::EXTERNAL_RANKING),
        }
    }

    /// Every path paired with a stable role name (`entities`, `edges_en`, …).
    pub fn named(&self) -> Vec<(String, PathBuf)> {
        let mut v = vec![("entities".to_string(), self.entities.clone())];
        v.extend(self.edges.iter().map(|(e, p)| (format!("edges_{e}"), p.clone())));
        v.extend(self.corpus.iter().map(|(e, p)| (format!("corpus_{e}"), p.clone())));
        v.extend(self.featured.iter().map(|p| ("featured".to_string(), p.clone())));
        v.extend(self.lexicons.iter().map(|p| ("lexicons".to_string(), p.clone())));
        v.extend(
            self.external_ranking
                .iter()
                .map(|p| ("external_ranking".to_string(), p.clone())),
        );
        v
    }
}

pub fn load_bundle(paths: &InputPaths) -> Result<(DatasetBundle, LoadReport), IngestError> {
    let (table, mut report) = load_entities(&paths.entities)?;
    let mut raw = RawInputs::default();
    for (ed, p) in &paths.edges {
        let (edges, r) = load_edges(p)?;
        report.merge(r);
        raw.edges.insert(ed.clone(), edges);
    }
    for p in paths.corpus.values() {
        let (docs, r) = load_corpus(p)?;
        report.merge(r);
        raw.documents.extend(docs);
    }
    if let Some(p) = &paths.featured {
        let (log, r) = load_featured(p)?;
        report.merge(r);
        raw.featured_log = log;
    }
    if let Some(p) = &paths.lexicons {
        let (lex, r) = load_lexicons(p)?;
        report.merge(r);
        raw.lexicons = lex;
    }
    if let Some(p) = &paths.external_ranking {
        let (rank, r) = load_external_ranking(p)?;
        report.merge(r);
        raw.external_ranking = Some(rank);
    }
    let (bundle, r) = DatasetBundle::assemble(table, raw);
    report.merge(r);
    Ok((bundle, report))
}

/// Loads a bundle directory written by [`write_bundle`].
pub fn load_bundle_dir(dir: &Path) -> Result<(DatasetBundle, LoadReport), IngestError> {
    let entities = dir.join(layout::ENTITIES);
    let (table, _) = load_entities(&entities)?;
    let paths = InputPaths::from_dir(dir, table.editions());
    load_bundle(&paths)
}
