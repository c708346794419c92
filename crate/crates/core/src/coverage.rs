//! Coverage dimension: who from a reference dataset has an article, how long
//! the articles are, and how much the reference datasets overlap.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityTable, GroupId, GroupRoles};
use crate::stats::{self, StatsError, TestResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverageError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("unknown edition {0:?}")]
    UnknownEdition(String),
    #[error("group {0:?} has no covered entities")]
    ZeroCovered(String),
    #[error("datasets {0:?} and {1:?} have no covered entities")]
    EmptyUnion(String, String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCoverage {
    pub group: GroupId,
    pub n_reference: usize,
    pub n_covered: usize,
    pub proportion: f64,
}

/// Lower-convention order statistics of article lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub group: GroupId,
    pub n: usize,
    pub min: u64,
    pub q1: u64,
    pub median: u64,
    pub q3: u64,
    pub max: u64,
}

fn check(table: &EntityTable, dataset: &str, edition: &str) -> Result<(), CoverageError> {
    if !table.has_dataset(dataset) {
        return Err(CoverageError::UnknownDataset(dataset.into()));
    }
    if !table.editions().iter().any(|e| e == edition) {
        return Err(CoverageError::UnknownEdition(edition.into()));
    }
    Ok(())
}

/// Covered share of each group's reference population. Groups with no
/// reference entities are omitted.
pub fn coverage_proportions(table: &EntityTable, dataset: &str, edition: &str) -> Result<Vec<GroupCoverage>, CoverageError> {
    check(table, dataset, edition)?;
    let g = table.n_groups();
    let (mut refs, mut cov) = (vec![0usize; g], vec![0usize; g]);
    for e in table.entities().iter().filter(|e| e.in_dataset(dataset)) {
        refs[e.group.0] += 1;
        if e.is_covered(edition) {
            cov[e.group.0] += 1;
        }
    }
    Ok((0..g)
        .filter(|&i| refs[i] > 0)
        .map(|i| GroupCoverage {
            group: GroupId(i),
            n_reference: refs[i],
            n_covered: cov[i],
            proportion: cov[i] as f64 / refs[i] as f64,
        })
        .collect())
}

fn covered_count(props: &[GroupCoverage], g: GroupId) -> usize {
    props.iter().find(|p| p.group == g).map(|p| p.n_covered).unwrap_or(0)
}

/// Covered majority entities per covered minority entity.
pub fn coverage_gap(table: &EntityTable, dataset: &str, edition: &str, roles: GroupRoles) -> Result<f64, CoverageError> {
    let props = coverage_proportions(table, dataset, edition)?;
    let (minor, major) = (covered_count(&props, roles.minority), covered_count(&props, roles.majority));
    for (n, g) in [(minor, roles.minority), (major, roles.majority)] {
        if n == 0 {
            return Err(CoverageError::ZeroCovered(table.group_name(g).into()));
        }
    }
    Ok(major as f64 / minor as f64)
}

/// Element at `floor(p·(n−1))` of an ascending slice.
fn lower_quantile(sorted: &[u64], p: f64) -> u64 {
    sorted[(p * (sorted.len() - 1) as f64).floor() as usize]
}

/// Article length quartiles per group over covered entities with a known
/// length. Empty groups are omitted.
pub fn length_summary(table: &EntityTable, dataset: &str, edition: &str) -> Result<Vec<LengthSummary>, CoverageError> {
    check(table, dataset, edition)?;
    let mut by_group: BTreeMap<GroupId, Vec<u64>> = BTreeMap::new();
    for e in table.entities() {
        if e.in_dataset(dataset) && e.is_covered(edition) {
            if let Some(len) = e.length(edition) {
                by_group.entry(e.group).or_default().push(len);
            }
        }
    }
    Ok(by_group
        .into_iter()
        .map(|(group, mut v)| {
            v.sort_unstable();
            LengthSummary {
                group,
                n: v.len(),
                min: v[0],
                q1: lower_quantile(&v, 0.25),
                median: lower_quantile(&v, 0.5),
                q3: lower_quantile(&v, 0.75),
                max: v[v.len() - 1],
            }
        })
        .collect())
}

/// Jaccard coefficient of the entities of `d1` and `d2` that are covered
/// in `edition`.
pub fn dataset_jaccard(table: &EntityTable, d1: &str, d2: &str, edition: &str) -> Result<f64, CoverageError> {
    check(table, d1, edition)?;
    check(table, d2, edition)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for e in table.entities().iter().filter(|e| e.is_covered(edition)) {
        let (a, b) = (e.in_dataset(d1), e.in_dataset(d2));
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    if union == 0 {
        return Err(CoverageError::EmptyUnion(d1.into(), d2.into()));
    }
    Ok(inter as f64 / union as f64)
}

/// Chi-square test on `[[minority covered, minority uncovered], [majority
/// covered, majority uncovered]]`. Positive direction: the minority group is
/// covered at a higher rate.
pub fn coverage_significance(
    table: &EntityTable,
    dataset: &str,
    edition: &str,
    roles: GroupRoles,
    yates: bool,
) -> Result<TestResult, CoverageError> {
    let props = coverage_proportions(table, dataset, edition)?;
    let cell = |g: GroupId| {
        props
            .iter()
            .find(|p| p.group == g)
            .map(|p| (p.n_covered as u64, (p.n_reference - p.n_covered) as u64))
            .unwrap_or((0, 0))
    };
    let (a, b) = cell(roles.minority);
    let (c, d) = cell(roles.majority);
    Ok(stats::chi_square_2x2(a, b, c, d, yates)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetEditionCoverage {
    pub dataset: String,
    pub edition: String,
    pub groups: Vec<GroupCoverage>,
    pub gap_ratio: Option<f64>,
    pub lengths: Vec<LengthSummary>,
    pub test: Option<TestResult>,
    /// Why `gap_ratio` or `test` is missing, when one is.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JaccardEntry {
    pub edition: String,
    pub d1: String,
    pub d2: String,
    pub jaccard: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub cells: Vec<DatasetEditionCoverage>,
    pub jaccard: Vec<JaccardEntry>,
}

impl CoverageReport {
    pub fn cell(&self, dataset: &str, edition: &str) -> Option<&DatasetEditionCoverage> {
        self.cells.iter().find(|c| c.dataset == dataset && c.edition == edition)
    }
}

/// Runs every coverage measure for each (dataset, edition) pair. Unknown
/// datasets or editions are errors; per-cell gaps and tests that cannot be
/// computed are recorded as notes.
pub fn coverage_report(
    table: &EntityTable,
    datasets: &[String],
    editions: &[String],
    roles: GroupRoles,
    yates: bool,
) -> Result<CoverageReport, CoverageError> {
    let mut cells = Vec::new();
    let mut jaccard = Vec::new();
    for ed in editions {
        for ds in datasets {
            let groups = coverage_proportions(table, ds, ed)?;
            let mut notes = Vec::new();
            let gap_ratio = coverage_gap(table, ds, ed, roles)
                .map_err(|e| notes.push(format!("gap ratio: {e}")))
                .ok();
            let test = coverage_significance(table, ds, ed, roles, yates)
                .map_err(|e| notes.push(format!("significance: {e}")))
                .ok();
            cells.push(DatasetEditionCoverage {
                dataset: ds.clone(),
                edition: ed.clone(),
                groups,
                gap_ratio,
                lengths: length_summary(table, ds, ed)?,
                test,
                notes,
            });
        }
        for (i, d1) in datasets.iter().enumerate() {
            for d2 in &datasets[i + 1..] {
                jaccard.push(JaccardEntry {
                    edition: ed.clone(),
                    d1: d1.clone(),
                    d2: d2.clone(),
                    jaccard: dataset_jaccard(table, d1, d2, ed).ok(),
                });
            }
        }
    }
    Ok(CoverageReport { cells, jaccard })
}
