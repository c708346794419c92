//! Visibility dimension: how often covered people of each group are
//! featured, per year and pooled.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityTable, GroupId, GroupRoles};
use crate::stats::{self, TestResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisibilityError {
    #[error("featured log is empty")]
    EmptyLog,
    #[error("group {0:?} has no covered entities in the population")]
    NoCovered(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupVisibility {
    pub group: GroupId,
    pub n_covered: usize,
    pub n_featured: usize,
    pub proportion: f64,
}

/// A chi-square result, or the reason the table could not be tested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    Tested(TestResult),
    Degenerate(String),
}

impl TestOutcome {
    pub fn result(&self) -> Option<&TestResult> {
        match self {
            TestOutcome::Tested(r) => Some(r),
            TestOutcome::Degenerate(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityRow {
    /// `None` for the pooled row.
    pub year: Option<i32>,
    pub groups: Vec<GroupVisibility>,
    pub test: TestOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub dataset: String,
    pub edition: String,
    pub years: Vec<VisibilityRow>,
    pub pooled: VisibilityRow,
    /// Log entries that fall outside the covered population.
    pub ignored_entries: usize,
}

/// Featuring rates of covered entities in `dataset`. The denominator for
/// each group is its covered population; an entity featured several times
/// counts once per year and once in the pooled row.
pub fn visibility_analysis(
    table: &EntityTable,
    featured_log: &[(String, i32)],
    dataset: &str,
    edition: &str,
    roles: GroupRoles,
    yates: bool,
) -> Result<VisibilityReport, VisibilityError> {
    if featured_log.is_empty() {
        return Err(VisibilityError::EmptyLog);
    }
    let g = table.n_groups();
    let mut covered = vec![0usize; g];
    for e in table.entities() {
        if e.in_dataset(dataset) && e.is_covered(edition) {
            covered[e.group.0] += 1;
        }
    }
    for r in [roles.minority, roles.majority] {
        if covered.get(r.0).copied().unwrap_or(0) == 0 {
            return Err(VisibilityError::NoCovered(table.group_name(r).into()));
        }
    }

    let mut per_year: BTreeMap<i32, BTreeSet<usize>> = BTreeMap::new();
    let mut pooled: BTreeSet<usize> = BTreeSet::new();
    let mut ignored = 0;
    for (id, year) in featured_log {
        let in_population = table
            .position(id)
            .filter(|&p| {
                let e = &table.entities()[p];
                e.in_dataset(dataset) && e.is_covered(edition)
            });
        match in_population {
            Some(p) => {
                per_year.entry(*year).or_default().insert(p);
                pooled.insert(p);
            }
            None => {
                // keep the year on the axis even if nobody in it qualifies
                per_year.entry(*year).or_default();
                ignored += 1;
            }
        }
    }

    let row = |year: Option<i32>, featured: &BTreeSet<usize>| {
        let mut n_feat = vec![0usize; g];
        for &p in featured {
            n_feat[table.entities()[p].group.0] += 1;
        }
        let groups = (0..g)
            .filter(|&i| covered[i] > 0)
            .map(|i| GroupVisibility {
                group: GroupId(i),
                n_covered: covered[i],
                n_featured: n_feat[i],
                proportion: n_feat[i] as f64 / covered[i] as f64,
            })
            .collect();
        let (a, c) = (n_feat[roles.minority.0] as u64, n_feat[roles.majority.0] as u64);
        let b = covered[roles.minority.0] as u64 - a;
        let d = covered[roles.majority.0] as u64 - c;
        let test = match stats::chi_square_2x2(a, b, c, d, yates) {
            Ok(r) => TestOutcome::Tested(r),
            Err(e) => TestOutcome::Degenerate(e.to_string()),
        };
        VisibilityRow { year, groups, test }
    };

    Ok(VisibilityReport {
        dataset: dataset.into(),
        edition: edition.into(),
        years: per_year.iter().map(|(y, s)| row(Some(*y), s)).collect(),
        pooled: row(None, &pooled),
        ignored_entries: ignored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Entity;
    use crate::stats::Direction;

    const ROLES: GroupRoles = GroupRoles {
        minority: GroupId(0),
        majority: GroupId(1),
    };

    fn table(n_f: usize, n_m: usize) -> EntityTable {
        let mut ents = Vec::new();
        for i in 0..n_f {
            ents.push(Entity::new(format!("f{i}"), GroupId(0)).with_dataset("d").with_coverage("en", None));
        }
        for i in 0..n_m {
            ents.push(Entity::new(format!("m{i}"), GroupId(1)).with_dataset("d").with_coverage("en", None));
        }
        ents.push(Entity::new("uncovered", GroupId(0)).with_dataset("d"));
        EntityTable::new(&["female", "male"], vec!["en".into()], ents)
    }

    fn log(entries: &[(&str, i32)]) -> Vec<(String, i32)> {
        entries.iter().map(|(id, y)| (id.to_string(), *y)).collect()
    }

    #[test]
    fn nobody_featured_is_degenerate() {
        let r = visibility_analysis(&table(5, 5), &log(&[("uncovered", 2012)]), "d", "en", ROLES, false).unwrap();
        assert_eq!(r.years.len(), 1);
        assert!(r.years[0].groups.iter().all(|g| g.proportion == 0.0));
        assert!(matches!(r.years[0].test, TestOutcome::Degenerate(_)));
        assert_eq!(r.ignored_entries, 1);
    }

    #[test]
    fn equal_rates_give_zero_statistic() {
        let entries = log(&[("f0", 2013), ("f1", 2013), ("m0", 2013), ("m1", 2013), ("m2", 2013), ("m3", 2013)]);
        let r = visibility_analysis(&table(100, 200), &entries, "d", "en", ROLES, false).unwrap();
        let t = r.pooled.test.result().unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert_eq!(r.pooled.groups[0].proportion, 0.02);
    }

    #[test]
    fn repeated_featuring_counts_once() {
        let entries = log(&[("f0", 2010), ("f0", 2010), ("f0", 2011), ("m0", 2011)]);
        let r = visibility_analysis(&table(10, 10), &entries, "d", "en", ROLES, false).unwrap();
        assert_eq!(r.years[0].groups[0].n_featured, 1);
        assert_eq!(r.years[1].groups[0].n_featured, 1);
        assert_eq!(r.pooled.groups[0].n_featured, 1);
        assert_eq!(r.pooled.groups[1].n_featured, 1);
    }

    #[test]
    fn swapping_roles_flips_direction_only() {
        let entries = log(&[("f0", 2010), ("f1", 2010), ("f2", 2010), ("m0", 2010)]);
        let t = table(20, 30);
        let a = visibility_analysis(&t, &entries, "d", "en", ROLES, false).unwrap();
        let b = visibility_analysis(&t, &entries, "d", "en", ROLES.swapped(), false).unwrap();
        let (ra, rb) = (a.pooled.test.result().unwrap(), b.pooled.test.result().unwrap());
        assert_eq!(ra.direction, Direction::Positive);
        assert_eq!(rb.direction, Direction::Negative);
        assert!((ra.p_value - rb.p_value).abs() < 1e-14);
    }

    #[test]
    fn empty_log_is_error() {
        assert_eq!(
            visibility_analysis(&table(1, 1), &[], "d", "en", ROLES, false),
            Err(VisibilityError::EmptyLog)
        );
    }
}
