use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RankedStem;
use crate::model::GroupId;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Gender,
    Relationship,
    Family,
    Others,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Gender,
        Category::Relationship,
        Category::Family,
        Category::Others,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Gender => "Gender",
            Category::Relationship => "Relationship",
            Category::Family => "Family",
            Category::Others => "Others",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gender" | "gen" => Some(Category::Gender),
            "relationship" | "rel" => Some(Category::Relationship),
            "family" | "fam" => Some(Category::Family),
            "others" | "other" => Some(Category::Others),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partition of stems into the three named categories; everything else is
/// [`Category::Others`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    entries: BTreeMap<String, Category>,
}

impl Lexicon {
    pub fn get(&self, stem: &str) -> Option<Category> {
        self.entries.get(stem).copied()
    }

    pub fn insert(&mut self, stem: String, category: Category) {
        self.entries.insert(stem, category);
    }

    pub fn category(&self, stem: &str) -> Category {
        self.get(stem).unwrap_or(Category::Others)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Category)> {
        self.entries.iter().map(|(s, c)| (s.as_str(), *c))
    }
}

impl FromIterator<(String, Category)> for Lexicon {
    fn from_iter<I: IntoIterator<Item = (String, Category)>>(iter: I) -> Self {
        Lexicon {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Category proportions after the first `n` stems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    /// Indexed like [`Category::ALL`].
    pub proportions: [f64; 4],
}

impl CurvePoint {
    /// Share of the three named categories combined.
    pub fn in_category(&self) -> f64 {
        1.0 - self.proportions[Category::Others.slot()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCategories {
    pub group: GroupId,
    /// Number of stems actually used (≤ the requested top-N).
    pub n: usize,
    pub clipped: bool,
    pub stems: Vec<(String, Category)>,
    /// Indexed like [`Category::ALL`].
    pub counts: [usize; 4],
    pub proportions: [f64; 4],
    pub curve: Vec<CurvePoint>,
}

impl GroupCategories {
    pub fn in_category_share(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        1.0 - self.proportions[Category::Others.slot()]
    }

    pub fn proportion(&self, c: Category) -> f64 {
        self.proportions[c.slot()]
    }

    pub fn count(&self, c: Category) -> usize {
        self.counts[c.slot()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub top_n: usize,
    pub groups: Vec<GroupCategories>,
}

impl CategoryReport {
    pub fn group(&self, g: GroupId) -> Option<&GroupCategories> {
        self.groups.iter().find(|c| c.group == g)
    }
}

fn proportions(counts: &[usize; 4], n: usize) -> [f64; 4] {
    let mut p = [0.0; 4];
    if n > 0 {
        for (slot, c) in counts.iter().enumerate() {
            p[slot] = *c as f64 / n as f64;
        }
    }
    p
}

/// Codes the top-`top_n` stems favored toward each of `groups` with the
/// lexicon, in ranking order. A group with fewer favored stems than `top_n`
/// is clipped (logged and flagged).
pub fn category_report(ranking: &[RankedStem], lexicon: &Lexicon, top_n: usize, groups: &[GroupId]) -> CategoryReport {
    let groups = groups
        .iter()
        .map(|&g| {
            let stems: Vec<(String, Category)> = ranking
                .iter()
                .filter(|r| r.favored == g)
                .take(top_n)
                .map(|r| (r.stem.clone(), lexicon.category(&r.stem)))
                .collect();
            let clipped = stems.len() < top_n;
            if clipped {
                log::warn!(
                    "group {} has only {} favored stems; top-N clipped from {}",
                    g,
                    stems.len(),
                    top_n
                );
            }
            let mut counts = [0usize; 4];
            let mut curve = Vec::with_capacity(stems.len());
            for (i, (_, c)) in stems.iter().enumerate() {
                counts[c.slot()] += 1;
                curve.push(CurvePoint {
                    n: i + 1,
                    proportions: proportions(&counts, i + 1),
                });
            }
            GroupCategories {
                group: g,
                n: stems.len(),
                clipped,
                stems,
                counts,
                proportions: proportions(&counts, curve.len()),
                curve,
            }
        })
        .collect();
    CategoryReport { top_n, groups }
}
