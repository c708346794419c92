//! Synthetic bundles with planted bias, used as ground truth for the
//! analyses.
//!
//! The link graph is drawn from a 2×2 mixing matrix solved in closed form
//! from the target assortativity and asymmetry. Documents draw from a shared
//! vocabulary plus a group-exclusive one at an elevated rate.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Pareto, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DatasetBundle, RawInputs};
use crate::lexical::{Category, Lexicon};
use crate::model::{Document, Entity, EntityTable, GroupId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("infeasible targets: {0}")]
    Infeasible(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthDataset {
    pub name: String,
    /// Probability that an entity belongs to the dataset.
    pub rate: f64,
}

/// Generator parameters. Group 0 is the minority, group 1 the majority;
/// per-group vectors are indexed the same way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub groups: Vec<String>,
    pub n_nodes: Vec<usize>,
    pub target_assortativity: f64,
    pub target_asymmetry: f64,
    pub mean_out_degree: f64,
    /// Pareto out-degrees (shape 2) instead of Poisson.
    pub heavy_tail: bool,
    pub shared_vocab: usize,
    pub exclusive_vocab: Vec<usize>,
    /// Weight of an exclusive stem relative to a shared one.
    pub exclusive_rate: f64,
    pub docs_per_entity: usize,
    pub doc_length: usize,
    pub coverage_rate: Vec<f64>,
    pub median_length: Vec<f64>,
    pub featured_rate: Vec<f64>,
    pub years: Vec<i32>,
    pub datasets: Vec<SynthDataset>,
    pub editions: Vec<String>,
    /// Share of exclusive stems that get a lexicon category.
    pub lexicon_rate: f64,
    pub external_ranking: Option<BTreeMap<String, f64>>,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            groups: vec!["female".into(), "male".into()],
            n_nodes: vec![300, 700],
            target_assortativity: 0.0,
            target_asymmetry: 0.0,
            mean_out_degree: 8.0,
            heavy_tail: false,
            shared_vocab: 1000,
            exclusive_vocab: vec![50, 50],
            exclusive_rate: 10.0,
            docs_per_entity: 1,
            doc_length: 80,
            coverage_rate: vec![1.0, 1.0],
            median_length: vec![450.0, 420.0],
            featured_rate: vec![0.01, 0.01],
            years: vec![2012, 2013],
            datasets: vec![SynthDataset {
                name: "ref".into(),
                rate: 1.0,
            }],
            editions: vec!["en".into()],
            lexicon_rate: 0.5,
            external_ranking: None,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Invalid(m));
        if self.groups.len() != 2 {
            return bad(format!("need exactly 2 groups, got {}", self.groups.len()));
        }
        if self.groups[0] == self.groups[1] {
            return bad("group names must differ".into());
        }
        for (name, len) in [
            ("n_nodes", self.n_nodes.len()),
            ("exclusive_vocab", self.exclusive_vocab.len()),
            ("coverage_rate", self.coverage_rate.len()),
            ("median_length", self.median_length.len()),
            ("featured_rate", self.featured_rate.len()),
        ] {
            if len != 2 {
                return bad(format!("{name} needs one value per group"));
            }
        }
        let rates = self
            .coverage_rate
            .iter()
            .chain(&self.featured_rate)
            .chain(self.datasets.iter().map(|d| &d.rate))
            .chain(std::iter::once(&self.lexicon_rate));
        if rates.clone().any(|r| !(0.0..=1.0).contains(r)) {
            return bad("rates must lie in [0, 1]".into());
        }
        if !(self.mean_out_degree > 0.0) {
            return bad("mean_out_degree must be positive".into());
        }
        if !(self.target_assortativity > -1.0 && self.target_assortativity < 1.0) {
            return bad("target_assortativity must lie in (-1, 1)".into());
        }
        if !self.target_asymmetry.is_finite() {
            return bad("target_asymmetry must be finite".into());
        }
        if !(self.exclusive_rate > 0.0) || self.median_length.iter().any(|m| !(*m >= 1.0)) {
            return bad("exclusive_rate and median lengths must be positive".into());
        }
        if self.shared_vocab + self.exclusive_vocab.iter().sum::<usize>() == 0 {
            return bad("vocabulary is empty".into());
        }
        if self.editions.is_empty() || self.datasets.is_empty() {
            return bad("need at least one edition and one dataset".into());
        }
        Ok(())
    }
}

/// Edge fractions `e[from][to]` of the planted mixing matrix, with its
/// margins and the statistics they imply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedMixing {
    pub fractions: [[f64; 2]; 2],
    /// `P(from = minority)`.
    pub origin_share: f64,
    /// `P(to = minority)`.
    pub target_share: f64,
    pub assortativity: f64,
    pub asymmetry: f64,
}

impl PlantedMixing {
    fn from_fractions(e: [[f64; 2]; 2]) -> Self {
        let a = [e[0][0] + e[0][1], e[1][0] + e[1][1]];
        let b = [e[0][0] + e[1][0], e[0][1] + e[1][1]];
        let ab = a[0] * b[0] + a[1] * b[1];
        PlantedMixing {
            fractions: e,
            origin_share: a[0],
            target_share: b[0],
            assortativity: (e[0][0] + e[1][1] - ab) / (1.0 - ab),
            asymmetry: (e[0][1] / (a[0] * b[1])).ln() - (e[1][0] / (a[1] * b[0])).ln(),
        }
    }

    /// `P(to = minority | from = g)`.
    pub fn to_minority(&self, g: usize) -> f64 {
        self.fractions[g][0] / (self.fractions[g][0] + self.fractions[g][1])
    }
}

/// Fractions for target share `s`, given the origin share and the
/// assortativity; `None` if some cell is not positive.
fn fractions_at(a_f: f64, r: f64, s: f64) -> Option<[[f64; 2]; 2]> {
    let a_m = 1.0 - a_f;
    let ab = a_f * s + a_m * (1.0 - s);
    let cross = (1.0 - r) * (1.0 - ab);
    let x = (cross + a_f - s) / 2.0;
    let y = (cross - a_f + s) / 2.0;
    let p = a_f - x;
    let q = 1.0 - p - x - y;
    let e = [[p, x], [y, q]];
    e.iter().flatten().all(|v| *v > 0.0).then_some(e)
}

fn asymmetry_at(a_f: f64, r: f64, s: f64) -> Option<f64> {
    fractions_at(a_f, r, s).map(|e| PlantedMixing::from_fractions(e).asymmetry)
}

/// Solves for the 2×2 edge fractions with minority origin share
/// `origin_share` whose assortativity and asymmetry equal the targets.
///
/// The origin margin and the assortativity leave one free parameter, the
/// minority target share `s`; the asymmetry is matched by a grid scan over
/// `s` refined by bisection. Of several roots the one closest to
/// `origin_share` is used.
pub fn solve_mixing(origin_share: f64, assortativity: f64, asymmetry: f64) -> Result<PlantedMixing, SynthError> {
    if !(origin_share > 0.0 && origin_share < 1.0) {
        return Err(SynthError::Infeasible(format!(
            "minority origin share {origin_share} must lie in (0, 1)"
        )));
    }
    const GRID: usize = 20_000;
    let f = |s: f64| asymmetry_at(origin_share, assortativity, s).map(|a| a - asymmetry);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..GRID {
        let s = i as f64 / GRID as f64;
        let cur = f(s).map(|v| (s, v));
        if let (Some((s0, v0)), Some((s1, v1))) = (prev, cur) {
            if v1 == 0.0 {
                roots.push(s1);
            } else if v0.signum() != v1.signum() && v0 != 0.0 {
                let (mut lo, mut hi, mut flo) = (s0, s1, v0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid).expect("interior of a feasible bracket");
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        prev = cur;
    }
    let s = roots
        .into_iter()
        .min_by(|a, b| (a - origin_share).abs().total_cmp(&(b - origin_share).abs()))
        .ok_or_else(|| {
            SynthError::Infeasible(format!(
                "no mixing matrix with all cells positive has assortativity {assortativity} and asymmetry \
                 {asymmetry} at minority origin share {origin_share:.4}"
            ))
        })?;
    Ok(PlantedMixing::from_fractions(fractions_at(origin_share, assortativity, s).unwrap()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    pub bundle: DatasetBundle,
    /// Mixing matrix each edition's graph was drawn from.
    pub planted: BTreeMap<String, PlantedMixing>,
    /// Stems exclusive to each group, in vocabulary order.
    pub exclusive_stems: Vec<Vec<String>>,
}

const LETTERS: &[u8] = b"bcdfghjklmnpqrstvwxz";

/// Word `i` of the synthetic vocabulary: five consonants, so no stemmer
/// has a region to strip and the word is its own stem.
pub fn synth_word(i: usize) -> String {
    let mut w = [0u8; 5];
    let mut k = i;
    for c in w.iter_mut().rev() {
        *c = LETTERS[k % LETTERS.len()];
        k /= LETTERS.len();
    }
    String::from_utf8(w.to_vec()).unwrap()
}

/// Generates a bundle. Equal specs give identical bundles.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut entities = Vec::with_capacity(spec.n_nodes.iter().sum());
    for (g, &n) in spec.n_nodes.iter().enumerate() {
        for _ in 0..n {
            let mut e = Entity::new(format!("Q{}", entities.len() + 1), GroupId(g));
            for d in &spec.datasets {
                if rng.random_bool(d.rate) {
                    e = e.with_dataset(d.name.clone());
                }
            }
            entities.push(e);
        }
    }
    let length_dists: Vec<LogNormal<f64>> = spec
        .median_length
        .iter()
        .map(|m| LogNormal::new(m.ln(), 0.8).unwrap())
        .collect();
    for ed in &spec.editions {
        for e in entities.iter_mut() {
            if rng.random_bool(spec.coverage_rate[e.group.0]) {
                let len = length_dists[e.group.0].sample(&mut rng).round().max(1.0) as u64;
                *e = std::mem::take(e).with_coverage(ed.clone(), Some(len));
            }
        }
    }
    let names: Vec<&str> = spec.groups.iter().map(String::as_str).collect();
    let table = EntityTable::new(&names, spec.editions.clone(), entities);

    let mut edges = BTreeMap::new();
    let mut planted = BTreeMap::new();
    for ed in &spec.editions {
        let (mix, raw) = draw_edges(spec, &table, ed, &mut rng)?;
        planted.insert(ed.clone(), mix);
        edges.insert(ed.clone(), raw);
    }

    let mut next_word = spec.shared_vocab;
    let exclusive_stems: Vec<Vec<String>> = spec
        .exclusive_vocab
        .iter()
        .map(|&k| {
            let words = (next_word..next_word + k).map(synth_word).collect();
            next_word += k;
            words
        })
        .collect();
    let documents = draw_documents(spec, &table, &exclusive_stems, &mut rng);

    let mut lexicon = Lexicon::default();
    let named = [Category::Gender, Category::Relationship, Category::Family];
    for stems in &exclusive_stems {
        for (i, s) in stems.iter().enumerate() {
            if rng.random_bool(spec.lexicon_rate) {
                lexicon.insert(s.clone(), named[i % named.len()]);
            }
        }
    }

    let mut featured_log = Vec::new();
    let first = &spec.editions[0];
    for &year in &spec.years {
        for e in table.entities().iter().filter(|e| e.is_covered(first)) {
            if rng.random_bool(spec.featured_rate[e.group.0]) {
                featured_log.push((e.id.clone(), year));
            }
        }
    }

    let raw = RawInputs {
        edges,
        documents,
        featured_log,
        lexicons: lexicon,
        external_ranking: spec.external_ranking.clone(),
    };
    let (bundle, report) = DatasetBundle::assemble(table, raw);
    debug_assert!(report.is_empty(), "{report}");
    Ok(SynthOutput {
        bundle,
        planted,
        exclusive_stems,
    })
}

fn draw_edges(
    spec: &SynthSpec,
    table: &EntityTable,
    edition: &str,
    rng: &mut ChaCha8Rng,
) -> Result<(PlantedMixing, Vec<(String, String)>), SynthError> {
    let mut members: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, e) in table.entities().iter().enumerate() {
        if e.is_covered(edition) {
            members[e.group.0].push(i);
        }
    }
    if members.iter().any(|m| m.len() < 2) {
        return Err(SynthError::Infeasible(format!(
            "edition {edition}: each group needs at least 2 covered nodes"
        )));
    }
    let n = (members[0].len() + members[1].len()) as f64;
    let mix = solve_mixing(members[0].len() as f64 / n, spec.target_assortativity, spec.target_asymmetry)?;
    let to_minority = [mix.to_minority(0), mix.to_minority(1)];
    let pareto_shape = 2.0;
    let pareto = Pareto::new(spec.mean_out_degree * (pareto_shape - 1.0) / pareto_shape, pareto_shape).unwrap();
    let poisson = Poisson::new(spec.mean_out_degree).unwrap();

    let ents = table.entities();
    let mut raw = Vec::new();
    for (g, group) in members.iter().enumerate() {
        for &origin in group {
            let k = if spec.heavy_tail {
                pareto.sample(rng).floor() as usize
            } else {
                poisson.sample(rng) as usize
            };
            for _ in 0..k {
                let tg = if rng.random_bool(to_minority[g]) { 0 } else { 1 };
                let pool = &members[tg];
                let target = loop {
                    let t = pool[rng.random_range(0..pool.len())];
                    if t != origin {
                        break t;
                    }
                };
                raw.push((ents[origin].id.clone(), ents[target].id.clone()));
            }
        }
    }
    Ok((mix, raw))
}

fn draw_documents(spec: &SynthSpec, table: &EntityTable, exclusive: &[Vec<String>], rng: &mut ChaCha8Rng) -> Vec<Document> {
    let shared: Vec<String> = (0..spec.shared_vocab).map(synth_word).collect();
    let samplers: Vec<(Vec<&String>, WeightedIndex<f64>)> = exclusive
        .iter()
        .map(|own| {
            let words: Vec<&String> = shared.iter().chain(own).collect();
            let weights = std::iter::repeat_n(1.0, shared.len()).chain(std::iter::repeat_n(spec.exclusive_rate, own.len()));
            (words, WeightedIndex::new(weights).unwrap())
        })
        .collect();
    let mut docs = Vec::new();
    for ed in &spec.editions {
        for e in table.entities().iter().filter(|e| e.is_covered(ed)) {
            let (words, dist) = &samplers[e.group.0];
            for _ in 0..spec.docs_per_entity {
                let text = (0..spec.doc_length)
                    .map(|_| words[dist.sample(rng)].as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                docs.push(Document {
                    entity_id: e.id.clone(),
                    edition: ed.clone(),
                    text,
                });
            }
        }
    }
    docs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::StemmerRegistry;
    use crate::model::GroupRoles;
    use crate::structural::{assortativity_matrix, asymmetry, newman_assortativity};

    const ROLES: GroupRoles = GroupRoles {
        minority: GroupId(0),
        majority: GroupId(1),
    };

    #[test]
    fn solver_hits_targets() {
        for &(share, r, a) in &[(0.3, 0.3, 0.5), (0.5, 0.0, 0.0), (0.2, -0.2, 1.0), (0.3, 0.3, -3.0), (0.1, 0.6, 1.0)] {
            let m = solve_mixing(share, r, a).unwrap();
            assert!((m.assortativity - r).abs() < 1e-10, "{m:?}");
            assert!((m.asymmetry - a).abs() < 1e-10, "{m:?}");
            assert!((m.origin_share - share).abs() < 1e-12);
            assert!((m.fractions.iter().flatten().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn independence_is_the_product_of_margins() {
        let m = solve_mixing(0.3, 0.0, 0.0).unwrap();
        assert!((m.target_share - 0.3).abs() < 1e-9);
        assert!((m.fractions[0][1] - 0.21).abs() < 1e-9);
    }

    #[test]
    fn infeasible_targets_are_rejected() {
        let err = solve_mixing(0.3, 0.95, 8.0).unwrap_err();
        assert!(matches!(err, SynthError::Infeasible(ref m) if m.contains("asymmetry")));
        assert!(matches!(
            generate(&SynthSpec { target_assortativity: 1.0, ..SynthSpec::default() }),
            Err(SynthError::Invalid(_))
        ));
    }

    #[test]
    fn words_are_their_own_stems() {
        let reg = StemmerRegistry::default();
        for i in [0, 1, 19, 20, 399, 12345, 999_999] {
            let w = synth_word(i);
            for ed in ["en", "de", "fr", "es", "it", "ru"] {
                assert_eq!(crate::lexical::tokenize(&w, ed, &reg), vec![w.clone()]);
            }
        }
        assert_ne!(synth_word(20), synth_word(1));
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec {
            seed: 3,
            n_nodes: vec![40, 60],
            ..SynthSpec::default()
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&SynthSpec { seed: 4, ..spec.clone() }).unwrap();
        assert_ne!(other.bundle, generate(&spec).unwrap().bundle);
    }

    #[test]
    fn edge_fractions_within_three_standard_errors() {
        let spec = SynthSpec {
            n_nodes: vec![600, 1400],
            target_assortativity: 0.3,
            target_asymmetry: 0.5,
            mean_out_degree: 10.0,
            shared_vocab: 10,
            exclusive_vocab: vec![1, 1],
            doc_length: 2,
            ..SynthSpec::default()
        };
        let out = generate(&spec).unwrap();
        let g = &out.bundle.graphs["en"];
        assert!(g.n_edges() >= 10_000);
        let m = assortativity_matrix(g, &out.bundle.table).unwrap();
        let planted = &out.planted["en"];
        let n = m.n_edges as f64;
        for a in 0..2 {
            for b in 0..2 {
                let p = planted.fractions[a][b];
                let se = (p * (1.0 - p) / n).sqrt();
                let got = m.edge_counts[a][b] as f64 / n;
                assert!((got - p).abs() < 3.0 * se + 0.01, "cell {a}{b}: {got} vs {p}");
            }
        }
        let r = newman_assortativity(g, &out.bundle.table).unwrap();
        let a = asymmetry(&m, &out.bundle.table, ROLES).unwrap();
        assert!((r - 0.3).abs() < 0.05, "{r}");
        assert!((a - 0.5).abs() < 0.1, "{a}");
    }

    #[test]
    fn coverage_and_featuring_follow_rates() {
        let spec = SynthSpec {
            n_nodes: vec![2000, 2000],
            coverage_rate: vec![0.5, 0.9],
            featured_rate: vec![0.0, 0.1],
            mean_out_degree: 1.0,
            doc_length: 1,
            ..SynthSpec::default()
        };
        let out = generate(&spec).unwrap();
        let t = &out.bundle.table;
        let rate = |g: usize| {
            let all: Vec<_> = t.entities().iter().filter(|e| e.group.0 == g).collect();
            all.iter().filter(|e| e.is_covered("en")).count() as f64 / all.len() as f64
        };
        assert!((rate(0) - 0.5).abs() < 0.05);
        assert!((rate(1) - 0.9).abs() < 0.05);
        assert!(out.bundle.featured_log.iter().all(|(id, _)| t.get(id).unwrap().group.0 == 1));
        assert!(!out.bundle.featured_log.is_empty());
    }

    #[test]
    fn lexicon_only_codes_exclusive_stems() {
        let out = generate(&SynthSpec {
            n_nodes: vec![10, 10],
            ..SynthSpec::default()
        })
        .unwrap();
        let exclusive: Vec<&String> = out.exclusive_stems.iter().flatten().collect();
        assert!(!out.bundle.lexicons.is_empty());
        for (s, c) in out.bundle.lexicons.iter() {
            assert!(exclusive.iter().any(|e| e.as_str() == s));
            assert_ne!(c, Category::Others);
        }
    }
}
