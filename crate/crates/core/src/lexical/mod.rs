//! Lexical dimension: per-word log-likelihood ratios, a tf-idf Naive Bayes
//! classifier whose parameters rank discriminative stems, and category
//! coding of the top-ranked stems.

pub mod categories;
pub mod tokenize;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use categories::{category_report, Category, CategoryReport, CurvePoint, GroupCategories, Lexicon};
pub use tokenize::{tokenize, IdentityStemmer, SnowballStemmer, Stemmer, StemmerRegistry, Tokenizer};

use crate::model::{Document, EntityTable, GroupId, GroupRoles};

pub const DEFAULT_MIN_DF: u64 = 5;
pub const DEFAULT_TOP_N: usize = 150;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexicalError {
    #[error("group {0:?} has no documents")]
    EmptyGroup(String),
    #[error("group {group:?} has {got} document(s); at least {needed} required")]
    TooFewDocuments { group: String, needed: usize, got: usize },
    #[error("vocabulary is empty after the minimum document frequency filter")]
    EmptyVocabulary,
}

/// How word occurrences are counted for likelihood ratios.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// A word counts once per document it appears in.
    #[default]
    Presence,
    /// Every token occurrence counts.
    TokenFrequency,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub entity_id: String,
    pub group: GroupId,
    /// Indices into [`TokenizedCorpus::vocab`], in text order.
    pub stems: Vec<u32>,
}

/// Documents of one edition as interned stem sequences. The vocabulary is
/// sorted, so stem ids order like the stems themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedCorpus {
    pub vocab: Vec<String>,
    pub docs: Vec<TokenizedDoc>,
    pub n_groups: usize,
}

impl TokenizedCorpus {
    /// Tokenizes the documents of `edition` whose entity is in the table.
    pub fn build(docs: &[Document], table: &EntityTable, edition: &str, registry: &StemmerRegistry) -> Self {
        let tokenizer = registry.tokenizer(edition);
        let tokenized: Vec<(String, GroupId, Vec<String>)> = docs
            .par_iter()
            .filter(|d| d.edition == edition)
            .filter_map(|d| {
                let group = table.get(&d.entity_id)?.group;
                Some((d.entity_id.clone(), group, tokenizer.tokenize(&d.text)))
            })
            .collect();
        Self::from_tokens(table.n_groups(), tokenized)
    }

    pub fn from_tokens(n_groups: usize, docs: Vec<(String, GroupId, Vec<String>)>) -> Self {
        let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
        for (_, _, toks) in &docs {
            for t in toks {
                ids.entry(t.as_str()).or_insert(0);
            }
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i as u32;
        }
        let vocab: Vec<String> = ids.keys().map(|s| s.to_string()).collect();
        let docs = docs
            .iter()
            .map(|(id, g, toks)| TokenizedDoc {
                entity_id: id.clone(),
                group: *g,
                stems: toks.iter().map(|t| ids[t.as_str()]).collect(),
            })
            .collect();
        TokenizedCorpus { vocab, docs, n_groups }
    }

    pub fn docs_per_group(&self) -> Vec<usize> {
        let mut n = vec![0; self.n_groups];
        for d in &self.docs {
            n[d.group.0] += 1;
        }
        n
    }

    /// Document frequency of every stem.
    pub fn document_frequencies(&self) -> Vec<u64> {
        let mut df = vec![0u64; self.vocab.len()];
        for d in &self.docs {
            for s in unique(&d.stems) {
                df[s as usize] += 1;
            }
        }
        df
    }
}

fn unique(stems: &[u32]) -> Vec<u32> {
    let mut u = stems.to_vec();
    u.sort_unstable();
    u.dedup();
    u
}

fn require_docs(corpus: &TokenizedCorpus, table_names: &[String], roles: GroupRoles, needed: usize) -> Result<(), LexicalError> {
    let per = corpus.docs_per_group();
    for g in [roles.minority, roles.majority] {
        let got = per.get(g.0).copied().unwrap_or(0);
        let name = table_names.get(g.0).cloned().unwrap_or_else(|| g.to_string());
        if got == 0 {
            return Err(LexicalError::EmptyGroup(name));
        }
        if got < needed {
            return Err(LexicalError::TooFewDocuments { group: name, needed, got });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StemLikelihood {
    pub stem: String,
    /// Documents (or tokens) of each group containing the stem.
    pub counts: Vec<u64>,
    pub total: u64,
    /// P(stem | g); `None` when group g has no documents.
    pub p_given_group: Vec<Option<f64>>,
    pub p: f64,
    /// ln(P(stem|g) / P(stem)); `None` when the stem never occurs in g.
    pub llr: Vec<Option<f64>>,
    /// P(minority | stem) / P(majority | stem); `None` when the stem never
    /// occurs in the majority group.
    pub posterior_odds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordLikelihoods {
    pub mode: CountMode,
    pub roles: GroupRoles,
    /// Documents (or tokens) per group.
    pub group_totals: Vec<u64>,
    pub total: u64,
    pub stems: Vec<StemLikelihood>,
}

impl WordLikelihoods {
    /// Empirical prior P(g).
    pub fn prior(&self, g: GroupId) -> f64 {
        self.group_totals[g.0] as f64 / self.total as f64
    }

    pub fn get(&self, stem: &str) -> Option<&StemLikelihood> {
        self.stems
            .binary_search_by(|s| s.stem.as_str().cmp(stem))
            .ok()
            .map(|i| &self.stems[i])
    }

    /// Stems with `total ≥ min_count` ordered by descending L(stem, g), ties
    /// by stem. Stems absent from `g` are excluded.
    pub fn top_for_group(&self, g: GroupId, min_count: u64, n: usize) -> Vec<&StemLikelihood> {
        let mut v: Vec<&StemLikelihood> = self
            .stems
            .iter()
            .filter(|s| s.total >= min_count && s.llr[g.0].is_some())
            .collect();
        v.sort_by(|a, b| {
            b.llr[g.0]
                .unwrap()
                .total_cmp(&a.llr[g.0].unwrap())
                .then_with(|| a.stem.cmp(&b.stem))
        });
        v.truncate(n);
        v
    }
}

/// Per-stem log-likelihood ratio ln(P(stem|g)/P(stem)) for every group, plus
/// the posterior odds between the two role groups.
pub fn word_likelihood_ratios(
    corpus: &TokenizedCorpus,
    group_names: &[String],
    roles: GroupRoles,
    mode: CountMode,
) -> Result<WordLikelihoods, LexicalError> {
    require_docs(corpus, group_names, roles, 1)?;
    let g_count = corpus.n_groups;
    let mut counts = vec![vec![0u64; g_count]; corpus.vocab.len()];
    let mut group_totals = vec![0u64; g_count];
    for d in &corpus.docs {
        let g = d.group.0;
        match mode {
            CountMode::Presence => {
                group_totals[g] += 1;
                for s in unique(&d.stems) {
                    counts[s as usize][g] += 1;
                }
            }
            CountMode::TokenFrequency => {
                group_totals[g] += d.stems.len() as u64;
                for &s in &d.stems {
                    counts[s as usize][g] += 1;
                }
            }
        }
    }
    let total: u64 = group_totals.iter().sum();
    let prior: Vec<f64> = group_totals.iter().map(|&n| n as f64 / total as f64).collect();
    let (gmin, gmaj) = (roles.minority.0, roles.majority.0);
    let stems = corpus
        .vocab
        .iter()
        .zip(counts)
        .map(|(stem, c)| {
            let t: u64 = c.iter().sum();
            let p = t as f64 / total as f64;
            let p_given_group: Vec<Option<f64>> = c
                .iter()
                .zip(&group_totals)
                .map(|(&k, &n)| (n > 0).then(|| k as f64 / n as f64))
                .collect();
            let llr = p_given_group
                .iter()
                .map(|pg| pg.filter(|&x| x > 0.0).map(|x| (x / p).ln()))
                .collect();
            let joint = |g: usize| p_given_group[g].unwrap_or(0.0) * prior[g];
            let posterior_odds = (c[gmaj] > 0).then(|| joint(gmin) / joint(gmaj));
            StemLikelihood {
                stem: stem.clone(),
                counts: c,
                total: t,
                p_given_group,
                p,
                llr,
                posterior_odds,
            }
        })
        .collect();
    Ok(WordLikelihoods {
        mode,
        roles,
        group_totals,
        total,
        stems,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedStem {
    pub stem: String,
    /// Spread of the smoothed class log-parameters, |ln θ(F) − ln θ(M)| for
    /// two classes.
    pub score: f64,
    pub favored: GroupId,
}

/// Multinomial Naive Bayes over tf-idf weighted stems with add-one
/// smoothing. Weights are `ln(1 + tf) · ln(N / df)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaiveBayes {
    pub classes: Vec<GroupId>,
    pub class_names: Vec<String>,
    pub vocab: Vec<String>,
    pub df: Vec<u64>,
    pub idf: Vec<f64>,
    pub log_prior: Vec<f64>,
    /// `log_theta[class][stem]`.
    pub log_theta: Vec<Vec<f64>>,
    pub n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub group: GroupId,
    pub log_posteriors: Vec<(GroupId, f64)>,
}

impl NaiveBayes {
    pub fn train(
        corpus: &TokenizedCorpus,
        group_names: &[String],
        roles: GroupRoles,
        min_df: u64,
    ) -> Result<(Self, Vec<Vec<(u32, f64)>>), LexicalError> {
        require_docs(corpus, group_names, roles, 2)?;
        let n_docs = corpus.docs.len();
        let df_all = corpus.document_frequencies();
        // corpus stem id -> model stem id
        let mut remap = vec![u32::MAX; corpus.vocab.len()];
        let mut vocab = Vec::new();
        let mut df = Vec::new();
        for (i, (s, &d)) in corpus.vocab.iter().zip(&df_all).enumerate() {
            if d >= min_df.max(1) {
                remap[i] = vocab.len() as u32;
                vocab.push(s.clone());
                df.push(d);
            }
        }
        if vocab.is_empty() {
            return Err(LexicalError::EmptyVocabulary);
        }
        let idf: Vec<f64> = df.iter().map(|&d| (n_docs as f64 / d as f64).ln()).collect();

        let per_group = corpus.docs_per_group();
        let classes: Vec<GroupId> = (0..corpus.n_groups)
            .filter(|&g| per_group[g] > 0)
            .map(GroupId)
            .collect();
        let class_of = |g: GroupId| classes.iter().position(|&c| c == g).unwrap();

        // (class, stem, tf) triples; summing through sorted run-lengths makes
        // the class totals independent of document order.
        let mut triples: Vec<(u32, u32, u32)> = Vec::new();
        let mut tfidf_rows = Vec::with_capacity(n_docs);
        for d in &corpus.docs {
            let tf = term_frequencies(d.stems.iter().map(|&s| remap[s as usize]));
            let c = class_of(d.group) as u32;
            let row = tf
                .iter()
                .map(|&(s, k)| {
                    triples.push((c, s, k));
                    (s, tfidf_weight(k, idf[s as usize]))
                })
                .collect();
            tfidf_rows.push(row);
        }
        triples.sort_unstable();
        let v = vocab.len();
        let mut mass = vec![vec![0.0f64; v]; classes.len()];
        let mut i = 0;
        while i < triples.len() {
            let (c, s, _) = triples[i];
            let mut acc = 0.0;
            while i < triples.len() && triples[i].0 == c && triples[i].1 == s {
                let k = triples[i].2;
                let mut run = 0u64;
                while i < triples.len() && triples[i] == (c, s, k) {
                    run += 1;
                    i += 1;
                }
                acc += run as f64 * (1.0 + k as f64).ln();
            }
            mass[c as usize][s as usize] = acc * idf[s as usize];
        }
        let log_theta = mass
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                let denom = (total + v as f64).ln();
                row.iter().map(|&m| (m + 1.0).ln() - denom).collect()
            })
            .collect();
        let log_prior = classes
            .iter()
            .map(|g| (per_group[g.0] as f64 / n_docs as f64).ln())
            .collect();
        let class_names = classes
            .iter()
            .map(|g| group_names.get(g.0).cloned().unwrap_or_else(|| g.to_string()))
            .collect();
        let mut nb = NaiveBayes {
            classes,
            class_names,
            vocab,
            df,
            idf,
            log_prior,
            log_theta,
            n_docs,
            index: HashMap::new(),
        };
        nb.reindex();
        Ok((nb, tfidf_rows))
    }

    fn reindex(&mut self) {
        self.index = self
            .vocab
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
    }

    /// Classes ordered by name, the order used to break ties.
    fn by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.classes.len()).collect();
        order.sort_by(|&a, &b| self.class_names[a].cmp(&self.class_names[b]));
        order
    }

    /// Stems ordered by descending discriminative score, ties by stem.
    pub fn ranking(&self) -> Vec<RankedStem> {
        let order = self.by_name();
        let mut ranking: Vec<RankedStem> = (0..self.vocab.len())
            .map(|s| {
                let mut best = order[0];
                let mut lo = f64::INFINITY;
                for &c in &order {
                    let lt = self.log_theta[c][s];
                    if lt > self.log_theta[best][s] {
                        best = c;
                    }
                    lo = lo.min(lt);
                }
                RankedStem {
                    stem: self.vocab[s].clone(),
                    score: self.log_theta[best][s] - lo,
                    favored: self.classes[best],
                }
            })
            .collect();
        ranking.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.stem.cmp(&b.stem)));
        ranking
    }

    pub fn classify(&self, stems: &[String]) -> Classification {
        let ids = stems.iter().filter_map(|s| self.index.get(s).copied());
        let tf = term_frequencies(ids.map(|i| i));
        let scores: Vec<f64> = (0..self.classes.len())
            .map(|c| {
                self.log_prior[c]
                    + tf.iter()
                        .map(|&(s, k)| tfidf_weight(k, self.idf[s as usize]) * self.log_theta[c][s as usize])
                        .sum::<f64>()
            })
            .collect();
        let order = self.by_name();
        let mut best = order[0];
        for &c in &order {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Classification {
            group: self.classes[best],
            log_posteriors: self.classes.iter().copied().zip(scores).collect(),
        }
    }
}

fn tfidf_weight(tf: u32, idf: f64) -> f64 {
    (1.0 + tf as f64).ln() * idf
}

/// Sorted (stem, count) pairs; `u32::MAX` entries (filtered stems) dropped.
fn term_frequencies(ids: impl Iterator<Item = u32>) -> Vec<(u32, u32)> {
    let mut v: Vec<u32> = ids.filter(|&s| s != u32::MAX).collect();
    v.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::new();
    for s in v {
        match out.last_mut() {
            Some((last, k)) if *last == s => *k += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Trains the classifier and returns its stem ranking.
pub fn train_discriminative_ranking(
    corpus: &TokenizedCorpus,
    group_names: &[String],
    roles: GroupRoles,
    min_df: u64,
) -> Result<Vec<RankedStem>, LexicalError> {
    Ok(NaiveBayes::train(corpus, group_names, roles, min_df)?.0.ranking())
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexicalOptions {
    pub min_df: u64,
    pub mode: CountMode,
}

impl Default for LexicalOptions {
    fn default() -> Self {
        LexicalOptions {
            min_df: DEFAULT_MIN_DF,
            mode: CountMode::Presence,
        }
    }
}

/// Everything learned from one edition's corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct LexicalModel {
    pub edition: String,
    pub doc_counts: Vec<usize>,
    pub likelihoods: WordLikelihoods,
    pub classifier: NaiveBayes,
    pub ranking: Vec<RankedStem>,
    /// Sparse tf-idf rows, one per document, over the classifier vocabulary.
    pub tfidf: Vec<Vec<(u32, f64)>>,
    pub doc_entities: Vec<String>,
}

impl LexicalModel {
    pub fn train(
        corpus: &TokenizedCorpus,
        edition: &str,
        group_names: &[String],
        roles: GroupRoles,
        opts: &LexicalOptions,
    ) -> Result<Self, LexicalError> {
        let likelihoods = word_likelihood_ratios(corpus, group_names, roles, opts.mode)?;
        let (classifier, tfidf) = NaiveBayes::train(corpus, group_names, roles, opts.min_df)?;
        let ranking = classifier.ranking();
        Ok(LexicalModel {
            edition: edition.to_string(),
            doc_counts: corpus.docs_per_group(),
            likelihoods,
            classifier,
            ranking,
            tfidf,
            doc_entities: corpus.docs.iter().map(|d| d.entity_id.clone()).collect(),
        })
    }
}

/// Most probable group for a stemmed document; ties go to the group whose
/// name sorts first.
pub fn classify(model: &LexicalModel, stems: &[String]) -> Classification {
    model.classifier.classify(stems)
}
