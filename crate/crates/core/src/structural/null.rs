use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{asymmetry, assortativity_matrix, asymmetry_from_counts, mixing_counts, newman_from_counts, node_labels};
use super::{AssortativityMatrix, StructuralError};
use crate::model::{EntityTable, GroupRoles, LinkGraph};
use crate::stats::{self, MonteCarloEnvelope, StatsError, MIN_ENVELOPE_RUNS};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    /// Shuffle group labels over nodes; edges untouched.
    RandomizedGender,
    /// Keep each edge's origin, draw a new end uniformly.
    RandomizedLinkEnd,
    /// Keep each edge's end, draw a new origin uniformly.
    RandomizedLinkOrigin,
}

impl NullModel {
    pub const ALL: [NullModel; 3] = [
        NullModel::RandomizedGender,
        NullModel::RandomizedLinkEnd,
        NullModel::RandomizedLinkOrigin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NullModel::RandomizedGender => "randomized_gender",
            NullModel::RandomizedLinkEnd => "randomized_link_end",
            NullModel::RandomizedLinkOrigin => "randomized_link_origin",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        NullModel::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Statistics of one randomized graph. Either may be undefined when the
/// randomization empties a needed cell or leaves all edges in one group.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullDraw {
    pub assortativity: Option<f64>,
    pub asymmetry: Option<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run` of `model` under `master_seed`.
pub fn run_seed(master_seed: u64, model: NullModel, run: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ (model as u64 + 1)) ^ run)
}

/// Read-only state shared by all runs.
struct NullContext<'a> {
    labels: Vec<u32>,
    edges: &'a [(u32, u32)],
    g: usize,
    roles: GroupRoles,
}

impl<'a> NullContext<'a> {
    fn new(graph: &'a LinkGraph, table: &EntityTable, roles: GroupRoles) -> Self {
        NullContext {
            labels: node_labels(graph, table),
            edges: graph.edges(),
            g: table.n_groups(),
            roles,
        }
    }

    fn draw(&self, counts: &[u64]) -> NullDraw {
        NullDraw {
            assortativity: newman_from_counts(counts, self.g),
            asymmetry: asymmetry_from_counts(counts, self.g, self.roles),
        }
    }

    /// Mixing counts of one randomization.
    fn randomized_counts(&self, model: NullModel, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.labels.len() as u32;
        let g = self.g;
        let lab = &self.labels;
        // uniform node other than `fixed`; self-loops are not allowed
        let other = |rng: &mut ChaCha8Rng, fixed: u32| {
            let u = rng.random_range(0..n - 1);
            if u >= fixed {
                u + 1
            } else {
                u
            }
        };
        match model {
            NullModel::RandomizedGender => {
                let mut shuffled = lab.clone();
                shuffled.shuffle(&mut rng);
                mixing_counts(self.edges, &shuffled, g)
            }
            NullModel::RandomizedLinkEnd => {
                let mut c = vec![0u64; g * g];
                for &(a, _) in self.edges {
                    let b = other(&mut rng, a);
                    c[lab[a as usize] as usize * g + lab[b as usize] as usize] += 1;
                }
                c
            }
            NullModel::RandomizedLinkOrigin => {
                let mut c = vec![0u64; g * g];
                for &(_, b) in self.edges {
                    let a = other(&mut rng, b);
                    c[lab[a as usize] as usize * g + lab[b as usize] as usize] += 1;
                }
                c
            }
        }
    }
}

/// Randomized graph of one null-model run, for inspection: the node labels
/// and edge list that [`null_model_run`] evaluates.
pub fn randomize(graph: &LinkGraph, table: &EntityTable, model: NullModel, seed: u64) -> (Vec<u32>, Vec<(u32, u32)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = node_labels(graph, table);
    let n = labels.len() as u32;
    let other = |rng: &mut ChaCha8Rng, fixed: u32| {
        let u = rng.random_range(0..n - 1);
        if u >= fixed {
            u + 1
        } else {
            u
        }
    };
    let edges = match model {
        NullModel::RandomizedGender => {
            labels.shuffle(&mut rng);
            graph.edges().to_vec()
        }
        NullModel::RandomizedLinkEnd => graph.edges().iter().map(|&(a, _)| (a, other(&mut rng, a))).collect(),
        NullModel::RandomizedLinkOrigin => graph.edges().iter().map(|&(_, b)| (other(&mut rng, b), b)).collect(),
    };
    (labels, edges)
}

/// Assortativity and asymmetry of one randomization of `graph`.
pub fn null_model_run(
    graph: &LinkGraph,
    table: &EntityTable,
    roles: GroupRoles,
    model: NullModel,
    seed: u64,
) -> Result<NullDraw, StructuralError> {
    assortativity_matrix(graph, table)?;
    let ctx = NullContext::new(graph, table, roles);
    Ok(ctx.draw(&ctx.randomized_counts(model, seed)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullEnvelope {
    pub model: NullModel,
    /// `None` when fewer than the minimum number of runs gave a defined
    /// value.
    pub assortativity: Option<MonteCarloEnvelope>,
    pub asymmetry: Option<MonteCarloEnvelope>,
    pub undefined_assortativity: usize,
    pub undefined_asymmetry: usize,
    /// Empirical value outside the envelope.
    pub assortativity_significant: Option<bool>,
    pub asymmetry_significant: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralResult {
    pub n_nodes: usize,
    pub matrix: AssortativityMatrix,
    pub assortativity: f64,
    pub asymmetry: Option<f64>,
    /// Why `asymmetry` is missing, when it is.
    pub asymmetry_note: Option<String>,
    pub n_runs: usize,
    pub master_seed: u64,
    pub null_envelopes: Vec<NullEnvelope>,
}

impl StructuralResult {
    pub fn envelope(&self, model: NullModel) -> Option<&NullEnvelope> {
        self.null_envelopes.iter().find(|e| e.model == model)
    }
}

fn summarize(values: Vec<Option<f64>>, seed: u64, empirical: Option<f64>) -> (Option<MonteCarloEnvelope>, usize, Option<bool>) {
    let total = values.len();
    let mut defined: Vec<f64> = values.into_iter().flatten().collect();
    let undefined_count = total - defined.len();
    defined.sort_by(f64::total_cmp);
    let env = if defined.len() >= MIN_ENVELOPE_RUNS {
        stats::envelope(&defined, seed, defined.len()).ok()
    } else {
        None
    };
    let significant = env.zip(empirical).map(|(e, v)| !e.contains(v));
    (env, undefined_count, significant)
}

/// Empirical statistics plus `n_runs` draws of each null model.
pub fn structural_analysis(
    graph: &LinkGraph,
    table: &EntityTable,
    roles: GroupRoles,
    n_runs: usize,
    master_seed: u64,
) -> Result<StructuralResult, StructuralError> {
    if n_runs < MIN_ENVELOPE_RUNS {
        return Err(StatsError::TooFew {
            needed: MIN_ENVELOPE_RUNS,
            got: n_runs,
        }
        .into());
    }
    let matrix = assortativity_matrix(graph, table)?;
    let flat = matrix.edge_counts.concat();
    let assortativity = newman_from_counts(&flat, matrix.n_groups()).ok_or(StructuralError::DegenerateAssortativity)?;
    let (asym, asymmetry_note) = match asymmetry(&matrix, table, roles) {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let ctx = NullContext::new(graph, table, roles);
    let null_envelopes = NullModel::ALL
        .into_iter()
        .map(|model| {
            let draws: Vec<NullDraw> = (0..n_runs as u64)
                .into_par_iter()
                .map(|run| ctx.draw(&ctx.randomized_counts(model, run_seed(master_seed, model, run))))
                .collect();
            let model_seed = run_seed(master_seed, model, u64::MAX);
            let (a_env, a_undef, a_sig) = summarize(
                draws.iter().map(|d| d.assortativity).collect(),
                model_seed,
                Some(assortativity),
            );
            let (s_env, s_undef, s_sig) = summarize(draws.iter().map(|d| d.asymmetry).collect(), model_seed, asym);
            if a_undef + s_undef > 0 {
                log::info!(
                    "{}: {a_undef} undefined assortativity and {s_undef} undefined asymmetry draws of {n_runs}",
                    model.name()
                );
            }
            NullEnvelope {
                model,
                assortativity: a_env,
                asymmetry: s_env,
                undefined_assortativity: a_undef,
                undefined_asymmetry: s_undef,
                assortativity_significant: a_sig,
                asymmetry_significant: s_sig,
            }
        })
        .collect();

    Ok(StructuralResult {
        n_nodes: graph.n_nodes(),
        matrix,
        assortativity,
        asymmetry: asym,
        asymmetry_note,
        n_runs,
        master_seed,
        null_envelopes,
    })
}
