//! Structural dimension: who links to whom, compared against randomized
//! versions of the same graph, and how central each group is.

mod centrality;
mod null;

pub use centrality::{ccdf, centrality_profile, in_kcore, CcdfPoint, CentralityProfile, GroupCentrality};
pub use null::{null_model_run, randomize, run_seed, structural_analysis, NullDraw, NullEnvelope, NullModel, StructuralResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityTable, GroupId, GroupRoles, LinkGraph};
use crate::stats::StatsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructuralError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("single group: fewer than two groups take part in any edge")]
    SingleGroup,
    #[error("degenerate: single-group edges")]
    DegenerateAssortativity,
    #[error("cell L({0}, {1}) is undefined (no edges)")]
    UndefinedCell(String, String),
    #[error("group {0:?} has no nodes in the graph")]
    EmptyGroup(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Edge counts between groups and the log-likelihood ratios derived from
/// them. Rows are origin groups, columns are target groups; both are
/// indexed by [`GroupId`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssortativityMatrix {
    pub n_edges: u64,
    pub edge_counts: Vec<Vec<u64>>,
    /// `P(to = g)`.
    pub base_rates: Vec<f64>,
    /// `P(from = g)`.
    pub origin_rates: Vec<f64>,
    /// `P(to = g2 | from = g1)`; `None` when `g1` has no outgoing edges.
    pub conditional: Vec<Vec<Option<f64>>>,
    /// `ln(P(to = g2 | from = g1) / P(to = g2))`; `None` for zero counts.
    pub l: Vec<Vec<Option<f64>>>,
}

impl AssortativityMatrix {
    pub fn n_groups(&self) -> usize {
        self.edge_counts.len()
    }

    pub fn l(&self, from: GroupId, to: GroupId) -> Option<f64> {
        self.l[from.0][to.0]
    }

    /// Builds the matrix from a flat row-major `g × g` count table.
    pub fn from_counts(counts: &[u64], g: usize) -> Result<Self, StructuralError> {
        assert_eq!(counts.len(), g * g);
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(StructuralError::NoEdges);
        }
        let (rows, cols) = margins(counts, g);
        let active = (0..g).filter(|&i| rows[i] + cols[i] > 0).count();
        if active < 2 {
            return Err(StructuralError::SingleGroup);
        }
        let nf = n as f64;
        let edge_counts: Vec<Vec<u64>> = counts.chunks(g).map(|r| r.to_vec()).collect();
        let conditional = (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| (rows[a] > 0).then(|| counts[a * g + b] as f64 / rows[a] as f64))
                    .collect()
            })
            .collect();
        let l = (0..g)
            .map(|a| (0..g).map(|b| log_ratio(counts[a * g + b], rows[a], cols[b], n)).collect())
            .collect();
        Ok(AssortativityMatrix {
            n_edges: n,
            edge_counts,
            base_rates: cols.iter().map(|&c| c as f64 / nf).collect(),
            origin_rates: rows.iter().map(|&r| r as f64 / nf).collect(),
            conditional,
            l,
        })
    }
}

fn margins(counts: &[u64], g: usize) -> (Vec<u64>, Vec<u64>) {
    let mut rows = vec![0u64; g];
    let mut cols = vec![0u64; g];
    for a in 0..g {
        for b in 0..g {
            rows[a] += counts[a * g + b];
            cols[b] += counts[a * g + b];
        }
    }
    (rows, cols)
}

/// `ln(c·n / (row·col))`, undefined for an empty cell.
fn log_ratio(c: u64, row: u64, col: u64, n: u64) -> Option<f64> {
    if c == 0 {
        return None;
    }
    Some(((c as f64 / row as f64) / (col as f64 / n as f64)).ln())
}

/// Flat row-major group mixing counts for edges under a node labelling.
pub(crate) fn mixing_counts(edges: &[(u32, u32)], labels: &[u32], g: usize) -> Vec<u64> {
    let mut c = vec![0u64; g * g];
    for &(a, b) in edges {
        c[labels[a as usize] as usize * g + labels[b as usize] as usize] += 1;
    }
    c
}

pub(crate) fn newman_from_counts(counts: &[u64], g: usize) -> Option<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let (rows, cols) = margins(counts, g);
    let trace: f64 = (0..g).map(|i| counts[i * g + i] as f64).sum::<f64>() / nf;
    let ab: f64 = (0..g).map(|i| rows[i] as f64 * cols[i] as f64).sum::<f64>() / (nf * nf);
    let denom = 1.0 - ab;
    if denom.abs() < 1e-15 {
        return None;
    }
    Some((trace - ab) / denom)
}

pub(crate) fn asymmetry_from_counts(counts: &[u64], g: usize, roles: GroupRoles) -> Option<f64> {
    let n: u64 = counts.iter().sum();
    let (rows, cols) = margins(counts, g);
    let (f, m) = (roles.minority.0, roles.majority.0);
    let fm = log_ratio(counts[f * g + m], rows[f], cols[m], n)?;
    let mf = log_ratio(counts[m * g + f], rows[m], cols[f], n)?;
    Some(fm - mf)
}

pub(crate) fn node_labels(graph: &LinkGraph, table: &EntityTable) -> Vec<u32> {
    graph.node_groups(table).into_iter().map(|g| g.0 as u32).collect()
}

pub fn assortativity_matrix(graph: &LinkGraph, table: &EntityTable) -> Result<AssortativityMatrix, StructuralError> {
    let g = table.n_groups();
    AssortativityMatrix::from_counts(&mixing_counts(graph.edges(), &node_labels(graph, table), g), g)
}

/// Newman's discrete assortativity coefficient over edge counts.
pub fn newman_assortativity(graph: &LinkGraph, table: &EntityTable) -> Result<f64, StructuralError> {
    let m = assortativity_matrix(graph, table)?;
    let flat: Vec<u64> = m.edge_counts.concat();
    newman_from_counts(&flat, m.n_groups()).ok_or(StructuralError::DegenerateAssortativity)
}

/// `L(minority, majority) − L(majority, minority)`.
pub fn asymmetry(matrix: &AssortativityMatrix, table: &EntityTable, roles: GroupRoles) -> Result<f64, StructuralError> {
    let cell = |a: GroupId, b: GroupId| {
        matrix.l(a, b).ok_or_else(|| {
            StructuralError::UndefinedCell(table.group_name(a).to_string(), table.group_name(b).to_string())
        })
    };
    Ok(cell(roles.minority, roles.majority)? - cell(roles.majority, roles.minority)?)
}


#[cfg(test)]
mod tests {
    use super::testutil::graph;
    use super::*;
    use proptest::prelude::*;

    const F: GroupId = GroupId(0);
    const M: GroupId = GroupId(1);
    const ROLES: GroupRoles = GroupRoles { minority: F, majority: M };

    #[test]
    fn two_edge_case() {
        // F→M and M→M
        let (t, g) = graph(&[0, 1, 1], &[(0, 1), (2, 1)]);
        let m = assortativity_matrix(&g, &t).unwrap();
        assert_eq!(m.base_rates[1], 1.0);
        assert_eq!(m.l(F, M), Some(0.0));
        assert_eq!(m.l(F, F), None);
        assert!(matches!(asymmetry(&m, &t, ROLES), Err(StructuralError::UndefinedCell(a, b)) if a == "male" && b == "female"));
    }

    #[test]
    fn assortative_four_nodes() {
        let (t, g) = graph(&[0, 0, 1, 1], &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        let m = assortativity_matrix(&g, &t).unwrap();
        assert!((m.l(F, F).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((m.l(M, M).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(m.l(F, M), None);
        assert_eq!(newman_assortativity(&g, &t).unwrap(), 1.0);
    }

    #[test]
    fn disassortative_and_balanced() {
        let (t, g) = graph(&[0, 1], &[(0, 1), (1, 0)]);
        assert_eq!(newman_assortativity(&g, &t).unwrap(), -1.0);
        let (t, g) = graph(&[0, 0, 1, 1], &[(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3), (2, 0), (3, 1)]);
        assert!(newman_assortativity(&g, &t).unwrap().abs() < 1e-15);
        let m = assortativity_matrix(&g, &t).unwrap();
        assert!(asymmetry(&m, &t, ROLES).unwrap().abs() < 1e-15);
    }

    #[test]
    fn one_way_cross_links_give_positive_asymmetry() {
        // every F links to M; M mostly links to M, one M→F keeps the cell defined
        let (t, g) = graph(
            &[0, 0, 1, 1, 1],
            &[(0, 2), (1, 3), (0, 4), (1, 2), (0, 1), (1, 0), (2, 3), (3, 4), (4, 2), (3, 2), (2, 4), (4, 0)],
        );
        let m = assortativity_matrix(&g, &t).unwrap();
        assert!(asymmetry(&m, &t, ROLES).unwrap() > 0.0);
    }

    #[test]
    fn errors() {
        let (t, g) = graph(&[0, 1], &[]);
        assert_eq!(assortativity_matrix(&g, &t), Err(StructuralError::NoEdges));
        let (t, g) = graph(&[1, 1, 0], &[(0, 1), (1, 0)]);
        assert_eq!(assortativity_matrix(&g, &t), Err(StructuralError::SingleGroup));
    }

    fn arb_graph() -> impl Strategy<Value = (Vec<usize>, Vec<(u32, u32)>)> {
        (2usize..12).prop_flat_map(|n| {
            let edge = (0..n as u32, 1..n as u32).prop_map(move |(a, d)| (a, (a + d) % n as u32));
            (prop::collection::vec(0usize..2, n), prop::collection::vec(edge, 1..40))
        })
    }

    proptest! {
        #[test]
        fn l_reconstructs_conditionals((labels, edges) in arb_graph()) {
            let (t, g) = graph(&labels, &edges);
            if let Ok(m) = assortativity_matrix(&g, &t) {
                for a in 0..2 {
                    for b in 0..2 {
                        if let Some(l) = m.l[a][b] {
                            let cond = m.conditional[a][b].unwrap();
                            prop_assert!((l.exp() * m.base_rates[b] - cond).abs() < 1e-12);
                        }
                    }
                }
                let r = newman_assortativity(&g, &t);
                if let Ok(r) = r {
                    prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
                }
            }
        }

        #[test]
        fn swapping_labels_permutes_l_and_negates_a((labels, edges) in arb_graph()) {
            let (t, g) = graph(&labels, &edges);
            let flipped: Vec<usize> = labels.iter().map(|&x| 1 - x).collect();
            let (t2, g2) = graph(&flipped, &edges);
            if let (Ok(m), Ok(m2)) = (assortativity_matrix(&g, &t), assortativity_matrix(&g2, &t2)) {
                for a in 0..2 {
                    for b in 0..2 {
                        match (m.l[a][b], m2.l[1 - a][1 - b]) {
                            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                            (x, y) => prop_assert_eq!(x, y),
                        }
                    }
                }
                if let (Ok(a1), Ok(a2)) = (asymmetry(&m, &t, ROLES), asymmetry(&m2, &t2, ROLES)) {
                    prop_assert!((a1 + a2).abs() < 1e-12);
                }
            }
        }
    }
}
