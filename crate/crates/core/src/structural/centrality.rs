use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::StructuralError;
use crate::model::{EntityTable, GroupId, GroupRoles, LinkGraph};
use crate::stats::{self, TestResult};

/// In-coreness of every node: the largest `k` such that the node survives
/// repeated removal of nodes with in-degree below `k`. Parallel edges count
/// once.
pub fn in_kcore(graph: &LinkGraph) -> Vec<u64> {
    let g = graph.deduplicated();
    let n = g.n_nodes();
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        out[a as usize].push(b);
    }
    let mut deg: Vec<u64> = g.in_degrees().into_iter().map(|d| d as u64).collect();
    let mut heap: BinaryHeap<Reverse<(u64, u32)>> = (0..n as u32).map(|v| Reverse((deg[v as usize], v))).collect();
    let mut removed = vec![false; n];
    let mut core = vec![0u64; n];
    let mut k = 0u64;
    while let Some(Reverse((d, v))) = heap.pop() {
        let vi = v as usize;
        if removed[vi] || d != deg[vi] {
            continue;
        }
        k = k.max(d);
        core[vi] = k;
        removed[vi] = true;
        for &w in &out[vi] {
            let wi = w as usize;
            if !removed[wi] {
                deg[wi] -= 1;
                heap.push(Reverse((deg[wi], w)));
            }
        }
    }
    core
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcdfPoint {
    pub t: u64,
    /// `P(X > t)`.
    pub p: f64,
}

/// `P(X > t)` at `t = 0` and at every distinct value of `values`.
pub fn ccdf(values: &[u64]) -> Vec<CcdfPoint> {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len() as f64;
    let mut ts: Vec<u64> = std::iter::once(0).chain(v.iter().copied()).collect();
    ts.dedup();
    ts.into_iter()
        .map(|t| {
            let above = v.len() - v.partition_point(|&x| x <= t);
            CcdfPoint {
                t,
                p: if v.is_empty() { 0.0 } else { above as f64 / n },
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCentrality {
    pub group: GroupId,
    pub in_degrees: Vec<u64>,
    pub in_kcores: Vec<u64>,
    pub in_degree_ccdf: Vec<CcdfPoint>,
    pub in_kcore_ccdf: Vec<CcdfPoint>,
}

/// Tests compare the minority sample against the majority sample, so a
/// positive direction means the minority group is more central.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityProfile {
    pub groups: Vec<GroupCentrality>,
    pub in_degree_wilcoxon: TestResult,
    pub in_degree_ks: TestResult,
    pub in_kcore_wilcoxon: TestResult,
    pub in_kcore_ks: TestResult,
}

impl CentralityProfile {
    pub fn group(&self, g: GroupId) -> Option<&GroupCentrality> {
        self.groups.iter().find(|c| c.group == g)
    }
}

pub fn centrality_profile(graph: &LinkGraph, table: &EntityTable, roles: GroupRoles) -> Result<CentralityProfile, StructuralError> {
    let labels = graph.node_groups(table);
    let deg = graph.deduplicated().in_degrees();
    let core = in_kcore(graph);
    let groups: Vec<GroupCentrality> = (0..table.n_groups())
        .map(GroupId)
        .filter(|g| labels.contains(g))
        .map(|g| {
            let pick = |xs: &dyn Fn(usize) -> u64| -> Vec<u64> {
                (0..labels.len()).filter(|&i| labels[i] == g).map(xs).collect()
            };
            let in_degrees = pick(&|i| deg[i] as u64);
            let in_kcores = pick(&|i| core[i]);
            GroupCentrality {
                group: g,
                in_degree_ccdf: ccdf(&in_degrees),
                in_kcore_ccdf: ccdf(&in_kcores),
                in_degrees,
                in_kcores,
            }
        })
        .collect();
    let sample = |g: GroupId| {
        groups
            .iter()
            .find(|c| c.group == g)
            .ok_or_else(|| StructuralError::EmptyGroup(table.group_name(g).to_string()))
    };
    let (minor, major) = (sample(roles.minority)?, sample(roles.majority)?);
    let f = |v: &[u64]| v.iter().map(|&x| x as f64).collect::<Vec<f64>>();
    let (dx, dy) = (f(&minor.in_degrees), f(&major.in_degrees));
    let (kx, ky) = (f(&minor.in_kcores), f(&major.in_kcores));
    Ok(CentralityProfile {
        in_degree_wilcoxon: stats::wilcoxon_rank_sum(&dx, &dy)?,
        in_degree_ks: stats::ks_two_sample(&dx, &dy)?,
        in_kcore_wilcoxon: stats::wilcoxon_rank_sum(&kx, &ky)?,
        in_kcore_ks: stats::ks_two_sample(&kx, &ky)?,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::graph;
    use super::*;
    use crate::stats::Direction;
    use proptest::prelude::*;

    const ROLES: GroupRoles = GroupRoles {
        minority: GroupId(0),
        majority: GroupId(1),
    };

    fn complete(n: u32) -> Vec<(u32, u32)> {
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect()
    }

    /// Coreness by literal peeling at every k.
    fn naive_core(n: usize, edges: &[(u32, u32)]) -> Vec<u64> {
        let mut uniq = edges.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        let mut core = vec![0u64; n];
        for k in 1.. {
            let mut alive = vec![true; n];
            loop {
                let mut deg = vec![0u64; n];
                for &(a, b) in &uniq {
                    if alive[a as usize] && alive[b as usize] {
                        deg[b as usize] += 1;
                    }
                }
                let drop: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] < k).collect();
                if drop.is_empty() {
                    break;
                }
                for v in drop {
                    alive[v] = false;
                }
            }
            if !alive.iter().any(|&a| a) {
                break;
            }
            for v in 0..n {
                if alive[v] {
                    core[v] = k;
                }
            }
        }
        core
    }

    #[test]
    fn cores_by_hand() {
        let (_, g) = graph(&[0, 0, 1], &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(in_kcore(&g), vec![1, 1, 1]);
        let (_, g) = graph(&[0, 0, 1, 1], &complete(4));
        assert_eq!(in_kcore(&g), vec![3; 4]);
        let mut e = complete(4);
        e.extend([(0, 4), (1, 5)]);
        let (_, g) = graph(&[0, 0, 1, 1, 0, 1], &e);
        assert_eq!(in_kcore(&g), vec![3, 3, 3, 3, 1, 1]);
    }

    #[test]
    fn parallel_edges_count_once() {
        let (_, g) = graph(&[0, 1], &[(0, 1), (0, 1), (0, 1)]);
        assert_eq!(in_kcore(&g), vec![0, 0]);
        let (_, g) = graph(&[0, 1], &[(0, 1), (0, 1), (1, 0)]);
        assert_eq!(in_kcore(&g), vec![1, 1]);
    }

    #[test]
    fn ccdf_counting() {
        let c = ccdf(&[1, 2, 3]);
        let pts: Vec<(u64, f64)> = c.iter().map(|p| (p.t, p.p)).collect();
        assert_eq!(pts, vec![(0, 1.0), (1, 2.0 / 3.0), (2, 1.0 / 3.0), (3, 0.0)]);
    }

    #[test]
    fn identical_groups_have_no_direction() {
        // two disjoint 3-cycles, one per group
        let (t, g) = graph(&[0, 0, 0, 1, 1, 1], &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let p = centrality_profile(&g, &t, ROLES).unwrap();
        assert_eq!(p.in_degree_wilcoxon.direction, Direction::Zero);
        assert_eq!(p.in_degree_ks.statistic, 0.0);
    }

    #[test]
    fn separated_degrees() {
        // 25 minority nodes each receive 10 links from the 25 majority nodes,
        // which receive one link each
        let mut labels = vec![0usize; 25];
        labels.extend(vec![1usize; 25]);
        let mut e = Vec::new();
        for f in 0..25u32 {
            for j in 0..10u32 {
                e.push((25 + (f + j) % 25, f));
            }
        }
        for m in 0..25u32 {
            e.push((m, 25 + m));
        }
        let (t, g) = graph(&labels, &e);
        let p = centrality_profile(&g, &t, ROLES).unwrap();
        assert_eq!(p.in_degree_wilcoxon.direction, Direction::Positive);
        assert_eq!(p.in_degree_ks.direction, Direction::Positive);
        assert_eq!(p.in_degree_ks.statistic, 1.0);
        assert!(p.in_degree_ks.p_value < 0.01);
        let swapped = centrality_profile(&g, &t, ROLES.swapped()).unwrap();
        assert_eq!(swapped.in_degree_wilcoxon.direction, Direction::Negative);
    }

    #[test]
    fn empty_group_is_error() {
        let (t, g) = graph(&[1, 1], &[(0, 1)]);
        assert_eq!(centrality_profile(&g, &t, ROLES), Err(StructuralError::EmptyGroup("female".into())));
    }

    fn arb_digraph(max_n: usize, max_e: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
        (2..=max_n).prop_flat_map(move |n| {
            let edge = (0..n as u32, 1..n as u32).prop_map(move |(a, d)| (a, (a + d) % n as u32));
            (Just(n), prop::collection::vec(edge, 0..max_e))
        })
    }

    proptest! {
        #[test]
        fn matches_naive_peeling((n, edges) in arb_digraph(20, 80)) {
            let (_, g) = graph(&vec![0; n], &edges);
            prop_assert_eq!(in_kcore(&g), naive_core(n, &edges));
        }

        #[test]
        fn adding_an_edge_is_monotone((n, edges) in arb_digraph(15, 50), a in 0u32..15, d in 1u32..15) {
            let a = a % n as u32;
            let b = (a + d % (n as u32 - 1).max(1)) % n as u32;
            prop_assume!(a != b);
            let (_, g) = graph(&vec![0; n], &edges);
            let mut more = edges.clone();
            more.push((a, b));
            let (_, g2) = graph(&vec![0; n], &more);
            let (c1, c2) = (in_kcore(&g), in_kcore(&g2));
            prop_assert!(c2[b as usize] >= c1[b as usize]);
            prop_assert!(g2.deduplicated().in_degrees()[b as usize] >= g.deduplicated().in_degrees()[b as usize]);
        }

        #[test]
        fn ccdf_is_non_increasing(v in prop::collection::vec(0u64..30, 1..50)) {
            let c = ccdf(&v);
            prop_assert!(c[0].p <= 1.0);
            prop_assert!(c.windows(2).all(|w| w[1].p <= w[0].p));
            prop_assert_eq!(c.last().unwrap().p, 0.0);
        }
    }
}
