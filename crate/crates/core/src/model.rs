//! Core domain types: groups, entities, link graphs and documents.
//!
//! Everything here is plain data. Construction never fails; use
//! [`validate_table`] to check the invariants of a table built by hand.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense group identifier, `0..G`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupId(pub usize);

impl GroupId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLabel {
    pub id: GroupId,
    pub name: String,
}

/// One person (or other attributed entity).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub group: GroupId,
    pub datasets: BTreeSet<String>,
    /// Edition code -> covered flag. A missing key means not covered.
    pub covered: BTreeMap<String, bool>,
    /// Edition code -> article word count; only meaningful where covered.
    pub article_length: BTreeMap<String, u64>,
    pub featured_years: BTreeSet<i32>,
}

impl Default for GroupId {
    fn default() -> Self {
        GroupId(0)
    }
}

impl Entity {
    pub fn new(id: impl Into<String>, group: GroupId) -> Self {
        Entity {
            id: id.into(),
            group,
            ..Default::default()
        }
    }

    pub fn is_covered(&self, edition: &str) -> bool {
        self.covered.get(edition).copied().unwrap_or(false)
    }

    pub fn in_dataset(&self, dataset: &str) -> bool {
        self.datasets.contains(dataset)
    }

    pub fn length(&self, edition: &str) -> Option<u64> {
        self.article_length.get(edition).copied()
    }

    pub fn with_dataset(mut self, dataset: impl Into<String>) -> Self {
        self.datasets.insert(dataset.into());
        self
    }

    pub fn with_coverage(mut self, edition: impl Into<String>, length: Option<u64>) -> Self {
        let edition = edition.into();
        if let Some(len) = length {
            self.article_length.insert(edition.clone(), len);
        }
        self.covered.insert(edition, true);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityTable {
    groups: Vec<GroupLabel>,
    editions: Vec<String>,
    entities: Vec<Entity>,
    index: HashMap<String, usize>,
}

impl EntityTable {
    /// Builds a table. Group ids are assigned densely in the order of
    /// `group_names`. Duplicate entity ids are kept (the first one wins for
    /// lookups) so that [`validate_table`] can report them.
    pub fn new(group_names: &[&str], editions: Vec<String>, entities: Vec<Entity>) -> Self {
        let groups = group_names
            .iter()
            .enumerate()
            .map(|(i, n)| GroupLabel {
                id: GroupId(i),
                name: (*n).to_string(),
            })
            .collect();
        Self::from_parts(groups, editions, entities)
    }

    pub fn from_parts(groups: Vec<GroupLabel>, editions: Vec<String>, entities: Vec<Entity>) -> Self {
        let mut index = HashMap::with_capacity(entities.len());
        for (i, e) in entities.iter().enumerate() {
            index.entry(e.id.clone()).or_insert(i);
        }
        EntityTable {
            groups,
            editions,
            entities,
            index,
        }
    }

    pub fn groups(&self) -> &[GroupLabel] {
        &self.groups
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_name(&self, g: GroupId) -> &str {
        self.groups.get(g.0).map(|l| l.name.as_str()).unwrap_or("?")
    }

    pub fn group_by_name(&self, name: &str) -> Option<GroupId> {
        self.groups.iter().find(|l| l.name == name).map(|l| l.id)
    }

    pub fn editions(&self) -> &[String] {
        &self.editions
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.position(id).map(|i| &self.entities[i])
    }

    /// All dataset names mentioned by any entity, sorted.
    pub fn datasets(&self) -> BTreeSet<&str> {
        self.entities
            .iter()
            .flat_map(|e| e.datasets.iter().map(String::as_str))
            .collect()
    }

    pub fn has_dataset(&self, dataset: &str) -> bool {
        self.entities.iter().any(|e| e.in_dataset(dataset))
    }

    pub(crate) fn entities_mut(&mut self) -> &mut [Entity] {
        &mut self.entities
    }
}

/// The two groups compared by every two-sample analysis. `minority` is the
/// group whose advantage counts as a positive direction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRoles {
    pub minority: GroupId,
    pub majority: GroupId,
}

impl GroupRoles {
    pub fn new(minority: GroupId, majority: GroupId) -> Self {
        GroupRoles { minority, majority }
    }

    pub fn swapped(self) -> Self {
        GroupRoles {
            minority: self.majority,
            majority: self.minority,
        }
    }
}

/// Directed multigraph over a subset of table entities.
///
/// Node `i` of the graph is the table entity at position `nodes[i]`; edges
/// are stored as pairs of graph-local node indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    nodes: Vec<usize>,
    edges: Vec<(u32, u32)>,
}

impl LinkGraph {
    /// Direct constructor, checked: every endpoint must be a node index and
    /// self-loops are rejected.
    pub fn from_parts(nodes: Vec<usize>, edges: Vec<(u32, u32)>) -> Option<Self> {
        let n = nodes.len() as u32;
        if edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return None;
        }
        Some(LinkGraph { nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Table positions of the graph nodes.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Group of every node, in node order.
    pub fn node_groups(&self, table: &EntityTable) -> Vec<GroupId> {
        self.nodes.iter().map(|&p| table.entities()[p].group).collect()
    }

    /// The edges as entity id pairs, in edge order.
    pub fn edge_ids(&self, table: &EntityTable) -> Vec<(String, String)> {
        let ents = table.entities();
        self.edges
            .iter()
            .map(|&(a, b)| {
                (
                    ents[self.nodes[a as usize]].id.clone(),
                    ents[self.nodes[b as usize]].id.clone(),
                )
            })
            .collect()
    }

    /// Same graph with parallel edges collapsed; first occurrence order kept.
    pub fn deduplicated(&self) -> LinkGraph {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| seen.insert(*e))
            .collect();
        LinkGraph {
            nodes: self.nodes.clone(),
            edges,
        }
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(_, b) in &self.edges {
            deg[b as usize] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, _) in &self.edges {
            deg[a as usize] += 1;
        }
        deg
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub entity_id: String,
    pub edition: String,
    pub text: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DuplicateId,
    UnknownGroup,
    LengthWithoutCoverage,
    UnknownEdition,
    TooFewGroups,
    NonDenseGroupIds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    /// Offending entity, or `None` for table-level problems.
    pub entity: Option<String>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.entity {
            Some(id) => write!(f, "{}: {}", id, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Checks the table invariants and returns one finding per violation.
pub fn validate_table(table: &EntityTable) -> Vec<Finding> {
    let mut findings = Vec::new();

    if table.groups.iter().enumerate().any(|(i, g)| g.id.0 != i) {
        findings.push(Finding {
            entity: None,
            rule: Rule::NonDenseGroupIds,
            message: "group ids are not dense 0..G-1".into(),
        });
    }
    if table.groups.len() < 2 {
        findings.push(Finding {
            entity: None,
            rule: Rule::TooFewGroups,
            message: format!("{} group label(s); at least 2 required", table.groups.len()),
        });
    }

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for e in &table.entities {
        let count = seen.entry(e.id.as_str()).or_insert(0);
        *count += 1;
        if *count == 2 {
            findings.push(Finding {
                entity: Some(e.id.clone()),
                rule: Rule::DuplicateId,
                message: format!("duplicate entity id {:?}", e.id),
            });
        }
        if e.group.0 >= table.groups.len() {
            findings.push(Finding {
                entity: Some(e.id.clone()),
                rule: Rule::UnknownGroup,
                message: format!("group id {} is not a known label", e.group),
            });
        }
        for ed in e.covered.keys().chain(e.article_length.keys()) {
            if !table.editions.iter().any(|x| x == ed) {
                findings.push(Finding {
                    entity: Some(e.id.clone()),
                    rule: Rule::UnknownEdition,
                    message: format!("edition {ed:?} is not declared by the table"),
                });
            }
        }
        for ed in e.article_length.keys() {
            if !e.is_covered(ed) {
                findings.push(Finding {
                    entity: Some(e.id.clone()),
                    rule: Rule::LengthWithoutCoverage,
                    message: format!("article length set for edition {ed:?} but not covered"),
                });
            }
        }
    }
    findings
}

/// Restricts a raw edge list to covered entities of `edition`.
///
/// Nodes are all entities covered in the edition, in table order. Edges with
/// an unknown or uncovered endpoint are dropped, as are self-loops; the
/// remaining edges keep their order and multiplicity.
pub fn induced_graph<S: AsRef<str>>(table: &EntityTable, edition: &str, edges: &[(S, S)]) -> LinkGraph {
    let mut local = vec![u32::MAX; table.len()];
    let mut nodes = Vec::new();
    for (pos, e) in table.entities().iter().enumerate() {
        // duplicate ids resolve to the first occurrence only
        if e.is_covered(edition) && table.position(&e.id) == Some(pos) {
            local[pos] = nodes.len() as u32;
            nodes.push(pos);
        }
    }
    let lookup = |id: &str| -> Option<u32> {
        let pos = table.position(id)?;
        let l = local[pos];
        (l != u32::MAX).then_some(l)
    };
    let edges = edges
        .iter()
        .filter_map(|(a, b)| {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            (a != b).then_some((a, b))
        })
        .collect();
    LinkGraph { nodes, edges }
}
