//! Damaged-network instances, island partition and the soft precedence tree.
//!
//! Ids in input files are opaque strings. After validation every node and
//! line gets a dense index in sorted id order, and every line is oriented
//! away from the root so that `upstream` is the parent node.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Instance exactly as it appears in an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub root: String,
    pub crews: usize,
    pub nodes: Vec<RawNode>,
    pub lines: Vec<RawLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNode {
    pub id: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLine {
    pub id: String,
    pub from: String,
    pub to: String,
    pub repair_time: f64,
    #[serde(rename = "switch")]
    pub is_switch: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("root `{0}` is not a node of the instance")]
    UnknownRoot(String),
    #[error("line `{line}` references unknown node `{node}`")]
    UnknownEndpoint { line: String, node: String },
    #[error("line `{0}` closes a cycle")]
    CycleDetected(String),
    #[error("node `{0}` is not connected to the root")]
    Disconnected(String),
    #[error("line `{0}` has a negative repair time")]
    NegativeRepairTime(String),
    #[error("node `{0}` has a negative weight")]
    NegativeWeight(String),
    #[error("`{0}` carries a non-finite value")]
    NonFinite(String),
    #[error("crew count must be at least 1, got {0}")]
    InvalidCrewCount(usize),
    #[error("at least one node weight must be strictly positive")]
    NoPositiveWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub weight: f64,
}

/// A line oriented away from the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: String,
    pub upstream: usize,
    pub downstream: usize,
    pub repair_time: f64,
    pub is_switch: bool,
}

/// A validated damaged tree. Undamaged lines carry a zero repair time.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    nodes: Vec<Node>,
    lines: Vec<Line>,
    root: usize,
    crews: usize,
    parent_line: Vec<Option<usize>>,
    /// Nodes in breadth-first order from the root.
    bfs_order: Vec<usize>,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Checks every structural assumption and returns the normalized instance.
pub fn validate(raw: &RawInstance) -> Result<NetworkInstance, ModelError> {
    if raw.crews == 0 {
        return Err(ModelError::InvalidCrewCount(raw.crews));
    }

    let mut node_order: Vec<usize> = (0..raw.nodes.len()).collect();
    node_order.sort_by(|&a, &b| raw.nodes[a].id.cmp(&raw.nodes[b].id));
    let mut node_index = HashMap::with_capacity(raw.nodes.len());
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    for &k in &node_order {
        let node = &raw.nodes[k];
        if node_index.insert(node.id.as_str(), nodes.len()).is_some() {
            return Err(ModelError::DuplicateId { kind: "node", id: node.id.clone() });
        }
        if !node.weight.is_finite() {
            return Err(ModelError::NonFinite(node.id.clone()));
        }
        if node.weight < 0.0 {
            return Err(ModelError::NegativeWeight(node.id.clone()));
        }
        nodes.push(Node { id: node.id.clone(), weight: node.weight });
    }
    let root = *node_index.get(raw.root.as_str()).ok_or_else(|| ModelError::UnknownRoot(raw.root.clone()))?;

    let mut seen_lines = HashMap::with_capacity(raw.lines.len());
    for line in &raw.lines {
        if seen_lines.insert(line.id.as_str(), ()).is_some() {
            return Err(ModelError::DuplicateId { kind: "line", id: line.id.clone() });
        }
        for end in [&line.from, &line.to] {
            if !node_index.contains_key(end.as_str()) {
                return Err(ModelError::UnknownEndpoint { line: line.id.clone(), node: end.clone() });
            }
        }
        if !line.repair_time.is_finite() {
            return Err(ModelError::NonFinite(line.id.clone()));
        }
        if line.repair_time < 0.0 {
            return Err(ModelError::NegativeRepairTime(line.id.clone()));
        }
    }
    if !nodes.iter().any(|n| n.weight > 0.0) {
        return Err(ModelError::NoPositiveWeight);
    }

    // Cycles are reported on the first line (in file order) that closes one.
    let mut dsu = DisjointSet::new(nodes.len());
    for line in &raw.lines {
        if !dsu.union(node_index[line.from.as_str()], node_index[line.to.as_str()]) {
            return Err(ModelError::CycleDetected(line.id.clone()));
        }
    }
    let root_set = dsu.find(root);
    if let Some(n) = (0..nodes.len()).find(|&n| dsu.find(n) != root_set) {
        return Err(ModelError::Disconnected(nodes[n].id.clone()));
    }

    let mut line_order: Vec<usize> = (0..raw.lines.len()).collect();
    line_order.sort_by(|&a, &b| raw.lines[a].id.cmp(&raw.lines[b].id));
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
    for (idx, &k) in line_order.iter().enumerate() {
        let line = &raw.lines[k];
        let (u, v) = (node_index[line.from.as_str()], node_index[line.to.as_str()]);
        adjacency[u].push((v, idx));
        adjacency[v].push((u, idx));
    }

    let mut parent_line = vec![None; nodes.len()];
    let mut upstream = vec![usize::MAX; line_order.len()];
    let mut visited = vec![false; nodes.len()];
    let mut bfs_order = Vec::with_capacity(nodes.len());
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(u) = queue.pop_front() {
        bfs_order.push(u);
        for &(v, idx) in &adjacency[u] {
            if !visited[v] {
                visited[v] = true;
                parent_line[v] = Some(idx);
                upstream[idx] = u;
                queue.push_back(v);
            }
        }
    }

    let lines = line_order
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let line = &raw.lines[k];
            let (u, v) = (node_index[line.from.as_str()], node_index[line.to.as_str()]);
            let up = upstream[idx];
            Line {
                id: line.id.clone(),
                upstream: up,
                downstream: if up == u { v } else { u },
                repair_time: line.repair_time,
                is_switch: line.is_switch,
            }
        })
        .collect();

    Ok(NetworkInstance { nodes, lines, root, crews: raw.crews, parent_line, bfs_order })
}

impl NetworkInstance {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn crews(&self) -> usize {
        self.crews
    }

    /// Same network with a different crew count.
    pub fn with_crews(&self, crews: usize) -> Result<Self, ModelError> {
        if crews == 0 {
            return Err(ModelError::InvalidCrewCount(crews));
        }
        Ok(NetworkInstance { crews, ..self.clone() })
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn parent_line(&self, node: usize) -> Option<usize> {
        self.parent_line[node]
    }

    pub fn bfs_order(&self) -> &[usize] {
        &self.bfs_order
    }

    pub fn repair_times(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.repair_time).collect()
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.lines.binary_search_by(|l| l.id.as_str().cmp(id)).ok()
    }

    pub fn num_switches(&self) -> usize {
        self.lines.iter().filter(|l| l.is_switch).count()
    }

    /// Back to the file representation, with lines written root-outward in
    /// sorted id order.
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            root: self.nodes[self.root].id.clone(),
            crews: self.crews,
            nodes: self.nodes.iter().map(|n| RawNode { id: n.id.clone(), weight: n.weight }).collect(),
            lines: self
                .lines
                .iter()
                .map(|l| RawLine {
                    id: l.id.clone(),
                    from: self.nodes[l.upstream].id.clone(),
                    to: self.nodes[l.downstream].id.clone(),
                    repair_time: l.repair_time,
                    is_switch: l.is_switch,
                })
                .collect(),
        }
    }
}

/// Moves every non-root node weight onto its parent line. The root is always
/// energized, so its weight is dropped.
pub fn derive_line_weights(instance: &NetworkInstance) -> Vec<f64> {
    instance.lines.iter().map(|l| instance.nodes[l.downstream].weight).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Island {
    pub id: usize,
    /// Member line indices, ascending.
    pub lines: Vec<usize>,
    /// Member node indices, ascending.
    pub nodes: Vec<usize>,
    pub weight: f64,
    pub processing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IslandSet {
    islands: Vec<Island>,
    line_island: Vec<usize>,
    node_island: Vec<usize>,
    root_island: usize,
}

impl IslandSet {
    pub fn islands(&self) -> &[Island] {
        &self.islands
    }

    pub fn len(&self) -> usize {
        self.islands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.islands.is_empty()
    }

    pub fn island_of_line(&self, line: usize) -> usize {
        self.line_island[line]
    }

    pub fn island_of_node(&self, node: usize) -> usize {
        self.node_island[node]
    }

    pub fn root_island(&self) -> usize {
        self.root_island
    }

    pub fn weights(&self) -> Vec<f64> {
        self.islands.iter().map(|i| i.weight).collect()
    }
}

/// Splits the tree at its switch lines. A switch line joins the island below
/// it; the root island has no incoming switch and may own no lines at all when
/// every line leaving the root is a switch.
///
/// Island ids follow the smallest member line index, with a line-less root
/// island first.
pub fn partition_islands(instance: &NetworkInstance) -> IslandSet {
    let n = instance.nodes.len();
    let mut top = vec![usize::MAX; n];
    for &u in &instance.bfs_order {
        top[u] = match instance.parent_line[u] {
            None => u,
            Some(l) if instance.lines[l].is_switch => u,
            Some(l) => top[instance.lines[l].upstream],
        };
    }

    let mut first_line: HashMap<usize, Option<usize>> = HashMap::new();
    for &u in &instance.bfs_order {
        first_line.entry(top[u]).or_insert(None);
    }
    for (idx, line) in instance.lines.iter().enumerate() {
        let slot = first_line.get_mut(&top[line.downstream]).expect("component registered");
        *slot = Some(slot.map_or(idx, |s: usize| s.min(idx)));
    }
    let mut components: Vec<(Option<usize>, usize)> = first_line.into_iter().map(|(t, first)| (first, t)).collect();
    components.sort();
    let id_of_top: HashMap<usize, usize> = components.iter().enumerate().map(|(id, &(_, t))| (t, id)).collect();

    let mut islands: Vec<Island> = (0..components.len())
        .map(|id| Island { id, lines: Vec::new(), nodes: Vec::new(), weight: 0.0, processing: 0.0 })
        .collect();
    let node_island: Vec<usize> = (0..n).map(|u| id_of_top[&top[u]]).collect();
    for (u, &j) in node_island.iter().enumerate() {
        islands[j].nodes.push(u);
    }
    let weights = derive_line_weights(instance);
    let mut line_island = Vec::with_capacity(instance.lines.len());
    for (idx, line) in instance.lines.iter().enumerate() {
        let j = node_island[line.downstream];
        line_island.push(j);
        let island = &mut islands[j];
        island.lines.push(idx);
        island.weight += weights[idx];
        island.processing += line.repair_time;
    }
    let root_island = node_island[instance.root];
    IslandSet { islands, line_island, node_island, root_island }
}

/// Out-tree over islands: an edge per switch line, from the island holding
/// the switch's upstream node to the island it feeds.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecedenceGraph {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
    topo_order: Vec<usize>,
    depth: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

pub fn build_precedence_graph(instance: &NetworkInstance, islands: &IslandSet) -> PrecedenceGraph {
    let k = islands.len();
    let mut parent = vec![None; k];
    let mut children = vec![Vec::new(); k];
    let mut edges = Vec::new();
    for line in instance.lines.iter().filter(|l| l.is_switch) {
        let (from, to) = (islands.island_of_node(line.upstream), islands.island_of_node(line.downstream));
        parent[to] = Some(from);
        children[from].push(to);
        edges.push((from, to));
    }
    for c in &mut children {
        c.sort_unstable();
    }
    edges.sort_unstable();

    let root = islands.root_island();
    let mut topo_order = Vec::with_capacity(k);
    let mut depth = vec![0; k];
    let mut queue = VecDeque::from([root]);
    while let Some(j) = queue.pop_front() {
        topo_order.push(j);
        for &c in &children[j] {
            depth[c] = depth[j] + 1;
            queue.push_back(c);
        }
    }
    PrecedenceGraph { parent, children, root, topo_order, depth, edges }
}

impl PrecedenceGraph {
    pub fn parent(&self, island: usize) -> Option<usize> {
        self.parent[island]
    }

    pub fn children(&self, island: usize) -> &[usize] {
        &self.children[island]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Islands in breadth-first order from the root island; every parent
    /// precedes its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn depth(&self, island: usize) -> usize {
        self.depth[island]
    }

    /// `(parent, child)` pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_islands(&self) -> usize {
        self.parent.len()
    }

    /// True when `upper` lies on the path from the root island to `lower`
    /// (inclusive).
    pub fn precedes_or_equal(&self, upper: usize, lower: usize) -> bool {
        let mut cur = Some(lower);
        while let Some(j) = cur {
            if j == upper {
                return true;
            }
            cur = self.parent[j];
        }
        false
    }
}

/// A validated instance together with everything derived from its topology.
#[derive(Debug, Clone)]
pub struct Problem {
    pub instance: NetworkInstance,
    pub line_weights: Vec<f64>,
    pub islands: IslandSet,
    pub precedence: PrecedenceGraph,
}

impl Problem {
    pub fn new(instance: NetworkInstance) -> Self {
        let line_weights = derive_line_weights(&instance);
        let islands = partition_islands(&instance);
        let precedence = build_precedence_graph(&instance, &islands);
        Problem { instance, line_weights, islands, precedence }
    }

    pub fn from_raw(raw: &RawInstance) -> Result<Self, ModelError> {
        validate(raw).map(Problem::new)
    }

    pub fn crews(&self) -> usize {
        self.instance.crews()
    }

    pub fn num_lines(&self) -> usize {
        self.instance.num_lines()
    }

    pub fn repair_times(&self) -> Vec<f64> {
        self.instance.repair_times()
    }

    pub fn line_id(&self, line: usize) -> &str {
        &self.instance.lines()[line].id
    }
}
