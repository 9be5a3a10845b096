//! Finite truncations of locally finite simple graphs.
//!
//! A [`Graph`] stores sorted adjacency lists together with a boundary set:
//! the vertices whose neighbour list may be incomplete because the infinite
//! graph was cut off there. Graphs are immutable once built.

pub mod antitree;
pub mod bfs;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of stored (undirected) edges.
pub const MAX_EDGES: usize = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("sphere size n^alpha for n = {n}, alpha = {alpha} cannot be floored reliably")]
    FloorUnresolved { n: u64, alpha: f64 },
    #[error("sphere size n^alpha for n = {n}, alpha = {alpha} overflows u64")]
    Overflow { n: u64, alpha: f64 },
    #[error("truncation too large: {edges} edges exceeds the limit of {limit}")]
    TooLarge { edges: u128, limit: usize },
    #[error("malformed graph document: {0}")]
    Malformed(String),
}

/// Dense 0-based vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

/// Provenance of a vertex: which copy it belongs to and, for radially
/// organised graphs, its sphere and position inside the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub copy: usize,
    pub sphere: Option<usize>,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    boundary: BTreeSet<VertexId>,
    labels: BTreeMap<VertexId, VertexLabel>,
    edge_count: usize,
}

/// Accumulates edges; duplicates are merged and self-loops rejected.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    adjacency: Vec<BTreeSet<VertexId>>,
    boundary: BTreeSet<VertexId>,
    labels: BTreeMap<VertexId, VertexLabel>,
}

impl GraphBuilder {
    pub fn new(vertex_count: usize) -> Self {
        GraphBuilder {
            adjacency: vec![BTreeSet::new(); vertex_count],
            boundary: BTreeSet::new(),
            labels: BTreeMap::new(),
        }
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.adjacency.len() {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.adjacency.len(),
            });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adjacency[u].insert(VertexId(v));
        self.adjacency[v].insert(VertexId(u));
        Ok(self)
    }

    pub fn mark_boundary(&mut self, v: usize) -> Result<&mut Self, GraphError> {
        self.check(v)?;
        self.boundary.insert(VertexId(v));
        Ok(self)
    }

    pub fn label(&mut self, v: usize, label: VertexLabel) -> Result<&mut Self, GraphError> {
        self.check(v)?;
        self.labels.insert(VertexId(v), label);
        Ok(self)
    }

    pub fn build(self) -> Graph {
        let adjacency: Vec<Vec<VertexId>> = self
            .adjacency
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let degree_sum: usize = adjacency.iter().map(Vec::len).sum();
        Graph {
            adjacency,
            boundary: self.boundary,
            labels: self.labels,
            edge_count: degree_sum / 2,
        }
    }
}

impl Graph {
    /// Graph on `n` vertices from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Path 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::Domain(format!(
                "a simple cycle needs at least 3 vertices, got {n}"
            )));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.adjacency.len()
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if !self.contains(v) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v.0,
                vertex_count: self.vertex_count(),
            });
        }
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adjacency.len()).map(VertexId)
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.check(v)?;
        Ok(&self.adjacency[v.0])
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.neighbors(v)?.len())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(u) && self.contains(v) && self.adjacency[u.0].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nb)| {
            nb.iter()
                .filter(move |w| w.0 > u)
                .map(move |&w| (VertexId(u), w))
        })
    }

    pub fn boundary(&self) -> &BTreeSet<VertexId> {
        &self.boundary
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.contains(&v)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, VertexLabel> {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> Option<&VertexLabel> {
        self.labels.get(&v)
    }

    /// Connected components in order of their smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![VertexId(start)];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for w in &self.adjacency[u] {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        comp.push(*w);
                        queue.push_back(w.0);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Disjoint union; copy labels are renumbered so that component `i` gets
/// copy index `i`.
pub fn disjoint_union(graphs: &[Graph]) -> Graph {
    let total: usize = graphs.iter().map(Graph::vertex_count).sum();
    let mut b = GraphBuilder::new(total);
    let mut offset = 0;
    for (i, g) in graphs.iter().enumerate() {
        for (u, w) in g.edges() {
            b.add_edge(offset + u.0, offset + w.0)
                .expect("edges of a valid graph remain valid after shifting");
        }
        for v in g.boundary() {
            b.boundary.insert(VertexId(offset + v.0));
        }
        for v in g.vertices() {
            let base = g.label(v).copied();
            b.labels.insert(
                VertexId(offset + v.0),
                VertexLabel {
                    copy: i,
                    sphere: base.and_then(|l| l.sphere),
                    index: base.and_then(|l| l.index),
                },
            );
        }
        offset += g.vertex_count();
    }
    b.build()
}

/// `n` labelled copies of `g`, with copy `i` joined to copy `i + 1` by an
/// edge between the two images of `v0`.
///
/// Vertex `v` of copy `i` becomes `i * |V(g)| + v`.
pub fn glue_copies(g: &Graph, n: usize, v0: VertexId) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Domain(
            "number of copies must be positive".to_string(),
        ));
    }
    g.check(v0)?;
    let copies = vec![g.clone(); n];
    let union = disjoint_union(&copies);
    let m = g.vertex_count();
    let mut b = GraphBuilder {
        adjacency: union
            .adjacency
            .into_iter()
            .map(|nb| nb.into_iter().collect())
            .collect(),
        boundary: union.boundary,
        labels: union.labels,
    };
    for i in 0..n - 1 {
        b.add_edge(i * m + v0.0, (i + 1) * m + v0.0)?;
    }
    Ok(b.build())
}

/// Outcome of [`is_tree`]. A finite connected graph is a tree exactly when
/// all of its edges are pivotal, i.e. when it has `|V| - 1` edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TreeCheck {
    Tree,
    /// Connected, but `excess_edges` edges lie on cycles.
    HasCycles { excess_edges: usize },
    /// Disconnected input; trees are connected by definition.
    Disconnected { components: usize },
}

impl TreeCheck {
    pub fn holds(&self) -> bool {
        matches!(self, TreeCheck::Tree)
    }
}

pub fn is_tree(g: &Graph) -> TreeCheck {
    let components = g.components().len();
    if components > 1 {
        return TreeCheck::Disconnected { components };
    }
    let n = g.vertex_count();
    if n == 0 {
        return TreeCheck::Disconnected { components: 0 };
    }
    if g.edge_count() == n - 1 {
        TreeCheck::Tree
    } else {
        TreeCheck::HasCycles {
            excess_edges: g.edge_count() + 1 - n,
        }
    }
}

pub fn degree(g: &Graph, v: VertexId) -> Result<usize, GraphError> {
    g.degree(v)
}

/// Wire format: `{vertex_count, edges, boundary, labels}` with edges as
/// sorted `[u, v]` pairs, `u < v`.
#[derive(Debug, Serialize, Deserialize)]
struct GraphDocument {
    vertex_count: usize,
    edges: Vec<[usize; 2]>,
    boundary: Vec<usize>,
    #[serde(default)]
    labels: BTreeMap<usize, VertexLabel>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphDocument {
            vertex_count: self.vertex_count(),
            edges: self.edges().map(|(u, v)| [u.0, v.0]).collect(),
            boundary: self.boundary.iter().map(|v| v.0).collect(),
            labels: self.labels.iter().map(|(k, v)| (k.0, *v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = GraphDocument::deserialize(d)?;
        let malformed = |e: GraphError| serde::de::Error::custom(GraphError::Malformed(e.to_string()));
        let mut b = GraphBuilder::new(doc.vertex_count);
        for [u, v] in doc.edges {
            b.add_edge(u, v).map_err(malformed)?;
        }
        for v in doc.boundary {
            b.mark_boundary(v).map_err(malformed)?;
        }
        for (v, l) in doc.labels {
            b.label(v, l).map_err(malformed)?;
        }
        Ok(b.build())
    }
}
