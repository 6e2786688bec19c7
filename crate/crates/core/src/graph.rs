//! Finite simple graphs, their cliques and clique neighborhoods.
//!
//! Vertices are addressed by their position in the declaration order. Every
//! deterministic ordering downstream (block keys, clique order, word order)
//! is derived from that position.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex in declaration order.
pub type Vertex = usize;

/// A sorted set of vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn new(mut vs: Vec<Vertex>) -> Self {
        vs.sort_unstable();
        vs.dedup();
        VertexSet(vs)
    }

    /// Members of `mask` (bit `i` set means vertex `i` is present).
    pub fn from_mask(mask: u64) -> Self {
        VertexSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &v| m | 1 << v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

#[derive(Deserialize, Serialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Finite undirected simple graph over named vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    labels: Vec<String>,
    index: HashMap<String, Vertex>,
    adj: Vec<Vec<bool>>,
}

impl SimpleGraph {
    /// Builds a graph from labels and label pairs, validating every invariant.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        let mut labels = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let v = v.as_ref().to_string();
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v));
            }
            labels.push(v);
        }
        let n = labels.len();
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| Error::UndeclaredVertex(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UndeclaredVertex(b.to_string()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a.to_string()));
            }
            // A repeated edge (in either orientation) collapses onto the same entry.
            adj[ia][ib] = true;
            adj[ib][ia] = true;
        }
        Ok(SimpleGraph { labels, index, adj })
    }

    /// Parses the JSON graph format `{"vertices": [..], "edges": [[a, b], ..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        SimpleGraph::new(&file.vertices, &file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.labels.clone(),
            edges: self.edges().map(|(a, b)| (self.labels[a].clone(), self.labels[b].clone())).collect(),
        };
        serde_json::to_string(&file).expect("graph serialization")
    }

    /// Complete graph on the given labels.
    pub fn complete<S: AsRef<str>>(vertices: &[S]) -> Self {
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                edges.push((vertices[i].as_ref(), vertices[j].as_ref()));
            }
        }
        let vs: Vec<&str> = vertices.iter().map(|v| v.as_ref()).collect();
        SimpleGraph::new(&vs, &edges).expect("complete graph is valid")
    }

    /// Graph without edges on the given labels.
    pub fn edgeless<S: AsRef<str>>(vertices: &[S]) -> Self {
        let vs: Vec<&str> = vertices.iter().map(|v| v.as_ref()).collect();
        SimpleGraph::new::<&str>(&vs, &[]).expect("edgeless graph is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<Vertex> {
        self.index.get(label).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.labels.len()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((0..self.len()).collect())
    }

    pub fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a][b]
    }

    /// Edges as index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |a| (a + 1..n).filter(move |&b| self.adj[a][b]).map(move |b| (a, b)))
    }

    pub fn is_complete(&self) -> bool {
        self.edges().count() == self.len() * self.len().saturating_sub(1) / 2
    }

    pub fn is_clique(&self, set: &VertexSet) -> bool {
        let s = set.as_slice();
        s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| self.adj[a][b]))
    }

    /// All cliques, including the empty set and all singletons, ordered by
    /// descending size and then lexicographically.
    pub fn cliques(&self) -> Vec<VertexSet> {
        fn extend(g: &SimpleGraph, current: &mut Vec<Vertex>, start: Vertex, out: &mut Vec<VertexSet>) {
            out.push(VertexSet(current.clone()));
            for v in start..g.len() {
                if current.iter().all(|&u| g.adj[u][v]) {
                    current.push(v);
                    extend(g, current, v + 1, out);
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        extend(self, &mut Vec::new(), 0, &mut out);
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Cliques contained in `within`.
    pub fn cliques_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        self.cliques().into_iter().filter(|c| c.is_subset(within)).collect()
    }

    /// Vertices outside `clique` adjacent to every member of it; all vertices
    /// for the empty clique.
    pub fn neighborhood(&self, clique: &VertexSet) -> Result<VertexSet> {
        if !self.is_clique(clique) {
            return Err(Error::NotAClique(self.format_set(clique)));
        }
        Ok(self.vertices().filter(|&l| !clique.contains(l) && clique.iter().all(|u| self.adj[l][u])).collect())
    }

    /// Renders a vertex set as `{a,b}` using labels.
    pub fn format_set(&self, set: &VertexSet) -> String {
        let inner: Vec<&str> = set.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", inner.join(","))
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// The three-vertex graph with a single edge between `1` and `2`.
pub fn edge_plus_point() -> SimpleGraph {
    SimpleGraph::new(&["1", "2", "3"], &[("1", "2")]).expect("valid")
}

/// The four-vertex graph with every edge except `(1, 3)`.
pub fn diamond() -> SimpleGraph {
    SimpleGraph::new(&["1", "2", "3", "4"], &[("1", "2"), ("1", "4"), ("2", "3"), ("2", "4"), ("3", "4")])
        .expect("valid")
}
