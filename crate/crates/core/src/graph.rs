//! Simple graphs whose edges carry a label in {-1, +1}.
//!
//! Adjacency and the set of `+1` edges are kept as one bitset row per vertex.
//! Non-edges have no label at all.

use std::collections::BTreeSet;
use std::path::Path;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge label, always `-1` or `1`.
pub type Label = i8;

pub type VertexSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    adj: Vec<FixedBitSet>,
    plus: Vec<FixedBitSet>,
    edge_count: usize,
}

/// Mutable construction stage for [`ColoredGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    g: ColoredGraph,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            g: ColoredGraph {
                n,
                adj: vec![FixedBitSet::with_capacity(n); n],
                plus: vec![FixedBitSet::with_capacity(n); n],
                edge_count: 0,
            },
        }
    }

    /// Adds `{u,v}` with the given label. Re-adding an edge with the same
    /// label is a no-op; a different label is an error.
    pub fn add_edge(&mut self, u: usize, v: usize, label: i64) -> Result<&mut Self> {
        let n = self.g.n;
        for w in [u, v] {
            if w >= n {
                return Err(Error::VertexOutOfRange { v: w, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if label != 1 && label != -1 {
            return Err(Error::InvalidLabel { u, v, label });
        }
        if let Some(old) = self.g.label(u, v) {
            if i64::from(old) != label {
                return Err(Error::ConflictingEdge(u.min(v), u.max(v)));
            }
            return Ok(self);
        }
        self.g.adj[u].insert(v);
        self.g.adj[v].insert(u);
        if label == 1 {
            self.g.plus[u].insert(v);
            self.g.plus[v].insert(u);
        }
        self.g.edge_count += 1;
        Ok(self)
    }

    pub fn build(self) -> ColoredGraph {
        self.g
    }
}

impl ColoredGraph {
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    /// Complete graph on `n` vertices with every edge labelled `label`.
    pub fn complete(n: usize, label: Label) -> Self {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge(u, v, label.into()).expect("valid edge");
            }
        }
        b.build()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for &(u, v, l) in edges {
            b.add_edge(u, v, l)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn label(&self, u: usize, v: usize) -> Option<Label> {
        if !self.has_edge(u, v) {
            None
        } else if self.plus[u].contains(v) {
            Some(1)
        } else {
            Some(-1)
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    /// Neighbours joined to `v` by a `+1` edge.
    pub fn plus_neighbors(&self, v: usize) -> &FixedBitSet {
        &self.plus[v]
    }

    /// All edges as `(u, v, label)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adj[u]
                .ones()
                .filter(move |&v| v > u)
                .map(move |v| (u, v, if self.plus[u].contains(v) { 1 } else { -1 }))
        })
    }

    /// Same graph with every label flipped.
    pub fn negated(&self) -> Self {
        let mut plus = Vec::with_capacity(self.n);
        for u in 0..self.n {
            let mut row = self.adj[u].clone();
            row.difference_with(&self.plus[u]);
            plus.push(row);
        }
        ColoredGraph { n: self.n, adj: self.adj.clone(), plus, edge_count: self.edge_count }
    }

    /// Same graph with every edge relabelled to `label`.
    pub fn relabeled(&self, label: Label) -> Self {
        let plus = if label == 1 { self.adj.clone() } else { vec![FixedBitSet::with_capacity(self.n); self.n] };
        ColoredGraph { n: self.n, adj: self.adj.clone(), plus, edge_count: self.edge_count }
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { v, n: self.n })
        }
    }

    pub fn is_clique(&self, vs: &[usize]) -> Result<()> {
        for &v in vs {
            self.check_vertex(v)?;
        }
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !self.has_edge(u, v) {
                    return Err(Error::NotClique(u, v));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile { n: self.n, edges: self.edges().map(|(u, v, l)| [u as i64, v as i64, l.into()]).collect() };
        serde_json::to_string(&file).expect("graph serializes")
    }

    /// Parses the graph file format. Pairs given as `u > v` are accepted and
    /// normalized.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut b = GraphBuilder::new(file.n);
        for [u, v, l] in file.edges {
            let conv = |x: i64| usize::try_from(x).map_err(|_| Error::Parse(format!("negative vertex id {x}")));
            b.add_edge(conv(u)?, conv(v)?, l)?;
        }
        Ok(b.build())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<[i64; 3]>,
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<ColoredGraph> {
    let text = std::fs::read_to_string(path)?;
    ColoredGraph::from_json(&text)
}

pub fn save_graph(g: &ColoredGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, g.to_json())?;
    Ok(())
}

pub fn min_degree(g: &ColoredGraph) -> usize {
    (0..g.n()).map(|v| g.degree(v)).min().unwrap_or(0)
}

pub fn common_neighborhood(g: &ColoredGraph, s: &VertexSet) -> Result<VertexSet> {
    let mut acc = FixedBitSet::with_capacity(g.n());
    acc.insert_range(..);
    for &v in s {
        g.check_vertex(v)?;
        acc.intersect_with(g.neighbors(v));
    }
    Ok(acc.ones().collect())
}

/// Whether `min_degree(g) >= ceil((1 - 1/(r+1) + eta) * n)`.
pub fn check_degree_threshold(g: &ColoredGraph, r: usize, eta: Ratio<i64>) -> Result<bool> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let r1 = Ratio::new(1, r as i64 + 1);
    if eta < Ratio::from_integer(0) || eta >= r1 {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, 1/{})", r + 1)));
    }
    let need = ((Ratio::from_integer(1) - r1 + eta) * Ratio::from_integer(g.n() as i64)).ceil().to_integer();
    Ok(min_degree(g) as i64 >= need)
}
