//! Labeled undirected graphs over at most 64 vertices, stored as adjacency bitsets.
//!
//! Vertices are 0-based internally. The canonical text form uses 1-based labels,
//! e.g. `1-2 2-3` for the path on three vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices packed into a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(vs: I) -> Self {
        VertexSet(vs.into_iter().fold(0u64, |acc, v| acc | (1u64 << v)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Vertices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    // 1-based, matching the text form of graphs
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v + 1)).finish()
    }
}

/// An undirected simple graph on vertices `0..n`.
///
/// Adjacency is symmetric with an empty diagonal; every constructor and mutator
/// maintains that. Equality and hashing are structural, so a graph is its own
/// canonical identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "GraphRepr", try_from = "GraphRepr")]
pub struct LabeledGraph {
    n: usize,
    adj: Vec<u64>,
}

impl LabeledGraph {
    /// The empty (edgeless) graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidVertexCount(n));
        }
        Ok(LabeledGraph { n, adj: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let all = VertexSet::full(n);
        for v in 0..n {
            g.adj[v] = all.0 & !(1u64 << v);
        }
        Ok(g)
    }

    /// Builds a graph from 0-based edge pairs.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (i, j) in edges {
            g.check_pair(i, j)?;
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Builds a graph whose edge set is given by bit `k` of `mask` for the `k`-th pair in
    /// [`pair_index`] order. Used by exhaustive enumeration.
    pub fn from_pair_mask(n: usize, mask: u64) -> Result<Self> {
        let m = n * n.saturating_sub(1) / 2;
        if m > 64 {
            return Err(Error::InvalidVertexCount(n));
        }
        let mut g = Self::empty(n)?;
        for k in 0..m {
            if mask >> k & 1 == 1 {
                let (i, j) = pair_from_index(n, k);
                g.set_edge(i, j, true);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertex pairs, `n(n-1)/2`.
    pub fn max_edges(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adj[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n || i == j {
            return Err(Error::InvalidPair(i + 1, j + 1));
        }
        Ok(())
    }

    fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        if present {
            self.adj[i] |= 1u64 << j;
            self.adj[j] |= 1u64 << i;
        } else {
            self.adj[i] &= !(1u64 << j);
            self.adj[j] &= !(1u64 << i);
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.set_edge(i, j, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.set_edge(i, j, false);
        Ok(())
    }

    /// Returns a copy with the pair `(i, j)` toggled.
    pub fn flipped(&self, i: usize, j: usize) -> LabeledGraph {
        let mut g = self.clone();
        let present = g.has_edge(i, j);
        g.set_edge(i, j, !present);
        g
    }

    /// Adds (`present = true`) or removes every edge between `a` and `b`.
    pub fn set_edges_between(&mut self, a: VertexSet, b: VertexSet, present: bool) {
        for i in a.iter() {
            for j in b.iter() {
                if i != j {
                    self.set_edge(i, j, present);
                }
            }
        }
    }

    /// Connected components ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::default();
        let mut out = Vec::new();
        for v in 0..self.n {
            if seen.contains(v) {
                continue;
            }
            let mut comp = VertexSet::singleton(v);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = VertexSet::default();
                for u in frontier.iter() {
                    next = next.union(self.neighbors(u));
                }
                frontier = next.difference(comp);
                comp = comp.union(frontier);
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    /// True if every pair inside `set` is adjacent.
    pub fn is_complete_set(&self, set: VertexSet) -> bool {
        set.iter().all(|v| set.difference(VertexSet::singleton(v)).is_subset(self.neighbors(v)))
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            let above = u64::MAX.checked_shl(i as u32 + 1).unwrap_or(0);
            for j in VertexSet(self.adj[i] & above).iter() {
                out.push((i, j));
            }
        }
        out
    }

    /// Applies a vertex relabeling: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> LabeledGraph {
        let mut g = LabeledGraph { n: self.n, adj: vec![0; self.n] };
        for (i, j) in self.edges() {
            g.set_edge(perm[i], perm[j], true);
        }
        g
    }

    /// Canonical text form: sorted `i-j` pairs with 1-based labels, space separated.
    pub fn to_edge_list(&self) -> String {
        self.edges().iter().map(|(i, j)| format!("{}-{}", i + 1, j + 1)).collect::<Vec<_>>().join(" ")
    }

    /// Parses the canonical text form. Pairs may be separated by whitespace or commas,
    /// and need not be sorted.
    pub fn parse_edge_list(n: usize, text: &str) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let (a, b) = tok.split_once('-').ok_or_else(|| Error::Parse(format!("bad edge token `{tok}`")))?;
            let parse = |s: &str| -> Result<usize> {
                s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad vertex label `{s}`")))
            };
            let (i, j) = (parse(a)?, parse(b)?);
            if i == 0 || j == 0 {
                return Err(Error::Parse(format!("labels are 1-based, got `{tok}`")));
            }
            g.add_edge(i - 1, j - 1)?;
        }
        Ok(g)
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledGraph(n={}, [{}])", self.n, self.to_edge_list())
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: String,
}

impl From<LabeledGraph> for GraphRepr {
    fn from(g: LabeledGraph) -> Self {
        GraphRepr { n: g.n, edges: g.to_edge_list() }
    }
}

impl TryFrom<GraphRepr> for LabeledGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        LabeledGraph::parse_edge_list(r.n, &r.edges)
    }
}

/// Index of pair `(i, j)`, `i < j`, in row-major upper-triangular order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}
