//! Decomposability testing and clique/separator decompositions.
//!
//! Chordality is decided by maximum cardinality search (MCS) followed by a check
//! that the reverse visit order is a perfect elimination ordering. On chordal
//! graphs the same visit order yields the maximal cliques in a perfect ordering:
//! a new clique starts whenever the weight of the visited vertex fails to grow,
//! and its separator is the set of previously visited neighbours of that vertex.

use crate::error::{Error, Result};
use crate::graph::{pair_from_index, LabeledGraph, VertexSet};

/// Maximal cliques of a decomposable graph in a perfect ordering.
///
/// `separators[i - 1]` is `H_{i+1} = C_{i+1} ∩ (C_1 ∪ .. ∪ C_i)`; separators joining
/// disconnected components are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueDecomposition {
    cliques: Vec<VertexSet>,
    separators: Vec<VertexSet>,
}

impl CliqueDecomposition {
    pub fn cliques(&self) -> &[VertexSet] {
        &self.cliques
    }

    /// All separators `H_2..H_{n_c}`, including empty ones.
    pub fn separators(&self) -> &[VertexSet] {
        &self.separators
    }

    /// Non-empty separators, with multiplicity.
    pub fn nonempty_separators(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.separators.iter().copied().filter(|s| !s.is_empty())
    }

    pub fn clique_count(&self) -> usize {
        self.cliques.len()
    }

    pub fn nonempty_separator_count(&self) -> usize {
        self.nonempty_separators().count()
    }

    pub fn clique_sizes(&self) -> Vec<usize> {
        self.cliques.iter().map(|c| c.len()).collect()
    }

    /// Sizes of non-empty separators.
    pub fn separator_sizes(&self) -> Vec<usize> {
        self.nonempty_separators().map(|s| s.len()).collect()
    }

    /// Checks every structural invariant against `g`, returning a description of the
    /// first violation.
    pub fn validate(&self, g: &LabeledGraph) -> std::result::Result<(), String> {
        if self.cliques.is_empty() {
            return Err("no cliques".into());
        }
        if self.separators.len() != self.cliques.len() - 1 {
            return Err("separator count must be clique count minus one".into());
        }
        let mut covered = VertexSet::EMPTY;
        for (i, &c) in self.cliques.iter().enumerate() {
            if c.is_empty() || !g.is_complete_set(c) {
                return Err(format!("clique {c:?} is not complete"));
            }
            // maximal: no outside vertex is adjacent to all of c
            let common = c.iter().fold(VertexSet::full(g.n()), |acc, v| acc.intersection(g.neighbors(v)));
            if !common.is_empty() {
                return Err(format!("clique {c:?} is not maximal"));
            }
            if i > 0 {
                let h = c.intersection(covered);
                if h != self.separators[i - 1] {
                    return Err(format!("separator {i} is {:?}, expected {h:?}", self.separators[i - 1]));
                }
                if !self.cliques[..i].iter().any(|&e| h.is_subset(e)) {
                    return Err(format!("separator {h:?} not contained in an earlier clique"));
                }
            }
            covered = covered.union(c);
        }
        for (a, &c) in self.cliques.iter().enumerate() {
            for (b, &d) in self.cliques.iter().enumerate() {
                if a != b && c.is_subset(d) {
                    return Err(format!("clique {c:?} is nested in {d:?}"));
                }
            }
        }
        if covered != VertexSet::full(g.n()) {
            return Err("cliques do not cover all vertices".into());
        }
        let total: usize = self.cliques.iter().map(|c| c.len()).sum::<usize>()
            - self.separators.iter().map(|s| s.len()).sum::<usize>();
        if total != g.n() {
            return Err(format!("vertex-count identity gives {total}, expected {}", g.n()));
        }
        Ok(())
    }
}

struct Search {
    order: Vec<usize>,
    // previously visited neighbours of order[i], indexed by position
    earlier: Vec<VertexSet>,
}

fn max_cardinality_search(g: &LabeledGraph, start: usize) -> Search {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = VertexSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    let mut earlier = Vec::with_capacity(n);
    for step in 0..n {
        let v = if step == 0 {
            start
        } else {
            // ties go to the smallest label
            let mut best = usize::MAX;
            let mut best_w = 0;
            for (u, &w) in weight.iter().enumerate().take(n) {
                if !visited.contains(u) && (best == usize::MAX || w > best_w) {
                    best = u;
                    best_w = w;
                }
            }
            best
        };
        earlier.push(g.neighbors(v).intersection(visited));
        visited.insert(v);
        order.push(v);
        for u in g.neighbors(v).difference(visited).iter() {
            weight[u] += 1;
        }
    }
    Search { order, earlier }
}

fn is_perfect_elimination(search: &Search, n: usize) -> bool {
    let mut position = vec![0usize; n];
    for (i, &v) in search.order.iter().enumerate() {
        position[v] = i;
    }
    for i in 0..n {
        let madj = search.earlier[i];
        if madj.len() < 2 {
            continue;
        }
        let parent = madj.iter().max_by_key(|&u| position[u]).unwrap();
        let rest = madj.difference(VertexSet::singleton(parent));
        if !rest.is_subset(search.earlier[position[parent]]) {
            return false;
        }
    }
    true
}

/// True iff `g` is chordal (admits a perfect ordering of its cliques).
pub fn is_decomposable(g: &LabeledGraph) -> bool {
    is_perfect_elimination(&max_cardinality_search(g, 0), g.n())
}

/// Clique decomposition with the search started at vertex 0.
pub fn clique_decomposition(g: &LabeledGraph) -> Result<CliqueDecomposition> {
    clique_decomposition_from(g, 0)
}

/// Clique decomposition with the search started at `start`. Different starting
/// vertices generally produce different, equally valid, perfect orderings.
pub fn clique_decomposition_from(g: &LabeledGraph, start: usize) -> Result<CliqueDecomposition> {
    if start >= g.n() {
        return Err(Error::InvalidPair(start + 1, start + 1));
    }
    let search = max_cardinality_search(g, start);
    if !is_perfect_elimination(&search, g.n()) {
        return Err(Error::NotDecomposable);
    }
    let mut cliques = Vec::new();
    let mut separators = Vec::new();
    let mut current = VertexSet::EMPTY;
    let mut prev_weight = 0usize;
    for (i, &v) in search.order.iter().enumerate() {
        let madj = search.earlier[i];
        if i > 0 && madj.len() <= prev_weight {
            cliques.push(current);
            separators.push(madj);
            current = madj;
        }
        current.insert(v);
        prev_weight = madj.len();
    }
    cliques.push(current);
    Ok(CliqueDecomposition { cliques, separators })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipAction {
    Add,
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeFlipProposal {
    pub pair: (usize, usize),
    pub action: FlipAction,
    /// Whether the flipped graph is decomposable.
    pub legal: bool,
}

/// Decides whether toggling `pair` keeps `g` decomposable.
pub fn edge_flip_legal(g: &LabeledGraph, pair: (usize, usize), action: FlipAction) -> Result<EdgeFlipProposal> {
    let (i, j) = pair;
    if i >= g.n() || j >= g.n() || i == j {
        return Err(Error::InvalidPair(i + 1, j + 1));
    }
    let present = g.has_edge(i, j);
    match (action, present) {
        (FlipAction::Add, true) => {
            return Err(Error::InvalidFlip { action: "add", i: i + 1, j: j + 1, reason: "edge already present" })
        }
        (FlipAction::Delete, false) => {
            return Err(Error::InvalidFlip { action: "delete", i: i + 1, j: j + 1, reason: "edge absent" })
        }
        _ => {}
    }
    Ok(EdgeFlipProposal { pair, action, legal: is_decomposable(&g.flipped(i, j)) })
}

/// Every labeled decomposable graph on `n` vertices, in increasing edge-mask order.
pub fn enumerate_decomposable_graphs(n: usize) -> Result<Vec<LabeledGraph>> {
    if n > 6 {
        return Err(Error::TooLarge { what: "enumeration", n, limit: 6 });
    }
    let m = n * n.saturating_sub(1) / 2;
    let mut out = Vec::new();
    for mask in 0..(1u64 << m) {
        let g = LabeledGraph::from_pair_mask(n, mask)?;
        if is_decomposable(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

/// Chordality by explicit enumeration of simple cycles of length at least four,
/// each checked for a chord. Independent of the search-based test; meant as an oracle.
pub fn brute_force_chordal(g: &LabeledGraph) -> Result<bool> {
    let n = g.n();
    if n > 10 {
        return Err(Error::TooLarge { what: "brute-force chordality", n, limit: 10 });
    }
    // Each cycle is rooted at its smallest vertex.
    for root in 0..n {
        let mut path = vec![root];
        if !extend_without_chordless_cycle(g, root, &mut path) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn extend_without_chordless_cycle(g: &LabeledGraph, root: usize, path: &mut Vec<usize>) -> bool {
    let last = *path.last().unwrap();
    for next in g.neighbors(last).iter() {
        if next == root && path.len() >= 4 && !cycle_has_chord(g, path) {
            return false;
        }
        if next > root && !path.contains(&next) {
            path.push(next);
            let ok = extend_without_chordless_cycle(g, root, path);
            path.pop();
            if !ok {
                return false;
            }
        }
    }
    true
}

fn cycle_has_chord(g: &LabeledGraph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    for a in 0..k {
        for b in a + 2..k {
            if a == 0 && b == k - 1 {
                continue;
            }
            if g.has_edge(cycle[a], cycle[b]) {
                return true;
            }
        }
    }
    false
}

/// All vertex pairs `(i, j)` with `i < j`, in pair-index order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n * n.saturating_sub(1) / 2).map(move |k| pair_from_index(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> LabeledGraph {
        // 1-based for readability
        LabeledGraph::from_edges(n, edges.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
    }

    fn set(vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(vs.iter().map(|v| v - 1))
    }

    #[test]
    fn simple_cases() {
        assert!(is_decomposable(&LabeledGraph::complete(4).unwrap()));
        assert!(!is_decomposable(&g(4, &[(1, 2), (2, 3), (3, 4), (4, 1)])));
        for n in 1..10 {
            assert!(is_decomposable(&LabeledGraph::empty(n).unwrap()));
        }
    }

    #[test]
    fn path_decomposition() {
        let d = clique_decomposition(&g(3, &[(1, 2), (2, 3)])).unwrap();
        assert_eq!(d.cliques(), &[set(&[1, 2]), set(&[2, 3])]);
        assert_eq!(d.separators(), &[set(&[2])]);
        assert_eq!(d.nonempty_separator_count(), 1);
    }

    #[test]
    fn empty_graph_decomposition() {
        let d = clique_decomposition(&LabeledGraph::empty(3).unwrap()).unwrap();
        assert_eq!(d.cliques(), &[set(&[1]), set(&[2]), set(&[3])]);
        assert_eq!(d.separators(), &[VertexSet::EMPTY, VertexSet::EMPTY]);
        assert_eq!(d.nonempty_separator_count(), 0);
    }

    #[test]
    fn k4_minus_edge() {
        let mut k4 = LabeledGraph::complete(4).unwrap();
        k4.remove_edge(0, 2).unwrap();
        let d = clique_decomposition(&k4).unwrap();
        assert_eq!(d.cliques(), &[set(&[1, 2, 4]), set(&[2, 3, 4])]);
        assert_eq!(d.separators(), &[set(&[2, 4])]);
        d.validate(&k4).unwrap();
    }

    #[test]
    fn not_decomposable_error() {
        let c4 = g(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(matches!(clique_decomposition(&c4), Err(Error::NotDecomposable)));
    }

    #[test]
    fn flips() {
        let p4 = g(4, &[(1, 2), (2, 3), (3, 4)]);
        assert!(!edge_flip_legal(&p4, (0, 3), FlipAction::Add).unwrap().legal);
        assert!(edge_flip_legal(&p4, (0, 2), FlipAction::Add).unwrap().legal);
        let k3 = LabeledGraph::complete(3).unwrap();
        assert!(edge_flip_legal(&k3, (0, 1), FlipAction::Delete).unwrap().legal);
        assert!(matches!(edge_flip_legal(&k3, (0, 1), FlipAction::Add), Err(Error::InvalidFlip { .. })));
        assert!(matches!(edge_flip_legal(&p4, (0, 3), FlipAction::Delete), Err(Error::InvalidFlip { .. })));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_decomposable_graphs(1).unwrap().len(), 1);
        assert_eq!(enumerate_decomposable_graphs(2).unwrap().len(), 2);
        assert_eq!(enumerate_decomposable_graphs(3).unwrap().len(), 8);
        assert_eq!(enumerate_decomposable_graphs(4).unwrap().len(), 61);
        assert!(matches!(enumerate_decomposable_graphs(7), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn brute_force_cases() {
        let c4 = g(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(!brute_force_chordal(&c4).unwrap());
        let mut chorded = c4.clone();
        chorded.add_edge(0, 2).unwrap();
        assert!(brute_force_chordal(&chorded).unwrap());
        assert!(brute_force_chordal(&LabeledGraph::complete(5).unwrap()).unwrap());
        // 5-cycle with one chord still leaves a chordless 4-cycle
        let c5 = g(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3)]);
        assert!(!brute_force_chordal(&c5).unwrap());
        assert!(brute_force_chordal(&LabeledGraph::empty(11).unwrap()).is_err());
    }

    #[test]
    fn disconnected_components_get_empty_separators() {
        let h = g(5, &[(1, 2), (4, 5)]);
        let d = clique_decomposition(&h).unwrap();
        d.validate(&h).unwrap();
        assert_eq!(d.clique_count(), 3);
        assert_eq!(d.nonempty_separator_count(), 0);
    }
}
