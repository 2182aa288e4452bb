//! Simple undirected graphs on vertex labels, with clique enumeration and
//! chordality tests.

use crate::simplicial::{VertexSet, MAX_VERTICES};

/// An undirected simple graph whose vertices are a subset of a ground set of
/// labels in `1..=p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    p: usize,
    ground: VertexSet,
    vertices: VertexSet,
    adj: Vec<VertexSet>,
}

impl Graph {
    /// An edgeless graph with no vertices over the given ground set.
    pub fn new(p: usize, ground: VertexSet) -> Self {
        assert!(p <= MAX_VERTICES);
        Graph { p, ground, vertices: VertexSet::EMPTY, adj: vec![VertexSet::EMPTY; p + 1] }
    }

    /// Graph with every ground vertex present and the given edges.
    pub fn with_edges(p: usize, edges: &[(usize, usize)]) -> Self {
        let ground = VertexSet::full(p);
        let mut g = Graph::new(p, ground);
        for v in ground.iter() {
            g.add_vertex(v);
        }
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    pub fn vertices(&self) -> VertexSet {
        self.vertices
    }

    pub fn add_vertex(&mut self, v: usize) {
        assert!(self.ground.contains(v), "vertex {v} outside the ground set");
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self loops are not allowed");
        self.add_vertex(u);
        self.add_vertex(v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.iter().flat_map(|u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn is_clique(&self, set: VertexSet) -> bool {
        set.is_subset(self.vertices)
            && set.iter().all(|v| set.difference(VertexSet::singleton(v)).is_subset(self.adj[v]))
    }

    /// Induced subgraph on `keep ∩ vertices`.
    pub fn induced(&self, keep: VertexSet) -> Graph {
        let mut g = Graph::new(self.p, self.ground);
        g.vertices = self.vertices.intersection(keep);
        for v in g.vertices.iter() {
            g.adj[v] = self.adj[v].intersection(g.vertices);
        }
        g
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting). A graph without
    /// vertices has the single maximal clique `∅`.
    pub fn maximal_cliques(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        self.bron_kerbosch(VertexSet::EMPTY, self.vertices, VertexSet::EMPTY, &mut out);
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: VertexSet, p: VertexSet, x: VertexSet, out: &mut Vec<VertexSet>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r);
            }
            return;
        }
        let pivot = p
            .union(x)
            .iter()
            .max_by_key(|&u| (p.intersection(self.adj[u]).len(), std::cmp::Reverse(u)))
            .expect("non-empty candidate set");
        let mut p = p;
        let mut x = x;
        for v in p.difference(self.adj[pivot]).iter() {
            let nv = self.adj[v];
            self.bron_kerbosch(r.union(VertexSet::singleton(v)), p.intersection(nv), x.intersection(nv), out);
            p.remove(v);
            x.insert(v);
        }
    }

    /// Maximum cardinality search: repeatedly number the unnumbered vertex
    /// with the most numbered neighbours, ties to the lowest label.
    pub fn maximum_cardinality_search(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.vertices.len());
        let mut numbered = VertexSet::EMPTY;
        let mut weight = vec![0usize; self.p + 1];
        while numbered != self.vertices {
            let v = self
                .vertices
                .difference(numbered)
                .iter()
                .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
                .expect("unnumbered vertex remains");
            order.push(v);
            numbered.insert(v);
            for w in self.adj[v].difference(numbered).iter() {
                weight[w] += 1;
            }
        }
        order
    }

    /// Whether the reverse of `order` is a perfect elimination ordering:
    /// the earlier neighbours of every vertex form a clique.
    pub fn is_perfect_ordering(&self, order: &[usize]) -> bool {
        let mut earlier = VertexSet::EMPTY;
        for &v in order {
            let before = self.adj[v].intersection(earlier);
            if !self.is_clique(before) {
                return false;
            }
            earlier.insert(v);
        }
        true
    }

    /// Chordality via maximum cardinality search.
    pub fn is_chordal(&self) -> bool {
        self.is_perfect_ordering(&self.maximum_cardinality_search())
    }

    /// A chordless cycle of length at least four, if one exists.
    ///
    /// For each vertex `v` and non-adjacent pair of neighbours `a, b`, a
    /// shortest `a`–`b` path avoiding the rest of `N[v]` closes an induced
    /// cycle through `v`; every chordless cycle arises this way.
    pub fn chordless_cycle(&self) -> Option<Vec<usize>> {
        for v in self.vertices.iter() {
            let nv = self.adj[v];
            for a in nv.iter() {
                for b in nv.iter().filter(|&b| b > a && !self.has_edge(a, b)) {
                    let blocked = nv.union(VertexSet::singleton(v));
                    let allowed =
                        self.vertices.difference(blocked).union(VertexSet::singleton(a)).union(VertexSet::singleton(b));
                    if let Some(path) = self.shortest_path(a, b, allowed) {
                        let mut cycle = vec![v];
                        cycle.extend(path);
                        return Some(cycle);
                    }
                }
            }
        }
        None
    }

    fn shortest_path(&self, from: usize, to: usize, allowed: VertexSet) -> Option<Vec<usize>> {
        let mut prev = vec![0usize; self.p + 1];
        let mut seen = VertexSet::singleton(from);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.adj[u].intersection(allowed).difference(seen).iter() {
                seen.insert(w);
                prev[w] = u;
                queue.push_back(w);
            }
        }
        None
    }

    /// Vertex sets of the connected components, ordered by smallest label.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut left = self.vertices;
        let mut out = Vec::new();
        while let Some(start) = left.first() {
            let mut comp = VertexSet::singleton(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = VertexSet::EMPTY;
                for u in frontier.iter() {
                    next = next.union(self.adj[u]);
                }
                frontier = next.difference(comp);
                comp = comp.union(frontier);
            }
            left = left.difference(comp);
            out.push(comp);
        }
        out
    }
}
