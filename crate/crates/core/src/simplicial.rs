//! Abstract simplicial complexes over the vertex labels `1..=p`.
//!
//! Complexes are stored by their facets only. Every query (faces, minimal
//! non-faces, Alexander duals) is answered from the facet list, so the
//! exponential face lattice is never materialised.

use std::cmp::Ordering;
use std::fmt;

use crate::graph::Graph;
use crate::{Error, Result};

/// Largest supported vertex label.
pub const MAX_VERTICES: usize = 64;

/// A set of vertex labels in `1..=64`, one bit per label.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{1, ..., p}`.
    pub fn full(p: usize) -> Self {
        assert!(p <= MAX_VERTICES);
        if p == MAX_VERTICES {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << p) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        assert!((1..=MAX_VERTICES).contains(&v), "vertex label out of range");
        VertexSet(1u64 << (v - 1))
    }

    /// Builds a set from 1-based labels, all of which must lie in `1..=p`.
    pub fn from_vertices(p: usize, vertices: &[usize]) -> Result<Self> {
        check_dimension(p)?;
        let mut bits = 0u64;
        for &v in vertices {
            if v == 0 || v > p {
                return Err(Error::VertexOutOfRange { vertex: v, p });
            }
            bits |= 1u64 << (v - 1);
        }
        Ok(VertexSet(bits))
    }

    pub fn contains(self, v: usize) -> bool {
        (1..=MAX_VERTICES).contains(&v) && self.0 & (1u64 << (v - 1)) != 0
    }

    pub fn insert(&mut self, v: usize) {
        *self = self.union(Self::singleton(v));
    }

    pub fn remove(&mut self, v: usize) {
        *self = self.difference(Self::singleton(v));
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: VertexSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(self, other: VertexSet) -> bool {
        self.0 & other.0 != 0
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

    /// Smallest label, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Labels in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize + 1;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn vertices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let mask = self.0;
        let mut sub = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = VertexSet(sub);
            sub = sub.wrapping_sub(mask) & mask;
            done = sub == 0;
            Some(out)
        })
    }
}

impl Ord for VertexSet {
    /// By size, then lexicographically by increasing label lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexSet {
    /// Concatenated labels (`123`), comma separated once a label exceeds 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.iter().any(|v| v > 9);
        for (i, v) in self.iter().enumerate() {
            if wide && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

pub(crate) fn check_dimension(p: usize) -> Result<()> {
    if p > MAX_VERTICES {
        return Err(Error::TooManyVertices { p, max: MAX_VERTICES });
    }
    if p == 0 {
        return Err(Error::InvalidInput("vertex count must be positive".into()));
    }
    Ok(())
}

/// Keeps the inclusion-maximal sets, deduplicated and in canonical order.
pub(crate) fn maximal_sets(sets: impl IntoIterator<Item = VertexSet>) -> Vec<VertexSet> {
    let mut all: Vec<VertexSet> = sets.into_iter().collect();
    all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    all.dedup();
    let mut kept: Vec<VertexSet> = Vec::new();
    for s in all {
        if !kept.iter().any(|k| s.is_subset(*k)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Keeps the inclusion-minimal sets, deduplicated and in canonical order.
pub(crate) fn minimal_sets(sets: impl IntoIterator<Item = VertexSet>) -> Vec<VertexSet> {
    let mut all: Vec<VertexSet> = sets.into_iter().collect();
    all.sort();
    all.dedup();
    let mut kept: Vec<VertexSet> = Vec::new();
    for s in all {
        if !kept.iter().any(|k| k.is_subset(s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Minimal sets meeting every member of `edges` (Berge's algorithm).
pub(crate) fn minimal_transversals(edges: &[VertexSet]) -> Vec<VertexSet> {
    let mut transversals = vec![VertexSet::EMPTY];
    for &edge in edges {
        let mut next = Vec::new();
        for t in transversals {
            if t.intersects(edge) {
                next.push(t);
            } else {
                next.extend(edge.iter().map(|v| t.union(VertexSet::singleton(v))));
            }
        }
        transversals = minimal_sets(next);
    }
    transversals
}

/// A simplicial complex over a ground set of labels, stored by facets.
///
/// The ground set is `{1..p}` unless the complex came out of a
/// marginalisation, in which case deleted vertices are absent from it.
/// Vertices of the ground set that lie in no facet are non-faces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    p: usize,
    ground: VertexSet,
    facets: Vec<VertexSet>,
}

impl SimplicialComplex {
    /// Downward closure of `faces` over `{1..p}`.
    pub fn new(p: usize, faces: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        check_dimension(p)?;
        Self::with_ground(p, VertexSet::full(p), faces)
    }

    /// Downward closure of `faces` over an explicit ground set `ground ⊆ {1..p}`.
    pub fn with_ground(p: usize, ground: VertexSet, faces: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        check_dimension(p)?;
        if let Some(v) = ground.difference(VertexSet::full(p)).first() {
            return Err(Error::VertexOutOfRange { vertex: v, p });
        }
        let faces: Vec<VertexSet> = faces.into_iter().collect();
        for f in &faces {
            if let Some(v) = f.difference(ground).first() {
                return Err(Error::VertexOutOfRange { vertex: v, p });
            }
        }
        Ok(SimplicialComplex { p, ground, facets: maximal_sets(faces) })
    }

    /// Builds a complex from 1-based vertex lists.
    pub fn from_lists(p: usize, faces: &[Vec<usize>]) -> Result<Self> {
        let sets = faces.iter().map(|f| VertexSet::from_vertices(p, f)).collect::<Result<Vec<_>>>()?;
        Self::new(p, sets)
    }

    /// The complex with no faces at all.
    pub fn void(p: usize) -> Result<Self> {
        Self::new(p, [])
    }

    /// The complex whose only face is the empty set.
    pub fn empty(p: usize) -> Result<Self> {
        Self::new(p, [VertexSet::EMPTY])
    }

    /// The full simplex on the ground set.
    pub fn simplex(p: usize) -> Result<Self> {
        Self::new(p, [VertexSet::full(p)])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    /// Maximal faces in canonical order (by size, then lexicographically).
    pub fn facets(&self) -> &[VertexSet] {
        &self.facets
    }

    pub fn is_void(&self) -> bool {
        self.facets.is_empty()
    }

    /// Vertices `v` with `{v}` a face.
    pub fn vertices(&self) -> VertexSet {
        self.facets.iter().fold(VertexSet::EMPTY, |acc, f| acc.union(*f))
    }

    pub fn is_face(&self, face: VertexSet) -> bool {
        self.facets.iter().any(|f| face.is_subset(*f))
    }

    /// Inclusion-minimal subsets of the ground set that are not faces.
    ///
    /// The void complex yields `{∅}` and the full simplex yields nothing.
    pub fn minimal_nonfaces(&self) -> Vec<VertexSet> {
        let complements: Vec<VertexSet> = self.facets.iter().map(|f| self.ground.difference(*f)).collect();
        minimal_transversals(&complements)
    }

    /// `S* = { N ∖ J : J ∉ S }`, whose facets are complements of the minimal
    /// non-faces of `S`.
    pub fn alexander_dual(&self) -> SimplicialComplex {
        let facets = self.minimal_nonfaces().into_iter().map(|k| self.ground.difference(k));
        SimplicialComplex { p: self.p, ground: self.ground, facets: maximal_sets(facets) }
    }

    /// The graph of vertices and edges of the complex.
    pub fn one_skeleton(&self) -> Graph {
        let mut g = Graph::new(self.p, self.ground);
        for f in &self.facets {
            for v in f.iter() {
                g.add_vertex(v);
            }
            for u in f.iter() {
                for w in f.iter().filter(|&w| w > u) {
                    g.add_edge(u, w);
                }
            }
        }
        g
    }

    /// The clique complex of a graph: faces are the cliques.
    pub fn flag_complex(graph: &Graph) -> SimplicialComplex {
        SimplicialComplex { p: graph.p(), ground: graph.ground(), facets: maximal_sets(graph.maximal_cliques()) }
    }

    /// The subcomplex induced on `ground ∖ removed`, with `removed` dropped
    /// from the ground set.
    pub fn delete_vertices(&self, removed: VertexSet) -> SimplicialComplex {
        let ground = self.ground.difference(removed);
        let facets = self.facets.iter().map(|f| f.difference(removed));
        SimplicialComplex { p: self.p, ground, facets: maximal_sets(facets) }
    }

    /// Whether every face of `self` is a face of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.facets.iter().all(|f| other.is_face(*f))
    }
}

impl fmt::Display for SimplicialComplex {
    /// The facet list in the `{13,23}` shorthand; `{}` for the void complex and
    /// `{∅}` for the empty complex.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.ground.iter().any(|v| v > 9);
        f.write_str("{")?;
        for (i, facet) in self.facets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if facet.is_empty() {
                f.write_str("∅")?;
            } else if wide {
                write!(f, "{{{facet}}}")?;
            } else {
                write!(f, "{facet}")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialComplex(p={}, {self})", self.p)
    }
}
