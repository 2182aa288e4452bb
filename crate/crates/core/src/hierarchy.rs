//! Decomposable models: clique/separator factorizations, marginalisation and
//! conditional-independence statements.

use std::fmt;

use crate::ideal::{self, SquareFreeIdeal};
use crate::partitions::MultiIndex;
use crate::simplicial::{SimplicialComplex, VertexSet};
use crate::{Error, Result};

/// Why a complex fails to be decomposable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// An induced cycle of length at least four in the 1-skeleton.
    ChordlessCycle(Vec<usize>),
    /// A clique of the 1-skeleton that is not a face (e.g. the boundary of a
    /// triangle).
    NonFlagFace(VertexSet),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::ChordlessCycle(cycle) => {
                let labels: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
                write!(f, "chordless cycle {}", labels.join("-"))
            }
            Witness::NonFlagFace(face) => write!(f, "clique {{{face}}} is not a face"),
        }
    }
}

/// `Ok` when the complex is the clique complex of a chordal graph, otherwise
/// a witness against decomposability.
pub fn decomposability(complex: &SimplicialComplex) -> std::result::Result<(), Witness> {
    if complex.is_void() {
        return Err(Witness::NonFlagFace(VertexSet::EMPTY));
    }
    // flag iff every minimal non-face among the vertices has at most two elements
    let vertices = complex.vertices();
    if let Some(k) = complex.minimal_nonfaces().into_iter().find(|k| k.len() >= 3 && k.is_subset(vertices)) {
        return Err(Witness::NonFlagFace(k));
    }
    let skeleton = complex.one_skeleton();
    if !skeleton.is_chordal() {
        let cycle = skeleton.chordless_cycle().expect("a non-chordal graph has a chordless cycle");
        return Err(Witness::ChordlessCycle(cycle));
    }
    Ok(())
}

pub fn is_decomposable(complex: &SimplicialComplex) -> bool {
    decomposability(complex).is_ok()
}

/// A perfect sequence of maximal cliques with separators
/// `S_j = C_j ∩ (C_1 ∪ … ∪ C_{j−1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub cliques: Vec<VertexSet>,
    pub separators: Vec<VertexSet>,
}

impl Factorization {
    /// Each separator lies inside a single earlier clique.
    pub fn has_running_intersection(&self) -> bool {
        self.separators.len() + 1 == self.cliques.len().max(1)
            && self.separators.iter().enumerate().all(|(j, s)| self.cliques[..=j].iter().any(|c| s.is_subset(*c)))
    }
}

impl fmt::Display for Factorization {
    /// `f{123} f{234} f{345} / f{23} f{34}`; empty separators are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num: Vec<String> = self.cliques.iter().map(|c| format!("f{{{c}}}")).collect();
        f.write_str(&num.join(" "))?;
        let den: Vec<String> = self.separators.iter().filter(|s| !s.is_empty()).map(|s| format!("f{{{s}}}")).collect();
        if !den.is_empty() {
            write!(f, " / {}", den.join(" "))?;
        }
        Ok(())
    }
}

/// Separators of a clique sequence.
pub fn running_intersection_separators(cliques: &[VertexSet]) -> Vec<VertexSet> {
    let mut seen = VertexSet::EMPTY;
    let mut out = Vec::with_capacity(cliques.len().saturating_sub(1));
    for (j, &c) in cliques.iter().enumerate() {
        if j > 0 {
            out.push(c.intersection(seen));
        }
        seen = seen.union(c);
    }
    out
}

/// Factorizes a decomposable complex.
///
/// Vertices are numbered by maximum cardinality search (ties to the lowest
/// label); each vertex with its earlier neighbours spans a clique, and the
/// maximal ones, in order of appearance, form a perfect sequence.
pub fn factorize(complex: &SimplicialComplex) -> Result<Factorization> {
    decomposability(complex).map_err(|w| Error::NotDecomposable(w.to_string()))?;
    let skeleton = complex.one_skeleton();
    let order = skeleton.maximum_cardinality_search();
    let mut numbered = VertexSet::EMPTY;
    let mut candidates = Vec::with_capacity(order.len());
    for &v in &order {
        let clique = skeleton.neighbors(v).intersection(numbered).union(VertexSet::singleton(v));
        candidates.push(clique);
        numbered.insert(v);
    }
    let mut cliques: Vec<VertexSet> = Vec::new();
    for (i, &c) in candidates.iter().enumerate() {
        if !candidates.iter().enumerate().any(|(j, &d)| j != i && c.is_proper_subset(d)) {
            cliques.push(c);
        }
    }
    if cliques.is_empty() {
        // the complex {∅}
        cliques.push(VertexSet::EMPTY);
    }
    let separators = running_intersection_separators(&cliques);
    Ok(Factorization { cliques, separators })
}

/// Checks that `removed` is non-empty and lies inside one facet which is the
/// only facet meeting it.
pub(crate) fn check_marginalizable(complex: &SimplicialComplex, removed: VertexSet) -> Result<()> {
    let label = || format!("{{{removed}}}");
    if removed.is_empty() {
        return Err(Error::InvalidInput("nothing to marginalise".into()));
    }
    if let Some(v) = removed.difference(complex.ground()).first() {
        return Err(Error::VertexOutOfRange { vertex: v, p: complex.p() });
    }
    let mut meeting = complex.facets().iter().filter(|f| f.intersects(removed));
    match (meeting.next(), meeting.next()) {
        (Some(f), None) if removed.is_subset(*f) => Ok(()),
        _ => Err(Error::NotUniqueClique(label())),
    }
}

/// The marginal model after integrating out `removed`.
///
/// Every vertex of `removed` must belong to the same maximal clique and to
/// no other, so the integration only touches one clique term. The result
/// lives on the ground set without `removed`.
pub fn marginalize(complex: &SimplicialComplex, removed: VertexSet) -> Result<SimplicialComplex> {
    check_marginalizable(complex, removed)?;
    Ok(complex.delete_vertices(removed))
}

/// Marginalises one vertex set after another, validating every step.
pub fn strip_sequence(complex: &SimplicialComplex, steps: &[VertexSet]) -> Result<Vec<SimplicialComplex>> {
    let mut out = Vec::with_capacity(steps.len());
    let mut current = complex.clone();
    for &step in steps {
        current = marginalize(&current, step)?;
        out.push(current.clone());
    }
    Ok(out)
}

pub use ideal::ideal_marginalize;

/// The conditional independence statement `X_I ⫫ X_J | X_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIStatement {
    p: usize,
    i: VertexSet,
    j: VertexSet,
    k: VertexSet,
}

impl CIStatement {
    /// `I` and `J` must be non-empty, and `I, J, K` must partition `{1..p}`.
    pub fn new(p: usize, i: VertexSet, j: VertexSet, k: VertexSet) -> Result<Self> {
        crate::simplicial::check_dimension(p)?;
        if i.is_empty() || j.is_empty() {
            return Err(Error::InvalidInput("I and J must be non-empty".into()));
        }
        if i.intersects(j) || i.intersects(k) || j.intersects(k) {
            return Err(Error::InvalidInput("I, J and K must be disjoint".into()));
        }
        if i.union(j).union(k) != VertexSet::full(p) {
            return Err(Error::InvalidInput(format!("I, J and K must cover 1..={p}")));
        }
        Ok(CIStatement { p, i, j, k })
    }

    /// `K` is taken as everything outside `I ∪ J`.
    pub fn given_rest(p: usize, i: VertexSet, j: VertexSet) -> Result<Self> {
        crate::simplicial::check_dimension(p)?;
        let k = VertexSet::full(p).difference(i.union(j));
        Self::new(p, i, j, k)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn sets(&self) -> (VertexSet, VertexSet, VertexSet) {
        (self.i, self.j, self.k)
    }
}

impl fmt::Display for CIStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{{{}}} _||_ X{{{}}} | X{{{}}}", self.i, self.j, self.k)
    }
}

/// The zero-cumulant orders `{e_i + e_j : i ∈ I, j ∈ J}` equivalent to the
/// statement, ordered by `i` then `j`.
pub fn ci_to_generators(statement: &CIStatement) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for a in statement.i.iter() {
        for b in statement.j.iter() {
            out.push(MultiIndex::indicator(statement.p, [a - 1, b - 1]));
        }
    }
    out
}

/// The ideal `⟨x_i x_j : i ∈ I, j ∈ J⟩`.
pub fn ci_ideal(statement: &CIStatement) -> SquareFreeIdeal {
    let gens = statement
        .i
        .iter()
        .flat_map(|a| statement.j.iter().map(move |b| VertexSet::singleton(a).union(VertexSet::singleton(b))));
    SquareFreeIdeal::new(statement.p, gens).expect("generators lie in 1..=p")
}

/// Generators `e_i + e_j` for every pair, equivalent to full independence.
pub fn pairwise_generators(p: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            out.push(MultiIndex::indicator(p, [a, b]));
        }
    }
    out
}
