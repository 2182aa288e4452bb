//! Square-free monomial ideals and their Stanley-Reisner correspondence with
//! simplicial complexes.

use std::fmt;

use crate::graph::Graph;
use crate::hierarchy::{self, running_intersection_separators};
use crate::partitions::MultiIndex;
use crate::simplicial::{check_dimension, minimal_sets, minimal_transversals, SimplicialComplex, VertexSet};
use crate::{Error, Result};

/// The square-free monomial `m_K(x) = ∏_{k∈K} x_k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SquareFreeMonomial(VertexSet);

impl SquareFreeMonomial {
    pub fn new(support: VertexSet) -> Self {
        SquareFreeMonomial(support)
    }

    pub fn support(self) -> VertexSet {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.len()
    }

    /// Whether `self` divides `other`.
    pub fn divides(self, other: SquareFreeMonomial) -> bool {
        self.0.is_subset(other.0)
    }
}

impl fmt::Display for SquareFreeMonomial {
    /// `x1*x4`, or `1` for the empty support.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

/// A square-free monomial ideal in `k[x_v : v ∈ ground]`, kept by its
/// minimal generators.
///
/// The unit ideal is represented by the single generator `1` (empty
/// support); it is the Stanley-Reisner ideal of the void complex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareFreeIdeal {
    p: usize,
    ground: VertexSet,
    generators: Vec<VertexSet>,
}

impl SquareFreeIdeal {
    /// The ideal generated by the given supports over `{1..p}`; generators are
    /// reduced to the minimal ones.
    pub fn new(p: usize, generators: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        check_dimension(p)?;
        Self::with_ground(p, VertexSet::full(p), generators)
    }

    pub fn with_ground(p: usize, ground: VertexSet, generators: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        check_dimension(p)?;
        if let Some(v) = ground.difference(VertexSet::full(p)).first() {
            return Err(Error::VertexOutOfRange { vertex: v, p });
        }
        let generators: Vec<VertexSet> = generators.into_iter().collect();
        for g in &generators {
            if let Some(v) = g.difference(ground).first() {
                return Err(Error::VertexOutOfRange { vertex: v, p });
            }
        }
        Ok(SquareFreeIdeal { p, ground, generators: minimal_sets(generators) })
    }

    pub fn from_lists(p: usize, generators: &[Vec<usize>]) -> Result<Self> {
        let sets = generators.iter().map(|g| VertexSet::from_vertices(p, g)).collect::<Result<Vec<_>>>()?;
        Self::new(p, sets)
    }

    pub fn zero(p: usize) -> Result<Self> {
        Self::new(p, [])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    /// Supports of the minimal generators, in canonical order.
    pub fn generators(&self) -> &[VertexSet] {
        &self.generators
    }

    pub fn monomials(&self) -> impl Iterator<Item = SquareFreeMonomial> + '_ {
        self.generators.iter().map(|&g| SquareFreeMonomial(g))
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.is_empty())
    }

    /// Whether every minimal generator has degree `d`.
    pub fn is_generated_in_degree(&self, d: usize) -> bool {
        self.generators.iter().all(|g| g.len() == d)
    }

    /// Membership of a square-free monomial: some generator divides it.
    pub fn contains(&self, m: SquareFreeMonomial) -> bool {
        self.generators.iter().any(|g| g.is_subset(m.support()))
    }

    /// Membership of `x^k` for a general exponent vector: only the support of
    /// `k` matters, since `x^α ∈ I` implies `x^{α+γ} ∈ I`.
    pub fn contains_exponent(&self, k: &MultiIndex) -> Result<bool> {
        if k.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: k.dim() });
        }
        let support = VertexSet::from_vertices(self.p, &k.support().iter().map(|i| i + 1).collect::<Vec<_>>())?;
        Ok(self.contains(SquareFreeMonomial(support)))
    }

    /// Removes the variables in `removed`: generators using them are dropped
    /// and the ring loses those variables.
    pub fn delete_variables(&self, removed: VertexSet) -> SquareFreeIdeal {
        SquareFreeIdeal {
            p: self.p,
            ground: self.ground.difference(removed),
            generators: self.generators.iter().copied().filter(|g| !g.intersects(removed)).collect(),
        }
    }

    /// Graph on the ground set whose edges are the pairs `{u, v}` with
    /// `x_u x_v ∉ I`.
    /// This is the 1-skeleton of [`complex_of`].
    pub fn non_generator_graph(&self) -> Graph {
        let mut g = Graph::new(self.p, self.ground);
        let vertices: Vec<usize> =
            self.ground.iter().filter(|&v| !self.contains(SquareFreeMonomial(VertexSet::singleton(v)))).collect();
        for &v in &vertices {
            g.add_vertex(v);
        }
        for (i, &u) in vertices.iter().enumerate() {
            for &w in &vertices[i + 1..] {
                let pair = VertexSet::singleton(u).union(VertexSet::singleton(w));
                if !self.contains(SquareFreeMonomial(pair)) {
                    g.add_edge(u, w);
                }
            }
        }
        g
    }

    /// Graph on the variables whose edges are the degree-two generators.
    pub fn generator_graph(&self) -> Graph {
        let mut g = Graph::new(self.p, self.ground);
        for gen in self.generators.iter().filter(|g| g.len() == 2) {
            let v = gen.vertices();
            g.add_edge(v[0], v[1]);
        }
        g
    }
}

impl fmt::Display for SquareFreeIdeal {
    /// Comma-separated generators `x1*x4, x1*x5`; the zero ideal prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return f.write_str("0");
        }
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", SquareFreeMonomial(*g))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SquareFreeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

/// The Stanley-Reisner ideal `I_S`, generated by the minimal non-faces of `S`.
pub fn stanley_reisner(complex: &SimplicialComplex) -> SquareFreeIdeal {
    SquareFreeIdeal { p: complex.p(), ground: complex.ground(), generators: complex.minimal_nonfaces() }
}

/// The complex whose faces are the supports `J` with `m_J ∉ I`; inverse of
/// [`stanley_reisner`].
pub fn complex_of(ideal: &SquareFreeIdeal) -> SimplicialComplex {
    // J is a face iff ground ∖ J meets every generator
    let facets = minimal_transversals(&ideal.generators).into_iter().map(|t| ideal.ground.difference(t));
    SimplicialComplex::with_ground(ideal.p, ideal.ground, facets).expect("facets lie within the ground set")
}

/// Whether `I` has a 2-linear minimal free resolution, decided by Fröberg's
/// criterion: `I` is generated in degree two and the graph of non-generator
/// pairs is chordal.
pub fn has_2linear_resolution(ideal: &SquareFreeIdeal) -> bool {
    ideal.is_generated_in_degree(2) && ideal.non_generator_graph().is_chordal()
}

/// The inverse staircase of a Ferrer ideal.
///
/// Row `i` holds the generators `x_{rows[i]} x_{columns[j]}` for
/// `j < lambda[i]`. Variables that appear in no generator are listed as
/// trailing columns without cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FerrerShape {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
    pub lambda: Vec<usize>,
}

impl FerrerShape {
    /// Checks that `lambda` is weakly decreasing, positive and fits the
    /// columns, and that rows and columns are disjoint.
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.len() != self.lambda.len() {
            return Err(Error::InvalidInput("Ferrer shape needs one length per row".into()));
        }
        if self.lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("Ferrer row lengths must be weakly decreasing".into()));
        }
        if self.lambda.iter().any(|&l| l == 0 || l > self.columns.len()) {
            return Err(Error::InvalidInput("Ferrer row length out of range".into()));
        }
        let mut seen = VertexSet::EMPTY;
        for &v in self.rows.iter().chain(&self.columns) {
            if seen.contains(v) {
                return Err(Error::InvalidInput(format!("variable x{v} used twice in Ferrer shape")));
            }
            seen.insert(v);
        }
        Ok(())
    }

    pub fn row_set(&self) -> VertexSet {
        self.rows.iter().fold(VertexSet::EMPTY, |acc, &v| acc.union(VertexSet::singleton(v)))
    }

    pub fn column_set(&self) -> VertexSet {
        self.columns.iter().fold(VertexSet::EMPTY, |acc, &v| acc.union(VertexSet::singleton(v)))
    }

    /// The generators encoded by the table.
    pub fn generators(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        for (&r, &len) in self.rows.iter().zip(&self.lambda) {
            for &c in &self.columns[..len] {
                out.push(VertexSet::singleton(r).union(VertexSet::singleton(c)));
            }
        }
        out
    }
}

/// Recognises a Ferrer ideal and returns its staircase.
///
/// The generators must all have degree two and form a connected bipartite
/// graph. Rows are the side containing the smallest variable; both sides are
/// sorted by degree (descending, ties to the smaller label) and row `i` must
/// then use exactly the first `λ_i` columns.
pub fn recognize_ferrer(ideal: &SquareFreeIdeal) -> Option<FerrerShape> {
    if ideal.is_zero() || !ideal.is_generated_in_degree(2) {
        return None;
    }
    let graph = ideal.generator_graph();
    let active = graph.vertices();
    let components = graph.components();
    if components.len() != 1 {
        return None;
    }

    // two-colour from the smallest variable
    let start = active.first()?;
    let mut side = vec![None::<bool>; ideal.p + 1];
    side[start] = Some(true);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for w in graph.neighbors(u).iter() {
            match side[w] {
                None => {
                    side[w] = Some(!side[u].unwrap());
                    stack.push(w);
                }
                Some(s) if s == side[u].unwrap() => return None,
                _ => {}
            }
        }
    }
    let by_degree = |mut vs: Vec<usize>| {
        vs.sort_by_key(|&v| (std::cmp::Reverse(graph.neighbors(v).len()), v));
        vs
    };
    let rows = by_degree(active.iter().filter(|&v| side[v] == Some(true)).collect());
    let mut columns = by_degree(active.iter().filter(|&v| side[v] == Some(false)).collect());

    let mut lambda = Vec::with_capacity(rows.len());
    for &r in &rows {
        let len = graph.neighbors(r).len();
        let expected = columns[..len].iter().fold(VertexSet::EMPTY, |acc, &c| acc.union(VertexSet::singleton(c)));
        if graph.neighbors(r) != expected {
            return None;
        }
        lambda.push(len);
    }
    columns.extend(ideal.ground.difference(active).iter());
    Some(FerrerShape { rows, columns, lambda })
}

/// Maximal cliques and separators of the model of a Ferrer ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FerrerCliques {
    pub cliques: Vec<VertexSet>,
    pub separators: Vec<VertexSet>,
}

/// Reads the maximal cliques off the complementary table.
///
/// Row `i` contributes its own variable, every row below it and the columns
/// missing from its row; the full column set is one more clique. Non-maximal
/// candidates are dropped and the survivors, in row order, form a perfect
/// sequence whose separators are returned alongside.
pub fn ferrer_cliques(shape: &FerrerShape) -> Result<FerrerCliques> {
    shape.validate()?;
    let mut candidates = Vec::with_capacity(shape.rows.len() + 1);
    for (i, &len) in shape.lambda.iter().enumerate() {
        let mut clique = VertexSet::EMPTY;
        for &r in &shape.rows[i..] {
            clique.insert(r);
        }
        for &c in &shape.columns[len..] {
            clique.insert(c);
        }
        candidates.push(clique);
    }
    candidates.push(shape.column_set());

    let mut cliques: Vec<VertexSet> = Vec::new();
    for (i, &c) in candidates.iter().enumerate() {
        let dominated = candidates.iter().enumerate().any(|(j, &d)| j != i && c.is_subset(d) && (c != d || j < i));
        if !dominated {
            cliques.push(c);
        }
    }
    let separators = running_intersection_separators(&cliques);
    Ok(FerrerCliques { cliques, separators })
}

/// Marginalisation on the ideal side: validates the unique-clique condition
/// on the associated complex, then drops every generator using `removed`.
pub fn ideal_marginalize(ideal: &SquareFreeIdeal, removed: VertexSet) -> Result<SquareFreeIdeal> {
    hierarchy::check_marginalizable(&complex_of(ideal), removed)?;
    Ok(ideal.delete_variables(removed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_vertices(9, v).unwrap()
    }

    fn cx(p: usize, faces: &[&[usize]]) -> SimplicialComplex {
        let faces: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
        SimplicialComplex::from_lists(p, &faces).unwrap()
    }

    fn ideal(p: usize, gens: &[&[usize]]) -> SquareFreeIdeal {
        let gens: Vec<Vec<usize>> = gens.iter().map(|g| g.to_vec()).collect();
        SquareFreeIdeal::from_lists(p, &gens).unwrap()
    }

    fn ferrer_example() -> SquareFreeIdeal {
        ideal(9, &[&[1, 6], &[1, 7], &[1, 8], &[2, 6], &[2, 7], &[3, 6], &[3, 7], &[4, 6], &[5, 6]])
    }

    #[test]
    fn stanley_reisner_examples() {
        let chain = cx(5, &[&[1, 2, 3], &[2, 3, 4], &[3, 4, 5]]);
        assert_eq!(stanley_reisner(&chain).to_string(), "x1*x4, x1*x5, x2*x5");
        let triangle = cx(3, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert_eq!(stanley_reisner(&triangle).to_string(), "x1*x2*x3");
        assert!(stanley_reisner(&SimplicialComplex::simplex(4).unwrap()).is_zero());
        let vertices_only = cx(2, &[&[1], &[2]]);
        assert_eq!(stanley_reisner(&vertices_only).to_string(), "x1*x2");
    }

    #[test]
    fn complex_of_examples() {
        assert_eq!(complex_of(&ideal(3, &[&[1, 2]])).to_string(), "{13,23}");
        assert_eq!(complex_of(&SquareFreeIdeal::zero(3).unwrap()), SimplicialComplex::simplex(3).unwrap());
        let cuts = ideal(5, &[&[1, 4], &[2, 5], &[1, 3, 5], &[2, 3, 4]]);
        assert_eq!(complex_of(&cuts).to_string(), "{15,24,123,345}");
        let unit = SquareFreeIdeal::new(3, [VertexSet::EMPTY]).unwrap();
        assert!(unit.is_unit());
        assert!(complex_of(&unit).is_void());
    }

    #[test]
    fn membership() {
        let i = ideal(3, &[&[1, 2]]);
        assert!(i.contains(SquareFreeMonomial::new(vs(&[1, 2, 3]))));
        assert!(!i.contains(SquareFreeMonomial::new(vs(&[1, 3]))));
        let chain = ideal(5, &[&[1, 4], &[1, 5], &[2, 5]]);
        assert!(chain.contains_exponent(&"1,0,0,2,0".parse().unwrap()).unwrap());
        assert!(!chain.contains_exponent(&"1,1,3,0,0".parse().unwrap()).unwrap());
    }

    #[test]
    fn generators_are_minimalized() {
        let i = ideal(3, &[&[1, 2], &[1, 2, 3], &[1, 2]]);
        assert_eq!(i.generators(), &[vs(&[1, 2])]);
    }

    #[test]
    fn two_linear_examples() {
        assert!(has_2linear_resolution(&ideal(5, &[&[1, 4], &[1, 5], &[2, 5]])));
        assert!(!has_2linear_resolution(&ideal(4, &[&[1, 3], &[2, 4]])));
        assert!(!has_2linear_resolution(&ideal(3, &[&[1, 2, 3]])));
    }

    #[test]
    fn ferrer_recognition() {
        let shape = recognize_ferrer(&ferrer_example()).unwrap();
        assert_eq!(shape.rows, vec![1, 2, 3, 4, 5]);
        assert_eq!(shape.columns, vec![6, 7, 8, 9]);
        assert_eq!(shape.lambda, vec![3, 2, 2, 1, 1]);
        assert!(recognize_ferrer(&ideal(4, &[&[1, 3], &[2, 4]])).is_none());
        let single = recognize_ferrer(&ideal(2, &[&[1, 2]])).unwrap();
        assert_eq!(single.lambda, vec![1]);
        let path = recognize_ferrer(&ideal(4, &[&[1, 2], &[2, 3], &[3, 4]])).unwrap();
        assert_eq!(path.lambda, vec![2, 1]);
        // the next path is bipartite but not a staircase
        assert!(recognize_ferrer(&ideal(5, &[&[1, 2], &[2, 3], &[3, 4], &[4, 5]])).is_none());
        assert!(recognize_ferrer(&ideal(3, &[&[1, 2, 3]])).is_none());
    }

    #[test]
    fn ferrer_cliques_of_example() {
        let shape = recognize_ferrer(&ferrer_example()).unwrap();
        let fc = ferrer_cliques(&shape).unwrap();
        let cliques: Vec<String> = fc.cliques.iter().map(|c| c.to_string()).collect();
        assert_eq!(cliques, ["123459", "234589", "45789", "6789"]);
        let seps: Vec<String> = fc.separators.iter().map(|c| c.to_string()).collect();
        assert_eq!(seps, ["23459", "4589", "789"]);
    }

    #[test]
    fn ferrer_cliques_small() {
        let fc = ferrer_cliques(&recognize_ferrer(&ideal(2, &[&[1, 2]])).unwrap()).unwrap();
        assert_eq!(fc.cliques, vec![vs(&[1]), vs(&[2])]);
        assert_eq!(fc.separators, vec![VertexSet::EMPTY]);

        let shape = recognize_ferrer(&ideal(3, &[&[1, 2]])).unwrap();
        assert_eq!(shape.columns, vec![2, 3]);
        let fc = ferrer_cliques(&shape).unwrap();
        assert_eq!(fc.cliques, vec![vs(&[1, 3]), vs(&[2, 3])]);
    }

    #[test]
    fn shape_validation() {
        let bad = FerrerShape { rows: vec![1, 2], columns: vec![3, 4], lambda: vec![1, 2] };
        assert!(ferrer_cliques(&bad).is_err());
        let reused = FerrerShape { rows: vec![1], columns: vec![1], lambda: vec![1] };
        assert!(reused.validate().is_err());
    }
}
