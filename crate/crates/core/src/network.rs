//! Two-terminal networks, their minimal cuts and paths, and the cut and path
//! ideals.
//!
//! Edge `e_i` corresponds to the variable `x_i`, so edge sets are stored as
//! [`VertexSet`]s over the edge ids `1..=p`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ideal::{complex_of, SquareFreeIdeal};
use crate::simplicial::{minimal_sets, SimplicialComplex, VertexSet, MAX_VERTICES};
use crate::{Error, Result};

/// Cut enumeration walks vertex bipartitions, so the node count is bounded.
pub const MAX_NETWORK_NODES: usize = 24;

/// An undirected edge with its id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

/// An undirected multigraph with distinguished input and output nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<usize>,
    edges: Vec<Edge>,
    input: usize,
    output: usize,
}

impl Network {
    /// Validates node membership, dense edge ids `1..=p`, the absence of
    /// self loops and distinct terminals.
    pub fn new(nodes: Vec<usize>, mut edges: Vec<Edge>, input: usize, output: usize) -> Result<Self> {
        let node_set: BTreeSet<usize> = nodes.iter().copied().collect();
        if node_set.len() != nodes.len() {
            return Err(Error::InvalidNetwork("duplicate node".into()));
        }
        if node_set.len() > MAX_NETWORK_NODES {
            return Err(Error::InvalidNetwork(format!(
                "{} nodes exceed the limit of {MAX_NETWORK_NODES}",
                node_set.len()
            )));
        }
        for t in [input, output] {
            if !node_set.contains(&t) {
                return Err(Error::InvalidNetwork(format!("terminal {t} is not a node")));
            }
        }
        if input == output {
            return Err(Error::InvalidNetwork("input and output coincide".into()));
        }
        if edges.is_empty() {
            return Err(Error::InvalidNetwork("network has no edges".into()));
        }
        if edges.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices { p: edges.len(), max: MAX_VERTICES });
        }
        edges.sort_by_key(|e| e.id);
        for (i, e) in edges.iter().enumerate() {
            if e.id != i + 1 {
                return Err(Error::InvalidNetwork("edge ids must be exactly 1..p".into()));
            }
            if !node_set.contains(&e.u) || !node_set.contains(&e.v) {
                return Err(Error::InvalidNetwork(format!("edge {} has an endpoint that is not a node", e.id)));
            }
            if e.u == e.v {
                return Err(Error::InvalidNetwork(format!("edge {} is a self loop", e.id)));
            }
        }
        Ok(Network { nodes: node_set.into_iter().collect(), edges, input, output })
    }

    /// Builds a network from `(u, v)` pairs; the i-th pair gets id `i + 1`
    /// and the nodes are the endpoints.
    pub fn from_pairs(pairs: &[(usize, usize)], input: usize, output: usize) -> Result<Self> {
        let mut nodes: BTreeSet<usize> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        nodes.insert(input);
        nodes.insert(output);
        let edges = pairs.iter().enumerate().map(|(i, &(u, v))| Edge { id: i + 1, u, v }).collect();
        Self::new(nodes.into_iter().collect(), edges, input, output)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn input(&self) -> usize {
        self.input
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Number of edges, i.e. of variables.
    pub fn p(&self) -> usize {
        self.edges.len()
    }

    fn node_index(&self, node: usize) -> usize {
        self.nodes.binary_search(&node).expect("validated node")
    }

    /// Whether output is reachable from input using only the allowed edges.
    pub fn connects(&self, allowed: VertexSet) -> bool {
        let mut reached = vec![false; self.nodes.len()];
        reached[self.node_index(self.input)] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for e in self.edges.iter().filter(|e| allowed.contains(e.id)) {
                let (a, b) = (self.node_index(e.u), self.node_index(e.v));
                if reached[a] != reached[b] {
                    reached[a] = true;
                    reached[b] = true;
                    changed = true;
                }
            }
        }
        reached[self.node_index(self.output)]
    }

    fn check_connected(&self) -> Result<()> {
        if self.connects(VertexSet::full(self.p())) {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Edge sets of the simple input–output paths, in canonical order.
    pub fn minimal_paths(&self) -> Result<Vec<VertexSet>> {
        self.check_connected()?;
        let mut found = Vec::new();
        let mut visited = vec![false; self.nodes.len()];
        visited[self.node_index(self.input)] = true;
        self.walk(self.input, VertexSet::EMPTY, &mut visited, &mut found);
        let mut paths = minimal_sets(found);
        paths.sort();
        Ok(paths)
    }

    fn walk(&self, at: usize, used: VertexSet, visited: &mut [bool], found: &mut Vec<VertexSet>) {
        if at == self.output {
            found.push(used);
            return;
        }
        for e in &self.edges {
            let next = if e.u == at {
                e.v
            } else if e.v == at {
                e.u
            } else {
                continue;
            };
            let idx = self.node_index(next);
            if visited[idx] {
                continue;
            }
            visited[idx] = true;
            self.walk(next, used.union(VertexSet::singleton(e.id)), visited, found);
            visited[idx] = false;
        }
    }

    /// Inclusion-minimal edge sets whose removal separates input from output.
    ///
    /// Every minimal cut is the boundary of the input side of some vertex
    /// bipartition, so all bipartitions are enumerated and minimalised.
    pub fn minimal_cuts(&self) -> Result<Vec<VertexSet>> {
        self.check_connected()?;
        let others: Vec<usize> =
            (0..self.nodes.len()).filter(|&i| self.nodes[i] != self.input && self.nodes[i] != self.output).collect();
        let mut boundaries = Vec::new();
        for mask in 0u64..(1u64 << others.len()) {
            let mut side = vec![false; self.nodes.len()];
            side[self.node_index(self.input)] = true;
            for (bit, &i) in others.iter().enumerate() {
                side[i] = mask >> bit & 1 == 1;
            }
            let cut = self
                .edges
                .iter()
                .filter(|e| side[self.node_index(e.u)] != side[self.node_index(e.v)])
                .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::singleton(e.id)));
            boundaries.push(cut);
        }
        let mut cuts = minimal_sets(boundaries);
        cuts.sort();
        Ok(cuts)
    }
}

/// The ideal generated by the minimal cuts.
pub fn cut_ideal(network: &Network) -> Result<SquareFreeIdeal> {
    SquareFreeIdeal::new(network.p(), network.minimal_cuts()?)
}

/// The ideal generated by the minimal paths.
pub fn path_ideal(network: &Network) -> Result<SquareFreeIdeal> {
    SquareFreeIdeal::new(network.p(), network.minimal_paths()?)
}

/// Pass/fail record of the cut–path duality checks.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    /// Complex whose Stanley–Reisner ideal is the cut ideal.
    pub cut_complex: SimplicialComplex,
    /// Complex whose Stanley–Reisner ideal is the path ideal.
    pub path_complex: SimplicialComplex,
    /// Facets of the cut complex are the complements of the minimal paths.
    pub facets_are_path_complements: bool,
    /// The Alexander dual of the cut complex is the path complex.
    pub dual_of_cuts_is_paths: bool,
    /// Taking the Alexander dual twice returns the cut complex.
    pub involution: bool,
    /// The Alexander dual of the path complex is the cut complex.
    pub dual_of_paths_is_cuts: bool,
}

impl DualityReport {
    pub fn all_pass(&self) -> bool {
        self.facets_are_path_complements && self.dual_of_cuts_is_paths && self.involution && self.dual_of_paths_is_cuts
    }
}

pub fn verify_cut_path_duality(network: &Network) -> Result<DualityReport> {
    let full = VertexSet::full(network.p());
    let cut_complex = complex_of(&cut_ideal(network)?);
    let path_complex = complex_of(&path_ideal(network)?);
    let mut complements: Vec<VertexSet> =
        network.minimal_paths()?.into_iter().map(|path| full.difference(path)).collect();
    complements.sort();
    let dual = cut_complex.alexander_dual();
    Ok(DualityReport {
        facets_are_path_complements: cut_complex.facets() == complements.as_slice(),
        dual_of_cuts_is_paths: dual == path_complex,
        involution: dual.alexander_dual() == cut_complex,
        dual_of_paths_is_cuts: path_complex.alexander_dual() == cut_complex,
        cut_complex,
        path_complex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(sets: &[VertexSet]) -> Vec<String> {
        sets.iter().map(|s| s.to_string()).collect()
    }

    fn bridge() -> Network {
        Network::from_pairs(&[(1, 2), (2, 4), (2, 3), (1, 3), (3, 4)], 1, 4).unwrap()
    }

    #[test]
    fn bridge_network() {
        let net = bridge();
        assert_eq!(strings(&net.minimal_cuts().unwrap()), ["14", "25", "135", "234"]);
        assert_eq!(strings(&net.minimal_paths().unwrap()), ["12", "45", "135", "234"]);
        assert_eq!(cut_ideal(&net).unwrap().to_string(), "x1*x4, x2*x5, x1*x3*x5, x2*x3*x4");
        assert_eq!(path_ideal(&net).unwrap().to_string(), "x1*x2, x4*x5, x1*x3*x5, x2*x3*x4");
        let report = verify_cut_path_duality(&net).unwrap();
        assert_eq!(report.cut_complex.to_string(), "{15,24,123,345}");
        assert_eq!(report.path_complex.to_string(), "{15,24,134,235}");
        assert!(report.all_pass());
    }

    #[test]
    fn series_and_parallel() {
        let series = Network::from_pairs(&[(1, 2), (2, 3), (3, 4)], 1, 4).unwrap();
        assert_eq!(strings(&series.minimal_cuts().unwrap()), ["1", "2", "3"]);
        assert_eq!(strings(&series.minimal_paths().unwrap()), ["123"]);
        assert!(verify_cut_path_duality(&series).unwrap().all_pass());

        let parallel = Network::from_pairs(&[(1, 2), (1, 2)], 1, 2).unwrap();
        assert_eq!(strings(&parallel.minimal_paths().unwrap()), ["1", "2"]);
        assert_eq!(strings(&parallel.minimal_cuts().unwrap()), ["12"]);
        assert_eq!(cut_ideal(&parallel).unwrap().to_string(), "x1*x2");
    }

    #[test]
    fn invalid_networks() {
        let split = Network::from_pairs(&[(1, 2), (3, 4)], 1, 4).unwrap();
        assert_eq!(split.minimal_cuts(), Err(Error::Disconnected));
        assert!(matches!(Network::from_pairs(&[(1, 1)], 1, 2), Err(Error::InvalidNetwork(_))));
        assert!(matches!(Network::from_pairs(&[(1, 2)], 1, 1), Err(Error::InvalidNetwork(_))));
        let gap = vec![Edge { id: 1, u: 1, v: 2 }, Edge { id: 3, u: 1, v: 2 }];
        assert!(matches!(Network::new(vec![1, 2], gap, 1, 2), Err(Error::InvalidNetwork(_))));
    }
}
