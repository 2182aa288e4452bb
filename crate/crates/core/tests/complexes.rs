use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hmi::diffcum::{Density, Gaussian};
use hmi::graph::Graph;
use hmi::hierarchy::{
    ci_ideal, ci_to_generators, factorize, ideal_marginalize, is_decomposable, marginalize, CIStatement,
};
use hmi::ideal::{complex_of, has_2linear_resolution, stanley_reisner, SquareFreeIdeal};
use hmi::simplicial::{SimplicialComplex, VertexSet};
use hmi::Error;

/// A complex generated by a random family of subsets of `1..=p`.
fn complex_strategy(max_p: usize) -> impl Strategy<Value = SimplicialComplex> {
    (1..=max_p).prop_flat_map(|p| {
        prop::collection::vec(0u64..(1 << p), 0..6)
            .prop_map(move |sets| SimplicialComplex::new(p, sets.into_iter().map(VertexSet::from_bits)).unwrap())
    })
}

fn is_face_brute(c: &SimplicialComplex, s: VertexSet) -> bool {
    c.facets().iter().any(|f| s.is_subset(*f))
}

fn chordal_brute(g: &Graph) -> bool {
    // a graph is chordal iff repeatedly deleting simplicial vertices empties it
    let mut left = g.vertices();
    loop {
        if left.is_empty() {
            return true;
        }
        let h = g.induced(left);
        match left.iter().find(|&v| h.is_clique(h.neighbors(v))) {
            Some(v) => left.remove(v),
            None => return false,
        }
    }
}

fn is_flag_brute(c: &SimplicialComplex) -> bool {
    let g = c.one_skeleton();
    VertexSet::full(c.p()).subsets().all(|s| !g.is_clique(s) || is_face_brute(c, s))
}

proptest! {
    #[test]
    fn ideal_complex_round_trip(c in complex_strategy(6)) {
        let ideal = stanley_reisner(&c);
        prop_assert_eq!(complex_of(&ideal), c.clone());
        prop_assert_eq!(stanley_reisner(&complex_of(&ideal)), ideal.clone());
        // generators are exactly the minimal nonfaces
        for s in VertexSet::full(c.p()).subsets() {
            let minimal_nonface = !is_face_brute(&c, s) && s.iter().all(|v| {
                let mut t = s;
                t.remove(v);
                is_face_brute(&c, t)
            });
            prop_assert_eq!(ideal.generators().contains(&s), minimal_nonface);
        }
    }

    #[test]
    fn alexander_dual_faces(c in complex_strategy(6)) {
        let dual = c.alexander_dual();
        let full = VertexSet::full(c.p());
        for s in full.subsets() {
            prop_assert_eq!(dual.is_face(s), !is_face_brute(&c, full.difference(s)));
        }
        prop_assert_eq!(dual.alexander_dual(), c);
    }

    #[test]
    fn decomposability_matches_flag_and_chordal(c in complex_strategy(6)) {
        let expected = is_flag_brute(&c) && chordal_brute(&c.one_skeleton());
        prop_assert_eq!(is_decomposable(&c), expected);
        prop_assert_eq!(factorize(&c).is_ok(), expected);
        if expected {
            let fact = factorize(&c).unwrap();
            prop_assert!(fact.has_running_intersection());
            let mut cliques = fact.cliques.clone();
            cliques.sort();
            let mut facets = c.facets().to_vec();
            facets.sort();
            if !c.is_void() && facets != [VertexSet::EMPTY] {
                prop_assert_eq!(cliques, facets);
            }
        }
    }

    #[test]
    fn separators_do_not_depend_on_labelling(c in complex_strategy(6), seed in any::<u64>()) {
        prop_assume!(is_decomposable(&c));
        let p = c.p();
        let mut perm: Vec<usize> = (1..=p).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..p).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let relabel = |s: VertexSet| s.iter().fold(VertexSet::EMPTY, |acc, v| acc.union(VertexSet::singleton(perm[v - 1])));
        let moved = SimplicialComplex::new(p, c.facets().iter().map(|&f| relabel(f))).unwrap();
        let mut a: Vec<VertexSet> = factorize(&c).unwrap().separators.into_iter().map(relabel).collect();
        let mut b = factorize(&moved).unwrap().separators;
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn marginalization_commutes_with_stanley_reisner(c in complex_strategy(6), removed in 1u64..64) {
        let removed = VertexSet::from_bits(removed).intersection(VertexSet::full(c.p()));
        prop_assume!(!removed.is_empty());
        match marginalize(&c, removed) {
            Ok(m) => {
                prop_assert!(m.is_subcomplex_of(&c));
                let via_ideal = ideal_marginalize(&stanley_reisner(&c), removed).unwrap();
                prop_assert_eq!(stanley_reisner(&m), via_ideal);
            }
            Err(e) => {
                prop_assert!(matches!(e, Error::NotUniqueClique(_)));
                prop_assert!(ideal_marginalize(&stanley_reisner(&c), removed).is_err());
            }
        }
    }

    #[test]
    fn linear_resolution_iff_chordal_complement(p in 2usize..=6, bits in any::<u64>()) {
        // random quadratic square-free ideal
        let mut gens = Vec::new();
        let mut bit = 0;
        for i in 1..=p {
            for j in i + 1..=p {
                if bits >> bit & 1 == 1 {
                    gens.push(VertexSet::singleton(i).union(VertexSet::singleton(j)));
                }
                bit += 1;
            }
        }
        prop_assume!(!gens.is_empty());
        let ideal = SquareFreeIdeal::new(p, gens).unwrap();
        prop_assert_eq!(has_2linear_resolution(&ideal), chordal_brute(&ideal.non_generator_graph()));
    }
}

#[test]
fn ci_statement_generators() {
    let vs = |v: &[usize]| VertexSet::from_vertices(4, v).unwrap();
    let st = CIStatement::given_rest(4, vs(&[1]), vs(&[2, 3])).unwrap();
    let gens: Vec<String> = ci_to_generators(&st).iter().map(|k| k.to_string()).collect();
    assert_eq!(gens, ["1,1,0,0", "1,0,1,0"]);
    assert_eq!(ci_ideal(&st).to_string(), "x1*x2, x1*x3");
    // no edge joins 1 to 2 or 3
    let c = complex_of(&ci_ideal(&st));
    assert_eq!(c.to_string(), "{14,234}");
    assert!(CIStatement::given_rest(4, vs(&[1]), vs(&[1, 2])).is_err());
}

/// A random precision matrix supported on the edges of `graph`.
fn precision_on(graph: &Graph, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let p = graph.p();
    let mut k = DMatrix::<f64>::zeros(p, p);
    for (u, v) in graph.edges() {
        let w = rng.gen_range(-0.4..0.4);
        k[(u - 1, v - 1)] = w;
        k[(v - 1, u - 1)] = w;
    }
    for i in 0..p {
        k[(i, i)] = 1.0 + (0..p).map(|j| k[(i, j)].abs()).sum::<f64>();
    }
    k
}

#[test]
fn gaussian_density_factorizes_over_cliques() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let models = [
        SimplicialComplex::from_lists(5, &[vec![1, 2, 3], vec![2, 3, 4], vec![4, 5]]).unwrap(),
        SimplicialComplex::from_lists(4, &[vec![1, 2], vec![2, 3], vec![2, 4]]).unwrap(),
        SimplicialComplex::from_lists(4, &[vec![1, 2], vec![3, 4]]).unwrap(),
    ];
    for model in &models {
        let fact = factorize(model).unwrap();
        let p = model.p();
        let mean: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let joint = Gaussian::new(mean, precision_on(&model.one_skeleton(), &mut rng)).unwrap();
        let marginal = |s: VertexSet| {
            let keep: Vec<usize> = s.iter().map(|v| v - 1).collect();
            (keep.clone(), joint.marginal(&keep).unwrap())
        };
        let cliques: Vec<_> = fact.cliques.iter().map(|&c| marginal(c)).collect();
        let seps: Vec<_> = fact.separators.iter().filter(|s| !s.is_empty()).map(|&s| marginal(s)).collect();
        for _ in 0..100 {
            let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let at = |keep: &[usize]| keep.iter().map(|&i| x[i]).collect::<Vec<f64>>();
            let mut log_ratio: f64 = cliques.iter().map(|(k, g)| g.log_density(&at(k))).sum();
            log_ratio -= seps.iter().map(|(k, g)| g.log_density(&at(k))).sum::<f64>();
            let direct = joint.log_density(&x);
            assert!((log_ratio - direct).abs() < 1e-10, "{model}: {log_ratio} vs {direct}");
        }
    }
}
