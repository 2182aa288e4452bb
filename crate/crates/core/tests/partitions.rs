use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hmi::logdensity::SparsePolynomial;
use hmi::partitions::{
    chain_rule_terms, collapse_number, cumulant_from_moments, enumerate_partitions, MomentTable, MultiIndex, Partition,
};

/// All set partitions of `0..n`, as block-label vectors (restricted growth
/// strings).
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(i + 1, n, max.max(b + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Labelled elements of the multiset `k`: element `j` carries variable
/// `owner[j]`.
fn owners(k: &[u32]) -> Vec<usize> {
    k.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat(i).take(c as usize)).collect()
}

/// Counts the labelled set partitions collapsing onto each multiset partition.
fn collapse_oracle(k: &[u32]) -> BTreeMap<Partition, u64> {
    let owner = owners(k);
    let mut counts = BTreeMap::new();
    for labels in set_partitions(owner.len()) {
        let nblocks = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![vec![0u32; k.len()]; nblocks];
        for (j, &b) in labels.iter().enumerate() {
            blocks[b][owner[j]] += 1;
        }
        let pi = Partition::new(blocks.into_iter().map(|b| MultiIndex::new(b).unwrap()).collect()).unwrap();
        *counts.entry(pi).or_insert(0) += 1;
    }
    counts
}

fn multi_index(max_p: usize, max_entry: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_entry, 1..=max_p).prop_filter("non-zero, order ≤ 6", |k| {
        let n: u32 = k.iter().sum();
        n > 0 && n <= 6
    })
}

proptest! {
    #[test]
    fn partitions_match_set_partition_oracle(k in multi_index(3, 3)) {
        let oracle = collapse_oracle(&k);
        let parts = enumerate_partitions(&MultiIndex::new(k.clone()).unwrap()).unwrap();
        prop_assert_eq!(parts.len(), oracle.len());
        for pi in &parts {
            let expected = oracle.get(pi).copied().unwrap_or(0);
            prop_assert_eq!(collapse_number(pi), BigRational::from_integer(BigInt::from(expected)));
        }
        // no duplicates, and every partition totals k
        let mut sorted = parts.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), parts.len());
        for pi in &parts {
            let total = pi.total();
            prop_assert_eq!(total.entries(), k.as_slice());
        }
    }

    #[test]
    fn chain_rule_matches_symbolic_differentiation(
        k in multi_index(2, 2),
        outer in prop::collection::vec(-3i64..=3, 1..=4),
        inner in prop::collection::vec((0u32..=2, 0u32..=2, -2i64..=2), 1..=4),
    ) {
        let p = k.len();
        let mut g = SparsePolynomial::zero(1);
        for (n, &c) in outer.iter().enumerate() {
            g.add_term(MultiIndex::new(vec![n as u32 + 1]).unwrap(), BigRational::from_integer(c.into()));
        }
        let mut h = SparsePolynomial::zero(p);
        for &(a, b, c) in &inner {
            let e = if p == 1 { vec![a] } else { vec![a, b] };
            h.add_term(MultiIndex::new(e).unwrap(), BigRational::from_integer(c.into()));
        }
        let k = MultiIndex::new(k).unwrap();
        let direct = SparsePolynomial::compose_univariate(&g, &h).unwrap().differentiate(&k).unwrap();

        let mut expanded = SparsePolynomial::zero(p);
        for term in chain_rule_terms(&k).unwrap() {
            let dg = g.differentiate(&MultiIndex::new(vec![term.outer_order as u32]).unwrap()).unwrap();
            let mut product = SparsePolynomial::compose_univariate(&dg, &h).unwrap();
            for block in &term.inner {
                product = &product * &h.differentiate(block).unwrap();
            }
            expanded = &expanded + &product.scale(&term.coefficient);
        }
        prop_assert_eq!(direct, expanded);
    }

    #[test]
    fn point_mass_has_no_higher_cumulants(
        (a, k) in multi_index(3, 3).prop_flat_map(|k| (prop::collection::vec(-5i64..=5, k.len()), Just(k))),
    ) {
        let point: Vec<BigRational> = a.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let mut table = MomentTable::new(a.len());
        for u in lower(&k) {
            let m = u.iter().zip(&point).fold(BigRational::one(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize));
            table.insert(MultiIndex::new(u).unwrap(), m).unwrap();
        }
        let kappa = cumulant_from_moments(&MultiIndex::new(k.clone()).unwrap(), &table).unwrap();
        if k.iter().sum::<u32>() == 1 {
            let i = k.iter().position(|&e| e == 1).unwrap();
            prop_assert_eq!(kappa, point[i].clone());
        } else {
            prop_assert!(kappa.is_zero());
        }
    }
}

fn lower(k: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &ki in k {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=ki).map(move |v| {
                    let mut n = prefix.clone();
                    n.push(v);
                    n
                })
            })
            .collect();
    }
    out.into_iter().filter(|u| u.iter().any(|&e| e > 0)).collect()
}

#[test]
fn collapse_numbers_sum_to_bell_numbers() {
    // for square-free k of order n the collapse numbers are all 1
    for (n, bell) in [1u64, 2, 5, 15, 52, 203].iter().enumerate() {
        let k = MultiIndex::new(vec![1; n + 1]).unwrap();
        let total: BigRational = enumerate_partitions(&k).unwrap().iter().map(collapse_number).sum();
        assert_eq!(total, BigRational::from_integer(BigInt::from(*bell)));
    }
}

#[test]
fn enumeration_is_deterministic() {
    let k: MultiIndex = "2,1,2".parse().unwrap();
    assert_eq!(enumerate_partitions(&k).unwrap(), enumerate_partitions(&k).unwrap());
}
