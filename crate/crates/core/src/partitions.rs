//! Multiset partitions of multi-indices and the multivariate chain rule.
//!
//! A multi-index `k = (k_1, ..., k_p)` names the multiset holding `k_i` copies
//! of variable `i`, and the derivative `D^k`. Partitions of that multiset
//! index the terms of the chain rule for `D^k g(h(x))`, each weighted by its
//! collapse number, and the same sum expresses cumulants through moments.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One};

use crate::{Error, Result};

/// Largest total order `‖k‖₁` accepted by partition enumeration.
pub const MAX_PARTITION_ORDER: u32 = 12;

/// A multi-index `k ∈ ℕ^p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// Builds a multi-index from its entries. The dimension must be at least one.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("multi-index needs at least one entry".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(p: usize) -> Self {
        assert!(p >= 1, "multi-index dimension must be positive");
        MultiIndex(vec![0; p])
    }

    /// The unit vector `e_i` for a zero-based position `i`.
    pub fn unit(p: usize, i: usize) -> Self {
        let mut k = Self::zeros(p);
        k.0[i] = 1;
        k
    }

    /// Indicator vector of a set of zero-based positions.
    pub fn indicator(p: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut k = Self::zeros(p);
        for i in positions {
            k.0[i] = 1;
        }
        k
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    /// `‖k‖₁ = Σ k_i`.
    pub fn manhattan_norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `‖k‖₁⁺`: the Manhattan norm plus one for every odd entry.
    pub fn plus_norm(&self) -> u32 {
        self.manhattan_norm() + self.0.iter().filter(|&&e| e % 2 == 1).count() as u32
    }

    /// Componentwise parity: ones where `k_i` is odd.
    pub fn parity(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&e| e % 2).collect())
    }

    /// Zero-based positions of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i).collect()
    }

    /// `k! = ∏ k_i!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e))
    }

    /// Componentwise sum; panics on a dimension mismatch.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Parses the comma-separated form `"1,0,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let trimmed = part.trim();
            let value = trimmed.parse::<u32>().map_err(|_| Error::Parse {
                offset,
                message: format!("expected a non-negative integer, found {trimmed:?}"),
            })?;
            entries.push(value);
            offset += part.len() + 1;
        }
        MultiIndex::new(entries)
    }
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A partition of the multiset named by a multi-index.
///
/// Blocks are kept sorted in descending order, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<MultiIndex>,
}

impl Partition {
    /// Builds a partition from its blocks. Every block must be nonzero and of
    /// the same dimension.
    pub fn new(mut blocks: Vec<MultiIndex>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::EmptyMultiset);
        };
        let p = first.dim();
        for b in &blocks {
            if b.dim() != p {
                return Err(Error::DimensionMismatch { expected: p, found: b.dim() });
            }
            if b.is_zero() {
                return Err(Error::InvalidInput("partition block must be nonzero".into()));
            }
        }
        blocks.sort_by(|a, b| b.cmp(a));
        Ok(Partition { blocks })
    }

    pub fn blocks(&self) -> &[MultiIndex] {
        &self.blocks
    }

    /// `|π|`, the number of blocks.
    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    /// The partitioned multi-index `Σ_j ν_{M_j}`.
    pub fn total(&self) -> MultiIndex {
        let mut acc = MultiIndex::zeros(self.blocks[0].dim());
        for b in &self.blocks {
            acc = acc.add(b);
        }
        acc
    }

    /// Distinct blocks with their multiplicities `ν_π`.
    pub fn multiplicities(&self) -> Vec<(&MultiIndex, usize)> {
        let mut out: Vec<(&MultiIndex, usize)> = Vec::new();
        for b in &self.blocks {
            match out.last_mut() {
                Some((last, count)) if *last == b => *count += 1,
                _ => out.push((b, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    /// Writes the multiset shorthand, e.g. `{13|3}`; variable labels are
    /// 1-based and separated by commas when any label exceeds 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.blocks[0].dim() > 9;
        f.write_str("{")?;
        for (j, block) in self.blocks.iter().enumerate() {
            if j > 0 {
                f.write_str("|")?;
            }
            let mut first = true;
            for (i, &count) in block.entries().iter().enumerate() {
                for _ in 0..count {
                    if wide && !first {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", i + 1)?;
                    first = false;
                }
            }
        }
        f.write_str("}")
    }
}

fn check_order(k: &MultiIndex) -> Result<()> {
    if k.is_zero() {
        return Err(Error::EmptyMultiset);
    }
    let order = k.manhattan_norm();
    if order > MAX_PARTITION_ORDER {
        return Err(Error::OrderTooLarge { order, limit: MAX_PARTITION_ORDER });
    }
    Ok(())
}

/// All nonzero `b ≤ remaining` with `b ≤ bound` lexicographically, in
/// descending lexicographic order.
fn candidate_blocks(remaining: &[u32], bound: Option<&[u32]>) -> Vec<Vec<u32>> {
    fn rec(
        pos: usize,
        remaining: &[u32],
        bound: Option<&[u32]>,
        tight: bool,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == remaining.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let mut hi = remaining[pos];
        if tight {
            if let Some(b) = bound {
                hi = hi.min(b[pos]);
            }
        }
        for v in (0..=hi).rev() {
            let still_tight = tight && bound.is_some_and(|b| v == b[pos]);
            cur.push(v);
            rec(pos + 1, remaining, bound, still_tight, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, remaining, bound, true, &mut Vec::with_capacity(remaining.len()), &mut out);
    out
}

fn enumerate_into(
    remaining: &mut Vec<u32>,
    bound: Option<Vec<u32>>,
    blocks: &mut Vec<MultiIndex>,
    out: &mut Vec<Partition>,
) {
    if remaining.iter().all(|&e| e == 0) {
        out.push(Partition { blocks: blocks.clone() });
        return;
    }
    for b in candidate_blocks(remaining, bound.as_deref()) {
        for (r, v) in remaining.iter_mut().zip(&b) {
            *r -= v;
        }
        blocks.push(MultiIndex(b.clone()));
        enumerate_into(remaining, Some(b.clone()), blocks, out);
        blocks.pop();
        for (r, v) in remaining.iter_mut().zip(&b) {
            *r += v;
        }
    }
}

/// Every partition of the multiset with multiplicity `k`, each exactly once.
///
/// Blocks within a partition are sorted descending and partitions are listed
/// in descending lexicographic order of their block lists, so `k = (1,0,2)`
/// yields `{133}, {13|3}, {1|33}, {1|3|3}`.
pub fn enumerate_partitions(k: &MultiIndex) -> Result<Vec<Partition>> {
    check_order(k)?;
    let mut out = Vec::new();
    enumerate_into(&mut k.0.clone(), None, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// The collapse number `c(π) = ν_M! / (∏_j ν_{M_j}! · ν_π!)`.
pub fn collapse_number(pi: &Partition) -> BigRational {
    let numerator = pi.total().factorial();
    let mut denominator = BigInt::one();
    for b in &pi.blocks {
        denominator *= b.factorial();
    }
    for (_, count) in pi.multiplicities() {
        denominator *= factorial(count as u32);
    }
    BigRational::new(numerator, denominator)
}

/// One term `c(π) · D^{|π|}g(h) · ∏_j D^{ν_{M_j}} h` of the chain rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRuleTerm {
    pub coefficient: BigRational,
    pub outer_order: usize,
    pub inner: Vec<MultiIndex>,
}

impl fmt::Display for ChainRuleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.coefficient.is_one() {
            write!(f, "{}*", self.coefficient)?;
        }
        if self.outer_order == 1 {
            f.write_str("Dg")?;
        } else {
            write!(f, "D^{}g", self.outer_order)?;
        }
        for k in &self.inner {
            let compact: String = if k.entries().iter().all(|&e| e < 10) {
                k.entries().iter().map(|e| e.to_string()).collect()
            } else {
                k.to_string()
            };
            write!(f, " D^{{{compact}}}h")?;
        }
        Ok(())
    }
}

/// Symbolic expansion of `D^k g(h(x))`, one term per partition of `k`.
pub fn chain_rule_terms(k: &MultiIndex) -> Result<Vec<ChainRuleTerm>> {
    Ok(enumerate_partitions(k)?
        .into_iter()
        .map(|pi| ChainRuleTerm { coefficient: collapse_number(&pi), outer_order: pi.size(), inner: pi.blocks })
        .collect())
}

/// Moments `m_k` keyed by multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T> {
    p: usize,
    moments: BTreeMap<MultiIndex, T>,
}

impl<T: Clone> MomentTable<T> {
    pub fn new(p: usize) -> Self {
        MomentTable { p, moments: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn insert(&mut self, k: MultiIndex, value: T) -> Result<()> {
        if k.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: k.dim() });
        }
        self.moments.insert(k, value);
        Ok(())
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&T> {
        self.moments.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.moments.iter()
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }
}

/// The signed weight `c(π)(−1)^{|π|−1}(|π|−1)!` of a partition in the
/// moment-to-cumulant sum.
pub fn cumulant_weight(pi: &Partition) -> BigRational {
    let size = pi.size() as u32;
    let mut w = collapse_number(pi) * BigRational::from_integer(factorial(size - 1));
    if size.is_multiple_of(2) {
        w = -w;
    }
    w
}

/// Converts an exact weight to the scalar type of a moment table.
pub(crate) fn weight_as<T: FromPrimitive>(w: &BigRational) -> T {
    let num = i64::try_from(w.numer()).expect("cumulant weight fits in i64");
    assert!(w.denom().is_one(), "cumulant weights are integers");
    T::from_i64(num).expect("scalar type represents small integers")
}

/// `κ_k = Σ_π c(π)(−1)^{|π|−1}(|π|−1)! ∏_j m_{ν_{M_j}}`.
///
/// Works for exact rationals as well as floating point moments.
pub fn cumulant_from_moments<T>(k: &MultiIndex, moments: &MomentTable<T>) -> Result<T>
where
    T: Clone + Num + FromPrimitive,
{
    if k.dim() != moments.dim() {
        return Err(Error::DimensionMismatch { expected: moments.dim(), found: k.dim() });
    }
    let mut total = T::zero();
    for pi in enumerate_partitions(k)? {
        let mut term: T = weight_as(&cumulant_weight(&pi));
        for block in pi.blocks() {
            let m = moments.get(block).ok_or_else(|| Error::MissingMoment(block.to_string()))?;
            term = term * m.clone();
        }
        total = total + term;
    }
    Ok(total)
}
