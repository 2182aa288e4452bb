//! Symbolic log-densities as sparse polynomials with exact rational
//! coefficients.
//!
//! A polynomial `g` is hierarchical for a complex `S` when every term depends
//! only on the variables of a face, equivalently when `D^K g ≡ 0` for every
//! non-face `K`. Constant terms are ignored by every check, since log-densities
//! are only defined up to their normalising constant.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ideal::SquareFreeIdeal;
use crate::partitions::{factorial, MultiIndex};
use crate::simplicial::{SimplicialComplex, VertexSet};
use crate::{Error, Result};

/// A polynomial in `x_1..x_p` with rational coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePolynomial {
    p: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl SparsePolynomial {
    pub fn zero(p: usize) -> Self {
        assert!(p >= 1, "polynomial needs at least one variable");
        SparsePolynomial { p, terms: BTreeMap::new() }
    }

    pub fn constant(p: usize, c: BigRational) -> Self {
        Self::monomial(MultiIndex::zeros(p), c)
    }

    pub fn monomial(exponent: MultiIndex, c: BigRational) -> Self {
        let mut poly = Self::zero(exponent.dim());
        poly.add_term(exponent, c);
        poly
    }

    /// The variable `x_i` for a 1-based `i`.
    pub fn variable(p: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(p, i - 1), BigRational::one())
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: &MultiIndex) -> BigRational {
        self.terms.get(exponent).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in the canonical printing order: by total degree, then with
    /// larger exponents of earlier variables first.
    pub fn terms(&self) -> Vec<(&MultiIndex, &BigRational)> {
        let mut out: Vec<_> = self.terms.iter().collect();
        out.sort_by(|a, b| a.0.manhattan_norm().cmp(&b.0.manhattan_norm()).then_with(|| b.0.cmp(a.0)));
        out
    }

    pub fn add_term(&mut self, exponent: MultiIndex, c: BigRational) {
        assert_eq!(exponent.dim(), self.p, "exponent dimension mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.p);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.p, BigRational::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.manhattan_norm()).max()
    }

    /// Degree in `x_i` (1-based); `None` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|k| k.entries()[i - 1]).max()
    }

    /// The exact mixed partial derivative `D^k g`.
    pub fn differentiate(&self, k: &MultiIndex) -> Result<Self> {
        if k.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: k.dim() });
        }
        let mut out = Self::zero(self.p);
        for (a, c) in &self.terms {
            if !k.le(a) {
                continue;
            }
            let mut coeff = c.clone();
            let mut exps = Vec::with_capacity(self.p);
            for (&ai, &ki) in a.entries().iter().zip(k.entries()) {
                // falling factorial a (a-1) ... (a-k+1)
                coeff *= BigRational::from_integer(factorial(ai) / factorial(ai - ki));
                exps.push(ai - ki);
            }
            out.add_term(MultiIndex::new(exps).expect("p >= 1"), coeff);
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, x: &[BigRational]) -> Result<BigRational> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: x.len() });
        }
        let mut total = BigRational::zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(k.entries()) {
                term *= num_traits::pow(xi.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Floating point evaluation.
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.p, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(k, c)| {
                let coeff = c.to_f64().unwrap_or(f64::NAN);
                k.entries().iter().zip(x).fold(coeff, |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    /// `Σ_n a_n h^n` for a univariate `outer = Σ a_n u^n`.
    pub fn compose_univariate(outer: &SparsePolynomial, inner: &SparsePolynomial) -> Result<Self> {
        if outer.p != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: outer.p });
        }
        let mut out = Self::zero(inner.p);
        for (k, c) in &outer.terms {
            out = &out + &inner.pow(k.entries()[0]).scale(c);
        }
        Ok(out)
    }

    /// Drops the constant term.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&MultiIndex::zeros(self.p));
        out
    }

    /// 1-based variables present in the term with exponent `k`.
    pub(crate) fn support_set(k: &MultiIndex) -> VertexSet {
        k.support().into_iter().fold(VertexSet::EMPTY, |acc, i| acc.union(VertexSet::singleton(i + 1)))
    }
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.p, rhs.p, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn sub(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self + &(-rhs)
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn neg(self) -> SparsePolynomial {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn mul(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.p, rhs.p, "polynomial dimension mismatch");
        let mut out = SparsePolynomial::zero(self.p);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for SparsePolynomial {
    /// Canonical form, e.g. `1 + 2*x1 + 3*x2 + 5*x1*x2` or `1/2*x1^2 - x1*x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms().into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            let factors: Vec<String> = k
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{e}", v + 1) })
                .collect();
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePolynomial(p={}, {self})", self.p)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: usize,
}

impl Parser<'_> {
    fn error<T>(&self, at: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: at, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn natural(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error(start, "expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse as an integer"))
    }

    fn small_natural(&mut self) -> Result<u32> {
        let at = self.pos;
        let n = self.natural()?;
        n.to_u32().map_or_else(|| self.error(at, "exponent too large"), Ok)
    }

    fn coefficient(&mut self) -> Result<BigRational> {
        let numer = self.natural()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let denom = self.natural()?;
            if denom.is_zero() {
                return self.error(at, "zero denominator");
            }
            return Ok(BigRational::new(numer, denom));
        }
        Ok(BigRational::from_integer(numer))
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<()> {
        let at = self.pos;
        if self.peek() != Some(b'x') {
            return self.error(self.pos, "expected a variable like x1");
        }
        self.pos += 1;
        if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            return self.error(self.pos, "expected a variable index after 'x'");
        }
        let index = self.small_natural()? as usize;
        if index == 0 || index > self.p {
            return self.error(at, format!("variable x{index} outside x1..x{}", self.p));
        }
        let mut power = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            power = self.small_natural()?;
        }
        exps[index - 1] += power;
        Ok(())
    }

    fn term(&mut self) -> Result<(MultiIndex, BigRational)> {
        let mut exps = vec![0u32; self.p];
        let mut coeff = BigRational::one();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = self.coefficient()?;
                if self.peek() != Some(b'*') {
                    return Ok((MultiIndex::new(exps).expect("p >= 1"), coeff));
                }
                self.pos += 1;
                self.factor(&mut exps)?;
            }
            Some(b'x') => self.factor(&mut exps)?,
            _ => return self.error(self.pos, "expected a term"),
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut exps)?;
        }
        Ok((MultiIndex::new(exps).expect("p >= 1"), coeff))
    }
}

/// Parses the polynomial grammar
///
/// ```text
/// poly   := ['+'|'-'] term (('+'|'-') term)*
/// term   := coeff | [coeff '*'] factor ('*' factor)*
/// factor := 'x' NAT ['^' NAT]
/// coeff  := NAT ['/' NAT]
/// ```
///
/// Whitespace is insignificant. Errors report the byte offset.
pub fn parse_poly(text: &str, p: usize) -> Result<SparsePolynomial> {
    if p == 0 {
        return Err(Error::InvalidInput("polynomial needs at least one variable".into()));
    }
    let mut parser = Parser { src: text.as_bytes(), pos: 0, p };
    let mut poly = SparsePolynomial::zero(p);
    let mut negative = false;
    match parser.peek() {
        Some(b'-') => {
            negative = true;
            parser.pos += 1;
        }
        Some(b'+') => parser.pos += 1,
        _ => {}
    }
    loop {
        let (k, c) = parser.term()?;
        poly.add_term(k, if negative { -c } else { c });
        match parser.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(_) => return parser.error(parser.pos, "expected '+', '-' or end of input"),
        }
        parser.pos += 1;
    }
    Ok(poly)
}

/// Outcome of a hierarchical-model check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HierarchyCheck {
    Hierarchical,
    /// A term whose support is not a face, with a minimal non-face `K` inside
    /// that support; `D^K g` keeps the term alive.
    Violation {
        term: MultiIndex,
        nonface: VertexSet,
    },
}

impl HierarchyCheck {
    pub fn is_hierarchical(&self) -> bool {
        matches!(self, HierarchyCheck::Hierarchical)
    }
}

/// Whether `g` is hierarchical for `S`: every non-constant term must have a
/// face of `S` as its support.
pub fn is_hierarchical(g: &SparsePolynomial, complex: &SimplicialComplex) -> Result<HierarchyCheck> {
    if g.dim() != complex.p() {
        return Err(Error::DimensionMismatch { expected: complex.p(), found: g.dim() });
    }
    let nonfaces = complex.minimal_nonfaces();
    for (k, _) in g.terms() {
        if k.is_zero() {
            continue;
        }
        let support = SparsePolynomial::support_set(k);
        if !complex.is_face(support) {
            let nonface = nonfaces
                .iter()
                .copied()
                .find(|n| n.is_subset(support))
                .expect("a non-face contains a minimal non-face");
            return Ok(HierarchyCheck::Violation { term: k.clone(), nonface });
        }
    }
    Ok(HierarchyCheck::Hierarchical)
}

/// `∂^{n_i} g / ∂x_i^{n_i} = 0` for every `i`, i.e. `deg_{x_i} g ≤ n_i − 1`.
pub fn artinian_degree_check(g: &SparsePolynomial, n: &MultiIndex) -> Result<bool> {
    if n.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: n.dim() });
    }
    if n.entries().contains(&0) {
        return Err(Error::InvalidParameter("Artinian exponents must be at least 1".into()));
    }
    Ok((1..=g.dim()).all(|i| g.degree_in(i).is_none_or(|d| d < n.entries()[i - 1])))
}

/// `D^α g = 0` for every `‖α‖₁ = d`, i.e. total degree at most `d − 1`.
pub fn total_degree_cumulant_check(g: &SparsePolynomial, d: u32) -> Result<bool> {
    if d == 0 {
        return Err(Error::InvalidParameter("cumulant order must be at least 1".into()));
    }
    Ok(g.total_degree().is_none_or(|deg| deg < d))
}

/// Mean and precision (inverse covariance) of a Gaussian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub precision: Vec<Vec<f64>>,
}

impl GaussianSpec {
    /// Checks the shapes and the symmetry of the precision matrix.
    pub fn validate(&self) -> Result<()> {
        let p = self.mean.len();
        if p == 0 {
            return Err(Error::InvalidInput("Gaussian needs at least one variable".into()));
        }
        if self.precision.len() != p {
            return Err(Error::DimensionMismatch { expected: p, found: self.precision.len() });
        }
        for row in &self.precision {
            if row.len() != p {
                return Err(Error::DimensionMismatch { expected: p, found: row.len() });
            }
        }
        for i in 0..p {
            for j in i + 1..p {
                let (a, b) = (self.precision[i][j], self.precision[j][i]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::AsymmetricPrecision { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// The exponent `−½ (x−μ)ᵀ Λ (x−μ)` expanded exactly (the binary values of
/// the floating point inputs are used), without its constant term.
pub fn gaussian_log_density(spec: &GaussianSpec) -> Result<SparsePolynomial> {
    spec.validate()?;
    let p = spec.dim();
    let centered: Vec<SparsePolynomial> = (0..p)
        .map(|i| {
            let shift = SparsePolynomial::constant(p, exact(spec.mean[i])?);
            Ok(&SparsePolynomial::variable(p, i + 1) - &shift)
        })
        .collect::<Result<_>>()?;
    let mut quad = SparsePolynomial::zero(p);
    for i in 0..p {
        for j in 0..p {
            let lambda = exact(spec.precision[i][j])?;
            if lambda.is_zero() {
                continue;
            }
            quad = &quad + &(&centered[i] * &centered[j]).scale(&lambda);
        }
    }
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    Ok(quad.scale(&half).without_constant())
}

/// The ideal generated by `x_i x_j` for every `|Λ_ij| ≤ tolerance`, `i < j`.
pub fn gaussian_ideal(spec: &GaussianSpec, tolerance: f64) -> Result<SquareFreeIdeal> {
    spec.validate()?;
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::InvalidParameter("tolerance must be non-negative".into()));
    }
    let p = spec.dim();
    let mut gens = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if spec.precision[i][j].abs() <= tolerance {
                gens.push(VertexSet::singleton(i + 1).union(VertexSet::singleton(j + 1)));
            }
        }
    }
    SquareFreeIdeal::new(p, gens)
}

/// Coefficients `a_s`, `s ∈ {0,1}^p`, of a multilinear log-density.
#[derive(Clone, Debug, PartialEq)]
pub struct MECSpec {
    p: usize,
    coeffs: BTreeMap<MultiIndex, BigRational>,
}

impl MECSpec {
    pub fn new(p: usize, coeffs: impl IntoIterator<Item = (MultiIndex, BigRational)>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("MEC spec needs at least one variable".into()));
        }
        let mut map = BTreeMap::new();
        for (s, a) in coeffs {
            if s.dim() != p {
                return Err(Error::DimensionMismatch { expected: p, found: s.dim() });
            }
            if !s.is_binary() {
                return Err(Error::NonBinaryIndex(s.to_string()));
            }
            map.insert(s, a);
        }
        Ok(MECSpec { p, coeffs: map })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.coeffs.iter()
    }
}

/// `g = Σ_s a_s x^s`.
pub fn mec_polynomial(spec: &MECSpec) -> SparsePolynomial {
    let mut g = SparsePolynomial::zero(spec.p);
    for (s, a) in &spec.coeffs {
        g.add_term(s.clone(), a.clone());
    }
    g
}

/// The complex generated by the supports of the nonzero `a_s`.
pub fn mec_support_complex(spec: &MECSpec) -> SimplicialComplex {
    let faces = spec.coeffs.iter().filter(|(_, a)| !a.is_zero()).map(|(s, _)| SparsePolynomial::support_set(s));
    SimplicialComplex::new(spec.p, faces).expect("supports lie in 1..=p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn mi(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn cx(p: usize, faces: &[&[usize]]) -> SimplicialComplex {
        let faces: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
        SimplicialComplex::from_lists(p, &faces).unwrap()
    }

    const BEC: &str = "1 + 2*x1 + 3*x2 + 5*x1*x2";

    #[test]
    fn parse_examples() {
        let g = parse_poly(BEC, 2).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.to_string(), BEC);
        assert!(parse_poly("0", 3).unwrap().is_zero());
        let h = parse_poly("1/2*x1^2 - x1*x3", 3).unwrap();
        assert_eq!(h.coefficient(&mi("2,0,0")), q(1, 2));
        assert_eq!(h.coefficient(&mi("1,0,1")), q(-1, 1));
        assert_eq!(h.to_string(), "1/2*x1^2 - x1*x3");
    }

    #[test]
    fn parse_normalizes() {
        let g = parse_poly("- x2 + x1*x1 + 2/4 - 1/2 + x2*x1 - x1 * x2", 2).unwrap();
        assert_eq!(g.to_string(), "-x2 + x1^2");
        assert_eq!(parse_poly("+3", 1).unwrap().to_string(), "3");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(
            parse_poly("x1 + x4", 3),
            Err(Error::Parse { offset: 5, message: "variable x4 outside x1..x3".into() })
        );
        assert!(matches!(parse_poly("x1 +", 2), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(parse_poly("2x1", 2), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(parse_poly("1/0*x1", 2), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_poly("x0", 2), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_poly("y1", 2), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn differentiation() {
        let g = parse_poly("x1*x2", 2).unwrap();
        assert_eq!(g.differentiate(&mi("1,1")).unwrap().to_string(), "1");
        let bec = parse_poly(BEC, 2).unwrap();
        assert!(bec.differentiate(&mi("0,2")).unwrap().is_zero());
        let cubic = parse_poly("x1^3*x2", 2).unwrap();
        assert_eq!(cubic.differentiate(&mi("2,0")).unwrap().to_string(), "6*x1*x2");
    }

    #[test]
    fn gaussian_mixed_derivative_is_minus_lambda() {
        let spec = GaussianSpec {
            mean: vec![0.5, -1.0, 2.0],
            precision: vec![vec![2.0, 0.75, 0.0], vec![0.75, 3.0, 0.25], vec![0.0, 0.25, 1.0]],
        };
        let g = gaussian_log_density(&spec).unwrap();
        let d = g.differentiate(&mi("1,1,0")).unwrap();
        assert_eq!(d.to_string(), "-3/4");
        assert!(total_degree_cumulant_check(&g, 3).unwrap());
        assert!(artinian_degree_check(&g, &mi("3,3,3")).unwrap());
        assert!(!artinian_degree_check(&g, &mi("2,2,2")).unwrap());
    }

    #[test]
    fn bec_model_checks() {
        let bec = parse_poly(BEC, 2).unwrap();
        let independent = cx(2, &[&[1], &[2]]);
        let full = cx(2, &[&[1, 2]]);
        assert!(is_hierarchical(&bec, &full).unwrap().is_hierarchical());
        let check = is_hierarchical(&bec, &independent).unwrap();
        assert_eq!(
            check,
            HierarchyCheck::Violation { term: mi("1,1"), nonface: VertexSet::from_vertices(2, &[1, 2]).unwrap() }
        );
        let bec0 = parse_poly("1 + 2*x1 + 3*x2", 2).unwrap();
        assert!(is_hierarchical(&bec0, &independent).unwrap().is_hierarchical());
        assert!(!total_degree_cumulant_check(&bec, 2).unwrap());
        assert!(total_degree_cumulant_check(&parse_poly("7", 2).unwrap(), 1).unwrap());
    }

    #[test]
    fn artinian_checks() {
        let multilinear = parse_poly("1 + x1*x2*x3 - x2", 3).unwrap();
        assert!(artinian_degree_check(&multilinear, &mi("2,2,2")).unwrap());
        let square = parse_poly("x1^2 + x2", 2).unwrap();
        assert!(!artinian_degree_check(&square, &mi("2,2")).unwrap());
        assert!(artinian_degree_check(&square, &mi("0,2")).is_err());
    }

    #[test]
    fn gaussian_ideal_patterns() {
        let tri = GaussianSpec {
            mean: vec![0.0; 4],
            precision: vec![
                vec![2.0, -0.5, 0.0, 0.0],
                vec![-0.5, 2.0, -0.5, 0.0],
                vec![0.0, -0.5, 2.0, -0.5],
                vec![0.0, 0.0, -0.5, 2.0],
            ],
        };
        assert_eq!(gaussian_ideal(&tri, 0.0).unwrap().to_string(), "x1*x3, x1*x4, x2*x4");
        let dense = GaussianSpec { mean: vec![0.0; 2], precision: vec![vec![1.0, 0.3], vec![0.3, 1.0]] };
        assert!(gaussian_ideal(&dense, 0.0).unwrap().is_zero());
        let diag = GaussianSpec {
            mean: vec![0.0; 3],
            precision: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        };
        assert_eq!(gaussian_ideal(&diag, 0.0).unwrap().to_string(), "x1*x2, x1*x3, x2*x3");
        let asym = GaussianSpec { mean: vec![0.0; 2], precision: vec![vec![1.0, 0.3], vec![0.2, 1.0]] };
        assert_eq!(gaussian_ideal(&asym, 0.0), Err(Error::AsymmetricPrecision { i: 1, j: 2 }));
    }

    #[test]
    fn mec_support() {
        let spec =
            MECSpec::new(2, [(mi("0,0"), q(1, 1)), (mi("1,0"), q(2, 1)), (mi("0,1"), q(3, 1)), (mi("1,1"), q(5, 1))])
                .unwrap();
        assert_eq!(mec_polynomial(&spec).to_string(), BEC);
        assert_eq!(mec_support_complex(&spec).to_string(), "{12}");

        let indep = MECSpec::new(2, [(mi("1,0"), q(2, 1)), (mi("0,1"), q(3, 1)), (mi("1,1"), q(0, 1))]).unwrap();
        assert_eq!(mec_support_complex(&indep).to_string(), "{1,2}");

        let chain = MECSpec::new(3, [(mi("1,1,0"), q(-1, 1)), (mi("0,1,1"), q(-1, 2))]).unwrap();
        let support = mec_support_complex(&chain);
        assert_eq!(support.to_string(), "{12,23}");
        assert!(is_hierarchical(&mec_polynomial(&chain), &support).unwrap().is_hierarchical());

        assert_eq!(MECSpec::new(2, [(mi("2,0"), q(1, 1))]), Err(Error::NonBinaryIndex("2,0".into())));
    }

    #[test]
    fn composition() {
        let outer = parse_poly("1 + x1^2", 1).unwrap();
        let inner = parse_poly("x1 + x2", 2).unwrap();
        let c = SparsePolynomial::compose_univariate(&outer, &inner).unwrap();
        assert_eq!(c.to_string(), "1 + x1^2 + 2*x1*x2 + x2^2");
    }
}
