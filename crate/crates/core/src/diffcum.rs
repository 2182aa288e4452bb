//! Numeric differential and local moments and cumulants of black-box
//! densities.
//!
//! Differential quantities are estimated with central finite differences and
//! one Richardson step; local quantities with tensor-product Gauss–Legendre
//! quadrature over the cube `A(ξ, ε) = [ξ − ε/2, ξ + ε/2]^p` (or seeded Monte
//! Carlo for high dimensions). Density evaluations may run on the rayon pool,
//! but every reduction happens sequentially in a fixed order, so results are
//! bit-identical across thread counts.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::logdensity::{GaussianSpec, MECSpec, SparsePolynomial};
use crate::partitions::{cumulant_from_moments, MomentTable, MultiIndex};
use crate::{Error, Result};

/// A strictly positive density on `ℝ^p`, safe to evaluate from many threads.
pub trait Density: Send + Sync {
    fn dim(&self) -> usize;

    fn density(&self, x: &[f64]) -> f64;

    fn log_density(&self, x: &[f64]) -> f64 {
        self.density(x).ln()
    }

    /// Closed-form `D^α log f(x)` when the family knows it.
    fn log_derivative(&self, _x: &[f64], _alpha: &MultiIndex) -> Option<f64> {
        None
    }
}

/// Multivariate normal with mean `μ` and precision `Λ`.
#[derive(Clone, Debug)]
pub struct Gaussian {
    mean: DVector<f64>,
    precision: DMatrix<f64>,
    log_norm: f64,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, precision: DMatrix<f64>) -> Result<Self> {
        let p = mean.len();
        if p == 0 {
            return Err(Error::InvalidInput("Gaussian needs at least one variable".into()));
        }
        if precision.nrows() != p || precision.ncols() != p {
            return Err(Error::DimensionMismatch { expected: p, found: precision.nrows() });
        }
        let chol = precision
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("precision matrix is not positive definite".into()))?;
        let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let log_norm = 0.5 * log_det - 0.5 * p as f64 * (2.0 * PI).ln();
        Ok(Gaussian { mean: DVector::from_vec(mean), precision, log_norm })
    }

    pub fn from_spec(spec: &GaussianSpec) -> Result<Self> {
        spec.validate()?;
        let p = spec.dim();
        let precision = DMatrix::from_fn(p, p, |i, j| spec.precision[i][j]);
        Self::new(spec.mean.clone(), precision)
    }

    pub fn from_covariance(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let precision = covariance
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("covariance matrix is not positive definite".into()))?
            .inverse();
        Self::new(mean, precision)
    }

    /// Centered bivariate normal with unit variances and correlation `ρ`.
    pub fn bivariate(rho: f64) -> Result<Self> {
        Self::from_covariance(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]))
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.precision.clone().cholesky().expect("checked at construction").inverse()
    }

    /// Marginal of the 0-based coordinates `keep` (in the given order).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let p = self.mean.len();
        if keep.is_empty() {
            return Err(Error::InvalidInput("marginal needs at least one coordinate".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&i| i >= p) {
            return Err(Error::VertexOutOfRange { vertex: bad + 1, p });
        }
        let cov = self.covariance();
        let sub = DMatrix::from_fn(keep.len(), keep.len(), |a, b| cov[(keep[a], keep[b])]);
        Self::from_covariance(keep.iter().map(|&i| self.mean[i]).collect(), sub)
    }
}

impl Density for Gaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let d = DVector::from_column_slice(x) - &self.mean;
        self.log_norm - 0.5 * d.dot(&(&self.precision * &d))
    }

    fn log_derivative(&self, x: &[f64], alpha: &MultiIndex) -> Option<f64> {
        let support = alpha.support();
        let value = match alpha.manhattan_norm() {
            0 => self.log_density(x),
            1 => {
                let i = support[0];
                -(0..x.len()).map(|j| self.precision[(i, j)] * (x[j] - self.mean[j])).sum::<f64>()
            }
            2 => {
                let (i, j) = if support.len() == 1 { (support[0], support[0]) } else { (support[0], support[1]) };
                -self.precision[(i, j)]
            }
            _ => 0.0,
        };
        Some(value)
    }
}

/// `exp(Σ a_s x^s)` normalised over the box `[lo, hi]^p` by quadrature.
#[derive(Clone, Debug)]
pub struct Mec {
    g: SparsePolynomial,
    log_norm: f64,
}

impl Mec {
    pub fn new(spec: &MECSpec, lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter(format!("invalid normalisation box [{lo}, {hi}]")));
        }
        let g = crate::logdensity::mec_polynomial(spec).without_constant();
        let p = g.dim();
        let rule = gauss_legendre(16)?;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let axis: Vec<(f64, f64)> = rule.iter().map(|&(t, w)| (mid + half * t, half * w)).collect();
        let grid = TensorGrid::new(p, axis.len())?;
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let mut x = vec![0.0; p];
                let mut w = 1.0;
                for (d, i) in grid.digits(idx).into_iter().enumerate() {
                    x[d] = axis[i].0;
                    w *= axis[i].1;
                }
                w * g.evaluate_f64(&x).exp()
            })
            .collect();
        let z: f64 = values.iter().sum();
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidParameter("MEC density cannot be normalised on the box".into()));
        }
        Ok(Mec { g, log_norm: -z.ln() })
    }

    pub fn log_polynomial(&self) -> &SparsePolynomial {
        &self.g
    }
}

impl Density for Mec {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.g.evaluate_f64(x) + self.log_norm
    }

    fn log_derivative(&self, x: &[f64], alpha: &MultiIndex) -> Option<f64> {
        if alpha.is_zero() {
            return Some(self.log_density(x));
        }
        Some(self.g.differentiate(alpha).ok()?.evaluate_f64(x))
    }
}

/// One-dimensional factors of a product density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Univariate {
    Normal { mean: f64, sd: f64 },
    Logistic { location: f64, scale: f64 },
}

impl Univariate {
    fn validate(&self) -> Result<()> {
        let s = match *self {
            Univariate::Normal { sd, .. } => sd,
            Univariate::Logistic { scale, .. } => scale,
        };
        if s > 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("scale must be positive, got {s}")))
        }
    }

    fn log_density(&self, x: f64) -> f64 {
        match *self {
            Univariate::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * (2.0 * PI).ln()
            }
            Univariate::Logistic { location, scale } => {
                let z = (x - location) / scale;
                // symmetric form avoids overflow for large |z|
                -z.abs() - 2.0 * (-z.abs()).exp().ln_1p() - scale.ln()
            }
        }
    }

    /// Derivatives of the log density of order 1 and 2.
    fn log_derivative(&self, x: f64, order: u32) -> Option<f64> {
        match (*self, order) {
            (Univariate::Normal { mean, sd }, 1) => Some(-(x - mean) / (sd * sd)),
            (Univariate::Normal { sd, .. }, 2) => Some(-1.0 / (sd * sd)),
            (Univariate::Logistic { location, scale }, 1) => {
                let s = logistic((x - location) / scale);
                Some((1.0 - 2.0 * s) / scale)
            }
            (Univariate::Logistic { location, scale }, 2) => {
                let s = logistic((x - location) / scale);
                Some(-2.0 * s * (1.0 - s) / (scale * scale))
            }
            _ => None,
        }
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Product of independent univariate factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Product {
    factors: Vec<Univariate>,
}

impl Product {
    pub fn new(factors: Vec<Univariate>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("product density needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(Product { factors })
    }
}

impl Density for Product {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &xi)| f.log_density(xi)).sum()
    }

    fn log_derivative(&self, x: &[f64], alpha: &MultiIndex) -> Option<f64> {
        let support = alpha.support();
        match support.len() {
            0 => Some(self.log_density(x)),
            1 => {
                let i = support[0];
                self.factors[i].log_derivative(x[i], alpha.entries()[i])
            }
            _ => Some(0.0),
        }
    }
}

/// Wraps a closure as a density.
pub struct FnDensity<F> {
    p: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnDensity<F> {
    pub fn new(p: usize, f: F) -> Self {
        FnDensity { p, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Density for FnDensity<F> {
    fn dim(&self) -> usize {
        self.p
    }

    fn density(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// The hypercube of edge `ε` centred at `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeWindow {
    center: Vec<f64>,
    edge: f64,
}

impl CubeWindow {
    pub fn new(center: Vec<f64>, edge: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidInput("window needs at least one coordinate".into()));
        }
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(Error::InvalidParameter(format!("edge length must be positive, got {edge}")));
        }
        Ok(CubeWindow { center, edge })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn volume(&self) -> f64 {
        self.edge.powi(self.center.len() as i32)
    }
}

/// `α` with `α_i = k_i mod 2`.
pub fn parity_alpha(k: &MultiIndex) -> MultiIndex {
    k.parity()
}

/// Whether `u` and `k` have the same parity in every coordinate, i.e. the
/// same differential moment.
pub fn same_moment_class(u: &MultiIndex, k: &MultiIndex) -> Result<bool> {
    if u.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: u.dim() });
    }
    Ok(u.parity() == k.parity())
}

/// `r(ε, k) = ε^{‖k‖₁⁺} ∏_{k_i even} 1/(k_i+1) ∏_{k_i odd} 1/(k_i+2)`.
pub fn r_factor(eps: f64, k: &MultiIndex) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let mut r = eps.powi(k.plus_norm() as i32);
    for &ki in k.entries() {
        r /= if ki % 2 == 0 { ki + 1 } else { ki + 2 } as f64;
    }
    Ok(r)
}

/// The scaling used for a window: `r` taken at the half edge, since the
/// window extends `ε/2` to each side of its centre.
pub fn window_r_factor(window: &CubeWindow, k: &MultiIndex) -> Result<f64> {
    r_factor(window.edge / 2.0, k)
}

/// What an estimate approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    DifferentialMoment,
    DifferentialCumulant,
    LocalMoment,
    LocalCumulant,
}

/// How an estimate was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FiniteDifference,
    PartitionSum,
    LogDerivative,
    TensorQuadrature,
    MonteCarlo,
}

/// An estimate together with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub quantity: Quantity,
    pub method: Method,
    pub value: f64,
    pub k: String,
    pub alpha: String,
    pub xi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub richardson: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Finite-difference settings: per-axis step `h_i = step_scale·max(1, |ξ_i|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteDifference {
    pub step_scale: f64,
    pub richardson: bool,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        FiniteDifference { step_scale: 1e-3, richardson: true }
    }
}

impl FiniteDifference {
    fn steps(&self, xi: &[f64]) -> Vec<f64> {
        xi.iter().map(|x| self.step_scale * x.abs().max(1.0)).collect()
    }
}

/// How local moments integrate over the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator {
    Tensor { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Tensor { nodes: 16 }
    }
}

/// Tensor grids larger than this are refused; use Monte Carlo instead.
pub const MAX_TENSOR_POINTS: usize = 1 << 24;

fn check_point(f: &dyn Density, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("point has non-finite coordinates".into()));
    }
    Ok(())
}

fn check_index(f: &dyn Density, k: &MultiIndex) -> Result<()> {
    if k.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: k.dim() });
    }
    Ok(())
}

fn positive(x: &[f64], value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositiveDensity { point: x.to_vec(), value })
    }
}

/// Central mixed difference of `F` over the binary `alpha` with steps `h`.
fn mixed_difference<F>(eval: &F, xi: &[f64], alpha: &MultiIndex, h: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let axes = alpha.support();
    let mut total = 0.0;
    let mut x = xi.to_vec();
    for signs in 0u64..(1 << axes.len()) {
        let mut sign = 1.0;
        for (bit, &i) in axes.iter().enumerate() {
            if signs >> bit & 1 == 1 {
                x[i] = xi[i] - h[i];
                sign = -sign;
            } else {
                x[i] = xi[i] + h[i];
            }
        }
        total += sign * eval(&x)?;
    }
    let scale: f64 = axes.iter().map(|&i| 2.0 * h[i]).product();
    Ok(total / scale)
}

fn derivative<F>(eval: &F, xi: &[f64], alpha: &MultiIndex, fd: &FiniteDifference) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let h = fd.steps(xi);
    if alpha.is_zero() {
        return Ok((eval(xi)?, h));
    }
    let coarse = mixed_difference(eval, xi, alpha, &h)?;
    if !fd.richardson {
        return Ok((coarse, h));
    }
    let half: Vec<f64> = h.iter().map(|s| s / 2.0).collect();
    let fine = mixed_difference(eval, xi, alpha, &half)?;
    Ok(((4.0 * fine - coarse) / 3.0, h))
}

fn report(quantity: Quantity, method: Method, value: f64, k: &MultiIndex, xi: &[f64]) -> EstimateReport {
    EstimateReport {
        quantity,
        method,
        value,
        k: k.to_string(),
        alpha: k.parity().to_string(),
        xi: xi.to_vec(),
        steps: None,
        richardson: None,
        eps: None,
        r: None,
        scaled: None,
        nodes: None,
        samples: None,
        seed: None,
    }
}

/// `m^ξ_k = D^α f(ξ) / f(ξ)` with `α` the parity of `k`.
pub fn differential_moment(
    f: &dyn Density,
    xi: &[f64],
    k: &MultiIndex,
    fd: &FiniteDifference,
) -> Result<EstimateReport> {
    check_point(f, xi)?;
    check_index(f, k)?;
    let alpha = k.parity();
    let eval = |x: &[f64]| positive(x, f.density(x));
    let base = eval(xi)?;
    let (value, steps) = if alpha.is_zero() {
        (1.0, fd.steps(xi))
    } else {
        let (d, steps) = derivative(&eval, xi, &alpha, fd)?;
        (d / base, steps)
    };
    let mut out = report(Quantity::DifferentialMoment, Method::FiniteDifference, value, k, xi);
    out.steps = Some(steps);
    out.richardson = Some(fd.richardson);
    Ok(out)
}

/// Every `u` with `0 ≠ u ≤ k`, in lexicographic order.
fn lower_indices(k: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &ki in k.entries() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=ki).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(|e| MultiIndex::new(e).expect("non-empty index")).filter(|u| !u.is_zero()).collect()
}

/// Differential moments of every `0 ≠ u ≤ k`; moments sharing a parity
/// class are computed once.
fn differential_moment_table(
    f: &dyn Density,
    xi: &[f64],
    k: &MultiIndex,
    fd: &FiniteDifference,
) -> Result<MomentTable<f64>> {
    let mut by_class = std::collections::BTreeMap::new();
    let mut table = MomentTable::new(k.dim());
    for u in lower_indices(k) {
        let alpha = u.parity();
        let m = match by_class.get(&alpha) {
            Some(&m) => m,
            None => {
                let m = differential_moment(f, xi, &alpha, fd)?.value;
                by_class.insert(alpha, m);
                m
            }
        };
        table.insert(u, m)?;
    }
    Ok(table)
}

/// The differential cumulant `κ^ξ_k`.
///
/// `Method::PartitionSum` combines differential moments through the
/// moment-to-cumulant partition sum; `Method::LogDerivative` differentiates
/// `log f` directly, which agrees with the partition sum for binary `k`.
pub fn differential_cumulant(
    f: &dyn Density,
    xi: &[f64],
    k: &MultiIndex,
    method: Method,
    fd: &FiniteDifference,
) -> Result<EstimateReport> {
    check_point(f, xi)?;
    check_index(f, k)?;
    if k.is_zero() {
        return Err(Error::InvalidParameter("cumulants need a non-zero index".into()));
    }
    let (value, steps) = match method {
        Method::PartitionSum => {
            let table = differential_moment_table(f, xi, k, fd)?;
            (cumulant_from_moments(k, &table)?, fd.steps(xi))
        }
        Method::LogDerivative => {
            let eval = |x: &[f64]| {
                positive(x, f.density(x))?;
                Ok(f.log_density(x))
            };
            derivative(&eval, xi, &k.parity(), fd)?
        }
        other => return Err(Error::InvalidParameter(format!("{other:?} is not a differential cumulant method"))),
    };
    let mut out = report(Quantity::DifferentialCumulant, method, value, k, xi);
    out.steps = Some(steps);
    out.richardson = Some(fd.richardson);
    Ok(out)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n).ok_or_else(|| Error::InvalidParameter("quadrature needs at least one node".into()))?;
    Ok(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
}

struct TensorGrid {
    p: usize,
    n: usize,
    len: usize,
}

impl TensorGrid {
    fn new(p: usize, n: usize) -> Result<Self> {
        let len =
            (0..p).try_fold(1usize, |acc, _| acc.checked_mul(n)).filter(|&len| len <= MAX_TENSOR_POINTS).ok_or_else(
                || Error::InvalidParameter(format!("tensor grid with {n}^{p} points is too large; use Monte Carlo")),
            )?;
        Ok(TensorGrid { p, n, len })
    }

    fn len(&self) -> usize {
        self.len
    }

    /// Per-axis node indices of a flat grid index, last axis fastest.
    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.p];
        for d in (0..self.p).rev() {
            out[d] = idx % self.n;
            idx /= self.n;
        }
        out
    }
}

/// Offsets `x − ξ` and weights `w·f(x)` of the sample points in a window.
struct WindowSample {
    offsets: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl WindowSample {
    fn draw(f: &dyn Density, window: &CubeWindow, integrator: Integrator) -> Result<Self> {
        let p = window.center.len();
        if p != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: p });
        }
        check_point(f, &window.center)?;
        let half = window.edge / 2.0;
        let offsets: Vec<(Vec<f64>, f64)> = match integrator {
            Integrator::Tensor { nodes } => {
                let rule = gauss_legendre(nodes)?;
                let grid = TensorGrid::new(p, nodes)?;
                (0..grid.len())
                    .map(|idx| {
                        let mut t = vec![0.0; p];
                        let mut w = 1.0;
                        for (d, i) in grid.digits(idx).into_iter().enumerate() {
                            t[d] = half * rule[i].0;
                            w *= rule[i].1;
                        }
                        (t, w)
                    })
                    .collect()
            }
            Integrator::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..samples).map(|_| ((0..p).map(|_| rng.gen_range(-half..half)).collect(), 1.0)).collect()
            }
        };
        let values: Vec<f64> = offsets
            .par_iter()
            .map(|(t, _)| {
                let x: Vec<f64> = t.iter().zip(&window.center).map(|(a, c)| c + a).collect();
                positive(&x, f.density(&x))
            })
            .collect::<Result<_>>()?;
        let (offsets, weights) = offsets.into_iter().zip(values).map(|((t, w), v)| (t, w * v)).unzip();
        Ok(WindowSample { offsets, weights })
    }

    fn moment(&self, k: &MultiIndex) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, &w) in self.offsets.iter().zip(&self.weights) {
            let mono: f64 = t.iter().zip(k.entries()).map(|(x, &e)| x.powi(e as i32)).product();
            num += w * mono;
            den += w;
        }
        num / den
    }
}

fn local_report(
    quantity: Quantity,
    value: f64,
    window: &CubeWindow,
    k: &MultiIndex,
    integrator: Integrator,
) -> Result<EstimateReport> {
    let method = match integrator {
        Integrator::Tensor { .. } => Method::TensorQuadrature,
        Integrator::MonteCarlo { .. } => Method::MonteCarlo,
    };
    let r = window_r_factor(window, k)?;
    let mut out = report(quantity, method, value, k, &window.center);
    out.eps = Some(window.edge);
    out.r = Some(r);
    out.scaled = Some(value / r);
    match integrator {
        Integrator::Tensor { nodes } => out.nodes = Some(nodes),
        Integrator::MonteCarlo { samples, seed } => {
            out.samples = Some(samples);
            out.seed = Some(seed);
        }
    }
    Ok(out)
}

/// `m^A_k = ∫_A ∏(x_i − ξ_i)^{k_i} f / ∫_A f`. The report's `scaled` field
/// is `m^A_k / r(ε/2, k)`, which tends to `m^ξ_k` for `k` with an odd entry.
pub fn local_moment(
    f: &dyn Density,
    window: &CubeWindow,
    k: &MultiIndex,
    integrator: Integrator,
) -> Result<EstimateReport> {
    check_index(f, k)?;
    let sample = WindowSample::draw(f, window, integrator)?;
    local_report(Quantity::LocalMoment, sample.moment(k), window, k, integrator)
}

/// `κ^A_k` from the partition sum over local moments, all taken from one
/// sample of the window.
pub fn local_cumulant(
    f: &dyn Density,
    window: &CubeWindow,
    k: &MultiIndex,
    integrator: Integrator,
) -> Result<EstimateReport> {
    check_index(f, k)?;
    if k.is_zero() {
        return Err(Error::InvalidParameter("cumulants need a non-zero index".into()));
    }
    let sample = WindowSample::draw(f, window, integrator)?;
    let mut table = MomentTable::new(k.dim());
    for u in lower_indices(k) {
        let m = sample.moment(&u);
        table.insert(u, m)?;
    }
    let value = cumulant_from_moments(k, &table)?;
    local_report(Quantity::LocalCumulant, value, window, k, integrator)
}

/// One window size of a limit probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeLevel {
    pub eps: f64,
    pub local_cumulant: f64,
    pub r: f64,
    pub scaled: f64,
    pub error: f64,
}

/// Whether `κ^A_k / r` approaches the differential cumulant as `ε ↓ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitProbeReport {
    pub k: String,
    pub xi: Vec<f64>,
    /// `κ^ξ_k` from the partition sum over differential moments.
    pub target: f64,
    /// `D^α log f(ξ)`; equal to `target` for binary `k`.
    pub log_derivative: f64,
    pub levels: Vec<ProbeLevel>,
    pub converged: bool,
    pub verdict: String,
}

/// Relative tolerance on the last scaled value.
pub const PROBE_RELATIVE_TOLERANCE: f64 = 0.05;
/// Absolute slack for targets at or near zero and for error plateaus.
pub const PROBE_ABSOLUTE_TOLERANCE: f64 = 1e-6;

/// Evaluates `κ^A_k / r(ε/2, k)` along a decreasing `ε` sequence.
///
/// Convergence is declared when the errors against `κ^ξ_k` never increase
/// (up to the absolute slack) and the last one is within 5% of `|κ^ξ_k|`.
pub fn limit_probe(
    f: &dyn Density,
    xi: &[f64],
    k: &MultiIndex,
    eps_seq: &[f64],
    integrator: Integrator,
    fd: &FiniteDifference,
) -> Result<LimitProbeReport> {
    if eps_seq.len() < 3 {
        return Err(Error::InvalidParameter("limit probe needs at least three ε levels".into()));
    }
    if eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("ε sequence must be strictly decreasing".into()));
    }
    let target = differential_cumulant(f, xi, k, Method::PartitionSum, fd)?.value;
    let log_derivative = differential_cumulant(f, xi, k, Method::LogDerivative, fd)?.value;
    let mut levels = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        let window = CubeWindow::new(xi.to_vec(), eps)?;
        let est = local_cumulant(f, &window, k, integrator)?;
        let scaled = est.scaled.expect("local estimates carry a scaled value");
        levels.push(ProbeLevel {
            eps,
            local_cumulant: est.value,
            r: est.r.expect("local estimates carry r"),
            scaled,
            error: (scaled - target).abs(),
        });
    }
    let monotone = levels.windows(2).all(|w| w[1].error <= w[0].error + PROBE_ABSOLUTE_TOLERANCE);
    let last = levels.last().expect("at least three levels").error;
    let converged = monotone && last <= PROBE_RELATIVE_TOLERANCE * target.abs() + PROBE_ABSOLUTE_TOLERANCE;
    Ok(LimitProbeReport {
        k: k.to_string(),
        xi: xi.to_vec(),
        target,
        log_derivative,
        levels,
        converged,
        verdict: if converged { "CONVERGED" } else { "NOT-CONVERGED" }.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    #[test]
    fn parity_and_classes() {
        assert_eq!(parity_alpha(&mi("1,2,0")), mi("1,0,0"));
        assert_eq!(parity_alpha(&mi("3,1")), mi("1,1"));
        assert!(same_moment_class(&mi("2,2"), &mi("4,2")).unwrap());
        assert!(!same_moment_class(&mi("1,0"), &mi("0,1")).unwrap());
    }

    #[test]
    fn r_factor_examples() {
        let e: f64 = 0.3;
        assert!((r_factor(e, &mi("1,2,0")).unwrap() - e.powi(4) / 9.0).abs() < 1e-15);
        assert!((r_factor(e, &mi("1,1")).unwrap() - e.powi(4) / 9.0).abs() < 1e-15);
        assert!((r_factor(e, &mi("2,0")).unwrap() - e.powi(2) / 3.0).abs() < 1e-15);
        assert!(r_factor(0.0, &mi("1")).is_err());
    }

    #[test]
    fn differential_moments_of_normals() {
        let fd = FiniteDifference::default();
        let std = Product::new(vec![Univariate::Normal { mean: 0.0, sd: 1.0 }]).unwrap();
        let m = differential_moment(&std, &[0.7], &mi("1"), &fd).unwrap();
        assert!((m.value + 0.7).abs() < 1e-6);
        let g = Gaussian::bivariate(0.5).unwrap();
        let m = differential_moment(&g, &[0.0, 0.0], &mi("1,1"), &fd).unwrap();
        assert!((m.value - 2.0 / 3.0).abs() < 1e-6);
        assert_eq!(differential_moment(&g, &[0.3, 0.1], &mi("2,4"), &fd).unwrap().value, 1.0);
    }

    #[test]
    fn cumulant_methods_agree_for_binary_k() {
        let fd = FiniteDifference::default();
        let g = Gaussian::bivariate(0.5).unwrap();
        for xi in [[0.0, 0.0], [1.0, -0.5], [0.3, 2.0]] {
            let a = differential_cumulant(&g, &xi, &mi("1,1"), Method::PartitionSum, &fd).unwrap().value;
            let b = differential_cumulant(&g, &xi, &mi("1,1"), Method::LogDerivative, &fd).unwrap().value;
            assert!((a - 2.0 / 3.0).abs() < 1e-5, "{a}");
            assert!((b - 2.0 / 3.0).abs() < 1e-5, "{b}");
        }
        let indep = Product::new(vec![
            Univariate::Normal { mean: 1.0, sd: 2.0 },
            Univariate::Logistic { location: 0.0, scale: 1.0 },
        ])
        .unwrap();
        let c = differential_cumulant(&indep, &[0.4, -0.2], &mi("1,1"), Method::PartitionSum, &fd).unwrap();
        assert!(c.value.abs() < 1e-6);
    }

    #[test]
    fn uniform_window_moments_are_exact() {
        let flat = FnDensity::new(2, |_: &[f64]| 1.0);
        let w = CubeWindow::new(vec![0.5, -1.0], 0.2).unwrap();
        let m = local_moment(&flat, &w, &mi("2,0"), Integrator::default()).unwrap();
        assert!((m.value - 0.2f64.powi(2) / 12.0).abs() < 1e-15);
        assert!((m.scaled.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_moment_scaling_for_odd_index() {
        let std = Product::new(vec![Univariate::Normal { mean: 0.0, sd: 1.0 }]).unwrap();
        let w = CubeWindow::new(vec![1.0], 0.05).unwrap();
        let m = local_moment(&std, &w, &mi("1"), Integrator::default()).unwrap();
        assert!((m.scaled.unwrap() + 1.0).abs() < 1e-2);
    }

    #[test]
    fn non_positive_density_is_reported() {
        let bad = FnDensity::new(1, |x: &[f64]| x[0]);
        let err = differential_moment(&bad, &[0.0], &mi("1"), &FiniteDifference::default()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDensity { .. }));
    }

    #[test]
    fn gaussian_log_derivatives() {
        let g = Gaussian::bivariate(0.5).unwrap();
        let d = g.log_derivative(&[0.2, 0.1], &mi("1,1")).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
        let marg = g.marginal(&[1]).unwrap();
        assert!((marg.covariance()[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let g = Gaussian::bivariate(0.5).unwrap();
        let w = CubeWindow::new(vec![0.0, 0.0], 0.4).unwrap();
        let mc = Integrator::MonteCarlo { samples: 2000, seed: 7 };
        let a = local_moment(&g, &w, &mi("1,1"), mc).unwrap();
        let b = local_moment(&g, &w, &mi("1,1"), mc).unwrap();
        assert_eq!(a, b);
    }
}
