//! Hierarchical probability models and their square-free monomial ideals.
//!
//! A hierarchical model for a log-density `g = log f` is described by a
//! simplicial complex: `g` is a sum of terms, each depending only on the
//! variables of one face. Mixed partial derivatives `D^K g` over the non-faces
//! `K` vanish identically, and those non-faces generate the Stanley-Reisner
//! ideal of the complex. This crate implements both sides of that
//! correspondence and the numerical calculus used to test it:
//!
//! - [`partitions`]: multiset partitions, collapse numbers, the multivariate
//!   chain rule and cumulants from moments.
//! - [`simplicial`]: simplicial complexes stored by facets, minimal non-faces
//!   and Alexander duals.
//! - [`ideal`]: square-free monomial ideals, the 2-linear criterion and
//!   Ferrer ideals.
//! - [`hierarchy`]: decomposability, clique/separator factorizations,
//!   marginalisation and conditional-independence generators.
//! - [`logdensity`]: exact rational polynomials for symbolic log-densities.
//! - [`diffcum`]: numeric local and differential moments and cumulants.
//! - [`network`]: cut and path ideals of two-terminal networks.
//! - [`nerve`]: nerve complexes of equal-radius ball covers.
//! - [`formats`]: the JSON and text file formats used by the command line.

pub mod diffcum;
mod error;
pub mod formats;
pub mod graph;
pub mod hierarchy;
pub mod ideal;
pub mod logdensity;
pub mod nerve;
pub mod network;
pub mod partitions;
pub mod simplicial;

pub use error::{Error, Result};
pub use num_rational::BigRational as Rational;
