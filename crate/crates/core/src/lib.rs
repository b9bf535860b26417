//! Exact computation in valued differential fields with small derivation
//! over finite-rank lexicographic value groups.
//!
//! The building blocks, bottom up:
//!
//! - [`ordgroup`]: `Z^n` with the lexicographic order, its convex subgroup
//!   chain, quotients, and archimedean classes.
//! - [`residue`]: residue differential fields (`Q` with the zero derivation,
//!   `Q(x)` with `d/dx`) behind a common interface, including a partial
//!   solver for the linear surjectivity equation.
//! - [`series`]: truncated Hahn series with an explicit exactness frontier,
//!   a parametric derivation family, dominance relations, and exact
//!   deciders for smallness and monotonicity.
//! - [`diffpoly`]: differential polynomials, conjugation, dominant parts and
//!   dominant degrees.
//! - [`coarsen`]: coarsening by a convex subgroup and specialization to it,
//!   with the transfer of dominant degrees across both.
//! - [`cuts`]: finite pseudo-Cauchy prefixes, dominant degree along a cut,
//!   and the fluent/jammed classifiers.
//! - [`dhensel`]: a root refiner for polynomials in Hensel position, built
//!   from residue-linear corrections.
//! - [`oracle`]: brute-force reference implementations and deterministic
//!   instance generators for the test suites.
//! - [`json`] and [`pretty`]: the machine and human output channels.

pub mod coarsen;
pub mod cuts;
pub mod dhensel;
pub mod diffpoly;
pub mod error;
pub mod json;
pub mod oracle;
pub mod ordgroup;
pub mod pretty;
pub mod residue;
pub mod series;

pub use error::{Error, Result};
