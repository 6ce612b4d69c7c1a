//! Perturbation-iteration solver for systems of Caputo fractional
//! differential equations over an exact fractional-polynomial algebra.
//!
//! Iterates live in [`FracPoly`], sums `Σ c·t^p` with exact rational
//! exponents. [`pia::solve`] builds `u_{k,n}` for `n = 0..=N`; the
//! [`oracle`] module integrates the same system numerically for comparison.

pub mod checks;
pub mod exact_refs;
pub mod exponent;
pub mod fracpoly;
pub mod oracle;
pub mod pia;
pub mod problem;
pub mod report;
pub mod specfun;
pub mod system;

pub use exponent::Exponent;
pub use fracpoly::{FracPoly, Limits};
pub use pia::{solve, PiaConfig, PiaSolution};
pub use system::{FdeSystem, RhsExpr, RhsMonomial};
