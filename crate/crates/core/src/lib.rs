//! Numerical laboratory for weighted Bergman projections on the unit disk.
//!
//! The crate discretizes the disk into polar cells, builds reproducing
//! kernels from a pair `(γ, ν)`, and measures the constants appearing in
//! weighted norm inequalities: Bekollé–Bonami type characteristics, dyadic
//! maximal functions, Calderón–Zygmund decompositions, sparse operators and
//! Sawyer testing conditions.

pub mod czd;
pub mod disk;
pub mod error;
pub mod experiment;
pub mod kernels;
pub mod measures;
pub mod operators;
pub mod quad;
pub mod twoweight;
pub mod weights;

pub use error::{Error, Result};
