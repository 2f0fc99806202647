//! Exact computer algebra for graded geometry: supercommutative polynomials,
//! Cartan calculus, Berezinians, Berezin integration, BV and BFV structures,
//! gauge fixing, configuration-space combinatorics and discrete BF models.

pub mod algebra;
pub mod berezin;
pub mod bfv;
pub mod bv;
pub mod cartan;
pub mod gauge;
pub mod graphs;
pub mod json;
pub mod linalg;
pub mod models;
pub mod polyspace;
pub mod scalar;
pub mod supermatrix;

pub use algebra::{AlgebraError, Context, Generator, Monomial, SuperPoly};
pub use scalar::{Gauss, Scalar, Window};
