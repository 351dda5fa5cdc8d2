//! Exact reduction theory for automorphisms of `Q[x1, x2, x3]`.

pub mod degree;
pub mod automorphism;
pub mod linalg;
pub mod param;
pub mod parse;
pub mod poly;
pub mod presentation;
pub mod random;
pub mod reduction;
pub mod relations;
pub mod subalgebra;
pub mod unipoly;

pub use poly::{Degree, Monomial, PolyError, Polynomial, Rational};
