//! Exact algebra for |1|-graded parabolic model geometries.
//!
//! Rational arithmetic, sparse exact matrices, the conformal, projective and
//! Grassmannian model algebras, Lie algebra cohomology of g₋₁ with Kostant's
//! codifferential and Laplacian, and the algebraic transformation formulas
//! built on top of them.

pub mod cohomology;
pub mod error;
pub mod linalg;
pub mod lie;
pub mod matrix;
pub mod parabolic;
pub mod rational;

pub use cohomology::{CochainComplex, CochainSpace, HodgeReport, LinearMap};
pub use error::{Error, Result};
pub use lie::{AlgebraKind, ComplexElement, GradedLieAlgebra, RepLabel, RepScope, Representation};
pub use matrix::RatMatrix;
pub use rational::{q, Rational};
