//! Integrated diffraction intensity Z(k) near the origin for one-dimensional aperiodic
//! and stochastic structures, together with the tools to verify its scaling laws.

pub mod algebra;
pub mod cutproject;
pub mod error;
pub mod numbertheory;
pub mod numeric;
pub mod renorm;
pub mod riesz;
pub mod scaling;
pub mod stochastic;
pub mod substitution;

pub use algebra::{AlgebraicNumber, FieldNumber, IntegerMatrix, QuadraticOrder, SpectralData};
pub use error::Error;
pub use substitution::{SubstitutionRule, TwoSidedWord, TypedPatch};
