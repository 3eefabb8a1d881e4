//! Pair-correlation renormalisation, Fourier-matrix cocycles and the exponents they predict.

mod cocycle;
mod pair;
mod predict;

pub use cocycle::{
    amplitude_exponent, cocycle_exponent, cocycle_spectrum, displacement_sets, fourier_matrix, window_amplitudes,
    AmplitudeExponent, ComplexMatrix, DisplacementSets,
};
pub use pair::{count_pair_correlations, renorm_step, solve_pair_correlations, PairCorrelationTable, PairType};
pub use predict::{exponent_report, predict_exponent, Derivation, ExponentPrediction, ExponentReport};

use crate::algebra::AlgebraError;
use crate::substitution::SubstitutionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenormError {
    #[error("distance {0} is not in the order of the table")]
    ForeignDistance(String),
    #[error("radius {0} is below τ² and cannot hold the renormalisation stencil")]
    Radius(f64),
    #[error("seed frequency {0} outside (0, 1)")]
    SeedFrequency(f64),
    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("rule {0} is not a noble-mean substitution")]
    NotNoble(String),
    #[error("start vector is zero or has the wrong dimension")]
    StartVector,
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
