use crate::algebra::AlgebraError;
use crate::cutproject::CutProjectError;
use crate::numbertheory::NumberTheoryError;
use crate::renorm::RenormError;
use crate::riesz::RieszError;
use crate::scaling::ScalingError;
use crate::stochastic::StochasticError;
use crate::substitution::SubstitutionError;

/// Crate-wide error; each module keeps its own variant set.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    CutProject(#[from] CutProjectError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
    #[error(transparent)]
    Renorm(#[from] RenormError),
    #[error(transparent)]
    Riesz(#[from] RieszError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}

impl Error {
    /// True for failures of a numerical procedure (non-convergence, under-resolution)
    /// as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        if let Error::Scaling(ScalingError::Producer { source, .. }) = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::Algebra(AlgebraError::NoConvergence(_) | AlgebraError::Overflow(_))
                | Error::Renorm(RenormError::NoConvergence { .. })
                | Error::Riesz(RieszError::UnderResolved { .. })
                | Error::Stochastic(StochasticError::UnderResolved { .. } | StochasticError::Quadrature(_))
        )
    }
}
