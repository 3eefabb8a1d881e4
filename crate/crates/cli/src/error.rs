use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] zscale::Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}, line {line}: {reason}")]
    Input { path: PathBuf, line: u64, reason: String },
    #[error("writing output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 3 for numerical failures, 2 for everything the user can fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl<E> From<E> for CliError
where
    E: CoreError,
{
    fn from(e: E) -> Self {
        CliError::Core(e.into())
    }
}

/// Module errors that convert into the crate-wide error.
pub trait CoreError: Into<zscale::Error> {}

impl CoreError for zscale::algebra::AlgebraError {}
impl CoreError for zscale::cutproject::CutProjectError {}
impl CoreError for zscale::substitution::SubstitutionError {}
impl CoreError for zscale::numbertheory::NumberTheoryError {}
impl CoreError for zscale::renorm::RenormError {}
impl CoreError for zscale::riesz::RieszError {}
impl CoreError for zscale::stochastic::StochasticError {}
impl CoreError for zscale::scaling::ScalingError {}
