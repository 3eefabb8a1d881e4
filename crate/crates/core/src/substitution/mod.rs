//! Substitution rules, their two-sided fixed points and geometric realisations.

mod catalogue;
mod patch;
mod rule;
mod word;

pub use catalogue::{bernoullise, catalogue, rudin_shapiro_weights, CATALOGUE};
pub use patch::{geometric_patch, patch_for_radius, PatchPoint, TypedPatch};
pub use rule::{letter_char, letter_counts, parse_letter, Letter, SubstitutionRule, TileLengths};
pub use word::{fixed_point_word, iterations_for_radius, TwoSidedWord, DEFAULT_LETTER_BUDGET};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("alphabet size {0} outside 1..=8")]
    Alphabet(usize),
    #[error("substitution image is empty")]
    EmptyImage,
    #[error("unknown letter '{0}'")]
    UnknownLetter(char),
    #[error("illegal seed: the word '{0}' does not occur in any iterate")]
    IllegalSeed(String),
    #[error("iteration would exceed the budget of {budget} letters")]
    Budget { budget: usize },
    #[error("unknown rule '{name}'; known rules: {known}")]
    UnknownRule { name: String, known: String },
    #[error("invalid parameters for '{name}': {reason}")]
    Parameter { name: String, reason: String },
    #[error("tile lengths must be positive, one per letter")]
    Lengths,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
