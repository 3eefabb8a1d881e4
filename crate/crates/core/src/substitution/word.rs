use serde::{Deserialize, Serialize};

use super::rule::{letter_char, letter_counts, Letter, SubstitutionRule};
use super::SubstitutionError;

/// Default cap on the number of letters produced by iteration.
pub const DEFAULT_LETTER_BUDGET: usize = 10_000_000;

/// Two-sided word with an origin marker between `left` and `right`.
///
/// `left` is stored reversed: `left[0]` is the letter immediately left of the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedWord {
    pub left: Vec<Letter>,
    pub right: Vec<Letter>,
}

impl TwoSidedWord {
    pub fn from_seed(left: Letter, right: Letter) -> Self {
        Self { left: vec![left], right: vec![right] }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Letters in reading order; the origin sits before index `left.len()`.
    pub fn to_vec(&self) -> Vec<Letter> {
        self.left.iter().rev().chain(&self.right).copied().collect()
    }

    /// Apply ϱ once, keeping the origin between the images of the two central letters.
    pub fn substitute(&self, rule: &SubstitutionRule) -> Self {
        let right = rule.apply(&self.right);
        let left = self.left.iter().flat_map(|&l| rule.image(l).iter().rev().copied()).collect();
        Self { left, right }
    }

    /// True when `inner` sits at the same origin inside `self`.
    pub fn contains_centrally(&self, inner: &Self) -> bool {
        self.left.starts_with(&inner.left) && self.right.starts_with(&inner.right)
    }

    pub fn letter_counts(&self, d: usize) -> Vec<i64> {
        let l = letter_counts(&self.left, d);
        let r = letter_counts(&self.right, d);
        l.iter().zip(&r).map(|(a, b)| a + b).collect()
    }

    pub fn display(&self) -> String {
        let l: String = self.left.iter().rev().map(|&x| letter_char(x)).collect();
        let r: String = self.right.iter().map(|&x| letter_char(x)).collect();
        format!("{l}|{r}")
    }
}

/// The word ϱ²ⁿ(seed) around the marked origin.
///
/// For a seed u|v with ϱ²(u) ending in u and ϱ²(v) starting with v, successive iterates
/// are central factors of each other and converge to a ϱ²-fixed point.
pub fn fixed_point_word(
    rule: &SubstitutionRule,
    seed: (Letter, Letter),
    n: usize,
    budget: usize,
) -> Result<TwoSidedWord, SubstitutionError> {
    let d = rule.alphabet_size();
    if usize::from(seed.0) >= d || usize::from(seed.1) >= d {
        return Err(SubstitutionError::UnknownLetter(letter_char(seed.0.max(seed.1))));
    }
    if !rule.legal_pairs().contains(&seed) {
        return Err(SubstitutionError::IllegalSeed(format!("{}{}", letter_char(seed.0), letter_char(seed.1))));
    }
    let m = rule.matrix();
    let mut counts: Vec<i64> = vec![0; d];
    counts[usize::from(seed.0)] += 1;
    counts[usize::from(seed.1)] += 1;
    for _ in 0..2 * n {
        counts = m.mul_vec(&counts);
        let total: i64 = counts.iter().sum();
        if total as u128 > budget as u128 || total < 0 {
            return Err(SubstitutionError::Budget { budget });
        }
    }
    let mut word = TwoSidedWord::from_seed(seed.0, seed.1);
    for _ in 0..2 * n {
        word = word.substitute(rule);
    }
    Ok(word)
}

/// Smallest n such that ϱ²ⁿ(seed) extends at least `len` letters on both sides.
pub fn iterations_for_radius(rule: &SubstitutionRule, seed: (Letter, Letter), len: usize) -> Option<usize> {
    let m = rule.matrix();
    let d = rule.alphabet_size();
    let unit = |l: Letter| (0..d).map(|i| i64::from(i == usize::from(l))).collect::<Vec<i64>>();
    let (mut left, mut right) = (unit(seed.0), unit(seed.1));
    for n in 0..64 {
        let (nl, nr) = (left.iter().sum::<i64>(), right.iter().sum::<i64>());
        if nl as usize >= len && nr as usize >= len {
            return Some(n);
        }
        if nl + nr > DEFAULT_LETTER_BUDGET as i64 {
            return None;
        }
        left = m.mul_vec(&m.mul_vec(&left));
        right = m.mul_vec(&m.mul_vec(&right));
    }
    None
}
