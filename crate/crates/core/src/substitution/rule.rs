use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SubstitutionError;
use crate::algebra::{spectral_data, AlgebraicNumber, IntegerMatrix, QuadraticOrder, SpectralData, MAX_DIM};

/// Letters are indices 0..d, displayed as 'a', 'b', ….
pub type Letter = u8;

pub fn letter_char(l: Letter) -> char {
    char::from(b'a' + l)
}

pub fn parse_letter(c: char) -> Option<Letter> {
    c.is_ascii_lowercase().then(|| c as u8 - b'a')
}

/// A substitution ϱ on the alphabet {a, b, …}, one image word per letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionRule {
    name: String,
    images: Vec<Vec<Letter>>,
}

/// Natural tile lengths: floating values, plus exact values when they lie in a quadratic
/// order (or are integers).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileLengths {
    pub real: Vec<f64>,
    pub exact: Option<Vec<AlgebraicNumber>>,
}

impl TileLengths {
    pub fn real_only(real: Vec<f64>) -> Self {
        Self { real, exact: None }
    }
}

impl SubstitutionRule {
    pub fn new(name: impl Into<String>, images: Vec<Vec<Letter>>) -> Result<Self, SubstitutionError> {
        let d = images.len();
        if d == 0 || d > MAX_DIM {
            return Err(SubstitutionError::Alphabet(d));
        }
        if images.iter().any(Vec::is_empty) {
            return Err(SubstitutionError::EmptyImage);
        }
        if let Some(&bad) = images.iter().flatten().find(|&&l| usize::from(l) >= d) {
            return Err(SubstitutionError::UnknownLetter(letter_char(bad)));
        }
        Ok(Self { name: name.into(), images })
    }

    /// Build from image strings such as `["ab", "a"]`.
    pub fn from_strings(name: impl Into<String>, images: &[&str]) -> Result<Self, SubstitutionError> {
        let parsed = images
            .iter()
            .map(|w| w.chars().map(|c| parse_letter(c).ok_or(SubstitutionError::UnknownLetter(c))).collect())
            .collect::<Result<Vec<Vec<Letter>>, _>>()?;
        Self::new(name, parsed)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, l: Letter) -> &[Letter] {
        &self.images[usize::from(l)]
    }

    pub fn images(&self) -> &[Vec<Letter>] {
        &self.images
    }

    /// M_ij = number of occurrences of letter i in the image of letter j.
    pub fn matrix(&self) -> IntegerMatrix {
        let d = self.alphabet_size();
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|i| self.images.iter().map(|img| img.iter().filter(|&&l| usize::from(l) == i).count() as i64).collect())
            .collect();
        IntegerMatrix::from_rows(&rows).expect("alphabet size validated at construction")
    }

    pub fn is_primitive(&self) -> bool {
        self.matrix().is_primitive()
    }

    pub fn spectral_data(&self) -> Result<SpectralData, SubstitutionError> {
        Ok(spectral_data(&self.matrix())?)
    }

    pub fn apply(&self, word: &[Letter]) -> Vec<Letter> {
        word.iter().flat_map(|&l| self.image(l).iter().copied()).collect()
    }

    /// Two-letter words occurring in some iterate ϱⁿ(x).
    pub fn legal_pairs(&self) -> BTreeSet<(Letter, Letter)> {
        let mut legal: BTreeSet<(Letter, Letter)> =
            self.images.iter().flat_map(|img| img.windows(2).map(|w| (w[0], w[1]))).collect();
        loop {
            let new: Vec<(Letter, Letter)> = legal
                .iter()
                .map(|&(u, v)| (*self.image(u).last().expect("non-empty image"), self.image(v)[0]))
                .filter(|p| !legal.contains(p))
                .collect();
            if new.is_empty() {
                return legal;
            }
            legal.extend(new);
        }
    }

    /// Natural tile lengths from the left PF eigenvector (minimum entry 1), with exact
    /// values for binary rules whose lengths lie in Z[λ].
    pub fn natural_lengths(&self) -> Result<TileLengths, SubstitutionError> {
        let spectral = self.spectral_data()?;
        let exact = if self.alphabet_size() == 2 { self.exact_binary_lengths(spectral.pf_eigenvalue) } else { None };
        let real = match &exact {
            Some(ex) => ex.iter().map(AlgebraicNumber::value).collect(),
            None => spectral.left,
        };
        Ok(TileLengths { real, exact })
    }

    /// For a 2×2 matrix the left eigenvector satisfies ℓ_b/ℓ_a = (λ − m_aa)/m_ba.
    fn exact_binary_lengths(&self, lambda: f64) -> Option<Vec<AlgebraicNumber>> {
        let m = self.matrix();
        let (maa, mba) = (i128::from(m.get(0, 0)), i128::from(m.get(1, 0)));
        let tr = m.get(0, 0) + m.get(1, 1);
        let det = i64::try_from(m.determinant().ok()?).ok()?;
        let order = match QuadraticOrder::new(tr, -det) {
            Ok(o) => o,
            Err(_) => {
                // Integer λ: ℓ_b/ℓ_a is rational; integer lengths are stored with b = 0.
                let (num, den) = (lambda.round() as i128 - maa, mba);
                if num <= 0 || den <= 0 {
                    return None;
                }
                let g = num_integer::gcd(num, den);
                let (num, den) = (num / g, den / g);
                let unit = QuadraticOrder::golden();
                return match (num >= den, num, den) {
                    (true, n, 1) => Some(vec![unit.one(), unit.integer(n)]),
                    (false, 1, d) => Some(vec![unit.integer(d), unit.one()]),
                    _ => None,
                };
            }
        };
        let x = order.element(-maa, 1);
        // ℓ = (1, x/m_ba)
        if mba != 0 && x.a() % mba == 0 && x.b() % mba == 0 {
            let lb = order.element(x.a() / mba, x.b() / mba);
            if lb.value() >= 1.0 - 1e-12 {
                return Some(vec![order.one(), lb]);
            }
        }
        // ℓ = (m_ba/x, 1)
        let n = x.checked_norm().ok()?;
        let num = x.checked_star().ok()?.checked_scale(mba).ok()?;
        if n != 0 && num.a() % n == 0 && num.b() % n == 0 {
            let la = order.element(num.a() / n, num.b() / n);
            if la.value() >= 1.0 - 1e-12 {
                return Some(vec![la, order.one()]);
            }
        }
        None
    }

    /// λ as an exact element compatible with `natural_lengths().exact` (binary rules only).
    pub fn exact_inflation_factor(&self) -> Option<AlgebraicNumber> {
        let ex = self.natural_lengths().ok()?.exact?;
        let order = ex[0].order();
        let m = self.matrix();
        match QuadraticOrder::new(m.get(0, 0) + m.get(1, 1), -i64::try_from(m.determinant().ok()?).ok()?) {
            Ok(o) if o == order => Some(order.theta_element()),
            Ok(_) => None,
            Err(_) => Some(order.integer(self.spectral_data().ok()?.pf_eigenvalue.round() as i128)),
        }
    }

    pub fn display_image(&self, l: Letter) -> String {
        self.image(l).iter().map(|&x| letter_char(x)).collect()
    }
}

impl fmt::Display for SubstitutionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.alphabet_size() as Letter)
            .map(|l| format!("{}→{}", letter_char(l), self.display_image(l)))
            .collect();
        write!(f, "{}: {}", self.name, parts.join(", "))
    }
}

pub fn letter_counts(word: &[Letter], d: usize) -> Vec<i64> {
    let mut c = vec![0i64; d];
    word.iter().for_each(|&l| c[usize::from(l)] += 1);
    c
}
