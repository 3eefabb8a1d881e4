use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, AlgebraicNumber, QuadraticOrder};

/// Exact element num/den of the quadratic field, with num in the order and den > 0.
///
/// Stored in lowest terms: gcd(a, b, den) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldNumber {
    num: AlgebraicNumber,
    den: i128,
}

impl FieldNumber {
    pub fn new(num: AlgebraicNumber, den: i128) -> Result<Self, AlgebraError> {
        if den == 0 {
            return Err(AlgebraError::Overflow("zero denominator"));
        }
        let sign = den.signum();
        let g = num_integer::gcd(num_integer::gcd(num.a(), num.b()), den);
        let g = if g == 0 { 1 } else { g } * sign;
        let order = num.order();
        Ok(Self { num: order.element(num.a() / g, num.b() / g), den: den / g })
    }

    pub fn from_element(num: AlgebraicNumber) -> Self {
        Self { num, den: 1 }
    }

    pub fn ratio(order: QuadraticOrder, p: i128, q: i128) -> Result<Self, AlgebraError> {
        Self::new(order.integer(p), q)
    }

    pub fn numerator(&self) -> AlgebraicNumber {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn order(&self) -> QuadraticOrder {
        self.num.order()
    }

    pub fn value(&self) -> f64 {
        self.num.value() / self.den as f64
    }

    pub fn star_value(&self) -> f64 {
        self.num.star_value() / self.den as f64
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        let l = self.num.checked_scale(other.den)?;
        let r = other.num.checked_scale(self.den)?;
        let den = self.den.checked_mul(other.den).ok_or(AlgebraError::Overflow("field sub"))?;
        Self::new(l.checked_sub(&r)?, den)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let neg = Self { num: -other.num, den: other.den };
        self.checked_sub(&neg)
    }

    pub fn checked_signum(&self) -> Result<Ordering, AlgebraError> {
        self.num.checked_signum()
    }

    /// Exact ordering of this value relative to the real number x⋆.
    pub fn cmp_with_star_of(&self, x: &AlgebraicNumber) -> Result<Ordering, AlgebraError> {
        // den·x⋆ − num = (den·x − num⋆)⋆
        let y = x.checked_scale(self.den)?.checked_sub(&self.num.checked_star()?)?;
        Ok(y.checked_star()?.checked_signum()?.reverse())
    }
}

impl From<AlgebraicNumber> for FieldNumber {
    fn from(x: AlgebraicNumber) -> Self {
        Self::from_element(x)
    }
}

impl fmt::Display for FieldNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}
