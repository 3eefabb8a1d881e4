use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// The order Z[θ] with θ² = t·θ + n, where t is the trace and n the norm parameter.
///
/// The discriminant t² + 4n must be positive and not a perfect square, so that θ is a
/// real quadratic irrational and θ⋆ = t − θ is its algebraic conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticOrder {
    trace: i64,
    norm: i64,
}

impl QuadraticOrder {
    pub fn new(trace: i64, norm: i64) -> Result<Self, AlgebraError> {
        let disc = trace
            .checked_mul(trace)
            .and_then(|t2| norm.checked_mul(4).and_then(|n4| t2.checked_add(n4)))
            .ok_or(AlgebraError::Overflow("discriminant"))?;
        if disc <= 0 {
            return Err(AlgebraError::InvalidOrder { trace, norm, reason: "discriminant not positive" });
        }
        let r = (disc as f64).sqrt().round() as i64;
        if (r - 1..=r + 1).any(|c| c >= 0 && c * c == disc) {
            return Err(AlgebraError::InvalidOrder { trace, norm, reason: "discriminant is a perfect square" });
        }
        Ok(Self { trace, norm })
    }

    /// Z[τ] with τ the golden mean.
    pub const fn golden() -> Self {
        Self { trace: 1, norm: 1 }
    }

    /// Z[λ_p] with λ_p = (p + √(p²+4))/2.
    pub fn noble(p: u32) -> Result<Self, AlgebraError> {
        if p == 0 {
            return Err(AlgebraError::InvalidOrder { trace: 0, norm: 1, reason: "noble mean needs p >= 1" });
        }
        Self::new(i64::from(p), 1)
    }

    pub fn trace(&self) -> i64 {
        self.trace
    }

    pub fn norm_parameter(&self) -> i64 {
        self.norm
    }

    pub fn discriminant(&self) -> i64 {
        self.trace * self.trace + 4 * self.norm
    }

    pub fn sqrt_discriminant(&self) -> f64 {
        (self.discriminant() as f64).sqrt()
    }

    /// The larger real root θ.
    pub fn theta(&self) -> f64 {
        let t = self.trace as f64;
        let s = self.sqrt_discriminant();
        if t >= 0.0 {
            (t + s) / 2.0
        } else {
            // θ·θ⋆ = −n
            -(self.norm as f64) / ((t - s) / 2.0)
        }
    }

    /// The conjugate root θ⋆ = t − θ.
    pub fn theta_star(&self) -> f64 {
        let t = self.trace as f64;
        let s = self.sqrt_discriminant();
        if t > 0.0 {
            -(self.norm as f64) / ((t + s) / 2.0)
        } else {
            (t - s) / 2.0
        }
    }

    /// Covolume |θ − θ⋆| of the Minkowski embedding {(x, x⋆)}.
    pub fn covolume(&self) -> f64 {
        self.sqrt_discriminant()
    }

    /// θ is a unit exactly when its norm −n is ±1.
    pub fn is_unit_order(&self) -> bool {
        self.norm.abs() == 1
    }

    pub fn element(self, a: i128, b: i128) -> AlgebraicNumber {
        AlgebraicNumber { a, b, order: self }
    }

    pub fn integer(self, a: i128) -> AlgebraicNumber {
        self.element(a, 0)
    }

    pub fn zero(self) -> AlgebraicNumber {
        self.element(0, 0)
    }

    pub fn one(self) -> AlgebraicNumber {
        self.element(1, 0)
    }

    pub fn theta_element(self) -> AlgebraicNumber {
        self.element(0, 1)
    }
}

impl fmt::Display for QuadraticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[θ], θ² = {}θ + {}", self.trace, self.norm)
    }
}

/// Exact element a + b·θ of a quadratic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    a: i128,
    b: i128,
    order: QuadraticOrder,
}

fn ovf(op: &'static str) -> AlgebraError {
    AlgebraError::Overflow(op)
}

impl AlgebraicNumber {
    pub fn new(a: i128, b: i128, order: QuadraticOrder) -> Self {
        Self { a, b, order }
    }

    pub fn a(&self) -> i128 {
        self.a
    }

    pub fn b(&self) -> i128 {
        self.b
    }

    pub fn order(&self) -> QuadraticOrder {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn same_order(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(AlgebraError::OrderMismatch)
        }
    }

    /// Algebraic conjugate: θ ↦ θ⋆ = t − θ, so (a + bθ)⋆ = (a + bt) − bθ.
    pub fn checked_star(&self) -> Result<Self, AlgebraError> {
        let t = i128::from(self.order.trace);
        let a = self.b.checked_mul(t).and_then(|bt| bt.checked_add(self.a)).ok_or(ovf("star"))?;
        let b = self.b.checked_neg().ok_or(ovf("star"))?;
        Ok(Self { a, b, order: self.order })
    }

    pub fn star(&self) -> Self {
        self.checked_star().expect("overflow in star map")
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_order(other)?;
        Ok(Self {
            a: self.a.checked_add(other.a).ok_or(ovf("add"))?,
            b: self.b.checked_add(other.b).ok_or(ovf("add"))?,
            order: self.order,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_order(other)?;
        Ok(Self {
            a: self.a.checked_sub(other.a).ok_or(ovf("sub"))?,
            b: self.b.checked_sub(other.b).ok_or(ovf("sub"))?,
            order: self.order,
        })
    }

    /// (a + bθ)(c + dθ) = (ac + n·bd) + (ad + bc + t·bd)θ.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_order(other)?;
        let t = i128::from(self.order.trace);
        let n = i128::from(self.order.norm);
        let m = |x: i128, y: i128| x.checked_mul(y).ok_or(ovf("mul"));
        let s = |x: i128, y: i128| x.checked_add(y).ok_or(ovf("mul"));
        let bd = m(self.b, other.b)?;
        let a = s(m(self.a, other.a)?, m(n, bd)?)?;
        let b = s(s(m(self.a, other.b)?, m(self.b, other.a)?)?, m(t, bd)?)?;
        Ok(Self { a, b, order: self.order })
    }

    pub fn checked_scale(&self, k: i128) -> Result<Self, AlgebraError> {
        Ok(Self {
            a: self.a.checked_mul(k).ok_or(ovf("scale"))?,
            b: self.b.checked_mul(k).ok_or(ovf("scale"))?,
            order: self.order,
        })
    }

    /// Field norm x·x⋆ = a² + t·ab − n·b².
    pub fn checked_norm(&self) -> Result<i128, AlgebraError> {
        let t = i128::from(self.order.trace);
        let n = i128::from(self.order.norm);
        let m = |x: i128, y: i128| x.checked_mul(y).ok_or(ovf("norm"));
        let a2 = m(self.a, self.a)?;
        let tab = m(t, m(self.a, self.b)?)?;
        let nb2 = m(n, m(self.b, self.b)?)?;
        a2.checked_add(tab).and_then(|v| v.checked_sub(nb2)).ok_or(ovf("norm"))
    }

    pub fn norm(&self) -> i128 {
        self.checked_norm().expect("overflow in norm")
    }

    /// Inverse, defined exactly for units (norm ±1).
    pub fn checked_unit_inverse(&self) -> Result<Self, AlgebraError> {
        match self.checked_norm()? {
            1 => self.checked_star(),
            -1 => self.checked_star().map(|s| -s),
            _ => Err(AlgebraError::NotAUnit),
        }
    }

    /// Integer power; negative exponents require a unit.
    pub fn checked_pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.checked_unit_inverse()? } else { *self };
        let mut acc = self.order.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// Exact division by a unit.
    pub fn checked_div_unit(&self, unit: &Self) -> Result<Self, AlgebraError> {
        self.checked_mul(&unit.checked_unit_inverse()?)
    }

    /// u = 2a + bt, so that x = (u + b√D)/2 and x⋆ = (u − b√D)/2.
    fn doubled_rational_part(&self) -> Result<i128, AlgebraError> {
        self.a
            .checked_mul(2)
            .and_then(|a2| self.b.checked_mul(i128::from(self.order.trace)).and_then(|bt| a2.checked_add(bt)))
            .ok_or(ovf("sign"))
    }

    /// Exact sign of u + v√D.
    fn sign_of(u: i128, v: i128, d: i128) -> Result<Ordering, AlgebraError> {
        let zero = Ordering::Equal;
        match (u.cmp(&0), v.cmp(&0)) {
            (Ordering::Equal, vs) => Ok(vs),
            (us, Ordering::Equal) => Ok(us),
            (Ordering::Greater, Ordering::Greater) => Ok(Ordering::Greater),
            (Ordering::Less, Ordering::Less) => Ok(Ordering::Less),
            (us, _) => {
                let u2 = u.checked_mul(u).ok_or(ovf("sign"))?;
                let v2d = v.checked_mul(v).and_then(|v2| v2.checked_mul(d)).ok_or(ovf("sign"))?;
                let mag = u2.cmp(&v2d);
                Ok(if mag == zero { zero } else if mag == Ordering::Greater { us } else { us.reverse() })
            }
        }
    }

    /// Exact sign of the real value a + bθ.
    pub fn checked_signum(&self) -> Result<Ordering, AlgebraError> {
        let u = self.doubled_rational_part()?;
        Self::sign_of(u, self.b, i128::from(self.order.discriminant()))
    }

    pub fn signum(&self) -> Ordering {
        self.checked_signum().expect("overflow in exact comparison")
    }

    /// Exact comparison of real values within one order.
    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, AlgebraError> {
        self.checked_sub(other)?.checked_signum()
    }

    /// Real values of (x, x⋆), each accurate to a few ulps.
    ///
    /// Whichever embedding has no cancellation is evaluated directly; the other one is
    /// recovered from the exact integer norm.
    pub fn embeddings(&self) -> (f64, f64) {
        let t = self.order.trace as f64;
        let s = self.order.sqrt_discriminant();
        let u = 2.0 * self.a as f64 + self.b as f64 * t;
        let v = self.b as f64;
        let plus = (u + v * s) / 2.0;
        let minus = (u - v * s) / 2.0;
        let norm = match self.checked_norm() {
            Ok(n) => n as f64,
            Err(_) => return (plus, minus),
        };
        if (u >= 0.0) == (v >= 0.0) {
            let conj = if plus != 0.0 { norm / plus } else { minus };
            (plus, conj)
        } else {
            let val = if minus != 0.0 { norm / minus } else { plus };
            (val, minus)
        }
    }

    pub fn value(&self) -> f64 {
        self.embeddings().0
    }

    pub fn star_value(&self) -> f64 {
        self.embeddings().1
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_cmp(other).ok()
    }
}

impl Add for AlgebraicNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("overflow or order mismatch in add")
    }
}

impl Sub for AlgebraicNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("overflow or order mismatch in sub")
    }
}

impl Mul for AlgebraicNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("overflow or order mismatch in mul")
    }
}

impl Neg for AlgebraicNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b, order: self.order }
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}θ"),
            (a, b) if b < 0 => write!(f, "{a} - {}θ", -b),
            (a, b) => write!(f, "{a} + {b}θ"),
        }
    }
}

/// Fibonacci numbers with f₀ = 0, f₁ = 1, extended to negative indices by
/// f₋ₙ = (−1)ⁿ⁺¹ fₙ.
pub fn fibonacci(n: i64) -> Result<i128, AlgebraError> {
    let m = n.unsigned_abs();
    let (mut prev, mut cur) = (0i128, 1i128);
    if m == 0 {
        return Ok(0);
    }
    for _ in 1..m {
        let next = prev.checked_add(cur).ok_or(AlgebraError::Overflow("fibonacci"))?;
        prev = cur;
        cur = next;
    }
    Ok(if n < 0 && m % 2 == 0 { -cur } else { cur })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G: QuadraticOrder = QuadraticOrder::golden();
    const TAU: f64 = 1.618_033_988_749_895;

    #[test]
    fn star_examples() {
        assert_eq!(G.element(0, 1).star(), G.element(1, -1));
        assert_eq!(G.one().star(), G.one());
        assert_eq!(G.element(2, 3).star(), G.element(5, -3));
        // (2+3τ)(5−3τ) is the norm 2² + 2·3 − 3² = 1.
        assert_eq!(G.element(2, 3) * G.element(5, -3), G.integer(1));
    }

    #[test]
    fn star_matches_conjugate_root() {
        let x = G.element(2, 3);
        let brute = 2.0 + 3.0 * (1.0 - 5f64.sqrt()) / 2.0;
        assert!((x.star_value() - brute).abs() < 1e-14);
        assert!((x.value() - (2.0 + 3.0 * TAU)).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_values() {
        assert_eq!(fibonacci(0).unwrap(), 0);
        assert_eq!(fibonacci(1).unwrap(), 1);
        assert_eq!(fibonacci(10).unwrap(), 55);
        assert_eq!(fibonacci(-1).unwrap(), 1);
        assert_eq!(fibonacci(-2).unwrap(), -1);
        assert!(fibonacci(190).is_err());
        assert!(fibonacci(-190).is_err());
        for n in -30..30 {
            assert_eq!(fibonacci(n + 1).unwrap(), fibonacci(n).unwrap() + fibonacci(n - 1).unwrap());
        }
    }

    #[test]
    fn fibonacci_closed_form() {
        let s5 = 5f64.sqrt();
        for n in 0..=40 {
            let closed = (TAU.powi(n) - (-1.0 / TAU).powi(n)) / s5;
            assert!((fibonacci(n as i64).unwrap() as f64 - closed).abs() < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn tau_powers_are_fibonacci_combinations() {
        let tau = G.theta_element();
        for l in -20..20 {
            let p = tau.checked_pow(l).unwrap();
            let l = i64::from(l);
            assert_eq!(p, G.element(fibonacci(l - 1).unwrap(), fibonacci(l).unwrap()));
        }
    }

    #[test]
    fn small_values_survive_cancellation() {
        // τ^{-40} has huge coefficients but a tiny value.
        let x = G.theta_element().checked_pow(-40).unwrap();
        let rel = (x.value() - TAU.powi(-40)).abs() / TAU.powi(-40);
        assert!(rel < 1e-13, "rel = {rel}");
        let y = G.theta_element().checked_pow(40).unwrap();
        let rel = (y.star_value() - (-1.0 / TAU).powi(40)).abs() / TAU.powi(-40);
        assert!(rel < 1e-13, "rel = {rel}");
    }

    #[test]
    fn orders_validate() {
        assert!(QuadraticOrder::new(2, 0).is_err());
        assert!(QuadraticOrder::new(0, 1).is_err());
        assert!(QuadraticOrder::new(1, -1).is_err());
        assert!((QuadraticOrder::noble(2).unwrap().theta() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((G.covolume() - 5f64.sqrt()).abs() < 1e-15);
        let o = QuadraticOrder::new(4, -2).unwrap();
        assert!((o.theta() - (2.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((o.theta_star() - (2.0 - 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn unit_inverse_and_division() {
        let tau = G.theta_element();
        assert_eq!(tau.checked_unit_inverse().unwrap(), G.element(-1, 1));
        assert_eq!(G.element(3, 5).checked_div_unit(&tau).unwrap() * tau, G.element(3, 5));
        assert!(G.integer(2).checked_unit_inverse().is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let big = G.element(i128::MAX / 2 + 1, 1);
        assert!(big.checked_mul(&big).is_err());
        assert!(big.checked_add(&big).is_err());
    }

    fn golden() -> impl Strategy<Value = AlgebraicNumber> {
        (-1_000_000_000i128..1_000_000_000, -1_000_000_000i128..1_000_000_000).prop_map(|(a, b)| G.element(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn star_is_a_ring_homomorphism(x in golden(), y in golden()) {
            prop_assert_eq!((x * y).star(), x.star() * y.star());
            prop_assert_eq!((x + y).star(), x.star() + y.star());
            prop_assert_eq!(x.star().star(), x);
        }

        #[test]
        fn exact_sign_matches_float(x in golden()) {
            let v = x.value();
            if v.abs() > 1e-3 {
                prop_assert_eq!(x.signum(), v.partial_cmp(&0.0).unwrap());
            }
        }

        #[test]
        fn norm_is_product_of_embeddings(a in -10_000i128..10_000, b in -10_000i128..10_000) {
            let x = G.element(a, b);
            let (p, s) = x.embeddings();
            prop_assert!((p * s - x.norm() as f64).abs() <= 1e-9 * (1.0 + (x.norm() as f64).abs()));
        }
    }

    #[test]
    fn exactness_over_many_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let x = G.element(rng.random_range(-1_000_000..1_000_000), rng.random_range(-1_000_000..1_000_000));
            let y = G.element(rng.random_range(-1_000_000..1_000_000), rng.random_range(-1_000_000..1_000_000));
            assert_eq!((x * y).star(), x.star() * y.star());
            assert_eq!((x + y).star(), x.star() + y.star());
        }
    }
}
