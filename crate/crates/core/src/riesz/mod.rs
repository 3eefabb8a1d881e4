//! Riesz products for the Thue–Morse measure and the generalised Thue–Morse family.

mod bounds;
mod distribution;
mod eta;

pub use bounds::{tm_bounds, tm_constants, tm_improved_lower, tm_improved_lower_ln, BoundReport, TmBounds, TmConstants};
pub use distribution::{
    default_extra_depth, f_fourier, f_quadrature, ln_distribution_at_scale, DistributionMethod, DistributionSamples, FourierValue, TmFourierSeries,
};
pub use eta::{beta, eta_values, EtaTable};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RieszError {
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("grid of {given} points per unit under-resolves the density; at least {required} are needed")]
    UnderResolved { required: f64, given: f64 },
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
}

/// One factor ϑ(x) = 1 + (2/b)·Σ_r α_r cos(2πrx) of the gTM Riesz product, b = p + q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RieszFactor {
    p: u32,
    q: u32,
    /// α_r for r = 1..b−1.
    alpha: Vec<i64>,
}

/// α(p, q, r) = p + q − r − 2·min(p, q, r, p + q − r).
pub fn alpha(p: u32, q: u32, r: u32) -> i64 {
    let (p, q, r) = (i64::from(p), i64::from(q), i64::from(r));
    p + q - r - 2 * p.min(q).min(r).min(p + q - r)
}

impl RieszFactor {
    pub fn new(p: u32, q: u32) -> Result<Self, RieszError> {
        if p == 0 || q == 0 {
            return Err(RieszError::Parameter { name: "p, q", reason: format!("({p}, {q}) must both be at least 1") });
        }
        if p.checked_add(q).is_none_or(|b| b > 1 << 20) {
            return Err(RieszError::Parameter { name: "p, q", reason: "p + q too large".into() });
        }
        Ok(Self { p, q, alpha: (1..p + q).map(|r| alpha(p, q, r)).collect() })
    }

    pub fn thue_morse() -> Self {
        Self::new(1, 1).expect("valid parameters")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn base(&self) -> u32 {
        self.p + self.q
    }

    pub fn alphas(&self) -> &[i64] {
        &self.alpha
    }

    /// ϑ(0) = (p − q)²/(p + q).
    pub fn theta_zero(&self) -> f64 {
        let d = f64::from(self.p.abs_diff(self.q));
        d * d / f64::from(self.base())
    }

    /// ϑ(x), evaluated as ϑ(0) − (4/b)·Σ α_r sin²(πrx) to avoid cancellation near zeros.
    pub fn theta(&self, x: f64) -> f64 {
        let x = x.rem_euclid(1.0);
        let s: f64 = self
            .alpha
            .iter()
            .zip(1..)
            .map(|(&a, r)| {
                let v = (PI * f64::from(r) * x).sin();
                a as f64 * v * v
            })
            .sum();
        (self.theta_zero() - 4.0 / f64::from(self.base()) * s).max(0.0)
    }

    /// ln f_n(x) = Σ_{m<n} ln ϑ(bᵐx); −∞ on zeros.
    pub fn ln_f_n(&self, x: f64, n: u32) -> f64 {
        let b = f64::from(self.base());
        (0..n).map(|m| self.theta(x * b.powi(m as i32)).ln()).sum()
    }

    /// f_n(x) = Π_{m<n} ϑ(bᵐx).
    pub fn f_n(&self, x: f64, n: u32) -> f64 {
        self.ln_f_n(x, n).exp()
    }
}

pub fn theta(p: u32, q: u32, x: f64) -> Result<f64, RieszError> {
    Ok(RieszFactor::new(p, q)?.theta(x))
}

pub fn f_n(p: u32, q: u32, x: f64, n: u32) -> Result<f64, RieszError> {
    Ok(RieszFactor::new(p, q)?.f_n(x, n))
}

/// Small-k exponent of the gTM distribution function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GtmExponent {
    /// F(k) ~ k^e with e = 2 − 2·log|p−q|/log(p+q).
    PowerLaw(f64),
    /// p = q: F(k) decays faster than any power.
    FasterThanAnyPower,
}

pub fn gtm_exponent(p: u32, q: u32) -> Result<GtmExponent, RieszError> {
    let f = RieszFactor::new(p, q)?;
    if p == q {
        return Ok(GtmExponent::FasterThanAnyPower);
    }
    Ok(GtmExponent::PowerLaw(2.0 - 2.0 * f64::from(p.abs_diff(q)).ln() / f64::from(f.base()).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::simpson;
    use proptest::prelude::*;

    #[test]
    fn thue_morse_factor() {
        let f = RieszFactor::thue_morse();
        assert_eq!(f.alphas(), &[-1]);
        for x in [0.0, 0.1, 0.37, 0.5, 0.9] {
            assert!((f.theta(x) - (1.0 - (2.0 * PI * x).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn theta_at_zero() {
        assert!((theta(2, 1, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for (p, q) in [(3u32, 1u32), (4, 1), (5, 2), (3, 3)] {
            let f = RieszFactor::new(p, q).unwrap();
            let sum: i64 = f.alphas().iter().sum();
            let b = i64::from(p + q);
            // 1 + (2/b)Σα = (p−q)²/b
            assert_eq!(b + 2 * sum, (i64::from(p) - i64::from(q)).pow(2));
            let direct = 1.0 + 2.0 / b as f64 * f.alphas().iter().map(|&a| a as f64).sum::<f64>();
            assert!((f.theta(0.0) - direct).abs() < 1e-14);
        }
        assert!(theta(0, 1, 0.0).is_err());
    }

    #[test]
    fn theta_is_a_probability_density() {
        for b in 2..=12u32 {
            for p in 1..b {
                let f = RieszFactor::new(p, b - p).unwrap();
                let min = (0..10_000).map(|i| f.theta(i as f64 / 10_000.0)).fold(f64::INFINITY, f64::min);
                assert!(min >= 0.0);
                let mean = simpson(|x| f.theta(x), 0.0, 1.0, 4 * b as usize);
                assert!((mean - 1.0).abs() < 1e-10, "({p},{}) {mean}", b - p);
            }
        }
    }

    #[test]
    fn truncated_density_basics() {
        let f = RieszFactor::thue_morse();
        assert_eq!(f.f_n(0.3, 0), 1.0);
        // ∫₀¹ x f_n(x) dx = 1/2
        for n in [1, 4, 8] {
            let m = simpson(|x| x * f.f_n(x, n), 0.0, 1.0, 64 << n);
            assert!((m - 0.5).abs() < 1e-8, "{n} {m}");
        }
    }

    #[test]
    fn gtm_exponents() {
        assert_eq!(gtm_exponent(2, 1).unwrap(), GtmExponent::PowerLaw(2.0));
        let GtmExponent::PowerLaw(e) = gtm_exponent(3, 1).unwrap() else { panic!() };
        assert!((e - 1.0).abs() < 1e-15);
        let GtmExponent::PowerLaw(e) = gtm_exponent(5, 1).unwrap() else { panic!() };
        assert!((e - 0.452_589).abs() < 1e-6);
        assert_eq!(gtm_exponent(2, 2).unwrap(), GtmExponent::FasterThanAnyPower);
    }

    proptest! {
        #[test]
        fn splitting_identity(p in 1u32..5, q in 1u32..5, n in 0u32..6, m in 0u32..6, j in 0u32..(1 << 20)) {
            // Dyadic x keeps every bᵐx exact, so both sides see identical arguments.
            let x = f64::from(j) / f64::from(1u32 << 20);
            let f = RieszFactor::new(p, q).unwrap();
            let b = f64::from(p + q);
            let lhs = f.f_n(x, n + m);
            let rhs = f.f_n(x, n) * f.f_n(x * b.powi(n as i32), m);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0) * f64::from(n + m + 1));
        }
    }
}
