use std::collections::HashMap;
use std::f64::consts::PI;

use num_rational::Ratio;

/// Memoised exact Fourier coefficients η(m) of the Thue–Morse measure.
///
/// η(0) = 1, η(2m) = η(m), η(2m+1) = −(η(m) + η(m+1))/2, which forces η(1) = −1/3.
#[derive(Clone, Debug, Default)]
pub struct EtaTable {
    memo: HashMap<u64, Ratio<i128>>,
}

impl EtaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, m: u64) -> Ratio<i128> {
        match m {
            0 => return Ratio::from_integer(1),
            1 => return Ratio::new(-1, 3),
            _ => {}
        }
        if let Some(v) = self.memo.get(&m) {
            return *v;
        }
        let h = m / 2;
        let v = if m % 2 == 0 { self.get(h) } else { -(self.get(h) + self.get(h + 1)) / 2 };
        self.memo.insert(m, v);
        v
    }
}

/// η(0), …, η(len − 1) in floating point, built bottom-up.
pub fn eta_values(len: usize) -> Vec<f64> {
    let mut eta = vec![0.0; len.max(2)];
    eta[0] = 1.0;
    eta[1] = -1.0 / 3.0;
    for m in 2..eta.len() {
        let h = m / 2;
        eta[m] = if m % 2 == 0 { eta[h] } else { -0.5 * (eta[h] + eta[h + 1]) };
    }
    eta.truncate(len);
    eta
}

/// β = 1/4 − (2/π²)·Σ_{m<terms} η(2m+1)/(2m+1)².
pub fn beta(terms: usize) -> f64 {
    let eta = eta_values(2 * terms + 2);
    let s = crate::numeric::compensated_sum((0..terms).map(|m| {
        let j = 2 * m + 1;
        eta[j] / (j as f64 * j as f64)
    }));
    0.25 - 2.0 / (PI * PI) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, ToPrimitive};

    #[test]
    fn first_values() {
        let mut t = EtaTable::new();
        assert_eq!(t.get(0), Ratio::from_integer(1));
        assert_eq!(t.get(1), Ratio::new(-1, 3));
        assert_eq!(t.get(2), Ratio::new(-1, 3));
        assert_eq!(t.get(3), Ratio::new(1, 3));
        assert_eq!(t.get(5), Ratio::from_integer(0));
    }

    #[test]
    fn exact_and_float_agree_and_are_bounded() {
        let mut t = EtaTable::new();
        let f = eta_values(20_000);
        for (m, &v) in f.iter().enumerate() {
            let e = t.get(m as u64);
            assert!(e.abs() <= Ratio::from_integer(1));
            assert!((e.to_f64().unwrap() - v).abs() < 1e-14);
        }
        let big = t.get(1 << 40 | 12345);
        assert!(big.abs() <= Ratio::from_integer(1));
    }

    #[test]
    fn matches_thue_morse_autocorrelation() {
        let n = 1usize << 16;
        let w: Vec<f64> = (0..n).map(|i| if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut t = EtaTable::new();
        for m in 0..40 {
            let emp: f64 = (0..n - m).map(|i| w[i] * w[i + m]).sum::<f64>() / (n - m) as f64;
            assert!((emp - t.get(m as u64).to_f64().unwrap()).abs() < 1e-2, "{m}");
        }
    }

    #[test]
    fn beta_value() {
        assert!((beta(100_000) - 0.30994).abs() < 1e-5, "{}", beta(100_000));
    }
}
