use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{eta_values, RieszError, RieszFactor};
use crate::numeric::{compensated_sum, fmt_real, CompensatedSum};

/// Value of the Thue–Morse distribution function with an empirical truncation estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub value: f64,
    /// ln F; finite even where `value` underflows.
    pub ln_value: f64,
    /// |S_M − S_{M/2}| propagated to this k.
    pub tail_estimate: f64,
}

/// Truncated Fourier series F(k) = k + Σ_{m≤M} η(m)/(mπ)·sin(2πmk) of the Thue–Morse measure.
///
/// For k < 1/4 the value is obtained from F on [1/4, 1/2) through the exact rescaling
/// F(k) = 2⁻ⁿ ∫₀^{2ⁿk} f_n(2⁻ⁿy) dF(y), which keeps tiny values accurate in relative terms.
#[derive(Debug)]
pub struct TmFourierSeries {
    coeffs: Vec<f64>,
    grid: OnceLock<Vec<f64>>,
}

impl TmFourierSeries {
    pub fn new(terms: usize) -> Result<Self, RieszError> {
        if terms == 0 {
            return Err(RieszError::Parameter { name: "terms", reason: "need at least one term".into() });
        }
        let eta = eta_values(terms + 1);
        let coeffs = (1..=terms).map(|m| eta[m] / (m as f64 * PI)).collect();
        Ok(Self { coeffs, grid: OnceLock::new() })
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    fn partial(&self, k: f64, upto: usize) -> f64 {
        let mut s = CompensatedSum::new();
        s.add(k);
        for (m, c) in self.coeffs[..upto].iter().enumerate() {
            let t = ((m + 1) as f64 * k).fract();
            s.add(c * (2.0 * PI * t).sin());
        }
        s.value()
    }

    /// The plain truncated series.
    pub fn direct(&self, k: f64) -> FourierValue {
        let full = self.partial(k, self.terms());
        let half = self.partial(k, self.terms() / 2);
        FourierValue { value: full, ln_value: full.ln(), tail_estimate: (full - half).abs() }
    }

    /// F_M(j/L) for j = 0..=L/2 with L = 2^⌈log₂ 2M⌉.
    fn grid(&self) -> &[f64] {
        self.grid.get_or_init(|| {
            let l = (2 * self.terms()).next_power_of_two();
            let mut buf = vec![Complex64::new(0.0, 0.0); l];
            for (m, &c) in self.coeffs.iter().enumerate() {
                buf[m + 1] = Complex64::new(c, 0.0);
            }
            FftPlanner::new().plan_fft_inverse(l).process(&mut buf);
            (0..=l / 2).map(|j| j as f64 / l as f64 + buf[j % l].im).collect()
        })
    }

    fn rescaled(&self, k: f64) -> FourierValue {
        let mut n = 1u32;
        while k * 2f64.powi(n as i32) < 0.25 {
            n += 1;
        }
        let y_top = k * 2f64.powi(n as i32);
        let lg = |y: f64| -> f64 {
            (0..n)
                .map(|l| {
                    let s = (PI * y * 2f64.powi(l as i32 - n as i32)).sin();
                    (2.0 * s * s).ln()
                })
                .sum()
        };
        let grid = self.grid();
        let l = (grid.len() - 1) * 2;
        let h = 1.0 / l as f64;
        let cells = (y_top * l as f64).floor() as usize;
        let lg_top = lg(y_top);
        let body: f64 = (0..cells)
            .into_par_iter()
            .with_min_len(4096)
            .map(|j| (lg((j as f64 + 0.5) * h) - lg_top).exp() * (grid[j + 1] - grid[j]))
            .sum();
        let top = self.direct(y_top);
        let last = (lg(0.5 * (cells as f64 * h + y_top)) - lg_top).exp() * (top.value - grid[cells]);
        let s = body + last;
        let ln_value = -f64::from(n) * LN_2 + lg_top + s.ln();
        let value = ln_value.exp();
        FourierValue { value, ln_value, tail_estimate: value * top.tail_estimate / top.value }
    }

    /// F(k) on [0, 1]; symmetry F(1 − k) = 1 − F(k) handles k > 3/4.
    pub fn eval(&self, k: f64) -> Result<FourierValue, RieszError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(RieszError::Domain { what: "k", value: k });
        }
        Ok(match k {
            0.0 => FourierValue { value: 0.0, ln_value: f64::NEG_INFINITY, tail_estimate: 0.0 },
            1.0 => FourierValue { value: 1.0, ln_value: 0.0, tail_estimate: 0.0 },
            k if k > 0.75 => {
                let r = self.eval(1.0 - k)?;
                let value = 1.0 - r.value;
                FourierValue { value, ln_value: value.ln(), tail_estimate: r.tail_estimate }
            }
            k if k >= 0.25 => self.direct(k),
            k => self.rescaled(k),
        })
    }
}

/// F(k) from an M-term Fourier series.
pub fn f_fourier(k: f64, terms: usize) -> Result<FourierValue, RieszError> {
    TmFourierSeries::new(terms)?.eval(k)
}

fn check_grid(factor: &RieszFactor, n: u32, points_per_unit: f64) -> Result<(), RieszError> {
    let required = 8.0 * f64::from(factor.base()).powi(n as i32);
    if points_per_unit < required {
        return Err(RieszError::UnderResolved { required, given: points_per_unit });
    }
    Ok(())
}

fn parallel_simpson<F: Fn(f64) -> f64 + Sync>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let weight = |i: usize| match i {
        0 => 1.0,
        i if i == n => 1.0,
        i if i % 2 == 1 => 4.0,
        _ => 2.0,
    };
    const CHUNK: usize = 1 << 14;
    let chunks: Vec<f64> = (0..=n / CHUNK)
        .into_par_iter()
        .map(|c| compensated_sum((c * CHUNK..((c + 1) * CHUNK).min(n + 1)).map(|i| weight(i) * f(a + h * i as f64))))
        .collect();
    compensated_sum(chunks) * h / 3.0
}

/// F_n(k) = ∫₀ᵏ f_n(x) dx by composite Simpson with `points_per_unit` nodes per unit length.
pub fn f_quadrature(p: u32, q: u32, k: f64, n: u32, points_per_unit: f64) -> Result<f64, RieszError> {
    let factor = RieszFactor::new(p, q)?;
    check_grid(&factor, n, points_per_unit)?;
    if !(0.0..=1.0).contains(&k) {
        return Err(RieszError::Domain { what: "k", value: k });
    }
    Ok(parallel_simpson(|x| factor.f_n(x, n), 0.0, k, (points_per_unit * k).ceil() as usize))
}

/// Extra factors N₀ used beyond the scale depth in [`ln_distribution_at_scale`]; bᴺ⁰ ≥ 256.
pub fn default_extra_depth(base: u32) -> u32 {
    (8.0 / f64::from(base).log2()).ceil() as u32
}

/// ln F_{n+N₀}(b⁻ⁿ) = −n ln b + ln ∫₀¹ f_n(b⁻ⁿy)·f_{N₀}(y) dy, evaluated in log space.
pub fn ln_distribution_at_scale(factor: &RieszFactor, n: u32, extra: u32) -> f64 {
    let b = f64::from(factor.base());
    let shrink = b.powi(-(n as i32));
    let panels = (128.0 * b.powi(extra as i32)) as usize;
    let lf = |y: f64| factor.ln_f_n(y * shrink, n) + factor.ln_f_n(y, extra);
    let h = 1.0 / panels as f64;
    let logs: Vec<f64> = (0..=panels).into_par_iter().map(|i| lf(i as f64 * h)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s = compensated_sum(logs.iter().enumerate().map(|(i, &l)| {
        let w = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        w * (l - top).exp()
    }));
    -f64::from(n) * b.ln() + top + (s * h / 3.0).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionMethod {
    Fourier,
    Quadrature,
    RieszTruncation,
}

impl DistributionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DistributionMethod::Fourier => "fourier",
            DistributionMethod::Quadrature => "quadrature",
            DistributionMethod::RieszTruncation => "riesz-truncation",
        }
    }
}

/// Samples (k, F(k)) with k increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSamples {
    pub method: DistributionMethod,
    /// Product depth n, or the term count M for the Fourier method.
    pub truncation: u64,
    pub samples: Vec<(f64, f64)>,
}

impl DistributionSamples {
    /// F_n at k = j/count, j = 0..=count, by cumulative Simpson on one grid.
    pub fn quadrature(factor: &RieszFactor, n: u32, points_per_unit: f64, count: usize) -> Result<Self, RieszError> {
        check_grid(factor, n, points_per_unit)?;
        if count == 0 {
            return Err(RieszError::Parameter { name: "count", reason: "need at least one interval".into() });
        }
        let panels = ((points_per_unit / count as f64).ceil() as usize).max(2).next_multiple_of(2);
        let pieces: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|j| {
                let a = j as f64 / count as f64;
                let b = (j + 1) as f64 / count as f64;
                crate::numeric::simpson(|x| factor.f_n(x, n), a, b, panels)
            })
            .collect();
        let mut acc = CompensatedSum::new();
        let mut samples = vec![(0.0, 0.0)];
        for (j, piece) in pieces.into_iter().enumerate() {
            acc.add(piece);
            samples.push(((j + 1) as f64 / count as f64, acc.value()));
        }
        Ok(Self { method: DistributionMethod::Quadrature, truncation: u64::from(n), samples })
    }

    pub fn fourier(series: &TmFourierSeries, count: usize) -> Result<Self, RieszError> {
        let samples = (0..=count)
            .map(|j| {
                let k = j as f64 / count.max(1) as f64;
                series.eval(k).map(|v| (k, v.value))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { method: DistributionMethod::Fourier, truncation: series.terms() as u64, samples })
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    /// CSV with header `k,F,method,n_trunc`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "F", "method", "n_trunc"])?;
        for &(k, f) in &self.samples {
            wr.write_record([fmt_real(k), fmt_real(f), self.method.as_str().to_string(), self.truncation.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::LazyLock;

    static SERIES: LazyLock<TmFourierSeries> = LazyLock::new(|| TmFourierSeries::new(1_000_000).unwrap());

    #[test]
    fn fourier_endpoints_and_midpoint() {
        assert_eq!(SERIES.eval(1.0).unwrap().value, 1.0);
        assert_eq!(SERIES.eval(0.0).unwrap().value, 0.0);
        assert!((SERIES.eval(0.5).unwrap().value - 0.5).abs() < 1e-9);
        assert!(SERIES.eval(1.5).is_err());
        let a = SERIES.eval(0.3).unwrap().value;
        let b = SERIES.eval(0.7).unwrap().value;
        assert!((a + b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rescaled_values_agree_with_direct_series_where_both_apply() {
        for k in [0.2, 0.15, 0.1] {
            let r = SERIES.rescaled(k);
            let d = SERIES.direct(k);
            assert!((r.value - d.value).abs() < 2e-6, "{k}: {} vs {}", r.value, d.value);
        }
    }

    #[test]
    fn quadrature_and_fourier_cross_validate() {
        for (k, tol) in [(0.1, 1e-6), (0.25, 1e-6), (0.4, 5e-6)] {
            let q = f_quadrature(1, 1, k, 18, 128.0 * 2f64.powi(18)).unwrap();
            let f = SERIES.eval(k).unwrap().value;
            assert!((q - f).abs() < tol, "{k}: {q} vs {f}");
        }
    }

    #[test]
    fn fourier_values_respect_the_bracket() {
        for n in 2..=12u32 {
            let f = SERIES.eval(2f64.powi(-(n as i32))).unwrap();
            let b = crate::riesz::tm_bounds(n).unwrap();
            assert!(b.ln_lower <= f.ln_value && f.ln_value <= b.ln_upper, "{n}: {f:?} {b:?}");
            if n >= 3 {
                assert!(crate::riesz::tm_improved_lower_ln(n, 100_000).unwrap() <= f.ln_value, "{n}");
            }
        }
    }

    #[test]
    fn under_resolved_grid_is_reported() {
        let err = f_quadrature(1, 1, 0.5, 10, 100.0).unwrap_err();
        assert!(matches!(err, RieszError::UnderResolved { required, .. } if required == 8192.0));
    }

    #[test]
    fn quadrature_distribution_is_a_distribution() {
        let f = RieszFactor::new(3, 1).unwrap();
        let d = DistributionSamples::quadrature(&f, 5, 64.0 * 4f64.powi(5), 64).unwrap();
        assert!(d.is_non_decreasing());
        assert_eq!(d.samples[0], (0.0, 0.0));
        assert!((d.samples.last().unwrap().1 - 1.0).abs() < 1e-8);
        let tm = DistributionSamples::quadrature(&RieszFactor::thue_morse(), 10, 16.0 * 1024.0, 32).unwrap();
        for (a, b) in tm.samples.iter().zip(tm.samples.iter().rev()) {
            assert!((a.1 + b.1 - 1.0).abs() < 1e-10);
        }
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("k,F,method,n_trunc\n0,0,quadrature,5\n"));
    }

    #[test]
    fn scale_values_match_plain_quadrature() {
        let f = RieszFactor::new(2, 1).unwrap();
        for n in [2u32, 4] {
            let ln = ln_distribution_at_scale(&f, n, 5);
            let k = 3f64.powi(-(n as i32));
            let direct = f_quadrature(2, 1, k, n + 5, 512.0 * 3f64.powi((n + 5) as i32)).unwrap();
            assert!((ln.exp() / direct - 1.0).abs() < 1e-8, "{n}");
        }
    }
}
