use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{StochasticError, Support, WeightedRealisation};
use crate::numeric::{fmt_real, CompensatedSum};

/// How the mean density is removed before transforming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Raw weights; the central peak stays in.
    None,
    /// Lattice: subtract the mean site weight. Continuum: subtract the transform of the
    /// constant density on [−R, R].
    MeanDensity,
}

/// Periodogram ordinates I_R(k) = |Σ w e^{−2πikx}|²/(2R).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diffraction {
    pub k: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl Diffraction {
    /// CSV with header `k,intensity`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "intensity"])?;
        for (&k, &i) in self.k.iter().zip(&self.intensity) {
            wr.write_record([fmt_real(k), fmt_real(i)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

struct Prepared<'a> {
    real: &'a WeightedRealisation,
    weights: std::borrow::Cow<'a, [f64]>,
    /// Continuum density to subtract, if any.
    density: Option<f64>,
}

fn prepare(real: &WeightedRealisation, centering: Centering) -> Prepared<'_> {
    match (centering, real.support) {
        (Centering::None, _) => Prepared { real, weights: real.weights.as_slice().into(), density: None },
        (Centering::MeanDensity, Support::Lattice) => {
            let mean = real.weights.iter().sum::<f64>() / real.len().max(1) as f64;
            Prepared { real, weights: real.weights.iter().map(|w| w - mean).collect::<Vec<_>>().into(), density: None }
        }
        (Centering::MeanDensity, Support::Continuum) => {
            Prepared { real, weights: real.weights.as_slice().into(), density: Some(real.weight_density()) }
        }
    }
}

impl Prepared<'_> {
    /// ∫_{−R}^{R} e^{−2πikx} dx times the density.
    fn background(&self, k: f64) -> f64 {
        let r = self.real.radius;
        self.density.map_or(0.0, |d| if k == 0.0 { 2.0 * r * d } else { d * (2.0 * PI * k * r).sin() / (PI * k) })
    }

    fn intensity(&self, k: f64, amplitude: Complex64) -> f64 {
        (amplitude - self.background(k)).norm_sqr() / (2.0 * self.real.radius)
    }
}

/// Direct O(N·K) periodogram, parallel over k; the reference for the FFT path.
pub fn empirical_diffraction(real: &WeightedRealisation, ks: &[f64], centering: Centering) -> Diffraction {
    let prep = prepare(real, centering);
    let intensity = ks
        .par_iter()
        .map(|&k| {
            let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
            for (&x, &w) in real.positions.iter().zip(prep.weights.iter()) {
                let (s, c) = (-2.0 * PI * k * x).sin_cos();
                re.add(w * c);
                im.add(w * s);
            }
            prep.intensity(k, Complex64::new(re.value(), im.value()))
        })
        .collect();
    Diffraction { k: ks.to_vec(), intensity }
}

/// Accuracy target for the Taylor expansion of the sub-cell phase.
const TAYLOR_TOL: f64 = 1e-17;

/// Σ w e^{−2πi(ms)x} for m = 0..count via Taylor-corrected binning onto an FFT grid.
///
/// Points must lie in [origin, origin + 1/s].
fn binned_transform(positions: &[f64], weights: &[f64], origin: f64, s: f64, count: usize) -> Vec<Complex64> {
    let kmax = s * count.saturating_sub(1) as f64;
    // Cell h = 1/(L·s) with π·kmax·h ≤ 1/4 keeps the Taylor series short.
    let len = count.max((4.0 * PI * kmax / s).ceil() as usize).max(2).next_power_of_two();
    let h = 1.0 / (len as f64 * s);
    let cells: Vec<(usize, f64)> = positions
        .iter()
        .map(|&x| {
            let u = (x - origin) / h;
            let j = u.round();
            ((j as usize) % len, (u - j) * h)
        })
        .collect();
    let mut terms = 1;
    let (mut bound, arg) = (1.0, PI * kmax * h);
    while bound > TAYLOR_TOL && terms < 40 {
        bound *= arg / terms as f64;
        terms += 1;
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(len);
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    let mut powers: Vec<f64> = weights.to_vec();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for t in 0..terms {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (&(j, _), &p) in cells.iter().zip(&powers) {
            buf[j].re += p;
        }
        fft.process(&mut buf);
        let factorial: f64 = (1..=t).map(|i| i as f64).product();
        for (m, o) in out.iter_mut().enumerate() {
            let k = s * m as f64;
            let coef = Complex64::new(0.0, -2.0 * PI * k).powu(t as u32) / factorial;
            *o += coef * buf[m];
        }
        for (p, &(_, d)) in powers.iter_mut().zip(&cells) {
            *p *= d;
        }
    }
    out.iter_mut().enumerate().for_each(|(m, o)| *o *= Complex64::from_polar(1.0, -2.0 * PI * s * m as f64 * origin));
    out
}

/// Periodogram at k = m·spacing for m = 0..count, computed by FFT.
pub fn uniform_periodogram(
    real: &WeightedRealisation,
    spacing: f64,
    count: usize,
    centering: Centering,
) -> Result<Diffraction, StochasticError> {
    let required = 1.0 / (2.0 * real.radius);
    if !(spacing > 0.0 && spacing <= required) {
        return Err(StochasticError::UnderResolved { spacing, required });
    }
    let prep = prepare(real, centering);
    let amplitudes = binned_transform(&real.positions, &prep.weights, -real.radius, spacing, count);
    let k: Vec<f64> = (0..count).map(|m| spacing * m as f64).collect();
    let intensity = k.iter().zip(&amplitudes).map(|(&k, &a)| prep.intensity(k, a)).collect();
    Ok(Diffraction { k, intensity })
}

/// Integrated periodogram over (0, k] with the central peak excluded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalZ {
    pub k: f64,
    pub value: f64,
    /// From ordinates one Fourier spacing 1/(2R) apart, treated as independent.
    pub standard_error: f64,
    pub bins: usize,
    /// Lower end of the integration range, at least 4/(2R).
    pub excluded_below: f64,
}

/// Trapezoid integral of the centred periodogram over [4/(2R), k] on `bins` equal bins of (0, k].
pub fn empirical_z(real: &WeightedRealisation, k: f64, bins: usize) -> Result<EmpiricalZ, StochasticError> {
    let d = empirical_z_curve(real, k, bins)?;
    d.into_iter().last().ok_or(StochasticError::Domain { what: "k", value: k })
}

/// `empirical_z` at every bin edge, sharing one transform.
pub fn empirical_z_curve(real: &WeightedRealisation, k: f64, bins: usize) -> Result<Vec<EmpiricalZ>, StochasticError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(StochasticError::Domain { what: "k", value: k });
    }
    let spacing = k / bins.max(1) as f64;
    let per = uniform_periodogram(real, spacing, bins + 1, Centering::MeanDensity)?;
    let cut = 4.0 / (2.0 * real.radius);
    let first = (cut / spacing).ceil() as usize;
    let stride = ((1.0 / (2.0 * real.radius)) / spacing).floor().max(1.0) as usize;
    let mut z = CompensatedSum::new();
    let mut var = CompensatedSum::new();
    let mut out = Vec::new();
    for m in first..=bins {
        let i = per.intensity[m];
        if m > first {
            z.add(0.5 * spacing * (per.intensity[m - 1] + i));
        }
        if (m - first) % stride == 0 {
            let w = spacing * stride as f64;
            var.add(w * w * i * i);
        }
        out.push(EmpiricalZ {
            k: per.k[m],
            value: z.value(),
            standard_error: var.value().sqrt(),
            bins: m,
            excluded_below: spacing * first as f64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{sample, z_analytic, AnalyticModel};

    fn realisation(positions: Vec<f64>, weights: Vec<f64>, radius: f64, support: Support) -> WeightedRealisation {
        WeightedRealisation { positions, weights, radius, seed: 0, stream: 0, support }
    }

    #[test]
    fn single_point() {
        let r = realisation(vec![0.3], vec![1.0], 0.5, Support::Continuum);
        let d = empirical_diffraction(&r, &[0.0, 0.25, 1.7, 10.0], Centering::None);
        assert!(d.intensity.iter().all(|&i| (i - 1.0).abs() < 1e-14));
    }

    #[test]
    fn lattice_central_peak() {
        let r = sample(&AnalyticModel::Bernoulli { p: 1.0, weighting: crate::stochastic::Weighting::ZeroOne }, 100.0, 0).unwrap();
        let d = empirical_diffraction(&r, &[0.0], Centering::None);
        assert!((d.intensity[0] - 201.0 * 201.0 / 200.0).abs() < 1e-9);
        let c = empirical_diffraction(&r, &[0.0, 0.3], Centering::MeanDensity);
        assert!(c.intensity.iter().all(|&i| i < 1e-20));
    }

    #[test]
    fn fft_matches_direct() {
        for model in [AnalyticModel::Poisson, AnalyticModel::Markov { p: 0.3, q: 0.5 }, AnalyticModel::RandomTiling { u: 1.0, v: 1.7, p: 0.4 }] {
            let r = sample(&model, 300.0, 2).unwrap();
            for centering in [Centering::None, Centering::MeanDensity] {
                let fast = uniform_periodogram(&r, 1e-3, 700, centering).unwrap();
                let slow = empirical_diffraction(&r, &fast.k, centering);
                for (a, b) in fast.intensity.iter().zip(&slow.intensity) {
                    assert!((a - b).abs() < 1e-9 * b.max(1.0), "{model} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn rudin_shapiro_is_flat_on_average() {
        let r = sample(&AnalyticModel::RudinShapiro { p: 0.0 }, 32768.0, 0).unwrap();
        let ks: Vec<f64> = (1..2000).map(|i| 0.5 * f64::from(i) / 2000.0).collect();
        let d = empirical_diffraction(&r, &ks, Centering::None);
        let mean = d.intensity.iter().sum::<f64>() / d.intensity.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn under_resolved_bins() {
        let r = sample(&AnalyticModel::Poisson, 1000.0, 1).unwrap();
        assert!(matches!(empirical_z(&r, 0.2, 100), Err(StochasticError::UnderResolved { .. })));
        assert!(empirical_z(&r, 0.2, 400).is_ok());
    }

    #[test]
    fn poisson_z() {
        let r = sample(&AnalyticModel::Poisson, 1e5, 4).unwrap();
        let z = empirical_z(&r, 0.2, 40_000).unwrap();
        assert!((z.value - 0.2).abs() < 0.01, "{z:?}");
        assert!(z.standard_error > 0.0 && z.standard_error < 0.005);
    }

    #[test]
    fn markov_z_within_three_standard_errors() {
        let m = AnalyticModel::Markov { p: 0.25, q: 0.25 };
        let r = sample(&m, 5e4, 8).unwrap();
        let z = empirical_z(&r, 0.3, 30_000).unwrap();
        let exact = z_analytic(&m, 0.3).unwrap();
        assert!((z.value - exact).abs() < 3.0 * z.standard_error, "{z:?} {exact}");
    }

    #[test]
    fn rudin_shapiro_homometry() {
        let clean = sample(&AnalyticModel::RudinShapiro { p: 0.0 }, 65536.0, 1).unwrap();
        let noisy = sample(&AnalyticModel::RudinShapiro { p: 0.5 }, 65536.0, 1).unwrap();
        let a = empirical_z_curve(&clean, 0.4, 60_000).unwrap();
        let b = empirical_z_curve(&noisy, 0.4, 60_000).unwrap();
        let nb = b.last().unwrap();
        assert!((nb.value - 0.4).abs() < 0.02, "{nb:?}");
        for i in 1..=20 {
            let idx = a.len() * i / 20 - 1;
            let (x, y) = (a[idx], b[idx]);
            let se = (x.standard_error.powi(2) + y.standard_error.powi(2)).sqrt();
            assert!((x.value - y.value).abs() < 3.0 * se, "{x:?} {y:?}");
        }
    }
}
