use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RenormError;
use crate::algebra::AlgebraicNumber;
use crate::substitution::SubstitutionRule;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data.chunks(self.dim).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Columns of `self · cols`, where `cols[j]` is the j-th column.
    fn mul_columns(&self, cols: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        cols.iter().map(|c| self.mul_vec(c)).collect()
    }
}

/// T_ij: offsets of the type-i tiles inside the image of tile j, in natural lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSets {
    pub lambda: f64,
    sets: Vec<Vec<Vec<f64>>>,
}

impl DisplacementSets {
    pub fn dim(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        &self.sets[i][j]
    }
}

pub fn displacement_sets(rule: &SubstitutionRule) -> Result<DisplacementSets, RenormError> {
    let d = rule.alphabet_size();
    let lengths = rule.natural_lengths()?;
    let lambda = rule.spectral_data()?.pf_eigenvalue;
    let mut sets = vec![vec![Vec::new(); d]; d];
    for (j, image) in rule.images().iter().enumerate() {
        let mut t = 0.0;
        for &l in image {
            sets[usize::from(l)][j].push(t);
            t += lengths.real[usize::from(l)];
        }
    }
    Ok(DisplacementSets { lambda, sets })
}

/// B_ij(k) = Σ_{t∈T_ij} e^{−2πikt}; B(0) is the substitution matrix.
pub fn fourier_matrix(sets: &DisplacementSets, k: f64) -> ComplexMatrix {
    let d = sets.dim();
    let mut b = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            *b.get_mut(i, j) = sets.get(i, j).iter().map(|&t| Complex64::from_polar(1.0, -2.0 * PI * k * t)).sum();
        }
    }
    b
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// (1/n)·log‖B(k/λⁿ)⋯B(k/λ)·v‖, renormalising after every factor.
pub fn cocycle_exponent(rule: &SubstitutionRule, k: f64, n: usize, v: &[Complex64]) -> Result<f64, RenormError> {
    let sets = displacement_sets(rule)?;
    let n0 = norm(v);
    if v.len() != sets.dim() || !(n0 > 0.0) {
        return Err(RenormError::StartVector);
    }
    if n == 0 {
        return Err(RenormError::NonPositive { what: "steps", value: 0.0 });
    }
    let mut w: Vec<Complex64> = v.iter().map(|x| x / n0).collect();
    let mut log_growth = 0.0;
    let mut scale = 1.0;
    for _ in 0..n {
        scale /= sets.lambda;
        w = fourier_matrix(&sets, k * scale).mul_vec(&w);
        let r = norm(&w);
        if r == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        log_growth += r.ln();
        w.iter_mut().for_each(|x| *x /= r);
    }
    Ok(log_growth / n as f64)
}

/// Replace `cols` by an orthonormal basis of their span (modified Gram–Schmidt) and return
/// log|R_jj|. A dependent column contributes −∞ and is replaced by a completing unit vector.
fn orthonormalise(cols: &mut [Vec<Complex64>]) -> Vec<f64> {
    let d = cols.len();
    let mut logs = Vec::with_capacity(d);
    for j in 0..d {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for q in done.iter() {
            let r: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            col.iter_mut().zip(q).for_each(|(c, qi)| *c -= r * qi);
        }
        let r = norm(col);
        if r > 1e-300 && r.is_finite() {
            logs.push(r.ln());
            col.iter_mut().for_each(|c| *c /= r);
            continue;
        }
        logs.push(f64::NEG_INFINITY);
        for e in 0..d {
            let mut u = vec![Complex64::new(0.0, 0.0); d];
            u[e] = Complex64::new(1.0, 0.0);
            for q in done.iter() {
                let r: Complex64 = q.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
                u.iter_mut().zip(q).for_each(|(c, qi)| *c -= r * qi);
            }
            let r = norm(&u);
            if r > 0.5 {
                *col = u.into_iter().map(|c| c / r).collect();
                break;
            }
        }
    }
    logs
}

/// Lyapunov spectrum of the cocycle B(k/λ^m), m = 1, 2, …, by repeated QR.
///
/// The first `burn_in` factors are applied but not averaged; the result is sorted decreasing.
pub fn cocycle_spectrum(rule: &SubstitutionRule, k: f64, n: usize, burn_in: usize) -> Result<Vec<f64>, RenormError> {
    if n == 0 {
        return Err(RenormError::NonPositive { what: "steps", value: 0.0 });
    }
    let sets = displacement_sets(rule)?;
    let d = sets.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|j| (0..d).map(|i| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect())
        .collect();
    let mut sums = vec![0.0; d];
    let mut scale = 1.0;
    for m in 0..burn_in + n {
        scale /= sets.lambda;
        cols = fourier_matrix(&sets, k * scale).mul_columns(&cols);
        let logs = orthonormalise(&mut cols);
        if m >= burn_in {
            sums.iter_mut().zip(logs).for_each(|(s, l)| *s += l);
        }
    }
    let mut chi: Vec<f64> = sums.into_iter().map(|s| s / n as f64).collect();
    chi.sort_by(|a, b| b.total_cmp(a));
    Ok(chi)
}

/// Amplitude decay read off the second cocycle exponent χ₂.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeExponent {
    pub lambda: f64,
    pub chi: Vec<f64>,
    /// log of the intensity ratio per inflation step, 2(χ₂ − log λ).
    pub intensity_exponent: f64,
    /// Exponent of Z(k) ~ k^e implied by the intensity decay.
    pub z_exponent: f64,
}

pub fn amplitude_exponent(rule: &SubstitutionRule, k: f64, n: usize, burn_in: usize) -> Result<AmplitudeExponent, RenormError> {
    let chi = cocycle_spectrum(rule, k, n, burn_in)?;
    let lambda = rule.spectral_data()?.pf_eigenvalue;
    let chi2 = chi.get(1).copied().unwrap_or(f64::NEG_INFINITY);
    let intensity_exponent = 2.0 * (chi2 - lambda.ln());
    Ok(AmplitudeExponent { lambda, chi, intensity_exponent, z_exponent: -intensity_exponent / lambda.ln() })
}

fn noble_parameter(rule: &SubstitutionRule) -> Option<usize> {
    let images = rule.images();
    let (a, b) = (images.first()?, images.get(1)?);
    let p = a.len().checked_sub(1)?;
    (images.len() == 2 && p >= 1 && a[..p].iter().all(|&l| l == 0) && a[p] == 1 && b.as_slice() == [0]).then_some(p)
}

/// Fourier amplitudes A_i(κ) of the type-i points of the noble-mean model set, κ = x/√D.
///
/// A_i(κ) = (1/√D)∫_{W_i} e^{2πiκ⋆y} dy with W_a = (λ−p−1, λ−p], W_b = (−1, λ−p−1].
pub fn window_amplitudes(rule: &SubstitutionRule, x: &AlgebraicNumber) -> Result<Vec<Complex64>, RenormError> {
    let p = noble_parameter(rule).ok_or_else(|| RenormError::NotNoble(rule.name().to_string()))?;
    let order = x.order();
    if order.trace() != p as i64 || order.norm_parameter() != 1 {
        return Err(RenormError::ForeignDistance(x.to_string()));
    }
    let sd = order.sqrt_discriminant();
    let top = order.theta() - p as f64;
    let kstar = -x.star_value() / sd;
    let integral = |lo: f64, hi: f64| {
        let c = 2.0 * PI * kstar;
        if c == 0.0 {
            Complex64::new(hi - lo, 0.0)
        } else {
            (Complex64::from_polar(1.0, c * hi) - Complex64::from_polar(1.0, c * lo)) / Complex64::new(0.0, c)
        }
    };
    Ok(vec![integral(top - 1.0, top) / sd, integral(-1.0, top - 1.0) / sd])
}
