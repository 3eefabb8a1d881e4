use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, IntegerMatrix};

/// Relative tolerance for the QR iteration and for Newton polishing.
const QR_TOL: f64 = 1e-13;
/// Below this relative spectral gap the Perron–Frobenius data is flagged as ill-conditioned.
const GAP_WARNING: f64 = 1e-6;

/// Perron–Frobenius pair and full spectrum of a primitive integer matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub pf_eigenvalue: f64,
    /// Right eigenvector, entries summing to 1.
    pub right: Vec<f64>,
    /// Left eigenvector, minimum entry 1.
    pub left: Vec<f64>,
    /// All eigenvalues, ordered by decreasing modulus.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalue moduli, ordered decreasingly.
    pub moduli: Vec<f64>,
    pub determinant: i128,
    pub warning: Option<String>,
}

impl SpectralData {
    /// Largest modulus among the eigenvalues other than λ.
    pub fn subdominant_modulus(&self) -> f64 {
        self.moduli.get(1).copied().unwrap_or(0.0)
    }
}

/// Evaluate p(z) and p'(z) for coefficients listed from degree 0 upwards.
fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        // Stop before Newton starts wandering near a multiple root.
        if step.norm() > 0.5 * (1.0 + z.norm()) {
            break;
        }
        z = next;
        if step.norm() <= QR_TOL * (1.0 + z.norm()) * 1e-2 {
            break;
        }
    }
    z
}

fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    // x² + b x + c
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * s);
        let r1 = q;
        let r2 = if q != 0.0 { c / q } else { 0.0 };
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -b / 2.0;
        let im = (-disc).sqrt() / 2.0;
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Roots of a monic polynomial of degree ≤ 3 (coefficients from degree 0 upwards).
fn low_degree_roots(coeffs: &[f64]) -> Vec<Complex64> {
    match coeffs.len() - 1 {
        0 => vec![],
        1 => vec![Complex64::new(-coeffs[0], 0.0)],
        2 => quadratic_roots(coeffs[1], coeffs[0]).to_vec(),
        3 => {
            let (c0, c1, c2) = (coeffs[0], coeffs[1], coeffs[2]);
            // Newton from the Cauchy bound converges monotonically to the largest real root.
            let mut x = 1.0 + c0.abs().max(c1.abs()).max(c2.abs());
            for _ in 0..200 {
                let p = ((x + c2) * x + c1) * x + c0;
                let dp = (3.0 * x + 2.0 * c2) * x + c1;
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let b = c2 + x;
            let c = c1 + x * b;
            let mut roots = vec![Complex64::new(x, 0.0)];
            roots.extend(quadratic_roots(b, c));
            roots
        }
        _ => unreachable!("low_degree_roots called with degree > 3"),
    }
}

/// Eigenvalues of a real upper Hessenberg-reducible matrix by Householder reduction
/// followed by the Francis double-shift QR iteration.
pub(crate) fn qr_eigenvalues(matrix: &[Vec<f64>]) -> Result<Vec<Complex64>, AlgebraError> {
    let mut h: Vec<Vec<f64>> = matrix.to_vec();
    hessenberg(&mut h);
    francis(&mut h)
}

fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * h[i][j]).sum::<f64>() / hh;
            for j in m..=high {
                h[i][j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }
}

#[allow(clippy::many_single_char_names, unused_assignments)]
fn francis(h: &mut [Vec<f64>]) -> Result<Vec<Complex64>, AlgebraError> {
    let nn = h.len();
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let low = 0usize;
    let eps = f64::EPSILON.max(QR_TOL * 1e-3);
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut w, mut x, mut y);
    let norm: f64 = (0..nn).map(|i| (i.saturating_sub(1)..nn).map(|j| h[i][j].abs()).sum::<f64>()).sum();
    let mut n = nn as isize - 1;
    let mut iter = 0;
    let mut total_iter = 0;
    while n >= low as isize {
        let nu = n as usize;
        let mut l = nu;
        while l > low {
            s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }
        if l == nu {
            d[nu] = h[nu][nu] + exshift;
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu][nu] += exshift;
            h[nu - 1][nu - 1] += exshift;
            x = h[nu][nu];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[nu][nu];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }
            if iter == 10 {
                exshift += x;
                for i in low..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > 1000 * nn {
                return Err(AlgebraError::NoConvergence("QR iteration"));
            }
            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[k][k - 1] = -s * x;
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            p += r * h[k + 2][j];
                            h[k + 2][j] -= p * z;
                        }
                        h[k][j] -= p * x;
                        h[k + 1][j] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[i][k] + y * h[i][k + 1];
                        if notlast {
                            p += z * h[i][k + 2];
                            h[i][k + 2] -= p * r;
                        }
                        h[i][k] -= p;
                        h[i][k + 1] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(d.into_iter().zip(e).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// All eigenvalues of M, ordered by decreasing modulus.
///
/// Zero eigenvalues are split off exactly from the characteristic polynomial. A reduced
/// polynomial of degree ≤ 3 is solved in closed form, larger ones by QR iteration; every
/// root is then Newton-polished on the exact polynomial.
pub fn eigenvalues(m: &IntegerMatrix) -> Result<Vec<Complex64>, AlgebraError> {
    let poly = m.characteristic_polynomial()?;
    let zeros = poly.iter().take_while(|&&c| c == 0).count();
    let reduced: Vec<f64> = poly[zeros..].iter().map(|&c| c as f64).collect();
    let degree = reduced.len() - 1;
    let mut roots = if degree <= 3 {
        low_degree_roots(&reduced)
    } else {
        let mut all = qr_eigenvalues(&m.to_f64())?;
        all.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        all.truncate(degree);
        all
    };
    roots = roots.into_iter().map(|z| polish(&reduced, z)).collect();
    for z in &mut roots {
        if z.im.abs() <= QR_TOL * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    Ok(roots)
}

/// Solve A x = b by Gaussian elimination with partial pivoting; exact zero pivots are
/// nudged so that inverse iteration at an exact eigenvalue still yields the null vector.
fn solve_nudged(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        a.swap(k, piv);
        b.swap(k, piv);
        if a[k][k].abs() < 1e-300 {
            a[k][k] = f64::EPSILON * scale;
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn pf_vector(m: &[Vec<f64>], lambda: f64) -> Vec<f64> {
    let n = m.len();
    let shifted: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| m[i][j] - if i == j { lambda } else { 0.0 }).collect()).collect();
    let mut v = vec![1.0; n];
    for _ in 0..4 {
        let w = solve_nudged(shifted.clone(), v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    v.into_iter().map(|x| sign * x).collect()
}

/// Residual ‖Mv − λv‖∞ / ‖v‖∞.
pub fn eigen_residual(m: &[Vec<f64>], lambda: f64, v: &[f64]) -> f64 {
    let vmax = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    m.iter()
        .zip(v)
        .map(|(row, vi)| (row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - lambda * vi).abs())
        .fold(0.0, f64::max)
        / vmax
}

/// Perron–Frobenius data and full spectrum of a primitive matrix.
pub fn spectral_data(m: &IntegerMatrix) -> Result<SpectralData, AlgebraError> {
    if !m.is_primitive() {
        return Err(AlgebraError::NotPrimitive(m.to_string()));
    }
    let determinant = m.determinant()?;
    let eigenvalues = eigenvalues(m)?;
    let lambda = eigenvalues
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
    if m.dim() == 3 && eigenvalues.iter().filter(|z| z.im != 0.0).count() == 2 {
        // One real root: the complex pair has |μ|² = |det M| / λ.
        let pair = (determinant.unsigned_abs() as f64 / lambda).sqrt();
        for (z, modulus) in eigenvalues.iter().zip(moduli.iter_mut()) {
            if z.im != 0.0 {
                *modulus = pair;
            }
        }
    }
    moduli.sort_by(|a, b| b.total_cmp(a));
    let fm = m.to_f64();
    let right_raw = pf_vector(&fm, lambda);
    let left_raw = pf_vector(&m.transpose().to_f64(), lambda);
    if right_raw.iter().chain(&left_raw).any(|&x| x <= 0.0) {
        return Err(AlgebraError::NotPrimitive(m.to_string()));
    }
    let total: f64 = right_raw.iter().sum();
    let right: Vec<f64> = right_raw.iter().map(|x| x / total).collect();
    let min = left_raw.iter().copied().fold(f64::INFINITY, f64::min);
    let left: Vec<f64> = left_raw.iter().map(|x| x / min).collect();
    let gap = 1.0 - moduli.get(1).copied().unwrap_or(0.0) / lambda;
    let warning = (gap < GAP_WARNING).then(|| format!("near-degenerate spectrum: relative gap {gap:.3e}"));
    Ok(SpectralData { pf_eigenvalue: lambda, right, left, eigenvalues, moduli, determinant, warning })
}

/// Sorted (decreasing) log-moduli of the eigenvalues, duplicates collapsed.
/// Zero eigenvalues contribute −∞.
pub fn lyapunov_spectrum(m: &IntegerMatrix) -> Result<Vec<f64>, AlgebraError> {
    let moduli = if m.is_primitive() {
        spectral_data(m)?.moduli
    } else {
        eigenvalues(m)?.iter().map(|z| z.norm()).collect()
    };
    let mut logs: Vec<f64> = Vec::with_capacity(moduli.len());
    for r in moduli.into_iter().map(f64::ln) {
        let dup = logs.last().is_some_and(|&last: &f64| (last == r) || (last - r).abs() < 1e-9);
        if !dup {
            logs.push(r);
        }
    }
    Ok(logs)
}
