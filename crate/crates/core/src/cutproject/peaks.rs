use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CutProjectError, CutProjectScheme};
use crate::algebra::{AlgebraicNumber, FieldNumber, QuadraticOrder};
use crate::numeric::{compensated_sum, fmt_real};

/// Elements x of the order with x ∈ [x_lo, x_hi] and x⋆ ∈ [y_lo, y_hi].
///
/// The test is done in floating point with a small relative margin, so the result is a
/// superset of the exact box; callers apply exact filters where boundaries matter.
pub fn enumerate_box(
    order: QuadraticOrder,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
) -> Result<Vec<AlgebraicNumber>, CutProjectError> {
    let sd = order.sqrt_discriminant();
    let (th, ths) = (order.theta(), order.theta_star());
    let margin = |v: f64| 1e-9 * v.abs().max(1.0);
    let (x_lo, x_hi) = (x_lo - margin(x_lo), x_hi + margin(x_hi));
    let (y_lo, y_hi) = (y_lo - margin(y_lo), y_hi + margin(y_hi));
    if x_lo > x_hi || y_lo > y_hi {
        return Ok(Vec::new());
    }
    // x − x⋆ = b·√D
    let b_lo = ((x_lo - y_hi) / sd).floor() as i128 - 1;
    let b_hi = ((x_hi - y_lo) / sd).ceil() as i128 + 1;
    let mut out = Vec::new();
    for b in b_lo..=b_hi {
        let bf = b as f64;
        let a_lo = (x_lo - bf * th).max(y_lo - bf * ths).floor() as i128 - 1;
        let a_hi = (x_hi - bf * th).min(y_hi - bf * ths).ceil() as i128 + 1;
        for a in a_lo..=a_hi {
            let x = order.element(a, b);
            let (v, vs) = x.embeddings();
            if (x_lo..=x_hi).contains(&v) && (y_lo..=y_hi).contains(&vs) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// sinc(π s κ⋆)² for κ = x/√D.
///
/// For large arguments the sine is evaluated on the exactly reduced argument: with
/// s = σ/d and σ⋆·x = a + bθ one has π s κ⋆ = π(b − σ⋆κ)/d, and b may be taken mod d.
fn sinc_squared(s: &FieldNumber, x: &AlgebraicNumber) -> f64 {
    let sd = x.order().sqrt_discriminant();
    let kstar = -x.star_value() / sd;
    let arg = PI * s.value() * kstar;
    if arg == 0.0 {
        return 1.0;
    }
    if arg.abs() <= PI {
        let v = arg.sin() / arg;
        return v * v;
    }
    let reduced = s.numerator().checked_star().and_then(|ss| ss.checked_mul(x)).map(|z| {
        let d = s.denominator();
        PI * ((z.b().rem_euclid(d)) as f64 - z.value() / sd) / d as f64
    });
    let sine = reduced.map_or_else(|_| arg.sin(), f64::sin);
    sine * sine / (arg * arg)
}

/// I(κ) = dens²·sinc(π s κ⋆)² for the window length `s` and κ = x/√D.
pub fn peak_intensity(scheme: &CutProjectScheme, s: &FieldNumber, x: &AlgebraicNumber) -> f64 {
    let dens = s.value() / scheme.covolume();
    dens * dens * sinc_squared(s, x)
}

/// One Bragg peak κ = (m + nθ)/√D.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub m: i128,
    pub n: i128,
    pub k: f64,
    pub kstar: f64,
    pub intensity: f64,
}

/// Peaks with k > 0, sorted by k; the intensity at k = 0 is `i0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub i0: f64,
}

impl PeakSet {
    /// CSV with header `m,n,k,kstar,intensity`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["m", "n", "k", "kstar", "intensity"])?;
        for p in &self.peaks {
            wr.write_record([p.m.to_string(), p.n.to_string(), fmt_real(p.k), fmt_real(p.kstar), fmt_real(p.intensity)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// All κ = (m + nθ)/√D with 0 < κ ≤ k_max and |κ⋆| ≤ kstar_max.
pub fn enumerate_fourier_module(
    scheme: &CutProjectScheme,
    s: &FieldNumber,
    k_max: f64,
    kstar_max: f64,
) -> Result<PeakSet, CutProjectError> {
    let order = scheme.order();
    let sd = scheme.covolume();
    let dens = s.value() / sd;
    let mut peaks: Vec<Peak> = enumerate_box(order, (0.0, k_max * sd), (-kstar_max * sd, kstar_max * sd))?
        .into_iter()
        .filter(|x| x.signum().is_gt())
        .map(|x| {
            let (v, vs) = x.embeddings();
            (x, v / sd, -vs / sd)
        })
        .filter(|&(_, k, ks)| k <= k_max && ks.abs() <= kstar_max)
        .map(|(x, k, kstar)| Peak { m: x.a(), n: x.b(), k, kstar, intensity: peak_intensity(scheme, s, &x) })
        .collect();
    peaks.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(PeakSet { peaks, i0: dens * dens })
}

/// A truncated sum together with a rigorous bound on the omitted mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Z(k) as computed by [`z_pure_point`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZValue {
    pub value: f64,
    pub tail_bound: f64,
    pub shell_points: usize,
}

struct Orbit {
    lambda_inv: AlgebraicNumber,
    /// |λ⋆|² ; the star coordinate grows by 1/|λ⋆| per step.
    q: f64,
    dens: f64,
    s: FieldNumber,
}

impl Orbit {
    fn new(scheme: &CutProjectScheme, s: &FieldNumber) -> Result<Self, CutProjectError> {
        let order = scheme.order();
        if !order.is_unit_order() {
            return Err(CutProjectError::NotUnitOrder);
        }
        let ts = order.theta_star();
        Ok(Self {
            lambda_inv: order.theta_element().checked_unit_inverse()?,
            q: ts * ts,
            dens: s.value() / scheme.covolume(),
            s: *s,
        })
    }

    /// Bound on Σ_{j>J} I(κ_j) given κ_J⋆, from sinc² ≤ 1/x².
    fn tail_after(&self, kstar: f64) -> f64 {
        let x = PI * self.s.value() * kstar;
        self.dens * self.dens / (x * x) * self.q / (1.0 - self.q)
    }

    /// Σ_{j≥0} I(x·λ^{−j}), at most `max_terms` terms, stopping once the bound on the
    /// remainder falls below `rel_tol` times the partial sum.
    fn sum(&self, scheme: &CutProjectScheme, x: AlgebraicNumber, max_terms: usize, rel_tol: f64) -> SeriesValue {
        let sd = scheme.covolume();
        let mut terms = Vec::new();
        let mut cur = x;
        let mut tail = f64::INFINITY;
        for j in 0..max_terms {
            terms.push(peak_intensity(scheme, &self.s, &cur));
            let kstar = cur.star_value() / sd;
            tail = if kstar == 0.0 { f64::INFINITY } else { self.tail_after(kstar) };
            let partial = compensated_sum(terms.iter().copied());
            if j + 1 == max_terms || tail <= rel_tol * partial {
                break;
            }
            match cur.checked_mul(&self.lambda_inv) {
                Ok(next) => cur = next,
                Err(_) => break,
            }
        }
        SeriesValue { value: compensated_sum(terms.iter().copied()), tail_bound: tail, terms: terms.len() }
    }
}

/// Σ(κ) = Σ_{ℓ=0}^{depth−1} I(κ/λ^ℓ) for κ = x/√D, with a geometric bound on the rest.
pub fn sigma_series(
    scheme: &CutProjectScheme,
    s: &FieldNumber,
    x: &AlgebraicNumber,
    depth: usize,
) -> Result<SeriesValue, CutProjectError> {
    if depth == 0 {
        return Err(CutProjectError::NonPositive { what: "depth", value: 0.0 });
    }
    Ok(Orbit::new(scheme, s)?.sum(scheme, *x, depth, 0.0))
}

/// Z(k) = Σ_{0<κ≤k} I(κ), summed over the peaks with |κ·κ⋆| ≤ `cut`.
///
/// The cut is invariant under κ ↦ κ/λ, so the retained peaks are the inflation orbits of
/// the retained peaks in the shell (k/λ, k]. The tail bound covers both the peaks outside
/// the cut and the truncation of each orbit.
pub fn z_pure_point(scheme: &CutProjectScheme, s: &FieldNumber, k: f64, cut: f64) -> Result<ZValue, CutProjectError> {
    if !(k > 0.0) {
        return Err(CutProjectError::NonPositive { what: "k", value: k });
    }
    if !(cut > 0.0) {
        return Err(CutProjectError::NonPositive { what: "cut", value: cut });
    }
    let orbit = Orbit::new(scheme, s)?;
    let order = scheme.order();
    let sd = scheme.covolume();
    let disc = order.discriminant() as f64;
    let lambda = order.theta();
    let (x_lo, x_hi) = (k * sd / lambda, k * sd);
    let norm_cut = cut * disc;
    // Enumerate the shell at unit scale and map it back exactly: x = y·λ^e.
    let e = (k.ln() / lambda.ln()).ceil() as i32;
    let scale = order.theta_element().checked_pow(e)?;
    let unit_hi = k * sd / lambda.powi(e) * (1.0 + 1e-9);
    let unit_lo = unit_hi / lambda * (1.0 - 2e-9);
    let y_max = norm_cut / unit_lo;
    let mut shell = Vec::new();
    for y in enumerate_box(order, (unit_lo, unit_hi), (-y_max, y_max))? {
        if !y.checked_norm().is_ok_and(|n| (n.unsigned_abs() as f64) <= norm_cut) {
            continue;
        }
        let x = y.checked_mul(&scale)?;
        let v = x.value();
        if v > x_lo && v <= x_hi {
            shell.push(x);
        }
    }

    let sums: Vec<SeriesValue> = shell.par_iter().map(|&x| orbit.sum(scheme, x, 400, 1e-17)).collect();
    let value = compensated_sum(sums.iter().map(|v| v.value));
    let orbit_tail: f64 = sums.iter().map(|v| v.tail_bound).sum();

    // Peaks in a shell of width below k' have star coordinates at least 1/(D·k') apart, so the
    // excluded ones (|κ⋆| > C/k') carry at most 2·k'²·(1/C² + D/C)·dens²/(π s)² per shell.
    // For s in the order, |sin(π s κ⋆)| ≤ π|s⋆|κ sharpens this.
    let dens = orbit.dens;
    let base = 2.0 * dens * dens / (PI * s.value()).powi(2) * (1.0 / (cut * cut) + disc / cut);
    let s_star = (s.denominator() == 1).then(|| s.star_value().abs());
    let mut shell_tail = 0.0;
    let mut kp = k;
    for _ in 0..10_000 {
        let f = s_star.map_or(1.0, |ss| (PI * ss * kp).powi(2).min(1.0));
        let term = base * kp * kp * f;
        shell_tail += term;
        if term <= 1e-18 * shell_tail {
            break;
        }
        kp /= lambda;
    }
    Ok(ZValue { value, tail_bound: shell_tail + orbit_tail, shell_points: shell.len() })
}

/// lim_{ℓ→∞} I(κ/λ^ℓ)·λ^{4ℓ} for a window length in the order and a unit order:
/// dens²·(s⋆κ)²/(s κ⋆)².
pub fn peak_decay_limit(scheme: &CutProjectScheme, s: &FieldNumber, x: &AlgebraicNumber) -> Option<f64> {
    if s.denominator() != 1 || !scheme.order().is_unit_order() {
        return None;
    }
    let sd = scheme.covolume();
    let dens = s.value() / sd;
    let (k, kstar) = (x.value() / sd, -x.star_value() / sd);
    Some(dens * dens * (s.star_value() * k / (s.value() * kstar)).powi(2))
}
