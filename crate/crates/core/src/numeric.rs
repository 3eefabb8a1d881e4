//! Small numerical building blocks shared across modules.

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature with a global error target.
///
/// Returns `None` when the interval budget is exhausted before the estimate drops below
/// `abs_tol + rel_tol·|I|`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let mut intervals = vec![{
        let (v, e) = gauss_kronrod_15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..5000 {
        let total: f64 = compensated_sum(intervals.iter().map(|iv| iv.2));
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Some(total);
        }
        let (idx, _) = intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))?;
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return None;
        }
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gauss_kronrod_15(&f, l, h);
            intervals.push((l, h, v, e));
        }
    }
    None
}

/// Composite Simpson rule on `panels` (made even) equal sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + h * i as f64));
    }
    acc.value() * h / 3.0
}

/// Ordinary least squares for y ≈ Σ_j c_j·basis_j(x); returns coefficients.
///
/// Solved through the normal equations after centring and scaling the design columns,
/// which keeps small polynomial fits well conditioned.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = design.first()?.len();
    let n = design.len();
    if n < p || y.len() != n {
        return None;
    }
    let scale: Vec<f64> = (0..p)
        .map(|j| design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in design.iter().zip(y) {
        for i in 0..p {
            let xi = row[i] / scale[i];
            for j in 0..p {
                a[i][j] += xi * row[j] / scale[j];
            }
            a[i][p] += xi * yi;
        }
    }
    for k in 0..p {
        let piv = (k..p).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        a.swap(k, piv);
        if a[k][k].abs() < 1e-13 * a.iter().map(|r| r[k].abs()).fold(0.0, f64::max).max(1.0) {
            return None;
        }
        for i in 0..p {
            if i != k {
                let f = a[i][k] / a[k][k];
                for j in k..=p {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    Some((0..p).map(|i| a[i][p] / a[i][i] / scale[i]).collect())
}

/// Format a real with 17 significant digits (round-trip safe).
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_ne!(xs.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn adaptive_quadrature_matches_closed_forms() {
        let v = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, 1e-14, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate_adaptive(|x| (1.0 - x).abs().ln(), 0.0, 2.0, 1e-12, 1e-12).unwrap();
        assert!((v + 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_quadratic() {
        let xs: Vec<f64> = (0..10).map(|i| -3.0 - i as f64).collect();
        let design: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x * x, x, 1.0]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| -1.5 * x * x + 0.25 * x - 7.0).collect();
        let c = least_squares(&design, &y).unwrap();
        assert!((c[0] + 1.5).abs() < 1e-10 && (c[1] - 0.25).abs() < 1e-9 && (c[2] + 7.0).abs() < 1e-8);
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 0.1] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
