use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Uniform};
use serde::{Deserialize, Serialize};

use super::{AnalyticModel, StochasticError, Weighting};
use crate::numeric::fmt_real;
use crate::substitution::{bernoullise, rudin_shapiro_weights};

/// Upper limit on the number of sites or expected points in one realisation.
pub const MAX_SITES: f64 = 2e8;

/// Whether the realisation lists every integer site (zero weights included) or only points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Lattice,
    Continuum,
}

/// Weighted points in [−R, R], sorted by position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedRealisation {
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    pub radius: f64,
    pub seed: u64,
    pub stream: u64,
    pub support: Support,
}

impl WeightedRealisation {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Total weight per unit length.
    pub fn weight_density(&self) -> f64 {
        self.weights.iter().sum::<f64>() / (2.0 * self.radius)
    }

    /// CSV with header `position,weight`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["position", "weight"])?;
        for (&x, &v) in self.positions.iter().zip(&self.weights) {
            wr.write_record([fmt_real(x), fmt_real(v)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `sample_stream` on stream 0.
pub fn sample(model: &AnalyticModel, radius: f64, seed: u64) -> Result<WeightedRealisation, StochasticError> {
    sample_stream(model, radius, seed, 0)
}

/// One realisation on [−R, R]; the generator is keyed by (seed, stream).
pub fn sample_stream(model: &AnalyticModel, radius: f64, seed: u64, stream: u64) -> Result<WeightedRealisation, StochasticError> {
    model.validate()?;
    if !(radius > 0.0 && 2.0 * radius <= MAX_SITES) {
        return Err(StochasticError::Parameter { name: "R", reason: format!("{radius} must lie in (0, {}]", MAX_SITES / 2.0) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let m = radius.floor() as i64;
    let sites = || (-m..=m).map(|n| n as f64);
    let (positions, weights, support) = match *model {
        AnalyticModel::Poisson => {
            let count = Poisson::new(2.0 * radius).expect("positive mean").sample(&mut rng) as usize;
            let uniform = Uniform::new_inclusive(-radius, radius).expect("finite bounds");
            let mut xs: Vec<f64> = (0..count).map(|_| uniform.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let n = xs.len();
            (xs, vec![1.0; n], Support::Continuum)
        }
        AnalyticModel::Bernoulli { p, weighting } => {
            let empty = match weighting {
                Weighting::ZeroOne => 0.0,
                Weighting::PlusMinus => -1.0,
            };
            let w = sites().map(|_| if rng.random_bool(p) { 1.0 } else { empty }).collect();
            (sites().collect(), w, Support::Lattice)
        }
        AnalyticModel::Markov { p, q } => {
            let rho = model.markov_rho().expect("markov");
            let mut occupied = rng.random_bool(rho);
            let w = sites()
                .map(|_| {
                    let v = if occupied { 1.0 } else { 0.0 };
                    let stay = if occupied { q } else { p };
                    occupied = occupied == rng.random_bool(stay);
                    v
                })
                .collect();
            (sites().collect(), w, Support::Lattice)
        }
        AnalyticModel::RandomTiling { u, v, p } => {
            let tile = |rng: &mut ChaCha8Rng| if rng.random_bool(p) { u } else { v };
            let mut left = Vec::new();
            let mut x = 0.0;
            loop {
                x -= tile(&mut rng);
                if x < -radius {
                    break;
                }
                left.push(x);
            }
            left.reverse();
            let mut xs = left;
            let mut x = 0.0;
            while x <= radius {
                xs.push(x);
                x += tile(&mut rng);
            }
            let n = xs.len();
            (xs, vec![1.0; n], Support::Continuum)
        }
        AnalyticModel::RudinShapiro { p } => {
            let base = rudin_shapiro_weights((2 * m + 1) as usize);
            let w = bernoullise(&base, p, &mut rng).into_iter().map(f64::from).collect();
            (sites().collect(), w, Support::Lattice)
        }
        AnalyticModel::Rmt { .. } => return Err(StochasticError::NotSamplable(model.to_string())),
    };
    Ok(WeightedRealisation { positions, weights, radius, seed, stream, support })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_count() {
        let r = sample(&AnalyticModel::Poisson, 1e4, 11).unwrap();
        let n = r.len() as f64;
        assert!((n - 2e4).abs() < 3.0 * 2e4f64.sqrt(), "{n}");
        assert!(r.positions.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.positions.iter().all(|x| x.abs() <= 1e4));
    }

    #[test]
    fn reproducible_and_streams_differ() {
        let m = AnalyticModel::Markov { p: 0.3, q: 0.6 };
        let a = sample(&m, 500.0, 3).unwrap();
        assert_eq!(a, sample(&m, 500.0, 3).unwrap());
        assert_ne!(a.weights, sample_stream(&m, 500.0, 3, 1).unwrap().weights);
    }

    #[test]
    fn markov_occupation() {
        let r = sample(&AnalyticModel::Markov { p: 0.75, q: 0.75 }, 2e5, 5).unwrap();
        let occ = r.weights.iter().sum::<f64>() / r.len() as f64;
        // Correlation time (1 + r)/(1 − r) = 3 inflates the variance.
        assert!((occ - 0.5).abs() < 4.0 * (0.25 * 3.0 / r.len() as f64).sqrt(), "{occ}");
    }

    #[test]
    fn bernoulli_extremes() {
        let full = sample(&AnalyticModel::Bernoulli { p: 1.0, weighting: Weighting::ZeroOne }, 50.0, 1).unwrap();
        assert_eq!(full.len(), 101);
        assert!(full.weights.iter().all(|&w| w == 1.0));
        let pm = sample(&AnalyticModel::Bernoulli { p: 0.0, weighting: Weighting::PlusMinus }, 50.0, 1).unwrap();
        assert!(pm.weights.iter().all(|&w| w == -1.0));
    }

    #[test]
    fn random_tiling_gaps() {
        let r = sample(&AnalyticModel::RandomTiling { u: 1.0, v: 2.5, p: 0.4 }, 1000.0, 9).unwrap();
        assert!(r.positions.contains(&0.0));
        for w in r.positions.windows(2) {
            let g = w[1] - w[0];
            assert!((g - 1.0).abs() < 1e-9 || (g - 2.5).abs() < 1e-9, "{g}");
        }
        assert!(r.positions.first().unwrap() >= &-1000.0 && r.positions.last().unwrap() <= &1000.0);
    }

    #[test]
    fn rudin_shapiro_unflipped() {
        let r = sample(&AnalyticModel::RudinShapiro { p: 0.0 }, 8.0, 0).unwrap();
        let base: Vec<f64> = rudin_shapiro_weights(17).into_iter().map(f64::from).collect();
        assert_eq!(r.weights, base);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sample(&AnalyticModel::Rmt { beta: 2 }, 10.0, 0).is_err());
        assert!(sample(&AnalyticModel::Poisson, 0.0, 0).is_err());
        assert!(sample(&AnalyticModel::Poisson, 1e300, 0).is_err());
    }

    #[test]
    fn csv_header() {
        let r = sample(&AnalyticModel::Poisson, 5.0, 1).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("position,weight\n"));
        assert_eq!(s.lines().count(), r.len() + 1);
    }
}
