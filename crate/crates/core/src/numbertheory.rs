//! Square-free integers: sieves, the peak intensity factor f(q) and the truncated Z(k) sum.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::{compensated_sum, fmt_real};

/// Largest sieve limit accepted (about 4.3·10⁹ bytes of flags would be needed beyond it).
pub const MAX_SIEVE_LIMIT: u64 = 1 << 32;

/// Generator counts up to this use exact rational accumulation.
pub const EXACT_GENERATOR_LIMIT: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumberTheoryError {
    #[error("sieve limit {0} exceeds the memory budget of {MAX_SIEVE_LIMIT}")]
    MemoryBudget(u64),
    #[error("sieve limit must be at least 2, got {0}")]
    Limit(u64),
    #[error("{what} must be positive")]
    NonPositive { what: &'static str },
    #[error("k = {0} outside (0, 1)")]
    Domain(f64),
}

/// Square-free flags and smallest prime factors for 0..=limit.
#[derive(Clone, Debug)]
pub struct SquarefreeSieve {
    limit: u64,
    flags: Vec<bool>,
    spf: Vec<u32>,
}

pub fn sieve(limit: u64) -> Result<SquarefreeSieve, NumberTheoryError> {
    if limit < 2 {
        return Err(NumberTheoryError::Limit(limit));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(NumberTheoryError::MemoryBudget(limit));
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            for j in (i..=n).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    for p in (2..=n).filter(|&i| spf[i] == i as u32) {
        let Some(sq) = p.checked_mul(p).filter(|&s| s <= n) else { break };
        for j in (sq..=n).step_by(sq) {
            flags[j] = false;
        }
    }
    Ok(SquarefreeSieve { limit, flags, spf })
}

impl SquarefreeSieve {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Square-free test for |n| ≤ limit; 0 is not square-free.
    pub fn is_squarefree(&self, n: i64) -> Option<bool> {
        self.flags.get(usize::try_from(n.unsigned_abs()).ok()?).copied()
    }

    /// Number of square-free integers in 1..=limit.
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.limit as f64
    }

    pub fn squarefree(&self) -> impl Iterator<Item = u64> + '_ {
        self.flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i as u64)
    }

    /// Distinct primes of 1 ≤ n ≤ limit, increasing.
    pub fn distinct_primes(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = u64::from(self.spf[n as usize]);
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }
}

/// The first `count` positive square-free integers.
pub fn first_squarefree(count: usize) -> Result<Vec<u64>, NumberTheoryError> {
    if count == 0 {
        return Err(NumberTheoryError::NonPositive { what: "count" });
    }
    // Square-free density is 6/π² ≈ 0.61; 1.7·count + 16 always suffices.
    let sv = sieve(count as u64 * 17 / 10 + 16)?;
    Ok(sv.squarefree().take(count).collect())
}

/// Prime factorisation by trial division, as (p, exponent) pairs.
pub fn factorise(mut q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

/// The intensity factor of denominator q with its factorisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntensityFactor {
    pub q: u64,
    pub factors: Vec<(u64, u32)>,
    /// f(q) as numerator/denominator.
    pub f: (i128, i128),
}

impl IntensityFactor {
    pub fn new(q: u64) -> Result<Self, NumberTheoryError> {
        if q == 0 {
            return Err(NumberTheoryError::NonPositive { what: "q" });
        }
        let factors = factorise(q);
        let f = f_of(&factors);
        Ok(Self { q, factors, f: (*f.numer(), *f.denom()) })
    }

    pub fn is_cube_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e < 3)
    }

    pub fn value(&self) -> f64 {
        self.f.0 as f64 / self.f.1 as f64
    }
}

fn f_of(factors: &[(u64, u32)]) -> Ratio<i128> {
    if factors.iter().any(|&(_, e)| e >= 3) {
        return Ratio::zero();
    }
    factors.iter().fold(Ratio::from_integer(1), |acc, &(p, _)| acc / Ratio::from_integer(i128::from(p) * i128::from(p) - 1))
}

/// f(q) = Π_{p|q} 1/(p² − 1) for cube-free q, else 0.
pub fn f_factor(q: u64) -> Result<Ratio<i128>, NumberTheoryError> {
    if q == 0 {
        return Err(NumberTheoryError::NonPositive { what: "q" });
    }
    Ok(f_of(&factorise(q)))
}

/// #{1 ≤ m ≤ x : gcd(m, q) = 1}, given the distinct primes of q.
pub fn coprime_count_with_primes(x: f64, primes: &[u64]) -> u64 {
    let n = x.max(0.0).floor() as u64;
    let mut total: i64 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d = d.saturating_mul(p);
            }
        }
        let term = (n / d) as i64;
        total += if mask.count_ones() % 2 == 0 { term } else { -term };
    }
    total as u64
}

/// #{1 ≤ m ≤ x : gcd(m, q) = 1} by inclusion–exclusion over the primes of q.
pub fn coprime_count(x: f64, q: u64) -> Result<u64, NumberTheoryError> {
    if q == 0 {
        return Err(NumberTheoryError::NonPositive { what: "q" });
    }
    let primes: Vec<u64> = factorise(q).into_iter().map(|(p, _)| p).collect();
    Ok(coprime_count_with_primes(x, &primes))
}

/// One square-free generator s with its primes and the cube-free multiples q = s·d, d | s.
#[derive(Clone, Debug, PartialEq)]
struct Generator {
    primes: Vec<u64>,
    f: Ratio<i128>,
    multiples: Vec<u64>,
}

fn generators(count: usize) -> Result<Vec<Generator>, NumberTheoryError> {
    let sf = first_squarefree(count)?;
    let sv = sieve(*sf.last().expect("count ≥ 1").max(&2))?;
    Ok(sf
        .into_iter()
        .map(|s| {
            let primes = sv.distinct_primes(s);
            let mut divisors = vec![1u64];
            for &p in &primes {
                let more: Vec<u64> = divisors.iter().map(|d| d * p).collect();
                divisors.extend(more);
            }
            divisors.sort_unstable();
            let f = primes.iter().fold(Ratio::from_integer(1), |acc, &p| acc / Ratio::from_integer(i128::from(p * p - 1)));
            Generator { multiples: divisors.into_iter().map(|d| s * d).collect(), primes, f }
        })
        .collect())
}

/// Truncated Z(k)/I(0) over the cube-free multiples of the first `generators` square-free
/// numbers.
///
/// Up to [`EXACT_GENERATOR_LIMIT`] generators the sum is accumulated exactly; beyond it the
/// terms are added in increasing order with compensation.
pub fn z_squarefree(k: f64, generator_count: usize) -> Result<f64, NumberTheoryError> {
    if !(k > 0.0 && k < 1.0) {
        return Err(NumberTheoryError::Domain(k));
    }
    let gens = generators(generator_count)?;
    if generator_count <= EXACT_GENERATOR_LIMIT {
        let mut acc = BigRational::zero();
        for g in &gens {
            let f2 = g.f * g.f;
            let f2 = BigRational::new(BigInt::from(*f2.numer()), BigInt::from(*f2.denom()));
            for &q in g.multiples.iter().filter(|&&q| q as f64 * k >= 1.0) {
                acc += &f2 * BigInt::from(coprime_count_with_primes(q as f64 * k, &g.primes));
            }
        }
        return Ok(acc.to_f64().unwrap_or(f64::NAN));
    }
    let mut terms: Vec<f64> = gens
        .par_iter()
        .flat_map_iter(|g| {
            let f = g.f.numer().to_f64().unwrap_or(0.0) / g.f.denom().to_f64().unwrap_or(f64::INFINITY);
            g.multiples
                .iter()
                .filter(move |&&q| q as f64 * k >= 1.0)
                .map(move |&q| coprime_count_with_primes(q as f64 * k, &g.primes) as f64 * f * f)
        })
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(compensated_sum(terms))
}

/// One row of the R(k) = log Z(k)/log k diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RRow {
    pub k: f64,
    #[serde(rename = "S")]
    pub generators: usize,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// R(k) per k. Truncation only drops positive terms, so every R is biased upwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RDiagnostic {
    pub rows: Vec<RRow>,
    pub upper_biased: bool,
}

impl RDiagnostic {
    /// CSV with header `k,S,Z,R`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "S", "Z", "R"])?;
        for r in &self.rows {
            wr.write_record([fmt_real(r.k), r.generators.to_string(), fmt_real(r.z), fmt_real(r.r)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn r_diagnostic(ks: &[f64], generator_count: usize) -> Result<RDiagnostic, NumberTheoryError> {
    let rows = ks
        .iter()
        .map(|&k| {
            let z = z_squarefree(k, generator_count)?;
            Ok(RRow { k, generators: generator_count, z, r: z.ln() / k.ln() })
        })
        .collect::<Result<_, NumberTheoryError>>()?;
    Ok(RDiagnostic { rows, upper_biased: true })
}

/// `count` log-spaced values from `hi` down to `lo`, both included.
pub fn log_spaced(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..count).map(|i| (hi.ln() + (lo.ln() - hi.ln()) * i as f64 / (count - 1) as f64).exp()).collect(),
    }
}
