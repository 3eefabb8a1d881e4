use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::RenormError;
use crate::algebra::{AlgebraicNumber, FieldNumber, QuadraticOrder};
use crate::cutproject::enumerate_box;
use crate::substitution::Letter;

/// Ordered type pair (left point, right point) for the Fibonacci point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairType {
    AA,
    AB,
    BA,
    BB,
}

impl PairType {
    pub const ALL: [PairType; 4] = [PairType::AA, PairType::AB, PairType::BA, PairType::BB];

    pub fn from_letters(left: Letter, right: Letter) -> Self {
        match (left, right) {
            (0, 0) => PairType::AA,
            (0, _) => PairType::AB,
            (_, 0) => PairType::BA,
            _ => PairType::BB,
        }
    }

    fn idx(self) -> usize {
        self as usize
    }

    /// ν_ij(−z) = ν_ji(z).
    pub fn reversed(self) -> Self {
        match self {
            PairType::AB => PairType::BA,
            PairType::BA => PairType::AB,
            t => t,
        }
    }
}

/// Pair correlation coefficients ν_ij(z) of the Fibonacci point set for |z| ≤ radius.
///
/// Only distances with |z⋆| < τ are stored; all others lie outside Λ − Λ and carry zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCorrelationTable {
    radius: f64,
    distances: Vec<AlgebraicNumber>,
    index: HashMap<(i128, i128), usize>,
    values: [Vec<f64>; 4],
}

fn golden() -> QuadraticOrder {
    QuadraticOrder::golden()
}

impl PairCorrelationTable {
    /// The zero table on all admissible distances with |z| ≤ radius.
    pub fn zero(radius: f64) -> Result<Self, RenormError> {
        if !(radius > 0.0) {
            return Err(RenormError::NonPositive { what: "radius", value: radius });
        }
        let g = golden();
        let tau = FieldNumber::from(g.theta_element());
        let neg_tau = FieldNumber::from(-g.theta_element());
        let mut distances: Vec<AlgebraicNumber> = enumerate_box(g, (-radius, radius), (-g.theta(), g.theta()))
            .map_err(|_| RenormError::Radius(radius))?
            .into_iter()
            .filter(|z| {
                z.value().abs() <= radius
                    && tau.cmp_with_star_of(z).is_ok_and(|o| o.is_gt())
                    && neg_tau.cmp_with_star_of(z).is_ok_and(|o| o.is_lt())
            })
            .collect();
        distances.sort_by(|a, b| a.partial_cmp(b).expect("same order"));
        let index = distances.iter().enumerate().map(|(i, z)| ((z.a(), z.b()), i)).collect();
        let n = distances.len();
        Ok(Self { radius, distances, index, values: std::array::from_fn(|_| vec![0.0; n]) })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn distances(&self) -> &[AlgebraicNumber] {
        &self.distances
    }

    fn slot(&self, z: &AlgebraicNumber) -> Result<Option<usize>, RenormError> {
        if z.order() != golden() {
            return Err(RenormError::ForeignDistance(z.to_string()));
        }
        Ok(self.index.get(&(z.a(), z.b())).copied())
    }

    /// ν_ij(z); zero outside the stored support.
    pub fn get(&self, pair: PairType, z: &AlgebraicNumber) -> Result<f64, RenormError> {
        Ok(self.slot(z)?.map_or(0.0, |i| self.values[pair.idx()][i]))
    }

    pub fn set(&mut self, pair: PairType, z: &AlgebraicNumber, value: f64) -> Result<(), RenormError> {
        match self.slot(z)? {
            Some(i) => {
                self.values[pair.idx()][i] = value;
                Ok(())
            }
            None => Err(RenormError::ForeignDistance(z.to_string())),
        }
    }

    /// η(z)/dens = Σ_ij ν_ij(z).
    pub fn eta_over_density(&self, z: &AlgebraicNumber) -> Result<f64, RenormError> {
        PairType::ALL.iter().map(|&p| self.get(p, z)).sum()
    }

    /// Largest absolute difference over all entries of two tables on the same support.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    fn stencil(&self) -> Vec<[Option<usize>; 3]> {
        let g = golden();
        let inv = g.theta_element().checked_unit_inverse().expect("τ is a unit");
        let one = g.one();
        self.distances
            .iter()
            .map(|z| {
                let y = *z * inv;
                let look = |w: AlgebraicNumber| self.index.get(&(w.a(), w.b())).copied();
                [look(y), look(y - one), look(y + one)]
            })
            .collect()
    }

    fn apply(&self, stencil: &[[Option<usize>; 3]]) -> Self {
        let inv_tau = 1.0 / golden().theta();
        let v = |p: PairType, i: Option<usize>| i.map_or(0.0, |i| self.values[p.idx()][i]);
        let mut out = self.clone();
        for (n, &[y, ym, yp]) in stencil.iter().enumerate() {
            use PairType::*;
            out.values[AA.idx()][n] = inv_tau * (v(AA, y) + v(AB, y) + v(BA, y) + v(BB, y));
            out.values[AB.idx()][n] = inv_tau * (v(AA, ym) + v(BA, ym));
            out.values[BA.idx()][n] = inv_tau * (v(AA, yp) + v(AB, yp));
            out.values[BB.idx()][n] = inv_tau * v(AA, y);
        }
        out
    }

    fn origin_mass(&self) -> f64 {
        let z = golden().zero();
        self.get(PairType::AA, &z).unwrap_or(0.0) + self.get(PairType::BB, &z).unwrap_or(0.0)
    }
}

/// One application of the Fibonacci renormalisation equations.
pub fn renorm_step(table: &PairCorrelationTable) -> Result<PairCorrelationTable, RenormError> {
    if table.radius < golden().theta().powi(2) {
        return Err(RenormError::Radius(table.radius));
    }
    Ok(table.apply(&table.stencil()))
}

/// Iterate the renormalisation equations from ν_aa(0) = seed, ν_bb(0) = 1 − seed, keeping
/// ν_aa(0) + ν_bb(0) = 1, until successive tables differ by less than `tol`.
pub fn solve_pair_correlations(
    seed_freq: f64,
    radius: f64,
    max_iter: usize,
    tol: f64,
) -> Result<PairCorrelationTable, RenormError> {
    if !(seed_freq > 0.0 && seed_freq < 1.0) {
        return Err(RenormError::SeedFrequency(seed_freq));
    }
    if !(tol > 0.0) {
        return Err(RenormError::NonPositive { what: "tol", value: tol });
    }
    if radius < golden().theta().powi(2) {
        return Err(RenormError::Radius(radius));
    }
    let mut table = PairCorrelationTable::zero(radius)?;
    let z = golden().zero();
    table.set(PairType::AA, &z, seed_freq)?;
    table.set(PairType::BB, &z, 1.0 - seed_freq)?;
    let stencil = table.stencil();
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let mut next = table.apply(&stencil);
        let mass = next.origin_mass();
        next.values.iter_mut().flatten().for_each(|x| *x /= mass);
        change = next.sup_distance(&table);
        table = next;
        if change < tol {
            return Ok(table);
        }
    }
    Err(RenormError::NoConvergence { iterations: max_iter, change })
}

/// Pair frequencies counted directly on a typed point list.
///
/// Left points are taken from the part of the list at least `radius` away from both ends,
/// and counts are divided by the number of such points.
pub fn count_pair_correlations(
    points: &[(AlgebraicNumber, Letter)],
    radius: f64,
) -> Result<PairCorrelationTable, RenormError> {
    let mut table = PairCorrelationTable::zero(radius)?;
    let (lo, hi) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f.0.value() + radius, l.0.value() - radius),
        _ => return Ok(table),
    };
    let mut centre = 0usize;
    let mut counts: HashMap<(PairType, usize), usize> = HashMap::new();
    for (i, (x, tx)) in points.iter().enumerate() {
        let xv = x.value();
        if xv < lo || xv > hi {
            continue;
        }
        centre += 1;
        let near = points[..i].iter().rev().take_while(|(y, _)| xv - y.value() <= radius + 1e-9);
        let far = points[i..].iter().take_while(|(y, _)| y.value() - xv <= radius + 1e-9);
        for (y, ty) in near.chain(far) {
            let z = *y - *x;
            if let Some(slot) = table.slot(&z)? {
                *counts.entry((PairType::from_letters(*tx, *ty), slot)).or_default() += 1;
            }
        }
    }
    if centre > 0 {
        for ((p, slot), c) in counts {
            table.values[p.idx()][slot] = c as f64 / centre as f64;
        }
    }
    Ok(table)
}
