//! Cut-and-project sets over real quadratic orders: model sets, their pure-point
//! diffraction and the integrated intensity Z(k).

mod peaks;

pub use peaks::{
    enumerate_box, enumerate_fourier_module, peak_decay_limit, peak_intensity, sigma_series, z_pure_point, Peak, PeakSet, SeriesValue,
    ZValue,
};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, AlgebraicNumber, FieldNumber, QuadraticOrder};
use crate::substitution::Letter;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CutProjectError {
    #[error("window endpoints out of order: {left} > {right}")]
    Window { left: String, right: String },
    #[error("window endpoints and scheme use different orders")]
    OrderMismatch,
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("the inflation-orbit summation needs a unit order (|n| = 1)")]
    NotUnitOrder,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The lattice {(x, x⋆) : x ∈ Z[θ]} in physical × internal space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutProjectScheme {
    order: QuadraticOrder,
}

impl CutProjectScheme {
    pub fn new(order: QuadraticOrder) -> Self {
        Self { order }
    }

    pub fn golden() -> Self {
        Self::new(QuadraticOrder::golden())
    }

    pub fn noble(p: u32) -> Result<Self, CutProjectError> {
        Ok(Self::new(QuadraticOrder::noble(p)?))
    }

    pub fn order(&self) -> QuadraticOrder {
        self.order
    }

    /// |θ − θ⋆| = √D.
    pub fn covolume(&self) -> f64 {
        self.order.covolume()
    }

    /// length(W)/covolume.
    pub fn density(&self, window: &Window) -> f64 {
        window.length_value() / self.covolume()
    }
}

/// Interval in internal space with exact endpoints and closure flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    left: FieldNumber,
    right: FieldNumber,
    closed_left: bool,
    closed_right: bool,
}

impl Window {
    /// A window with `left ≤ right`; equal endpoints give a window without interior.
    pub fn new(left: FieldNumber, right: FieldNumber, closed_left: bool, closed_right: bool) -> Result<Self, CutProjectError> {
        if left.order() != right.order() {
            return Err(CutProjectError::OrderMismatch);
        }
        if right.checked_sub(&left)?.checked_signum()? == Ordering::Less {
            return Err(CutProjectError::Window { left: left.to_string(), right: right.to_string() });
        }
        Ok(Self { left, right, closed_left, closed_right })
    }

    /// (left, right].
    pub fn half_open(left: FieldNumber, right: FieldNumber) -> Result<Self, CutProjectError> {
        Self::new(left, right, false, true)
    }

    /// (−1, λ_p − p] for the noble-mean order with parameter p; (−1, τ − 1] when p = 1.
    pub fn noble(scheme: &CutProjectScheme) -> Self {
        let o = scheme.order();
        let left = FieldNumber::from(o.integer(-1));
        let right = FieldNumber::from(o.element(-i128::from(o.trace()), 1));
        Self { left, right, closed_left: false, closed_right: true }
    }

    /// (−s/2, s/2] for a window of given exact length.
    pub fn centred(s: FieldNumber) -> Result<Self, CutProjectError> {
        let half = FieldNumber::new(s.numerator(), s.denominator().checked_mul(2).ok_or(AlgebraError::Overflow("window"))?)?;
        let zero = FieldNumber::from(s.order().zero());
        Self::half_open(zero.checked_sub(&half)?, half)
    }

    pub fn left(&self) -> FieldNumber {
        self.left
    }

    pub fn right(&self) -> FieldNumber {
        self.right
    }

    pub fn length(&self) -> FieldNumber {
        self.right.checked_sub(&self.left).expect("validated at construction")
    }

    pub fn length_value(&self) -> f64 {
        self.length().value()
    }

    pub fn has_interior(&self) -> bool {
        self.left != self.right
    }

    /// Exact test x⋆ ∈ W.
    pub fn contains_star(&self, x: &AlgebraicNumber) -> Result<bool, CutProjectError> {
        if !self.has_interior() {
            return Ok(false);
        }
        let l = self.left.cmp_with_star_of(x)?;
        let r = self.right.cmp_with_star_of(x)?;
        let left_ok = l == Ordering::Less || (self.closed_left && l == Ordering::Equal);
        let right_ok = r == Ordering::Greater || (self.closed_right && r == Ordering::Equal);
        Ok(left_ok && right_ok)
    }
}

/// Points of a model set within [−R, R], sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSet {
    pub points: Vec<AlgebraicNumber>,
    pub radius: f64,
}

/// All x in the order with |x| ≤ R and x⋆ ∈ W.
pub fn generate_model_set(scheme: &CutProjectScheme, window: &Window, radius: f64) -> Result<ModelSet, CutProjectError> {
    if !(radius > 0.0) {
        return Err(CutProjectError::NonPositive { what: "radius", value: radius });
    }
    if window.left.order() != scheme.order {
        return Err(CutProjectError::OrderMismatch);
    }
    if !window.has_interior() {
        return Ok(ModelSet { points: Vec::new(), radius });
    }
    let (lo, hi) = (window.left.value(), window.right.value());
    let mut points = Vec::new();
    for x in enumerate_box(scheme.order, (-radius, radius), (lo, hi))? {
        if x.value().abs() <= radius && window.contains_star(&x)? {
            points.push(x);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("same order"));
    Ok(ModelSet { points, radius })
}

impl ModelSet {
    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(AlgebraicNumber::value).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distinct consecutive differences, longest first.
    pub fn gaps(&self) -> Vec<AlgebraicNumber> {
        let mut g: Vec<AlgebraicNumber> = self.points.windows(2).map(|w| w[1] - w[0]).collect();
        g.sort_by(|a, b| b.partial_cmp(a).expect("same order"));
        g.dedup();
        g
    }

    /// Each point typed by the gap to its right neighbour (longest gap is letter 0); the last
    /// point has no right neighbour and is dropped.
    pub fn typed(&self) -> Vec<(AlgebraicNumber, Letter)> {
        let gaps = self.gaps();
        self.points
            .windows(2)
            .map(|w| {
                let g = w[1] - w[0];
                (w[0], gaps.iter().position(|x| *x == g).expect("gap is listed") as Letter)
            })
            .collect()
    }

    /// Point count per unit length.
    pub fn empirical_density(&self) -> f64 {
        self.len() as f64 / (2.0 * self.radius)
    }
}
