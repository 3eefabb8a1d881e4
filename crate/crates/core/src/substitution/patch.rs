use std::io::Write;

use serde::{Deserialize, Serialize};

use super::rule::{letter_char, Letter, SubstitutionRule, TileLengths};
use super::word::{fixed_point_word, iterations_for_radius, TwoSidedWord, DEFAULT_LETTER_BUDGET};
use super::SubstitutionError;
use crate::algebra::AlgebraicNumber;
use crate::numeric::fmt_real;

/// Left endpoint of a tile, with its exact coordinate when the lengths are algebraic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchPoint {
    pub position: f64,
    pub exact: Option<AlgebraicNumber>,
    pub letter: Letter,
}

/// Left endpoints of the tiles of a two-sided word, sorted by position.
///
/// Every point lies in `[-left_extent, right_extent]`; `radius` is the smaller of the two, so
/// the patch covers `[-radius, radius]` completely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypedPatch {
    points: Vec<PatchPoint>,
    lengths: TileLengths,
    radius: f64,
}

/// Partial sums of tile lengths, anchored so that the origin is the marked seed vertex.
pub fn geometric_patch(word: &TwoSidedWord, lengths: &TileLengths) -> Result<TypedPatch, SubstitutionError> {
    if lengths.real.iter().any(|&l| !(l > 0.0)) {
        return Err(SubstitutionError::Lengths);
    }
    let d = lengths.real.len();
    if word.left.iter().chain(&word.right).any(|&l| usize::from(l) >= d) {
        return Err(SubstitutionError::Lengths);
    }
    let exact = lengths.exact.as_deref();
    let add = |acc: Option<AlgebraicNumber>, l: Letter, sign: i128| -> Option<AlgebraicNumber> {
        let step = exact?[usize::from(l)].checked_scale(sign).ok()?;
        acc?.checked_add(&step).ok()
    };
    let origin = exact.and_then(|ex| ex.first()).map(|x| x.order().zero());

    let mut right = Vec::with_capacity(word.right.len());
    let (mut x, mut xe) = (0.0f64, origin);
    for &l in &word.right {
        right.push(PatchPoint { position: xe.map_or(x, |e| e.value()), exact: xe, letter: l });
        x += lengths.real[usize::from(l)];
        xe = add(xe, l, 1);
    }
    let right_extent = xe.map_or(x, |e| e.value());

    let mut left = Vec::with_capacity(word.left.len());
    let (mut x, mut xe) = (0.0f64, origin);
    for &l in &word.left {
        x -= lengths.real[usize::from(l)];
        xe = add(xe, l, -1);
        left.push(PatchPoint { position: xe.map_or(x, |e| e.value()), exact: xe, letter: l });
    }
    let left_extent = -xe.map_or(x, |e| e.value());

    left.reverse();
    left.extend(right);
    let radius = if word.left.is_empty() || word.right.is_empty() { 0.0 } else { left_extent.min(right_extent) };
    Ok(TypedPatch { points: left, lengths: lengths.clone(), radius })
}

/// Patch of the natural-length tiling covering [−R, R], grown from the first legal seed
/// and cut to the points with |x| ≤ R.
pub fn patch_for_radius(rule: &SubstitutionRule, radius: f64) -> Result<TypedPatch, SubstitutionError> {
    let lengths = rule.natural_lengths()?;
    let shortest = lengths.real.iter().copied().fold(f64::INFINITY, f64::min);
    let letters = (radius.max(0.0) / shortest).ceil() as usize + 1;
    let seed = *rule.legal_pairs().iter().next().ok_or_else(|| SubstitutionError::IllegalSeed(String::new()))?;
    let n = iterations_for_radius(rule, seed, letters).ok_or(SubstitutionError::Budget { budget: DEFAULT_LETTER_BUDGET })?;
    let word = fixed_point_word(rule, seed, n, DEFAULT_LETTER_BUDGET)?;
    let mut patch = geometric_patch(&word, &lengths)?;
    patch.points.retain(|p| p.position.abs() <= radius);
    patch.radius = radius;
    Ok(patch)
}

impl TypedPatch {
    pub fn points(&self) -> &[PatchPoint] {
        &self.points
    }

    pub fn lengths(&self) -> &TileLengths {
        &self.lengths
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Points with |x| ≤ r, decided exactly when coordinates are algebraic.
    pub fn within(&self, r: f64) -> impl Iterator<Item = &PatchPoint> {
        self.points.iter().filter(move |p| p.position.abs() <= r)
    }

    /// Exact coordinates of all points, if available.
    pub fn exact_positions(&self) -> Option<Vec<AlgebraicNumber>> {
        self.points.iter().map(|p| p.exact).collect()
    }

    /// Inflate by λ and dissect every tile according to `rule`, exactly.
    ///
    /// Returns `None` when the patch carries no exact coordinates or arithmetic overflows.
    pub fn inflate(&self, rule: &SubstitutionRule, lambda: &AlgebraicNumber) -> Option<Vec<(AlgebraicNumber, Letter)>> {
        let ex = self.lengths.exact.as_deref()?;
        let mut out = Vec::new();
        for p in &self.points {
            let mut x = p.exact?.checked_mul(lambda).ok()?;
            for &l in rule.image(p.letter) {
                out.push((x, l));
                x = x.checked_add(&ex[usize::from(l)]).ok()?;
            }
        }
        Some(out)
    }

    /// CSV with header `position,type,a,b`; `a,b` are empty when coordinates are not algebraic.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["position", "type", "a", "b"])?;
        for p in &self.points {
            let (a, b) = p.exact.map_or((String::new(), String::new()), |e| (e.a().to_string(), e.b().to_string()));
            wr.write_record([fmt_real(p.position), letter_char(p.letter).to_string(), a, b])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::{catalogue, fixed_point_word, DEFAULT_LETTER_BUDGET};
    use crate::QuadraticOrder;

    const TAU: f64 = 1.618_033_988_749_895;

    fn fib_patch(n: usize) -> (SubstitutionRule, TypedPatch) {
        let rule = catalogue("fibonacci", &[]).unwrap();
        let w = fixed_point_word(&rule, (0, 0), n, DEFAULT_LETTER_BUDGET).unwrap();
        let patch = geometric_patch(&w, &rule.natural_lengths().unwrap()).unwrap();
        (rule, patch)
    }

    #[test]
    fn patch_for_radius_covers_the_interval() {
        for name in ["fibonacci", "period-doubling", "kolakoski"] {
            let rule = catalogue(name, &[]).unwrap();
            let p = patch_for_radius(&rule, 50.0).unwrap();
            let xs = p.positions();
            assert!(xs.iter().all(|x| x.abs() <= 50.0));
            let longest = rule.natural_lengths().unwrap().real.iter().copied().fold(0.0, f64::max);
            assert!(xs[0] < -50.0 + longest && *xs.last().unwrap() > 50.0 - longest, "{name}");
        }
    }

    #[test]
    fn fibonacci_positions_are_partial_sums() {
        let rule = catalogue("fibonacci", &[]).unwrap();
        let w = TwoSidedWord { left: vec![1, 0], right: vec![0, 0, 1] };
        let p = geometric_patch(&w, &rule.natural_lengths().unwrap()).unwrap();
        let xs = p.positions();
        let expect = [-1.0 - TAU, -1.0, 0.0, TAU, 2.0 * TAU];
        for (x, e) in xs.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12, "{xs:?}");
        }
        let g = QuadraticOrder::golden();
        assert_eq!(p.points()[3].exact, Some(g.theta_element()));
    }

    #[test]
    fn single_letter_patch_is_origin() {
        let rule = catalogue("fibonacci", &[]).unwrap();
        let w = TwoSidedWord { left: vec![], right: vec![0] };
        let p = geometric_patch(&w, &rule.natural_lengths().unwrap()).unwrap();
        assert_eq!(p.positions(), vec![0.0]);
    }

    #[test]
    fn fibonacci_gaps_are_tau_and_one() {
        let (_, p) = fib_patch(6);
        for w in p.points().windows(2) {
            let gap = w[1].exact.unwrap().checked_sub(&w[0].exact.unwrap()).unwrap();
            let g = QuadraticOrder::golden();
            let expected = if w[0].letter == 0 { g.theta_element() } else { g.one() };
            assert_eq!(gap, expected);
        }
        assert!(p.radius() > 10.0);
    }

    #[test]
    fn inflation_reproduces_next_iterate() {
        for name in ["fibonacci", "period-doubling", "limit-quasiperiodic", "noble"] {
            let params: &[u32] = if name == "noble" { &[3] } else { &[] };
            let rule = catalogue(name, params).unwrap();
            let lengths = rule.natural_lengths().unwrap();
            let seed = *rule.legal_pairs().iter().find(|&&(u, v)| {
                let w2 = TwoSidedWord::from_seed(u, v).substitute(&rule).substitute(&rule);
                w2.left[0] == u && w2.right[0] == v
            }).unwrap();
            let w = fixed_point_word(&rule, seed, 2, DEFAULT_LETTER_BUDGET).unwrap();
            let patch = geometric_patch(&w, &lengths).unwrap();
            let next = geometric_patch(&w.substitute(&rule), &lengths).unwrap();
            let ex = lengths.exact.as_ref().unwrap();
            let order = ex[0].order();
            let lambda = rule.exact_inflation_factor().unwrap();
            // λ·ℓ_j equals the total length of the image of j.
            for j in 0..2u8 {
                let total = rule.image(j).iter().fold(order.zero(), |acc, &l| acc + ex[usize::from(l)]);
                assert_eq!(lambda * ex[usize::from(j)], total, "{name}");
            }
            let inflated = patch.inflate(&rule, &lambda).unwrap();
            let direct: Vec<(AlgebraicNumber, Letter)> = next.points().iter().map(|p| (p.exact.unwrap(), p.letter)).collect();
            assert_eq!(inflated, direct, "{name}");
        }
    }

    #[test]
    fn csv_has_exact_columns() {
        let (_, p) = fib_patch(1);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("position,type,a,b"));
        assert!(text.contains("0,a,0,0"));
    }

    #[test]
    fn non_positive_lengths_are_rejected() {
        let w = TwoSidedWord::from_seed(0, 0);
        assert!(geometric_patch(&w, &TileLengths::real_only(vec![0.0, 1.0])).is_err());
    }
}
