//! Weighted series `Σ λᵢ xᵢ` and `Σ μᵢ f(xᵢ)` with certified truncation error.
//!
//! For the sequence generators in [`crate::sequence`] the tail after `N` terms is
//! resolved exactly from tail masses of the weights, so the reported bracket only
//! carries rounding. Sequences given as an opaque index function fall back to a
//! `[B, U]·tail_mass(N+1)` bracket from a declared lower bound `B` and an interval
//! upper bound `U`, or to the divergence / unbounded-error classifications.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcparse::ScalarFunction;
use crate::json_util::finite_or_null;
use crate::point::{ensure_dimension, positive_part, Point};
use crate::sequence::{BoundedSequence, Generator};
use crate::sum::CompensatedSum;
use crate::weights::WeightSequence;

/// Partial sums of the shifted series `Σ μᵢ (f(xᵢ) − B)` beyond this are treated as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Relative rounding allowance applied to the absolute mass `Σ |terms|` of a
/// resolved series.
const ROUNDING_FACTOR: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ConvergentWithBound,
    DivergesToPlusInfinity,
    UnboundedError,
}

/// Estimate of an infinite weighted sum of function values.
///
/// The true sum `S` satisfies `|S − partial_sum| ≤ tail_bound`, and the tighter
/// `S ∈ [lower(), upper()]`, whenever the classification is convergent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub partial_sum: f64,
    pub terms_used: usize,
    #[serde(serialize_with = "finite_or_null")]
    pub tail_bound: f64,
    pub classification: Classification,
    /// Best estimate of `S − partial_sum`.
    #[serde(serialize_with = "finite_or_null")]
    pub tail_center: f64,
    /// Uncertainty of `tail_center`.
    #[serde(serialize_with = "finite_or_null")]
    pub tail_radius: f64,
}

impl SeriesEstimate {
    fn convergent(
        partial_sum: f64,
        terms_used: usize,
        center: f64,
        radius: f64,
        bound: f64,
    ) -> Self {
        Self {
            partial_sum,
            terms_used,
            tail_bound: bound,
            classification: Classification::ConvergentWithBound,
            tail_center: center,
            tail_radius: radius,
        }
    }

    fn divergent(partial_sum: f64, terms_used: usize) -> Self {
        Self {
            partial_sum,
            terms_used,
            tail_bound: f64::INFINITY,
            classification: Classification::DivergesToPlusInfinity,
            tail_center: f64::INFINITY,
            tail_radius: f64::INFINITY,
        }
    }

    fn unbounded(partial_sum: f64, terms_used: usize) -> Self {
        Self {
            partial_sum,
            terms_used,
            tail_bound: f64::INFINITY,
            classification: Classification::UnboundedError,
            tail_center: 0.0,
            tail_radius: f64::INFINITY,
        }
    }

    /// Best estimate of the infinite sum.
    pub fn value(&self) -> f64 {
        match self.classification {
            Classification::ConvergentWithBound => self.partial_sum + self.tail_center,
            Classification::DivergesToPlusInfinity => f64::INFINITY,
            Classification::UnboundedError => f64::NAN,
        }
    }

    pub fn lower(&self) -> f64 {
        match self.classification {
            Classification::ConvergentWithBound => (self.partial_sum + self.tail_center
                - self.tail_radius)
                .max(self.partial_sum - self.tail_bound),
            Classification::DivergesToPlusInfinity => f64::INFINITY,
            Classification::UnboundedError => f64::NEG_INFINITY,
        }
    }

    pub fn upper(&self) -> f64 {
        match self.classification {
            Classification::ConvergentWithBound => {
                (self.partial_sum + self.tail_center + self.tail_radius)
                    .min(self.partial_sum + self.tail_bound)
            }
            Classification::DivergesToPlusInfinity | Classification::UnboundedError => {
                f64::INFINITY
            }
        }
    }
}

/// A point with a certified error radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSum {
    pub point: Point,
    pub error_radius: f64,
}

fn check_depth(weights: &WeightSequence, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "N",
            value: 0.0,
            range: "N >= 1",
        });
    }
    if n > weights.max_depth() {
        return Err(Error::DepthExceeded {
            index: n,
            max_depth: weights.max_depth(),
        });
    }
    Ok(())
}

/// `Σ_{i≤N} λᵢ xᵢ` with error radius `K·tail_mass(N+1)` plus rounding.
pub fn weighted_point_series(
    weights: &WeightSequence,
    seq: &BoundedSequence,
    n: usize,
) -> Result<PointSum> {
    check_depth(weights, n)?;
    let d = seq.dimension();
    let mut acc = vec![CompensatedSum::new(); d];
    for i in 1..=n {
        let w = weights.weight_at(i)?;
        for (a, x) in acc.iter_mut().zip(seq.point(i)) {
            a.add(w * x);
        }
    }
    Ok(PointSum {
        point: acc.iter().map(CompensatedSum::value).collect(),
        error_radius: seq.bound() * weights.tail_mass(n + 1)? * (1.0 + ROUNDING_FACTOR)
            + ROUNDING_FACTOR * seq.bound(),
    })
}

/// Tail `Σ_{i>N} wᵢ·(value at xᵢ)` grouped by distinct sequence point:
/// pairs of (weight mass, index into `distinct_points`).
pub(crate) fn tail_pieces(
    weights: &WeightSequence,
    seq: &BoundedSequence,
    n: usize,
) -> Result<Vec<(f64, usize)>> {
    Ok(match seq.generator() {
        Generator::FiniteSupport { points, .. } => {
            let len = points.len();
            let mut pieces = Vec::new();
            for i in n + 1..=len {
                pieces.push((weights.weight_at(i)?, i - 1));
            }
            pieces.push((weights.tail_mass(n.max(len) + 1)?, len));
            pieces
        }
        Generator::Periodic { points } => {
            let p = points.len();
            (0..p)
                .map(|j| Ok((weights.class_tail(n + 1, p, j)?, j)))
                .collect::<Result<_>>()?
        }
        Generator::Constant { .. } => vec![(weights.tail_mass(n + 1)?, 0)],
    })
}

/// `Σ_{i≥1} λᵢ xᵢ` resolved exactly: the first `N` terms plus the closed-form tail.
/// The error radius covers rounding only.
pub fn resolved_point_sum(
    weights: &WeightSequence,
    seq: &BoundedSequence,
    n: usize,
) -> Result<PointSum> {
    check_depth(weights, n)?;
    let d = seq.dimension();
    let distinct = seq.distinct_points();
    let mut acc = vec![CompensatedSum::new(); d];
    for i in 1..=n {
        let w = weights.weight_at(i)?;
        for (a, x) in acc.iter_mut().zip(seq.point(i)) {
            a.add(w * x);
        }
    }
    for (mass, idx) in tail_pieces(weights, seq, n)? {
        for (a, x) in acc.iter_mut().zip(distinct[idx]) {
            a.add(mass * x);
        }
    }
    Ok(PointSum {
        point: acc.iter().map(CompensatedSum::value).collect(),
        error_radius: ROUNDING_FACTOR * seq.bound().max(f64::MIN_POSITIVE),
    })
}

/// `Σ μᵢ f(xᵢ)` after `N` explicit terms, with the tail resolved from the
/// sequence generator.
pub fn weighted_function_series(
    weights: &WeightSequence,
    f: &ScalarFunction,
    seq: &BoundedSequence,
    n: usize,
) -> Result<SeriesEstimate> {
    check_depth(weights, n)?;
    ensure_dimension(seq.point(1), f.arity())?;
    let values = seq
        .distinct_points()
        .into_iter()
        .map(|p| f.eval(p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut partial = CompensatedSum::new();
    let mut abs_mass = CompensatedSum::new();
    for i in 1..=n {
        let term = weights.weight_at(i)? * values[seq.distinct_index(i)];
        partial.add(term);
        abs_mass.add(term.abs());
    }
    let mut tail = CompensatedSum::new();
    for (mass, idx) in tail_pieces(weights, seq, n)? {
        let term = mass * values[idx];
        tail.add(term);
        abs_mass.add(term.abs());
    }
    let center = tail.value();
    let radius = ROUNDING_FACTOR * abs_mass.value();
    Ok(SeriesEstimate::convergent(
        partial.value(),
        n,
        center,
        radius,
        center.abs() + radius,
    ))
}

/// `Σ μᵢ f(xᵢ)` for an arbitrary sequence `i ↦ xᵢ` with `‖xᵢ‖ ≤ bound`.
///
/// Without a closed-form tail the estimate uses the declared lower bound `B` of
/// `f` and an interval-arithmetic upper bound `U` over `[−K, K]^d`.
pub fn weighted_function_series_opaque(
    weights: &WeightSequence,
    f: &ScalarFunction,
    point_at: impl Fn(usize) -> Point,
    bound: f64,
    n: usize,
) -> Result<SeriesEstimate> {
    check_depth(weights, n)?;
    let mut partial = CompensatedSum::new();
    let mut shifted = CompensatedSum::new();
    let mut abs_mass = CompensatedSum::new();
    let lower = f.lower_bound();
    for i in 1..=n {
        let x = point_at(i);
        ensure_dimension(&x, f.arity())?;
        let w = weights.weight_at(i)?;
        let v = f.eval(&x)?;
        partial.add(w * v);
        abs_mass.add((w * v).abs());
        if let Some(b) = lower {
            shifted.add(w * (v - b));
        }
    }
    let partial = partial.value();
    if lower.is_some() && shifted.value() > DIVERGENCE_THRESHOLD {
        return Ok(SeriesEstimate::divergent(partial, n));
    }
    let upper = f.upper_bound_on_box(&vec![(-bound, bound); f.arity()]);
    match (lower, upper) {
        (Some(b), Some(u)) => {
            let tail = weights.tail_mass(n + 1)?;
            let center = 0.5 * (b + u) * tail;
            let radius = 0.5 * (u - b) * tail + ROUNDING_FACTOR * abs_mass.value();
            let tail_bound = b.abs().max(u.abs()) * tail + ROUNDING_FACTOR * abs_mass.value();
            Ok(SeriesEstimate::convergent(
                partial, n, center, radius, tail_bound,
            ))
        }
        _ => Ok(SeriesEstimate::unbounded(partial, n)),
    }
}

/// `(f(x))₊ + (f(y))₊`, an upper bound for a convex `f` on the segment `[x, y]`.
pub fn segment_upper_bound(f: &ScalarFunction, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(positive_part(f.eval(x)?)? + positive_part(f.eval(y)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcparse::{builtin, parse_function};
    use std::f64::consts::E;

    fn geo(r: f64) -> WeightSequence {
        WeightSequence::geometric(r).unwrap()
    }

    #[test]
    fn constant_point_series() {
        let x = BoundedSequence::constant(vec![3.0]).unwrap();
        for n in [1usize, 5, 20] {
            let s = weighted_point_series(&geo(0.5), &x, n).unwrap();
            let t = 0.5f64.powi(n as i32);
            assert!((s.point[0] - 3.0 * (1.0 - t)).abs() < 1e-15);
            assert!(s.error_radius >= 3.0 * t && s.error_radius - 3.0 * t < 1e-13);
        }
    }

    #[test]
    fn single_nonzero_term() {
        let x = BoundedSequence::finite_support(vec![vec![1.0]], vec![0.0]).unwrap();
        let s = weighted_point_series(&geo(0.5), &x, 1).unwrap();
        assert_eq!(s.point, vec![0.5]);
        assert!(s.error_radius >= 0.5 && s.error_radius < 0.5 + 1e-13);
        let r = resolved_point_sum(&geo(0.5), &x, 1).unwrap();
        assert_eq!(r.point, vec![0.5]);
        assert!(r.error_radius < 1e-13);
    }

    #[test]
    fn periodic_point_series_against_brute_force() {
        // oracle: brute-force partial sums to 60 terms
        let brute: f64 = (1..=60)
            .filter(|i| i % 2 == 0)
            .map(|i| 0.5f64.powi(i))
            .sum();
        let x = BoundedSequence::periodic(vec![vec![0.0], vec![1.0]]).unwrap();
        let s = weighted_point_series(&geo(0.5), &x, 20).unwrap();
        let brute20: f64 = (1..=20)
            .filter(|i| i % 2 == 0)
            .map(|i| 0.5f64.powi(i))
            .sum();
        assert!((s.point[0] - brute20).abs() < 1e-16);
        assert!((s.point[0] - brute).abs() <= s.error_radius);
        assert!((s.point[0] - 1.0 / 3.0).abs() < 2f64.powi(-20));
        let r = resolved_point_sum(&geo(0.5), &x, 20).unwrap();
        assert!((r.point[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn remark_right_hand_side() {
        let mu = geo(2.0 / 3.0);
        let x = BoundedSequence::finite_support(vec![vec![1.0]], vec![0.0]).unwrap();
        let f = builtin("exp").unwrap();
        let expected = 1.0 + (E - 1.0) / 3.0;
        let est = weighted_function_series(&mu, &f, &x, mu.default_depth()).unwrap();
        assert_eq!(est.classification, Classification::ConvergentWithBound);
        assert!((est.value() - expected).abs() < 1e-14);
        assert!((est.value() - 1.5727606).abs() < 1e-7);
        assert!(est.lower() <= expected && expected <= est.upper());
    }

    #[test]
    fn zero_function() {
        let f = builtin("linear(0,0)").unwrap();
        let x = BoundedSequence::periodic(vec![vec![1.0], vec![-2.0]]).unwrap();
        let est = weighted_function_series(&geo(0.3), &f, &x, 7).unwrap();
        assert_eq!(est.partial_sum, 0.0);
        assert_eq!(est.tail_bound, 0.0);
    }

    #[test]
    fn square_on_constant() {
        let f = builtin("square").unwrap();
        let x = BoundedSequence::constant(vec![3.0]).unwrap();
        let est = weighted_function_series(&geo(0.5), &f, &x, 10).unwrap();
        assert!((est.partial_sum - 9.0 * (1.0 - 2f64.powi(-10))).abs() < 1e-14);
        assert!((est.tail_center - 9.0 * 2f64.powi(-10)).abs() < 1e-15);
        assert!(est.tail_bound >= 9.0 * 2f64.powi(-10));
    }

    #[test]
    fn evaluation_errors_propagate() {
        let f = parse_function("log(x)", 1).unwrap();
        let x = BoundedSequence::finite_support(vec![vec![1.0]], vec![0.0]).unwrap();
        assert!(matches!(
            weighted_function_series(&geo(0.5), &f, &x, 5),
            Err(Error::Eval(_))
        ));
    }

    #[test]
    fn opaque_sequences_use_bounds() {
        let mu = geo(0.5);
        let f = builtin("square").unwrap();
        // xᵢ = sin(i), bounded by 1
        let est =
            weighted_function_series_opaque(&mu, &f, |i| vec![(i as f64).sin()], 1.0, 30).unwrap();
        assert_eq!(est.classification, Classification::ConvergentWithBound);
        let brute: f64 = (1..=200)
            .map(|i| mu.weight_at(i).unwrap() * (i as f64).sin().powi(2))
            .sum();
        assert!(est.lower() <= brute && brute <= est.upper());
        assert!((est.partial_sum - brute).abs() <= est.tail_bound);

        // no lower bound → unbounded error
        let g = parse_function("x^2", 1).unwrap();
        let est =
            weighted_function_series_opaque(&mu, &g, |i| vec![(i as f64).sin()], 1.0, 30).unwrap();
        assert_eq!(est.classification, Classification::UnboundedError);
        assert!(est.tail_bound.is_infinite());
    }

    #[test]
    fn opaque_divergence_detected() {
        // f(x) = 1/x ≥ 0 on (0, 1] with xᵢ = μᵢ², so μᵢ f(xᵢ) = 1/μᵢ
        let mu = geo(0.5);
        let f = parse_function("1/x", 1).unwrap().with_lower_bound(0.0);
        let w = mu.clone();
        let est = weighted_function_series_opaque(
            &mu,
            &f,
            move |i| vec![w.weight_at(i).unwrap().powi(2)],
            1.0,
            60,
        )
        .unwrap();
        assert_eq!(est.classification, Classification::DivergesToPlusInfinity);
        assert_eq!(est.value(), f64::INFINITY);
    }

    #[test]
    fn segment_bounds() {
        let e = builtin("exp").unwrap();
        assert!((segment_upper_bound(&e, &[0.0], &[1.0]).unwrap() - (1.0 + E)).abs() < 1e-15);
        assert!((segment_upper_bound(&e, &[0.0], &[1.0]).unwrap() - 3.7182818).abs() < 1e-7);
        let n = builtin("neg-square").unwrap();
        assert_eq!(segment_upper_bound(&n, &[-2.0], &[2.0]).unwrap(), 0.0);
        let s = builtin("square").unwrap();
        assert_eq!(segment_upper_bound(&s, &[0.0], &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn depth_errors() {
        let x = BoundedSequence::constant(vec![1.0]).unwrap();
        let w = geo(0.5).with_max_depth(5).unwrap();
        assert!(weighted_point_series(&w, &x, 6).is_err());
        assert!(weighted_point_series(&w, &x, 0).is_err());
        assert!(weighted_point_series(&w, &x, 5).is_ok());
    }
}
