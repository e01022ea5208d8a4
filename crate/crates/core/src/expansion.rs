//! Greedy rational expansions `t = Σ λᵢ qᵢ` with `qᵢ ∈ ℚ ∩ [0, 1]`.
//!
//! At step `n` the remainder `rₙ = t − Σ_{i<n} λᵢ qᵢ` must stay inside
//! `[0, tail_mass(n)]`; any `qₙ` in
//! `[max(0, (rₙ − tail_mass(n+1))/λₙ), min(1, rₙ/λₙ)]` keeps it there. Among the
//! admissible rationals the one with the smallest denominator is chosen, found
//! by a Stern–Brocot descent, with ties going to the numerator nearest the
//! interval midpoint.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{ensure_same_dimension, norm, Point};
use crate::sequence::{BoundedSequence, Generator};
use crate::sum::CompensatedSum;
use crate::weights::WeightSequence;

/// Tolerance of [`complement_identity_check`].
pub const COMPLEMENT_TOL: f64 = 1e-12;

/// A rational `numerator / denominator` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digit {
    pub numerator: u64,
    pub denominator: u64,
}

impl Digit {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for Digit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| format!("'{s}' is not a/b"))?;
        let numerator: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let denominator: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if denominator == 0 || numerator > denominator {
            return Err(format!("'{s}' is not a rational in [0, 1]"));
        }
        Ok(Digit {
            numerator,
            denominator,
        })
    }
}

impl Serialize for Digit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Digit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalExpansion {
    pub target: f64,
    pub digits: Vec<Digit>,
    /// `r₁ = t, …, r_{N+1}`; `rₙ` is the remainder before step `n`.
    pub remainders: Vec<f64>,
    pub depth: usize,
}

impl RationalExpansion {
    /// `Σ_{i≤N} λᵢ qᵢ`.
    pub fn reconstruction(&self, weights: &WeightSequence) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for (i, q) in self.digits.iter().enumerate() {
            acc.add(weights.weight_at(i + 1)? * q.value());
        }
        Ok(acc.value())
    }

    /// `r_{N+1}`.
    pub fn final_remainder(&self) -> f64 {
        *self.remainders.last().expect("remainders are never empty")
    }

    /// Checks `0 ≤ rₙ ≤ tail_mass(n)` for every stored remainder.
    pub fn windows_hold(&self, weights: &WeightSequence) -> Result<bool> {
        for (i, &r) in self.remainders.iter().enumerate() {
            if !(r >= 0.0 && r <= weights.tail_mass(i + 1)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds the greedy expansion of `t` to depth `N`.
pub fn lambda_expand(
    weights: &WeightSequence,
    t: f64,
    depth: usize,
    denominator_bound: u64,
) -> Result<RationalExpansion> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        });
    }
    if denominator_bound < 2 {
        return Err(Error::OutOfRange {
            name: "denominator_bound",
            value: denominator_bound as f64,
            range: ">= 2",
        });
    }
    if depth == 0 || depth > weights.max_depth() {
        return Err(Error::DepthExceeded {
            index: depth,
            max_depth: weights.max_depth(),
        });
    }
    let mut remainders = Vec::with_capacity(depth + 1);
    let mut digits = Vec::with_capacity(depth);
    let mut r = t;
    remainders.push(r);
    for n in 1..=depth {
        let lambda = weights.weight_at(n)?;
        let next_tail = weights.tail_mass(n + 1)?;
        let mut lo = ((r - next_tail) / lambda).clamp(0.0, 1.0);
        let hi = (r / lambda).clamp(0.0, 1.0);
        if lo > hi {
            // r ≤ λₙ + tail_mass(n+1) analytically; only rounding can get here
            if lo - hi > 1e-12 {
                return Err(Error::InfeasibleStep {
                    step: n,
                    lower: lo,
                    upper: hi,
                    denominator_bound,
                });
            }
            lo = hi;
        }
        let digit = simplest_in(lo, hi, denominator_bound).ok_or(Error::InfeasibleStep {
            step: n,
            lower: lo,
            upper: hi,
            denominator_bound,
        })?;
        let step = lambda * digit.numerator as f64 / digit.denominator as f64;
        r = (r - step).clamp(0.0, next_tail);
        digits.push(digit);
        remainders.push(r);
    }
    Ok(RationalExpansion {
        target: t,
        digits,
        remainders,
        depth,
    })
}

fn at_least(a: u64, b: u64, lo: f64) -> bool {
    a as f64 >= lo * b as f64
}

fn at_most(a: u64, b: u64, hi: f64) -> bool {
    a as f64 <= hi * b as f64
}

/// Smallest-denominator rational in `[lo, hi] ⊆ [0, 1]` with denominator at most
/// `bound`, numerator nearest the midpoint (smaller numerator on exact ties).
pub fn simplest_in(lo: f64, hi: f64, bound: u64) -> Option<Digit> {
    if !(lo <= hi) || lo > 1.0 || hi < 0.0 || bound == 0 {
        return None;
    }
    let b = smallest_denominator(lo, hi, bound)?;
    let mid = 0.5 * (lo + hi) * b as f64;
    let first = (lo * b as f64).ceil().max(0.0) as u64;
    let last = ((hi * b as f64).floor() as u64).min(b);
    (first.saturating_sub(1)..=last + 1)
        .filter(|&a| a <= b && at_least(a, b, lo) && at_most(a, b, hi))
        .min_by(|&x, &y| {
            let dx = (x as f64 - mid).abs();
            let dy = (y as f64 - mid).abs();
            dx.total_cmp(&dy).then(x.cmp(&y))
        })
        .map(|a| Digit {
            numerator: a,
            denominator: b,
        })
}

fn smallest_denominator(lo: f64, hi: f64, bound: u64) -> Option<u64> {
    if lo <= 0.0 || hi >= 1.0 {
        return Some(1);
    }
    // Stern–Brocot descent between 0/1 and 1/1; every fraction strictly
    // between the current bounds has denominator ≥ ld + rd.
    let (mut ln, mut ld) = (0u64, 1u64);
    let (mut rn, mut rd) = (1u64, 1u64);
    loop {
        let (mn, md) = (ln + rn, ld + rd);
        if md > bound {
            return None;
        }
        if !at_least(mn, md, lo) {
            // advance the left bound: largest k with (ln + k·rn)/(ld + k·rd) < lo
            let below = |k: u64| !at_least(ln + k * rn, ld + k * rd, lo);
            let cap = (bound - ld) / rd;
            let guess = ((lo * ld as f64 - ln as f64) / (rn as f64 - lo * rd as f64)).floor();
            let mut k = (guess.max(1.0) as u64).min(cap).max(1);
            while k > 1 && !below(k) {
                k -= 1;
            }
            while k < cap && below(k + 1) {
                k += 1;
            }
            ln += k * rn;
            ld += k * rd;
        } else if !at_most(mn, md, hi) {
            // advance the right bound: largest k with (rn + k·ln)/(rd + k·ld) > hi
            let above = |k: u64| !at_most(rn + k * ln, rd + k * ld, hi);
            let cap = (bound - rd) / ld;
            let guess = ((rn as f64 - hi * rd as f64) / (hi * ld as f64 - ln as f64)).floor();
            let mut k = (guess.max(1.0) as u64).min(cap).max(1);
            while k > 1 && !above(k) {
                k -= 1;
            }
            while k < cap && above(k + 1) {
                k += 1;
            }
            rn += k * ln;
            rd += k * ld;
        } else {
            return Some(md);
        }
    }
}

/// Whether `Σ_{i≤N} λᵢ(1 − qᵢ)` plus the residual bracket `[0, tail_mass(N+1)]`
/// contains `1 − t`.
pub fn complement_identity_check(expansion: &RationalExpansion, weights: &WeightSequence) -> bool {
    let complement = || -> Result<bool> {
        let mut acc = CompensatedSum::new();
        for (i, q) in expansion.digits.iter().enumerate() {
            acc.add(weights.weight_at(i + 1)? * (1.0 - q.value()));
        }
        let residual = (1.0 - expansion.target) - acc.value();
        let tail = weights.tail_mass(expansion.depth + 1)?;
        Ok(residual >= -COMPLEMENT_TOL && residual <= tail + COMPLEMENT_TOL)
    };
    complement().unwrap_or(false)
}

/// The sequence `zᵢ = qᵢ·x + (1 − qᵢ)·y` for `i ≤ N`, then `y` forever.
pub fn combination_pushforward(
    expansion: &RationalExpansion,
    x: &[f64],
    y: &[f64],
) -> Result<BoundedSequence> {
    ensure_same_dimension(x, y)?;
    let points: Vec<Point> = expansion
        .digits
        .iter()
        .map(|q| {
            let q = q.value();
            x.iter()
                .zip(y)
                .map(|(a, b)| q * a + (1.0 - q) * b)
                .collect()
        })
        .collect();
    let needed = points.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let bound = norm(x).max(norm(y)).max(needed);
    BoundedSequence::new(
        Generator::FiniteSupport {
            points,
            fill: y.to_vec(),
        },
        Some(bound),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::weighted_point_series;

    fn half() -> WeightSequence {
        WeightSequence::geometric(0.5).unwrap()
    }

    fn digit(a: u64, b: u64) -> Digit {
        Digit {
            numerator: a,
            denominator: b,
        }
    }

    /// Brute-force smallest-denominator search, independent of the descent.
    fn brute_simplest(lo: f64, hi: f64, bound: u64) -> Option<u64> {
        (1..=bound).find(|&b| (0..=b).any(|a| at_least(a, b, lo) && at_most(a, b, hi)))
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_in(0.3, 0.4, 100), Some(digit(1, 3)));
        assert_eq!(simplest_in(0.0, 0.2, 100), Some(digit(0, 1)));
        assert_eq!(simplest_in(0.9, 1.0, 100), Some(digit(1, 1)));
        assert_eq!(simplest_in(0.5, 0.5, 100), Some(digit(1, 2)));
        assert_eq!(simplest_in(0.6180339, 0.6180340, 10), None);
        assert_eq!(
            simplest_in(1e-4, 2e-4, 100_000).map(|d| d.denominator),
            Some(5000)
        );
        // tie between 0/1 and 1/1 goes to the smaller numerator
        assert_eq!(simplest_in(0.0, 1.0, 10), Some(digit(0, 1)));
        // several numerators with the minimal denominator: nearest the midpoint
        assert_eq!(simplest_in(0.2, 0.85, 10), Some(digit(1, 2)));
    }

    #[test]
    fn descent_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let a: f64 = rng.gen();
            let w: f64 = rng.gen::<f64>() * 10f64.powi(-rng.gen_range(0..5));
            let (lo, hi) = (a, (a + w).min(1.0));
            let bound = rng.gen_range(2..300);
            assert_eq!(
                smallest_denominator(lo, hi, bound),
                brute_simplest(lo, hi, bound),
                "[{lo}, {hi}] bound {bound}"
            );
        }
    }

    #[test]
    fn zero_and_full_targets() {
        let e = lambda_expand(&half(), 0.0, 10, 64).unwrap();
        assert!(e.digits.iter().all(|q| q.numerator == 0));
        assert!(e.remainders.iter().all(|&r| r == 0.0));
        let e = lambda_expand(&half(), 1.0, 10, 64).unwrap();
        assert!(e.digits.iter().all(|q| q.numerator == q.denominator));
        assert!(complement_identity_check(&e, &half()));
    }

    #[test]
    fn one_third_expansion() {
        let w = half();
        let e = lambda_expand(&w, 1.0 / 3.0, 20, 1024).unwrap();
        assert!((1.0 / 3.0 - e.reconstruction(&w).unwrap()).abs() <= 2f64.powi(-20));
        assert!(e.windows_hold(&w).unwrap());
        assert!(complement_identity_check(&e, &w));
        assert_eq!(e.remainders.len(), 21);
        assert_eq!(e.remainders[0], 1.0 / 3.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            lambda_expand(&half(), 1.5, 10, 64),
            Err(Error::OutOfRange { name: "t", .. })
        ));
        assert!(lambda_expand(&half(), f64::NAN, 10, 64).is_err());
        assert!(lambda_expand(&half(), 0.5, 10, 1).is_err());
        assert!(lambda_expand(&half(), 0.5, 0, 64).is_err());
    }

    #[test]
    fn thin_windows_report_infeasibility() {
        // λ₁ = 0.999 leaves a window of width ≈ 0.001/0.999 at the first step
        let w = WeightSequence::geometric(0.001).unwrap();
        let err = lambda_expand(&w, 0.3, 5, 4).unwrap_err();
        assert!(
            matches!(err, Error::InfeasibleStep { step: 1, .. }),
            "{err:?}"
        );
        assert!(lambda_expand(&w, 0.3, 5, 4096).is_ok());
    }

    #[test]
    fn complement_check_detects_tampering() {
        let w = half();
        let mut e = lambda_expand(&w, 0.3, 20, 256).unwrap();
        assert!(complement_identity_check(&e, &w));
        e.target = 0.4;
        assert!(!complement_identity_check(&e, &w));
    }

    #[test]
    fn pushforward_endpoints() {
        let w = half();
        let one = lambda_expand(&w, 1.0, 8, 64).unwrap();
        let s = combination_pushforward(&one, &[2.0, -1.0], &[0.0, 3.0]).unwrap();
        for i in 1..=8 {
            assert_eq!(s.point(i), &[2.0, -1.0]);
        }
        let zero = lambda_expand(&w, 0.0, 8, 64).unwrap();
        let s = combination_pushforward(&zero, &[2.0, -1.0], &[0.0, 3.0]).unwrap();
        for i in 1..=20 {
            assert_eq!(s.point(i), &[0.0, 3.0]);
        }
        assert!(combination_pushforward(&zero, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pushforward_recovers_combination() {
        let w = half();
        let e = lambda_expand(&w, 1.0 / 3.0, 30, 1024).unwrap();
        let s = combination_pushforward(&e, &[0.0], &[1.0]).unwrap();
        for i in 1..=40 {
            let z = s.point(i)[0];
            assert!((0.0..=1.0).contains(&z));
        }
        let sum = weighted_point_series(&w, &s, 30).unwrap();
        let tail = w.tail_mass(31).unwrap();
        assert!((sum.point[0] - 2.0 / 3.0).abs() <= s.bound() * tail + 1e-12);
    }

    #[test]
    fn json_digits_are_strings() {
        let e = lambda_expand(&half(), 0.25, 3, 16).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert!(v["digits"][0].is_string());
        let back: RationalExpansion = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
        assert!("3/2".parse::<Digit>().is_err());
        assert!("1/0".parse::<Digit>().is_err());
    }
}
