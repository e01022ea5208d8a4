//! Verdicts for the convexity inequalities.
//!
//! A `violated` verdict always carries a witness whose replay reproduces the
//! gap; `holds-on-samples` only ever means that no sampled input violated the
//! inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::domain::{ConvexDomain, DEFAULT_MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::expansion::{combination_pushforward, lambda_expand};
use crate::funcparse::{EvalError, ScalarFunction};
use crate::json_util::finite_or_null;
use crate::point::{convex_combination, distance, ensure_dimension, ConvexityParams, Point};
use crate::sequence::{BoundedSequence, Generator};
use crate::series::{
    resolved_point_sum, segment_upper_bound, weighted_function_series, Classification,
};
use crate::sum::CompensatedSum;
use crate::weights::WeightSequence;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    HoldsOnSamples,
    Violated,
    Inconclusive,
}

/// Inputs that reproduce a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `f(t·x + (1−t)·y) > s·f(x) + (1−s)·f(y)`.
    Pair {
        x: Point,
        y: Point,
        t: f64,
        s: f64,
    },
    Distribution {
        distribution: DiscreteDistribution,
    },
    Sequence {
        sequence: BoundedSequence,
        lambda: WeightSequence,
        mu: WeightSequence,
        depth: usize,
    },
}

impl Witness {
    /// Recomputes the gap `lhs − rhs` from scratch.
    pub fn replay(&self, f: &ScalarFunction) -> Result<f64> {
        match self {
            Witness::Pair { x, y, t, s } => {
                let z = convex_combination(x, y, *t)?;
                Ok(f.eval(&z)? - (s * f.eval(x)? + (1.0 - s) * f.eval(y)?))
            }
            Witness::Distribution { distribution } => {
                let lhs = f.eval(&distribution.mean())?;
                let rhs = distribution.expectation(|p| f.eval(p))?;
                Ok(lhs - rhs)
            }
            Witness::Sequence {
                sequence,
                lambda,
                mu,
                depth,
            } => match sequence.generator() {
                Generator::FiniteSupport { points, fill } => {
                    replay_finite_support(f, lambda, mu, points, fill)
                }
                _ => {
                    let c = resolved_point_sum(lambda, sequence, *depth)?;
                    let rhs = weighted_function_series(mu, f, sequence, *depth)?;
                    Ok(f.eval(&c.point)? - rhs.value())
                }
            },
        }
    }
}

/// `f(Σ_{i≤L} λᵢxᵢ + T_λ(L+1)·fill) − (Σ_{i≤L} μᵢ f(xᵢ) + T_μ(L+1)·f(fill))`.
fn replay_finite_support(
    f: &ScalarFunction,
    lambda: &WeightSequence,
    mu: &WeightSequence,
    points: &[Point],
    fill: &[f64],
) -> Result<f64> {
    let len = points.len();
    let mut lhs_point = Vec::with_capacity(fill.len());
    for k in 0..fill.len() {
        let mut acc = CompensatedSum::new();
        for (i, p) in points.iter().enumerate() {
            acc.add(lambda.weight_at(i + 1)? * p[k]);
        }
        acc.add(lambda.tail_mass(len + 1)? * fill[k]);
        lhs_point.push(acc.value());
    }
    let mut rhs = CompensatedSum::new();
    for (i, p) in points.iter().enumerate() {
        rhs.add(mu.weight_at(i + 1)? * f.eval(p)?);
    }
    rhs.add(mu.tail_mass(len + 1)? * f.eval(fill)?);
    Ok(f.eval(&lhs_point)? - rhs.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    /// Largest observed `lhs − rhs`; positive and above `tolerance` when violated.
    #[serde(serialize_with = "finite_or_null")]
    pub gap: f64,
    pub samples_checked: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn holds(gap: f64, samples_checked: usize, tolerance: f64) -> Self {
        Self {
            status: Status::HoldsOnSamples,
            witness: None,
            gap,
            samples_checked,
            tolerance,
            note: None,
        }
    }

    fn violated(witness: Witness, gap: f64, samples_checked: usize, tolerance: f64) -> Self {
        Self {
            status: Status::Violated,
            witness: Some(witness),
            gap,
            samples_checked,
            tolerance,
            note: None,
        }
    }

    fn inconclusive(note: impl Into<String>, samples_checked: usize, tolerance: f64) -> Self {
        Self {
            status: Status::Inconclusive,
            witness: None,
            gap: f64::NAN,
            samples_checked,
            tolerance,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }
}

fn eval_note(e: &EvalError) -> String {
    format!("evaluation failed: {e}")
}

/// Sampling configuration shared by the pairwise checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "finite, >= 0",
        });
    }
    Ok(())
}

fn check_arity(f: &ScalarFunction, domain: &ConvexDomain) -> Result<()> {
    if f.arity() != domain.dimension() {
        return Err(Error::DimensionMismatch {
            expected: domain.dimension(),
            found: f.arity(),
        });
    }
    Ok(())
}

/// `count` pairs from the domain: antipodal extreme pairs first, then
/// independent uniform draws seeded by `seed`.
pub fn sample_pairs(domain: &ConvexDomain, count: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
    let mut pairs: Vec<(Point, Point)> = domain.extreme_pairs().into_iter().take(count).collect();
    let remaining = count - pairs.len();
    if remaining > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = domain.sample_points(remaining, &mut rng)?;
        let ys = domain.sample_points(remaining, &mut rng)?;
        pairs.extend(xs.into_iter().zip(ys));
    }
    Ok(pairs)
}

/// Tests `f(t·x + (1−t)·y) ≤ s·f(x) + (1−s)·f(y) + tol` over `pairs` in order;
/// the first failure is the witness.
pub fn check_on_pairs(
    f: &ScalarFunction,
    pairs: &[(Point, Point)],
    params: ConvexityParams,
    tol: f64,
) -> Verdict {
    let (t, s) = (params.t(), params.s());
    let mut worst = f64::NEG_INFINITY;
    for (checked, (x, y)) in pairs.iter().enumerate() {
        let gap = (|| -> Result<f64, EvalError> {
            let z: Point = x
                .iter()
                .zip(y)
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect();
            Ok(f.eval(&z)? - (s * f.eval(x)? + (1.0 - s) * f.eval(y)?))
        })();
        match gap {
            Err(e) => return Verdict::inconclusive(eval_note(&e), checked, tol),
            Ok(g) if g > tol => {
                let witness = Witness::Pair {
                    x: x.clone(),
                    y: y.clone(),
                    t,
                    s,
                };
                return Verdict::violated(witness, g, checked + 1, tol);
            }
            Ok(g) => worst = worst.max(g),
        }
    }
    Verdict::holds(worst, pairs.len(), tol)
}

/// Samples `t`-convexity, `f(t·x + (1−t)·y) ≤ t·f(x) + (1−t)·f(y)`.
/// Every function is 0- and 1-convex, so those return immediately.
pub fn check_t_convexity(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    t: f64,
    opts: SampleOptions,
) -> Result<Verdict> {
    let params = ConvexityParams::symmetric(t)?;
    if t == 0.0 || t == 1.0 {
        check_tol(opts.tol)?;
        return Ok(Verdict::holds(0.0, 0, opts.tol).with_note("every function is 0- and 1-convex"));
    }
    check_ts_convexity(f, domain, params, opts)
}

/// Samples `(t, s)`-convexity, `f(t·x + (1−t)·y) ≤ s·f(x) + (1−s)·f(y)`.
pub fn check_ts_convexity(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    params: ConvexityParams,
    opts: SampleOptions,
) -> Result<Verdict> {
    check_tol(opts.tol)?;
    check_arity(f, domain)?;
    if opts.samples == 0 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: 0.0,
            range: ">= 1",
        });
    }
    let pairs = sample_pairs(domain, opts.samples, opts.seed)?;
    Ok(check_on_pairs(f, &pairs, params, opts.tol))
}

/// `f(E ξ) ≤ E f(ξ) + tol` for a finitely supported `ξ` with atoms in the domain.
pub fn check_jensen_discrete(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    dist: &DiscreteDistribution,
    tol: f64,
) -> Result<Verdict> {
    check_tol(tol)?;
    check_arity(f, domain)?;
    dist.check_in_domain(domain, DEFAULT_MEMBERSHIP_TOL)?;
    let mean = dist.mean();
    if !domain.contains(&mean, DEFAULT_MEMBERSHIP_TOL)? {
        return Ok(Verdict::inconclusive(
            format!("mean {mean:?} fell outside the domain"),
            1,
            tol,
        ));
    }
    let lhs = match f.eval(&mean) {
        Ok(v) => v,
        Err(e) => return Ok(Verdict::inconclusive(eval_note(&e), 0, tol)),
    };
    let rhs = match dist.expectation(|p| f.eval(p)) {
        Ok(v) => v,
        Err(e) => return Ok(Verdict::inconclusive(eval_note(&e), 0, tol)),
    };
    let gap = lhs - rhs;
    if gap > tol {
        let witness = Witness::Distribution {
            distribution: dist.clone(),
        };
        Ok(Verdict::violated(witness, gap, 1, tol))
    } else {
        Ok(Verdict::holds(gap, 1, tol))
    }
}

/// Both sides of `f(Σ λᵢxᵢ) ≤ Σ μᵢ f(xᵢ)` with their uncertainties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfiniteCombinationReport {
    pub verdict: Verdict,
    pub lhs_point: Point,
    #[serde(serialize_with = "finite_or_null")]
    pub lhs: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub lhs_error: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub rhs: f64,
    pub rhs_estimate: Option<crate::series::SeriesEstimate>,
}

/// Checks `f(Σ λᵢxᵢ) ≤ Σ μᵢ f(xᵢ)` for one bounded sequence.
pub fn check_infinite_combination(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    lambda: &WeightSequence,
    mu: &WeightSequence,
    seq: &BoundedSequence,
    depth: usize,
    tol: f64,
) -> Result<Verdict> {
    infinite_combination_report(f, domain, lambda, mu, seq, depth, tol).map(|r| r.verdict)
}

/// [`check_infinite_combination`] together with the computed sides.
pub fn infinite_combination_report(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    lambda: &WeightSequence,
    mu: &WeightSequence,
    seq: &BoundedSequence,
    depth: usize,
    tol: f64,
) -> Result<InfiniteCombinationReport> {
    check_tol(tol)?;
    check_arity(f, domain)?;
    seq.check_in_domain(domain, DEFAULT_MEMBERSHIP_TOL)?;
    let center = resolved_point_sum(lambda, seq, depth)?;
    let mut report = InfiniteCombinationReport {
        verdict: Verdict::inconclusive("", 0, tol),
        lhs_point: center.point.clone(),
        lhs: f64::NAN,
        lhs_error: f64::NAN,
        rhs: f64::NAN,
        rhs_estimate: None,
    };
    let inconclusive = |mut r: InfiniteCombinationReport, note: String| {
        r.verdict = Verdict::inconclusive(note, depth, tol);
        Ok(r)
    };
    if !domain.contains(&center.point, DEFAULT_MEMBERSHIP_TOL)? {
        return inconclusive(report, "combination point fell outside the domain".into());
    }
    let lhs_error = match f.lipschitz_on_ball(seq.bound() + center.error_radius) {
        Some(l) => l * center.error_radius,
        None if center.error_radius <= tol / 10.0 => 0.0,
        None => {
            return inconclusive(
                report,
                format!(
                    "combination point radius {} exceeds tol/10 and f has no known modulus",
                    center.error_radius
                ),
            )
        }
    };
    report.lhs_error = lhs_error;
    report.lhs = match f.eval(&center.point) {
        Ok(v) => v,
        Err(e) => return inconclusive(report, eval_note(&e)),
    };
    let rhs = match weighted_function_series(mu, f, seq, depth) {
        Ok(r) => r,
        Err(Error::Eval(e)) => return inconclusive(report, eval_note(&e)),
        Err(e) => return Err(e),
    };
    report.rhs = rhs.value();
    report.rhs_estimate = Some(rhs.clone());
    let lhs = report.lhs;
    report.verdict = match rhs.classification {
        Classification::DivergesToPlusInfinity => {
            Verdict::holds(f64::NEG_INFINITY, depth, tol).with_note("right side diverges to +inf")
        }
        Classification::UnboundedError => {
            Verdict::inconclusive("right side tail cannot be bounded", depth, tol)
        }
        Classification::ConvergentWithBound => {
            let gap = lhs - rhs.value();
            if lhs - lhs_error > rhs.upper() + tol {
                let witness = Witness::Sequence {
                    sequence: seq.clone(),
                    lambda: lambda.clone(),
                    mu: mu.clone(),
                    depth,
                };
                Verdict::violated(witness, gap, depth, tol)
            } else {
                Verdict::holds(gap, depth, tol)
            }
        }
    };
    Ok(report)
}

/// The three expressions of `f(t·a + (1−t)·b) ≤ Σ λᵢ f(xᵢ) ≤ t·f(a) + (1−t)·f(b)`
/// where `t` is fixed by `Σ λᵢ xᵢ = t·a + (1−t)·b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketReport {
    pub t_star: f64,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    /// Uncertainty of `mid`.
    pub mid_tail_bound: f64,
    /// `rhs − mid`
    pub margin_upper: f64,
    /// `mid − lhs`
    pub margin_lower: f64,
    pub sandwich_holds: bool,
    pub known_convex: bool,
}

pub fn pavic_bracket(
    f: &ScalarFunction,
    a: f64,
    b: f64,
    weights: &WeightSequence,
    seq: &BoundedSequence,
    depth: usize,
    tol: f64,
) -> Result<BracketReport> {
    check_tol(tol)?;
    if !(a < b) {
        return Err(Error::Precondition(format!(
            "degenerate interval [{a}, {b}]"
        )));
    }
    if f.arity() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.arity(),
        });
    }
    let domain = ConvexDomain::interval(a, b)?;
    seq.check_in_domain(&domain, DEFAULT_MEMBERSHIP_TOL)?;
    let m = resolved_point_sum(weights, seq, depth)?.point[0].clamp(a, b);
    let t_star = ((b - m) / (b - a)).clamp(0.0, 1.0);
    let lhs = f.eval(&[m])?;
    let estimate = weighted_function_series(weights, f, seq, depth)?;
    let mid = estimate.value();
    let unc = estimate.tail_radius;
    let rhs = t_star * f.eval(&[a])? + (1.0 - t_star) * f.eval(&[b])?;
    Ok(BracketReport {
        t_star,
        lhs,
        mid,
        rhs,
        mid_tail_bound: unc,
        margin_upper: rhs - mid,
        margin_lower: mid - lhs,
        sandwich_holds: lhs <= mid + unc + tol && mid <= rhs + unc + tol,
        known_convex: f.is_known_convex(),
    })
}

/// `(λ₁, μ₁)`: taking `x₁ = x` and `xᵢ = y` for `i ≥ 2` reduces the infinite
/// inequality to `(λ₁, μ₁)`-convexity.
pub fn reduction_to_ts(lambda: &WeightSequence, mu: &WeightSequence) -> ConvexityParams {
    ConvexityParams::new(lambda.first(), mu.first())
        .expect("first weights of admissible sequences lie in (0, 1)")
}

/// Steps of the expansion argument for one `(x, y, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofChainReport {
    /// `f(t·x + (1−t)·y)`
    pub target_value: f64,
    /// `Σ μᵢ f(zᵢ)` for the pushed-forward sequence.
    pub middle: f64,
    /// `(f(x))₊ + (f(y))₊`
    pub segment_bound: f64,
    /// Allowance for truncating the expansion and for rounding.
    pub slack: f64,
    pub first_holds: bool,
    pub second_holds: bool,
    pub verdict: Verdict,
}

/// Expands `t` in `λ`, pushes the digits forward onto `[x, y]`, checks the
/// infinite inequality for the resulting sequence, and compares the chain
/// `f(t·x + (1−t)·y) ≤ Σ μᵢ f(zᵢ) ≤ (f(x))₊ + (f(y))₊`.
#[allow(clippy::too_many_arguments)]
pub fn proof_pipeline(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    lambda: &WeightSequence,
    mu: &WeightSequence,
    x: &[f64],
    y: &[f64],
    t: f64,
    depth: usize,
    denominator_bound: u64,
    tol: f64,
) -> Result<ProofChainReport> {
    ensure_dimension(x, domain.dimension())?;
    ensure_dimension(y, domain.dimension())?;
    let expansion = lambda_expand(lambda, t, depth, denominator_bound)?;
    let z = combination_pushforward(&expansion, x, y)?;
    let report = infinite_combination_report(f, domain, lambda, mu, &z, depth, tol)?;
    let target = convex_combination(x, y, t)?;
    let target_value = f.eval(&target)?;
    // Σλᵢzᵢ differs from the target by at most r_{N+1}·‖x − y‖
    let drift = expansion.final_remainder() * distance(x, y);
    let modulus = f
        .lipschitz_on_ball(z.bound() + drift)
        .unwrap_or(f64::INFINITY);
    let rhs = report.rhs_estimate.as_ref().ok_or_else(|| {
        Error::Precondition(format!(
            "right side unavailable: {}",
            report.verdict.note.clone().unwrap_or_default()
        ))
    })?;
    let slack = modulus * drift + rhs.tail_radius + report.lhs_error;
    let middle = rhs.value();
    let segment_bound = segment_upper_bound(f, x, y)?;
    Ok(ProofChainReport {
        target_value,
        middle,
        segment_bound,
        slack,
        first_holds: target_value <= middle + slack + tol,
        second_holds: middle <= segment_bound + rhs.tail_radius + tol,
        verdict: report.verdict,
    })
}

/// Largest `|f(x) − f(y)|` over sampled pairs with `‖x − y‖ ≤ delta`.
/// A diagnostic only; it carries no verdict.
pub fn modulus_of_continuity(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_arity(f, domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = domain.sample_points(samples, &mut rng)?;
    let mut worst: f64 = 0.0;
    for x in xs {
        let dir = domain.sample_points(1, &mut rng)?.remove(0);
        let mut u: Point = dir.iter().zip(&x).map(|(a, b)| a - b).collect();
        let n = crate::point::norm(&u);
        if n == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|v| *v /= n);
        let (lo, hi) = domain.chord(&x, &u)?;
        let step = rng.gen_range(0.0..=delta).min(hi).max(lo.max(-delta));
        let y: Point = x.iter().zip(&u).map(|(a, b)| a + step * b).collect();
        worst = worst.max((f.eval(&x)? - f.eval(&y)?).abs());
    }
    Ok(worst)
}
