//! Counterexample search for `f(Σ λᵢxᵢ) ≤ Σ μᵢ f(xᵢ)` when `λ ≠ μ`.
//!
//! Candidates are finite-support sequences: `support_size` free points in the
//! domain followed by the domain witness repeated forever.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checkers::{infinite_combination_report, Status, DEFAULT_TOL};
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::funcparse::ScalarFunction;
use crate::point::{norm, Point};
use crate::sequence::BoundedSequence;
use crate::weights::WeightSequence;

pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SWEEPS: usize = 3;
/// Half-width of the line search along directions where the domain is unbounded.
pub const UNBOUNDED_STEP: f64 = 4.0;
const GOLDEN_ITERS: usize = 24;

/// `(e^{λ₁} − 1)/(e − 1) > μ₁`: under this condition exp violates the
/// infinite inequality at `x₁ = 1`, `xᵢ = 0` for `i ≥ 2`.
pub fn exp_condition(lambda1: f64, mu1: f64) -> Result<bool> {
    for (name, v) in [("lambda1", lambda1), ("mu1", mu1)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "(0, 1)",
            });
        }
    }
    Ok(lambda1.exp_m1() / (E - 1.0) > mu1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    SeededPattern,
    Restart,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchTrace {
    pub source: WitnessSource,
    /// Seeded patterns evaluated, including the one that produced the witness.
    pub seeded_patterns: usize,
    pub restarts: usize,
    pub sweeps: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleWitness {
    pub sequence: BoundedSequence,
    pub depth: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub trace: SearchTrace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub support_size: usize,
    /// Maximum number of objective evaluations.
    pub budget: usize,
    pub seed: u64,
    pub restarts: usize,
    pub sweeps: usize,
    pub tol: f64,
    /// Series depth; defaults to the larger of the support size and `λ`'s default depth.
    pub depth: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            support_size: 1,
            budget: DEFAULT_BUDGET,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            sweeps: DEFAULT_SWEEPS,
            tol: DEFAULT_TOL,
            depth: None,
        }
    }
}

/// Reported after the seeded phase and after each restart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchProgress {
    /// 0 for the seeded phase, then the 1-based restart index.
    pub restart: usize,
    pub best_gap: f64,
    pub evaluations: usize,
}

struct Objective<'a> {
    f: &'a ScalarFunction,
    domain: &'a ConvexDomain,
    lambda: &'a WeightSequence,
    mu: &'a WeightSequence,
    fill: Point,
    depth: usize,
    tol: f64,
    evaluations: usize,
    budget: usize,
}

struct Evaluation {
    /// `lhs − lhs_error − rhs_upper`, or −∞ for aborted candidates.
    certified: f64,
    violation: Option<(BoundedSequence, f64, f64, f64)>,
}

impl Objective<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    fn eval(&mut self, points: &[Point]) -> Result<Evaluation> {
        self.evaluations += 1;
        let aborted = Evaluation {
            certified: f64::NEG_INFINITY,
            violation: None,
        };
        let seq = match BoundedSequence::finite_support(points.to_vec(), self.fill.clone()) {
            Ok(s) => s,
            Err(_) => return Ok(aborted),
        };
        let report = match infinite_combination_report(
            self.f,
            self.domain,
            self.lambda,
            self.mu,
            &seq,
            self.depth,
            self.tol,
        ) {
            Ok(r) => r,
            Err(Error::Precondition(_)) => return Ok(aborted),
            Err(e) => return Err(e),
        };
        let Some(rhs) = report.rhs_estimate.as_ref() else {
            return Ok(aborted);
        };
        if report.verdict.status == Status::Inconclusive {
            return Ok(aborted);
        }
        let certified = report.lhs - report.lhs_error - rhs.upper();
        let violation = (report.verdict.status == Status::Violated).then_some((
            seq,
            report.lhs,
            report.rhs,
            report.verdict.gap,
        ));
        Ok(Evaluation {
            certified: if certified.is_nan() {
                f64::NEG_INFINITY
            } else {
                certified
            },
            violation,
        })
    }
}

/// Seeded patterns first (one free point at an extreme point of the domain, the
/// others at the fill), then coordinate ascent from random starts with a
/// golden-section search along each coordinate. Returns the first sequence whose
/// gap is certified above `tol`, or `None` once the budget or restarts run out.
#[allow(clippy::too_many_arguments)]
pub fn find_counterexample(
    f: &ScalarFunction,
    domain: &ConvexDomain,
    lambda: &WeightSequence,
    mu: &WeightSequence,
    opts: SearchOptions,
    mut progress: impl FnMut(&SearchProgress),
) -> Result<Option<CounterexampleWitness>> {
    if opts.support_size == 0 {
        return Err(Error::OutOfRange {
            name: "support_size",
            value: 0.0,
            range: ">= 1",
        });
    }
    if opts.budget == 0 {
        return Err(Error::OutOfRange {
            name: "budget",
            value: 0.0,
            range: ">= 1",
        });
    }
    if f.arity() != domain.dimension() {
        return Err(Error::DimensionMismatch {
            expected: domain.dimension(),
            found: f.arity(),
        });
    }
    let depth = opts
        .depth
        .unwrap_or_else(|| lambda.default_depth().max(opts.support_size));
    let fill = domain.witness().to_vec();
    let mut obj = Objective {
        f,
        domain,
        lambda,
        mu,
        fill: fill.clone(),
        depth,
        tol: opts.tol,
        evaluations: 0,
        budget: opts.budget,
    };
    let mut trace = SearchTrace {
        source: WitnessSource::SeededPattern,
        seeded_patterns: 0,
        restarts: 0,
        sweeps: 0,
        evaluations: 0,
    };
    let found = |v: (BoundedSequence, f64, f64, f64), trace: &SearchTrace, evaluations| {
        let (sequence, lhs, rhs, gap) = v;
        Some(CounterexampleWitness {
            sequence,
            depth,
            lhs,
            rhs,
            gap,
            trace: SearchTrace {
                evaluations,
                ..trace.clone()
            },
        })
    };

    let mut best = f64::NEG_INFINITY;
    for pattern in seeded_patterns(domain, &fill, opts.support_size) {
        if obj.exhausted() {
            break;
        }
        trace.seeded_patterns += 1;
        let e = obj.eval(&pattern)?;
        best = best.max(e.certified);
        if let Some(v) = e.violation {
            return Ok(found(v, &trace, obj.evaluations));
        }
    }
    progress(&SearchProgress {
        restart: 0,
        best_gap: best,
        evaluations: obj.evaluations,
    });

    trace.source = WitnessSource::Restart;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dim = domain.dimension();
    for restart in 1..=opts.restarts {
        if obj.exhausted() {
            break;
        }
        trace.restarts = restart;
        trace.sweeps = 0;
        let mut points = random_start(domain, &fill, opts.support_size, &mut rng)?;
        let mut current = obj.eval(&points)?;
        if let Some(v) = current.violation.take() {
            return Ok(found(v, &trace, obj.evaluations));
        }
        'sweeps: for sweep in 1..=opts.sweeps {
            trace.sweeps = sweep;
            for k in 0..opts.support_size {
                for j in 0..dim {
                    if obj.exhausted() {
                        break 'sweeps;
                    }
                    let mut axis = vec![0.0; dim];
                    axis[j] = 1.0;
                    let (lo, hi) = domain.chord(&points[k], &axis)?;
                    let (lo, hi) = (lo.max(-UNBOUNDED_STEP), hi.min(UNBOUNDED_STEP));
                    if !(hi > lo) {
                        continue;
                    }
                    let (step, e) = golden_section(&mut obj, &mut points, k, j, lo, hi)?;
                    if let Some(v) = e.violation {
                        return Ok(found(v, &trace, obj.evaluations));
                    }
                    if e.certified > current.certified {
                        points[k][j] += step;
                        current = e;
                    }
                }
            }
        }
        best = best.max(current.certified);
        progress(&SearchProgress {
            restart,
            best_gap: best,
            evaluations: obj.evaluations,
        });
    }
    Ok(None)
}

/// Maximizes the objective over `points[k][j] + step`, `step ∈ [lo, hi]`,
/// leaving `points` unchanged. Endpoints are evaluated too, since violations of
/// convexity-type inequalities tend to sit on the boundary.
fn golden_section(
    obj: &mut Objective<'_>,
    points: &mut [Point],
    k: usize,
    j: usize,
    lo: f64,
    hi: f64,
) -> Result<(f64, Evaluation)> {
    let base = points[k][j];
    let probe = |obj: &mut Objective<'_>, points: &mut [Point], step: f64| {
        points[k][j] = base + step;
        let e = obj.eval(points);
        points[k][j] = base;
        e
    };
    let mut best_step = lo;
    let mut best = probe(obj, points, lo)?;
    let consider = |step: f64, e: Evaluation, best_step: &mut f64, best: &mut Evaluation| {
        if e.violation.is_some() && best.violation.is_none() || e.certified > best.certified {
            *best_step = step;
            *best = e;
        }
    };
    if best.violation.is_some() || obj.exhausted() {
        return Ok((best_step, best));
    }
    let e = probe(obj, points, hi)?;
    consider(hi, e, &mut best_step, &mut best);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = None;
    let mut fd = None;
    for _ in 0..GOLDEN_ITERS {
        if best.violation.is_some() || obj.exhausted() {
            break;
        }
        let vc = match fc.take() {
            Some(v) => v,
            None => {
                let e = probe(obj, points, c)?;
                let v = e.certified;
                consider(c, e, &mut best_step, &mut best);
                v
            }
        };
        if best.violation.is_some() || obj.exhausted() {
            break;
        }
        let vd = match fd.take() {
            Some(v) => v,
            None => {
                let e = probe(obj, points, d)?;
                let v = e.certified;
                consider(d, e, &mut best_step, &mut best);
                v
            }
        };
        if vc >= vd {
            b = d;
            d = c;
            fd = Some(vc);
            c = b - g * (b - a);
        } else {
            a = c;
            c = d;
            fc = Some(vd);
            d = a + g * (b - a);
        }
    }
    Ok((best_step, best))
}

/// Indicator-like patterns: for each free position and each extreme point,
/// that position at the extreme point and every other position at the fill.
/// Patterns identical to the fill sequence are skipped.
fn seeded_patterns(domain: &ConvexDomain, fill: &[f64], support: usize) -> Vec<Vec<Point>> {
    let extremes = domain.extreme_points();
    let mut out = Vec::new();
    for k in 0..support {
        for e in &extremes {
            if e.as_slice() == fill {
                continue;
            }
            let mut pattern = vec![fill.to_vec(); support];
            pattern[k] = e.clone();
            out.push(pattern);
        }
    }
    out
}

fn random_start(
    domain: &ConvexDomain,
    fill: &[f64],
    support: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    if domain.is_bounded() {
        return domain.sample_points(support, rng);
    }
    // unbounded domains: a random step from the fill along a random direction
    let dim = fill.len();
    (0..support)
        .map(|_| {
            let mut u: Point = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if u.iter().all(|v| *v == 0.0) {
                u[0] = 1.0;
            }
            let n = norm(&u);
            u.iter_mut().for_each(|v| *v /= n);
            let (lo, hi) = domain.chord(fill, &u)?;
            let step = rng.gen_range(lo.max(-UNBOUNDED_STEP)..=hi.min(UNBOUNDED_STEP));
            Ok(fill.iter().zip(&u).map(|(a, b)| a + step * b).collect())
        })
        .collect()
}
