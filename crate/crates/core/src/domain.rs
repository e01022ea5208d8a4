//! Convex subsets of ℝ^d: intervals, boxes, closed balls and intersections
//! of half-spaces.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{distance, dot, ensure_dimension, norm, Point};

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Interval { lower: f64, upper: f64 },
    Box { lower: Point, upper: Point },
    Ball { center: Point, radius: f64 },
    HalfSpaces { constraints: Vec<HalfSpace> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct ConvexDomain {
    dimension: usize,
    shape: Shape,
    witness: Point,
}

/// JSON form of a [`ConvexDomain`].
///
/// `whole-space` is shorthand for an intersection of zero half-spaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval {
        lower: f64,
        upper: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    HalfSpaces {
        constraints: Vec<HalfSpace>,
        witness: Vec<f64>,
    },
    WholeSpace {
        dimension: usize,
    },
}

impl TryFrom<DomainSpec> for ConvexDomain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Interval { lower, upper } => Self::interval(lower, upper),
            DomainSpec::Box { lower, upper } => Self::boxed(lower, upper),
            DomainSpec::Ball { center, radius } => Self::ball(center, radius),
            DomainSpec::HalfSpaces {
                constraints,
                witness,
            } => Self::half_spaces(constraints, witness),
            DomainSpec::WholeSpace { dimension } => Self::whole_space(dimension),
        }
    }
}

impl From<ConvexDomain> for DomainSpec {
    fn from(d: ConvexDomain) -> Self {
        match d.shape {
            Shape::Interval { lower, upper } => DomainSpec::Interval { lower, upper },
            Shape::Box { lower, upper } => DomainSpec::Box { lower, upper },
            Shape::Ball { center, radius } => DomainSpec::Ball { center, radius },
            Shape::HalfSpaces { constraints } => DomainSpec::HalfSpaces {
                constraints,
                witness: d.witness,
            },
        }
    }
}

fn finite_all(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "{what} has non-finite entries"
        )))
    }
}

impl ConvexDomain {
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        finite_all(&[lower, upper], "interval")?;
        if lower > upper {
            return Err(Error::InvalidDomain(format!(
                "empty interval [{lower}, {upper}]"
            )));
        }
        Ok(Self {
            dimension: 1,
            shape: Shape::Interval { lower, upper },
            witness: vec![lower],
        })
    }

    pub fn boxed(lower: Point, upper: Point) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("box of dimension 0".into()));
        }
        ensure_dimension(&upper, lower.len())?;
        finite_all(&lower, "box lower corner")?;
        finite_all(&upper, "box upper corner")?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidDomain("box has lower > upper".into()));
        }
        Ok(Self {
            dimension: lower.len(),
            witness: lower.clone(),
            shape: Shape::Box { lower, upper },
        })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDomain("ball of dimension 0".into()));
        }
        finite_all(&center, "ball center")?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidDomain(format!("ball radius {radius}")));
        }
        Ok(Self {
            dimension: center.len(),
            witness: center.clone(),
            shape: Shape::Ball { center, radius },
        })
    }

    /// Intersection of `normal·x ≤ offset` constraints; `witness` must satisfy all of them.
    pub fn half_spaces(constraints: Vec<HalfSpace>, witness: Point) -> Result<Self> {
        if witness.is_empty() {
            return Err(Error::InvalidDomain("witness of dimension 0".into()));
        }
        finite_all(&witness, "witness")?;
        for h in &constraints {
            ensure_dimension(&h.normal, witness.len())?;
            finite_all(&h.normal, "half-space normal")?;
            finite_all(&[h.offset], "half-space offset")?;
        }
        let d = Self {
            dimension: witness.len(),
            shape: Shape::HalfSpaces { constraints },
            witness,
        };
        if !d.contains(&d.witness, 0.0)? {
            return Err(Error::InvalidDomain(
                "witness violates a half-space constraint".into(),
            ));
        }
        Ok(d)
    }

    /// ℝ^d, as the intersection of no half-spaces.
    pub fn whole_space(dimension: usize) -> Result<Self> {
        Self::half_spaces(Vec::new(), vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// A stored member point.
    pub fn witness(&self) -> &[f64] {
        &self.witness
    }

    /// Whether `x` lies within distance `tol` of the domain (per constraint for half-spaces).
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        ensure_dimension(x, self.dimension)?;
        if !(tol >= 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: tol,
                range: "tol >= 0",
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        Ok(match &self.shape {
            Shape::Interval { lower, upper } => x[0] >= lower - tol && x[0] <= upper + tol,
            Shape::Box { lower, upper } => {
                let excess: f64 = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&v, (&l, &u))| {
                        let e = (l - v).max(v - u).max(0.0);
                        e * e
                    })
                    .sum();
                excess.sqrt() <= tol
            }
            Shape::Ball { center, radius } => distance(x, center) <= radius + tol,
            Shape::HalfSpaces { constraints } => constraints
                .iter()
                .all(|h| dot(&h.normal, x) - h.offset <= tol * norm(&h.normal).max(1.0)),
        })
    }

    /// Bounded along every coordinate axis through the witness. Exact for
    /// intervals, boxes and balls; a necessary condition for half-spaces.
    pub fn is_bounded(&self) -> bool {
        !matches!(&self.shape, Shape::HalfSpaces { .. }) || self.chord_lengths_finite()
    }

    fn chord_lengths_finite(&self) -> bool {
        (0..self.dimension).all(|k| {
            let mut e = vec![0.0; self.dimension];
            e[k] = 1.0;
            self.chord(&self.witness, &e)
                .map(|(lo, hi)| lo.is_finite() && hi.is_finite())
                .unwrap_or(false)
        })
    }

    /// Parameter range `[lo, hi]` such that `x + τ·u` stays in the domain.
    /// Bounds may be infinite for unbounded domains.
    pub fn chord(&self, x: &[f64], u: &[f64]) -> Result<(f64, f64)> {
        ensure_dimension(x, self.dimension)?;
        ensure_dimension(u, self.dimension)?;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut clip = |a: f64, b: f64| {
            // a·τ ≤ b
            if a > 0.0 {
                hi = hi.min(b / a);
            } else if a < 0.0 {
                lo = lo.max(b / a);
            }
        };
        match &self.shape {
            Shape::Interval { lower, upper } => {
                clip(u[0], upper - x[0]);
                clip(-u[0], x[0] - lower);
            }
            Shape::Box { lower, upper } => {
                for k in 0..self.dimension {
                    clip(u[k], upper[k] - x[k]);
                    clip(-u[k], x[k] - lower[k]);
                }
            }
            Shape::Ball { center, radius } => {
                // |x − c + τu|² ≤ r²
                let w: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let a = dot(u, u);
                if a == 0.0 {
                    return Ok((lo, hi));
                }
                let b = dot(&w, u);
                let c = dot(&w, &w) - radius * radius;
                let disc = (b * b - a * c).max(0.0).sqrt();
                lo = (-b - disc) / a;
                hi = (-b + disc) / a;
            }
            Shape::HalfSpaces { constraints } => {
                for h in constraints {
                    clip(dot(&h.normal, u), h.offset - dot(&h.normal, x));
                }
            }
        }
        if lo > hi {
            // x slightly outside due to rounding
            let mid = 0.5 * (lo + hi);
            return Ok((mid, mid));
        }
        Ok((lo, hi))
    }

    /// Distinguished boundary points used to seed samplers and searches.
    pub fn extreme_points(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Interval { lower, upper } => {
                if lower == upper {
                    vec![vec![*lower]]
                } else {
                    vec![vec![*lower], vec![*upper]]
                }
            }
            Shape::Box { lower, upper } => {
                let d = self.dimension.min(10);
                (0..1usize << d)
                    .map(|mask| {
                        (0..self.dimension)
                            .map(|k| {
                                if k < d && mask >> k & 1 == 1 {
                                    upper[k]
                                } else {
                                    lower[k]
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
            Shape::Ball { center, radius } => {
                let mut pts = Vec::with_capacity(2 * self.dimension);
                for k in 0..self.dimension {
                    for sign in [-1.0, 1.0] {
                        let mut p = center.clone();
                        p[k] += sign * radius;
                        pts.push(p);
                    }
                }
                pts
            }
            Shape::HalfSpaces { .. } => vec![self.witness.clone()],
        }
    }

    /// Pairs of antipodal extreme points, used first in pairwise checks.
    pub fn extreme_pairs(&self) -> Vec<(Point, Point)> {
        match &self.shape {
            Shape::Interval { lower, upper } if lower < upper => {
                vec![(vec![*lower], vec![*upper])]
            }
            Shape::Box { lower, upper } if lower != upper => vec![(lower.clone(), upper.clone())],
            Shape::Ball { center, radius } if *radius > 0.0 => {
                let mut a = center.clone();
                let mut b = center.clone();
                a[0] -= radius;
                b[0] += radius;
                vec![(a, b)]
            }
            _ => Vec::new(),
        }
    }

    /// Draws `count` points: uniform on intervals, boxes and balls; hit-and-run
    /// from the witness for bounded half-space intersections.
    pub fn sample_points<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Point>> {
        match &self.shape {
            Shape::Interval { lower, upper } => Ok((0..count)
                .map(|_| vec![uniform(rng, *lower, *upper)])
                .collect()),
            Shape::Box { lower, upper } => Ok((0..count)
                .map(|_| {
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(&l, &u)| uniform(rng, l, u))
                        .collect()
                })
                .collect()),
            Shape::Ball { center, radius } => {
                let d = self.dimension as f64;
                Ok((0..count)
                    .map(|_| {
                        let dir = gaussian_direction(rng, self.dimension);
                        let r = radius * rng.gen::<f64>().powf(1.0 / d);
                        center.iter().zip(&dir).map(|(c, u)| c + r * u).collect()
                    })
                    .collect())
            }
            Shape::HalfSpaces { .. } => self.hit_and_run(count, rng),
        }
    }

    fn hit_and_run<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Point>> {
        const BURN_IN: usize = 64;
        const THINNING: usize = 8;
        let mut x = self.witness.clone();
        let mut out = Vec::with_capacity(count);
        let mut step = 0usize;
        while out.len() < count {
            let u = gaussian_direction(rng, self.dimension);
            let (lo, hi) = self.chord(&x, &u)?;
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Unsampleable(
                    "half-space intersection is unbounded".into(),
                ));
            }
            let tau = uniform(rng, lo, hi);
            for (xi, ui) in x.iter_mut().zip(&u) {
                *xi += tau * ui;
            }
            step += 1;
            if step > BURN_IN && step.is_multiple_of(THINNING) {
                out.push(x.clone());
            }
        }
        Ok(out)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        lo + (hi - lo) * rng.gen::<f64>()
    }
}

fn gaussian_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Point {
    loop {
        let v: Point = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
