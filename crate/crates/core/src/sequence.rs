//! Bounded point sequences `x₁, x₂, …` with a declared norm bound `K`.

use serde::{Deserialize, Serialize};

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::point::{ensure_dimension, norm, Point, PointRepr};

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// The listed points, then `fill` forever.
    FiniteSupport {
        points: Vec<Point>,
        fill: Point,
    },
    /// The listed points, cycled.
    Periodic {
        points: Vec<Point>,
    },
    Constant {
        point: Point,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceSpec", into = "SequenceSpec")]
pub struct BoundedSequence {
    generator: Generator,
    bound: f64,
    dimension: usize,
}

/// JSON form of a [`BoundedSequence`]. Points may be written as bare numbers in
/// one dimension. A missing `bound` is computed from the points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    FiniteSupport {
        points: Vec<PointRepr>,
        fill: PointRepr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Periodic {
        points: Vec<PointRepr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Constant {
        point: PointRepr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
}

impl TryFrom<SequenceSpec> for BoundedSequence {
    type Error = Error;

    fn try_from(spec: SequenceSpec) -> Result<Self> {
        let conv = |v: Vec<PointRepr>| v.into_iter().map(Point::from).collect::<Vec<_>>();
        let (generator, bound) = match spec {
            SequenceSpec::FiniteSupport {
                points,
                fill,
                bound,
            } => (
                Generator::FiniteSupport {
                    points: conv(points),
                    fill: fill.into(),
                },
                bound,
            ),
            SequenceSpec::Periodic { points, bound } => (
                Generator::Periodic {
                    points: conv(points),
                },
                bound,
            ),
            SequenceSpec::Constant { point, bound } => (
                Generator::Constant {
                    point: point.into(),
                },
                bound,
            ),
        };
        Self::new(generator, bound)
    }
}

impl From<BoundedSequence> for SequenceSpec {
    fn from(s: BoundedSequence) -> Self {
        let conv = |v: Vec<Point>| v.into_iter().map(PointRepr::Vector).collect();
        let bound = Some(s.bound);
        match s.generator {
            Generator::FiniteSupport { points, fill } => SequenceSpec::FiniteSupport {
                points: conv(points),
                fill: PointRepr::Vector(fill),
                bound,
            },
            Generator::Periodic { points } => SequenceSpec::Periodic {
                points: conv(points),
                bound,
            },
            Generator::Constant { point } => SequenceSpec::Constant {
                point: PointRepr::Vector(point),
                bound,
            },
        }
    }
}

impl BoundedSequence {
    /// Validates dimensions and the declared bound; `None` computes the tightest bound.
    pub fn new(generator: Generator, bound: Option<f64>) -> Result<Self> {
        let pts: Vec<&Point> = match &generator {
            Generator::FiniteSupport { points, fill } => {
                points.iter().chain(std::iter::once(fill)).collect()
            }
            Generator::Periodic { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidSequence("empty period".into()));
                }
                points.iter().collect()
            }
            Generator::Constant { point } => vec![point],
        };
        let dimension = pts[0].len();
        if dimension == 0 {
            return Err(Error::InvalidSequence("points of dimension 0".into()));
        }
        for p in &pts {
            ensure_dimension(p, dimension)?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSequence("non-finite coordinate".into()));
            }
        }
        let needed = pts.iter().map(|p| norm(p)).fold(0.0, f64::max);
        let bound = match bound {
            Some(k) if !(k >= needed) => {
                return Err(Error::InvalidSequence(format!(
                    "declared bound {k} below max norm {needed}"
                )))
            }
            Some(k) if !k.is_finite() => {
                return Err(Error::InvalidSequence(format!("declared bound {k}")))
            }
            Some(k) => k,
            None => needed,
        };
        Ok(Self {
            generator,
            bound,
            dimension,
        })
    }

    pub fn finite_support(points: Vec<Point>, fill: Point) -> Result<Self> {
        Self::new(Generator::FiniteSupport { points, fill }, None)
    }

    pub fn periodic(points: Vec<Point>) -> Result<Self> {
        Self::new(Generator::Periodic { points }, None)
    }

    pub fn constant(point: Point) -> Result<Self> {
        Self::new(Generator::Constant { point }, None)
    }

    pub fn with_bound(self, bound: f64) -> Result<Self> {
        Self::new(self.generator, Some(bound))
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Declared `K` with `‖xᵢ‖ ≤ K` for all `i`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `xᵢ`, 1-based.
    pub fn point(&self, i: usize) -> &[f64] {
        assert!(i >= 1, "sequence indices start at 1");
        match &self.generator {
            Generator::FiniteSupport { points, fill } => points.get(i - 1).unwrap_or(fill),
            Generator::Periodic { points } => &points[(i - 1) % points.len()],
            Generator::Constant { point } => point,
        }
    }

    /// Position of `xᵢ` within [`distinct_points`](Self::distinct_points).
    pub fn distinct_index(&self, i: usize) -> usize {
        assert!(i >= 1, "sequence indices start at 1");
        match &self.generator {
            Generator::FiniteSupport { points, .. } => (i - 1).min(points.len()),
            Generator::Periodic { points } => (i - 1) % points.len(),
            Generator::Constant { .. } => 0,
        }
    }

    /// Every point the sequence can produce.
    pub fn distinct_points(&self) -> Vec<&[f64]> {
        match &self.generator {
            Generator::FiniteSupport { points, fill } => points
                .iter()
                .map(Vec::as_slice)
                .chain(std::iter::once(fill.as_slice()))
                .collect(),
            Generator::Periodic { points } => points.iter().map(Vec::as_slice).collect(),
            Generator::Constant { point } => vec![point.as_slice()],
        }
    }

    pub fn check_in_domain(&self, domain: &ConvexDomain, tol: f64) -> Result<()> {
        ensure_dimension(self.point(1), domain.dimension())?;
        for p in self.distinct_points() {
            if !domain.contains(p, tol)? {
                return Err(Error::Precondition(format!(
                    "sequence point {p:?} lies outside the domain"
                )));
            }
        }
        Ok(())
    }
}
