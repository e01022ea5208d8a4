//! Finitely supported probability distributions on ℝ^d.

use serde::{Deserialize, Serialize};

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::point::{ensure_dimension, Point, PointRepr};
use crate::sum::CompensatedSum;

pub const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub point: Point,
    pub probability: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    point: PointRepr,
    probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    atoms: Vec<RawAtom>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(
            raw.atoms
                .into_iter()
                .map(|a| (a.point.into(), a.probability))
                .collect(),
        )
    }
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(Point, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let d = atoms[0].0.len();
        if d == 0 {
            return Err(Error::InvalidDistribution("atoms of dimension 0".into()));
        }
        let mut total = CompensatedSum::new();
        for (i, (p, w)) in atoms.iter().enumerate() {
            ensure_dimension(p, d)?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!("atom {i} not finite")));
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i} has probability {w}"
                )));
            }
            if atoms[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i} repeats point {p:?}"
                )));
            }
            total.add(*w);
        }
        if (total.value() - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}",
                total.value()
            )));
        }
        Ok(Self {
            atoms: atoms
                .into_iter()
                .map(|(point, probability)| Atom { point, probability })
                .collect(),
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dimension(&self) -> usize {
        self.atoms[0].point.len()
    }

    /// `E(ξ) = Σ pᵢ xᵢ`.
    pub fn mean(&self) -> Point {
        (0..self.dimension())
            .map(|k| {
                self.atoms
                    .iter()
                    .map(|a| a.probability * a.point[k])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    /// `E(g(ξ)) = Σ pᵢ g(xᵢ)`; stops at the first failing evaluation.
    pub fn expectation<E>(&self, mut g: impl FnMut(&[f64]) -> Result<f64, E>) -> Result<f64, E> {
        let mut acc = CompensatedSum::new();
        for a in &self.atoms {
            acc.add(a.probability * g(&a.point)?);
        }
        Ok(acc.value())
    }

    pub fn check_in_domain(&self, domain: &ConvexDomain, tol: f64) -> Result<()> {
        ensure_dimension(&self.atoms[0].point, domain.dimension())?;
        for a in &self.atoms {
            if !domain.contains(&a.point, tol)? {
                return Err(Error::Precondition(format!(
                    "atom {:?} lies outside the domain",
                    a.point
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_expectation() {
        let d = DiscreteDistribution::new(vec![(vec![0.0], 2.0 / 3.0), (vec![1.0], 1.0 / 3.0)])
            .unwrap();
        assert!((d.mean()[0] - 1.0 / 3.0).abs() < 1e-16);
        let e: f64 = d.expectation(|x| Ok::<_, ()>(x[0] * x[0] + 1.0)).unwrap();
        assert!((e - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![0.0], 0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![0.0], 1.5), (vec![1.0], -0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![0.0], 0.5), (vec![0.0], 0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![0.0], 0.5), (vec![0.0, 1.0], 0.5)]).is_err());
        assert!(
            DiscreteDistribution::new(vec![(vec![0.0], 0.5), (vec![1.0], 0.5 + 1e-13)]).is_ok()
        );
    }

    #[test]
    fn json() {
        let d: DiscreteDistribution = serde_json::from_str(
            r#"{"atoms":[{"point":-1,"probability":0.5},{"point":[1],"probability":0.5}]}"#,
        )
        .unwrap();
        assert_eq!(d.mean(), vec![0.0]);
        let bad: std::result::Result<DiscreteDistribution, _> =
            serde_json::from_str(r#"{"atoms":[{"point":1,"probability":0.4}]}"#);
        assert!(bad.is_err());
    }
}
