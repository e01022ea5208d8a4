//! Points of ℝ^d and the scalar helpers used by the convexity inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vec<f64>;

/// `t·x + (1−t)·y`, componentwise.
pub fn convex_combination(x: &[f64], y: &[f64], t: f64) -> Result<Point> {
    ensure_same_dimension(x, y)?;
    ensure_unit(t, "t")?;
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| t * a + (1.0 - t) * b)
        .collect())
}

pub fn positive_part(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::NonFinite(z));
    }
    Ok(z.max(0.0))
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn ensure_same_dimension(x: &[f64], y: &[f64]) -> Result<()> {
    ensure_dimension(y, x.len())
}

pub(crate) fn ensure_dimension(x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_unit(value: f64, name: &'static str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Parameters of `f(t·x + (1−t)·y) ≤ s·f(x) + (1−s)·f(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ConvexityParams {
    t: f64,
    s: f64,
}

#[derive(Deserialize)]
struct RawParams {
    t: f64,
    s: f64,
}

impl TryFrom<RawParams> for ConvexityParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.t, raw.s)
    }
}

impl ConvexityParams {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        ensure_unit(t, "t")?;
        ensure_unit(s, "s")?;
        Ok(Self { t, s })
    }

    /// Plain `t`-convexity: value weight equals combination weight.
    pub fn symmetric(t: f64) -> Result<Self> {
        Self::new(t, t)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// JSON point: either a bare number (a point of ℝ¹) or an array in JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl From<PointRepr> for Point {
    fn from(p: PointRepr) -> Self {
        match p {
            PointRepr::Scalar(v) => vec![v],
            PointRepr::Vector(v) => v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn combination_endpoints() {
        assert_eq!(convex_combination(&[2.0], &[4.0], 0.0).unwrap(), vec![4.0]);
        assert_eq!(convex_combination(&[2.0], &[4.0], 1.0).unwrap(), vec![2.0]);
    }

    #[test]
    fn combination_componentwise() {
        let z = convex_combination(&[1.0, 0.0], &[0.0, 1.0], 0.25).unwrap();
        assert_eq!(z, vec![0.25, 0.75]);
    }

    #[test]
    fn combination_rejects_bad_input() {
        assert!(matches!(
            convex_combination(&[1.0], &[1.0, 2.0], 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            convex_combination(&[1.0], &[2.0], 1.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(-3.0).unwrap(), 0.0);
        assert_eq!(positive_part(0.0).unwrap(), 0.0);
        assert_eq!(positive_part(2.5).unwrap(), 2.5);
        assert!(positive_part(f64::NAN).is_err());
        assert!(positive_part(f64::INFINITY).is_err());
    }

    #[test]
    fn params_validate() {
        assert!(ConvexityParams::new(0.3, 0.3).is_ok());
        assert!(ConvexityParams::new(-0.1, 0.3).is_err());
        assert!(ConvexityParams::new(0.1, 1.3).is_err());
        let p: std::result::Result<ConvexityParams, _> =
            serde_json::from_str(r#"{"t": 2.0, "s": 0.5}"#);
        assert!(p.is_err());
    }

    proptest! {
        #[test]
        fn positive_part_dominates(z in -1e6f64..1e6) {
            let p = positive_part(z).unwrap();
            prop_assert!(p >= 0.0);
            prop_assert!(p >= z);
        }
    }
}
