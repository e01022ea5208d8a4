//! Positive, nonincreasing weight sequences summing to one.
//!
//! Three closed-form families are supported so that tail masses
//! `Σ_{i≥n} λᵢ` are available without truncation:
//!
//! * `geometric(r)`: `λₙ = (1−r)·rⁿ⁻¹`, so `λ₁ = 1−r` and the tail from `n` is `rⁿ⁻¹`.
//!   A sequence whose first weight is 1/3 is therefore `geometric(2/3)`.
//! * `explicit_prefix(p, r)`: the listed weights, then the remaining mass
//!   `M = 1 − Σp` spread geometrically as `M·(1−r)·rʲ⁻¹`.
//! * `zeta_like(p)`: `λₙ = n⁻ᵖ / ζ(p)` with tails from the Hurwitz zeta function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

pub const DEFAULT_MAX_DEPTH: usize = 1_000_000;
pub const DEFAULT_PRECISION: u32 = 15;

/// Tail mass targeted by [`WeightSequence::default_depth`].
pub const DEFAULT_TAIL_TARGET: f64 = 1e-10;
/// Depth used when no closed form gives a small tail quickly.
pub const FALLBACK_DEPTH: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Geometric {
        ratio: f64,
    },
    ExplicitPrefix {
        prefix: Vec<f64>,
        ratio: f64,
        /// Mass carried by the geometric tail after the prefix.
        rest: f64,
        /// `suffix[j] = Σ_{i≥j} prefix[i]` (0-based), with a trailing zero.
        suffix: Vec<f64>,
    },
    ZetaLike {
        exponent: f64,
        precision: u32,
        normalization: f64,
    },
}

/// A member of the admissible weight class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct WeightSequence {
    kind: Kind,
    max_depth: usize,
}

/// JSON form of a [`WeightSequence`], e.g. `{"kind":"geometric","ratio":0.5}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Geometric {
        ratio: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
    },
    ExplicitPrefix {
        prefix: Vec<f64>,
        ratio: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
    },
    ZetaLike {
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
    },
}

impl TryFrom<WeightSpec> for WeightSequence {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        let (seq, depth) = match spec {
            WeightSpec::Geometric { ratio, max_depth } => (Self::geometric(ratio)?, max_depth),
            WeightSpec::ExplicitPrefix {
                prefix,
                ratio,
                max_depth,
            } => (Self::explicit_prefix(prefix, ratio)?, max_depth),
            WeightSpec::ZetaLike {
                exponent,
                precision,
                max_depth,
            } => (
                Self::zeta_like_with_precision(exponent, precision.unwrap_or(DEFAULT_PRECISION))?,
                max_depth,
            ),
        };
        match depth {
            Some(d) => seq.with_max_depth(d),
            None => Ok(seq),
        }
    }
}

impl From<WeightSequence> for WeightSpec {
    fn from(w: WeightSequence) -> Self {
        let max_depth = (w.max_depth != DEFAULT_MAX_DEPTH).then_some(w.max_depth);
        match w.kind {
            Kind::Geometric { ratio } => WeightSpec::Geometric { ratio, max_depth },
            Kind::ExplicitPrefix { prefix, ratio, .. } => WeightSpec::ExplicitPrefix {
                prefix,
                ratio,
                max_depth,
            },
            Kind::ZetaLike {
                exponent,
                precision,
                ..
            } => WeightSpec::ZetaLike {
                exponent,
                precision: (precision != DEFAULT_PRECISION).then_some(precision),
                max_depth,
            },
        }
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidWeights(format!(
            "geometric ratio {ratio} must lie in (0, 1)"
        )));
    }
    Ok(())
}

impl WeightSequence {
    pub fn geometric(ratio: f64) -> Result<Self> {
        check_ratio(ratio)?;
        Ok(Self {
            kind: Kind::Geometric { ratio },
            max_depth: DEFAULT_MAX_DEPTH,
        })
    }

    /// Geometric sequence with the given first weight (`ratio = 1 − first`).
    pub fn geometric_with_first(first: f64) -> Result<Self> {
        Self::geometric(1.0 - first)
    }

    /// Listed prefix weights followed by a geometric tail of ratio `ratio`.
    ///
    /// The first tail weight must not exceed the last prefix weight.
    pub fn explicit_prefix(prefix: Vec<f64>, ratio: f64) -> Result<Self> {
        check_ratio(ratio)?;
        if prefix.is_empty() {
            return Err(Error::InvalidWeights("empty prefix".into()));
        }
        for (i, &w) in prefix.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeights(format!(
                    "prefix weight {} = {w} is not positive",
                    i + 1
                )));
            }
            if i > 0 && w > prefix[i - 1] {
                return Err(Error::InvalidWeights(format!(
                    "prefix weight {} = {w} exceeds its predecessor {}",
                    i + 1,
                    prefix[i - 1]
                )));
            }
        }
        let total: f64 = prefix.iter().copied().collect::<CompensatedSum>().value();
        let rest = 1.0 - total;
        if rest <= 0.0 {
            return Err(Error::InvalidWeights(format!(
                "prefix sums to {total}, leaving no mass for the tail"
            )));
        }
        let last = *prefix.last().unwrap();
        let first_tail = rest * (1.0 - ratio);
        if first_tail > last {
            return Err(Error::InvalidWeights(format!(
                "first tail weight {first_tail} exceeds last prefix weight {last}"
            )));
        }
        let mut suffix = vec![0.0; prefix.len() + 1];
        let mut acc = CompensatedSum::new();
        for i in (0..prefix.len()).rev() {
            acc.add(prefix[i]);
            suffix[i] = acc.value();
        }
        Ok(Self {
            kind: Kind::ExplicitPrefix {
                prefix,
                ratio,
                rest,
                suffix,
            },
            max_depth: DEFAULT_MAX_DEPTH,
        })
    }

    /// `λₙ = n⁻ᵖ / ζ(p)` for `p > 1`.
    pub fn zeta_like(exponent: f64) -> Result<Self> {
        Self::zeta_like_with_precision(exponent, DEFAULT_PRECISION)
    }

    pub fn zeta_like_with_precision(exponent: f64, precision: u32) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 1.0) {
            return Err(Error::InvalidWeights(format!(
                "zeta exponent {exponent} must be finite and > 1"
            )));
        }
        if !(1..=15).contains(&precision) {
            return Err(Error::InvalidWeights(format!(
                "precision {precision} digits not representable in double precision"
            )));
        }
        let normalization = hurwitz_zeta(exponent, 1.0, precision);
        Ok(Self {
            kind: Kind::ZetaLike {
                exponent,
                precision,
                normalization,
            },
            max_depth: DEFAULT_MAX_DEPTH,
        })
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Result<Self> {
        if max_depth == 0 {
            return Err(Error::InvalidWeights("max_depth must be positive".into()));
        }
        self.max_depth = max_depth;
        Ok(self)
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn check_index(&self, n: usize, limit: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: "n >= 1",
            });
        }
        if n > limit {
            return Err(Error::DepthExceeded {
                index: n,
                max_depth: self.max_depth,
            });
        }
        Ok(())
    }

    /// `λₙ`, 1-based.
    pub fn weight_at(&self, n: usize) -> Result<f64> {
        self.check_index(n, self.max_depth)?;
        Ok(self.weight_unchecked(n))
    }

    fn weight_unchecked(&self, n: usize) -> f64 {
        match &self.kind {
            Kind::Geometric { ratio } => (1.0 - ratio) * powi(*ratio, n - 1),
            Kind::ExplicitPrefix {
                prefix,
                ratio,
                rest,
                ..
            } => {
                let k = prefix.len();
                if n <= k {
                    prefix[n - 1]
                } else {
                    rest * (1.0 - ratio) * powi(*ratio, n - k - 1)
                }
            }
            Kind::ZetaLike {
                exponent,
                normalization,
                ..
            } => (n as f64).powf(-exponent) / normalization,
        }
    }

    /// The first weight `λ₁`.
    pub fn first(&self) -> f64 {
        self.weight_unchecked(1)
    }

    /// `Σ_{i≥n} λᵢ`. Accepts `n` up to `max_depth + 1`.
    pub fn tail_mass(&self, n: usize) -> Result<f64> {
        self.check_index(n, self.max_depth.saturating_add(1))?;
        Ok(self.tail_unchecked(n))
    }

    fn tail_unchecked(&self, n: usize) -> f64 {
        match &self.kind {
            Kind::Geometric { ratio } => powi(*ratio, n - 1),
            Kind::ExplicitPrefix {
                prefix,
                ratio,
                rest,
                suffix,
            } => {
                let k = prefix.len();
                if n <= k + 1 {
                    suffix[n - 1] + rest
                } else {
                    rest * powi(*ratio, n - k - 1)
                }
            }
            Kind::ZetaLike {
                exponent,
                precision,
                normalization,
            } => hurwitz_zeta(*exponent, n as f64, *precision) / normalization,
        }
    }

    /// `Σ_{i≤n} λᵢ`; `partial_sum(0) = 0`.
    pub fn partial_sum(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        self.check_index(n, self.max_depth)?;
        Ok(match &self.kind {
            Kind::Geometric { ratio } => -(n as f64 * ratio.ln()).exp_m1(),
            Kind::ExplicitPrefix {
                prefix,
                ratio,
                rest,
                ..
            } => {
                let k = prefix.len();
                let head: CompensatedSum = prefix[..n.min(k)].iter().copied().collect();
                if n <= k {
                    head.value()
                } else {
                    let geo = -((n - k) as f64 * ratio.ln()).exp_m1();
                    head.value() + rest * geo
                }
            }
            Kind::ZetaLike {
                exponent,
                normalization,
                ..
            } => {
                // smallest terms first
                let acc: CompensatedSum =
                    (1..=n).rev().map(|i| (i as f64).powf(-exponent)).collect();
                acc.value() / normalization
            }
        })
    }

    /// `Σ λᵢ` over indices `i ≥ n` with `(i − 1) mod period = residue`.
    ///
    /// Used to resolve tails of periodic sequences exactly.
    pub fn class_tail(&self, n: usize, period: usize, residue: usize) -> Result<f64> {
        if period == 0 || residue >= period {
            return Err(Error::Precondition(format!(
                "residue {residue} invalid for period {period}"
            )));
        }
        self.check_index(n, self.max_depth.saturating_add(1))?;
        let first_from = |start: usize| start + (residue + period - (start - 1) % period) % period;
        Ok(match &self.kind {
            Kind::Geometric { ratio } => {
                let i0 = first_from(n);
                self.weight_unchecked(i0) / geometric_period_factor(*ratio, period)
            }
            Kind::ExplicitPrefix { prefix, ratio, .. } => {
                let k = prefix.len();
                let mut acc = CompensatedSum::new();
                let mut i = first_from(n);
                while i <= k {
                    acc.add(prefix[i - 1]);
                    i += period;
                }
                acc.add(self.weight_unchecked(i) / geometric_period_factor(*ratio, period));
                acc.value()
            }
            Kind::ZetaLike {
                exponent,
                precision,
                normalization,
            } => {
                let i0 = first_from(n) as f64;
                let p = period as f64;
                p.powf(-exponent) * hurwitz_zeta(*exponent, i0 / p, *precision) / normalization
            }
        })
    }

    /// Integral bracket `[lower, upper]` for the tail mass from `n` (zeta-like only).
    pub fn tail_bracket(&self, n: usize) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::ZetaLike {
                exponent,
                normalization,
                ..
            } if n >= 1 => {
                let x = n as f64;
                let integral = x.powf(1.0 - exponent) / (exponent - 1.0);
                Some((
                    integral / normalization,
                    (integral + x.powf(-exponent)) / normalization,
                ))
            }
            _ => None,
        }
    }

    /// Smallest depth `N` with `tail_mass(N+1) ≤ 1e−10` for the closed-form
    /// geometric families; [`FALLBACK_DEPTH`] otherwise. Capped at `max_depth`.
    pub fn default_depth(&self) -> usize {
        let geometric_steps = |mass: f64, ratio: f64| -> usize {
            if mass <= DEFAULT_TAIL_TARGET {
                0
            } else {
                ((DEFAULT_TAIL_TARGET / mass).ln() / ratio.ln()).ceil() as usize
            }
        };
        let depth = match &self.kind {
            Kind::Geometric { ratio } => geometric_steps(1.0, *ratio),
            Kind::ExplicitPrefix {
                prefix,
                ratio,
                rest,
                ..
            } => prefix.len() + geometric_steps(*rest, *ratio),
            Kind::ZetaLike { .. } => FALLBACK_DEPTH,
        };
        let mut depth = depth.clamp(1, self.max_depth);
        // guard against rounding in the logarithm estimate
        while depth < self.max_depth
            && !matches!(self.kind, Kind::ZetaLike { .. })
            && self.tail_unchecked(depth + 1) > DEFAULT_TAIL_TARGET
        {
            depth += 1;
        }
        depth
    }

    /// Name of the family, as used in the JSON encoding.
    pub fn family(&self) -> &'static str {
        match self.kind {
            Kind::Geometric { .. } => "geometric",
            Kind::ExplicitPrefix { .. } => "explicit-prefix",
            Kind::ZetaLike { .. } => "zeta-like",
        }
    }
}

fn powi(base: f64, exp: usize) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// `1 − r^period`, computed without cancellation.
fn geometric_period_factor(ratio: f64, period: usize) -> f64 {
    -(period as f64 * ratio.ln()).exp_m1()
}

/// `B₂ⱼ / (2j)!` for j = 1..=7.
const EULER_MACLAURIN: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Hurwitz zeta `Σ_{k≥0} (a+k)^{−s}` for `s > 1`, `a > 0`, by Euler–Maclaurin
/// summation after shifting the argument past `precision + 10`.
pub(crate) fn hurwitz_zeta(s: f64, a: f64, precision: u32) -> f64 {
    let shift = f64::from(precision) + 10.0;
    let mut head = Vec::new();
    let mut x = a;
    while x < shift {
        head.push(x.powf(-s));
        x += 1.0;
    }
    let mut acc = CompensatedSum::new();
    let x_s = x.powf(-s);
    let mut corrections = Vec::with_capacity(EULER_MACLAURIN.len());
    // s(s+1)…(s+2j−2) · x^{−s−2j+1}
    let mut rising = s * x_s / x;
    for (j, c) in EULER_MACLAURIN.iter().enumerate() {
        corrections.push(c * rising);
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (s + k - 1.0) * (s + k) / (x * x);
    }
    for c in corrections.into_iter().rev() {
        acc.add(c);
    }
    acc.add(0.5 * x_s);
    acc.add(x * x_s / (s - 1.0));
    for v in head.into_iter().rev() {
        acc.add(v);
    }
    acc.value()
}
