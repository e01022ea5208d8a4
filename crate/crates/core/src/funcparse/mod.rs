//! User-supplied scalar functions `f: ℝ^d → ℝ`: an infix expression grammar
//! plus a small catalog of builtins with known convexity and lower bounds.

mod expr;
mod parser;

use serde::{Deserialize, Serialize};

pub use expr::{BinaryOp, EvalError, Expr, Func};
pub use parser::{ParseError, ParseErrorKind};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityTag {
    KnownConvex,
    KnownNonconvex,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Builtin {
    /// `exp(x1 + … + xd)`
    Exp,
    /// `x1² + … + xd²`
    Square,
    /// `|x1| + … + |xd|`
    Abs,
    /// `−(x1² + … + xd²)`
    NegSquare,
    /// `a·(x1 + … + xd) + b`
    Linear { a: f64, b: f64 },
}

impl Builtin {
    /// Parses `exp`, `square`, `abs`, `neg-square`, `linear(a,b)`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        Ok(match name {
            "exp" => Builtin::Exp,
            "square" => Builtin::Square,
            "abs" => Builtin::Abs,
            "neg-square" => Builtin::NegSquare,
            _ => {
                let args = name
                    .strip_prefix("linear(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| unknown_builtin(name))?;
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                match parts.as_slice() {
                    [a, b] => Builtin::Linear {
                        a: a.parse().map_err(|_| unknown_builtin(name))?,
                        b: b.parse().map_err(|_| unknown_builtin(name))?,
                    },
                    _ => return Err(unknown_builtin(name)),
                }
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Builtin::Exp => "exp".into(),
            Builtin::Square => "square".into(),
            Builtin::Abs => "abs".into(),
            Builtin::NegSquare => "neg-square".into(),
            Builtin::Linear { a, b } => format!("linear({a:?},{b:?})"),
        }
    }

    pub fn tag(&self) -> ConvexityTag {
        match self {
            Builtin::NegSquare => ConvexityTag::KnownNonconvex,
            _ => ConvexityTag::KnownConvex,
        }
    }

    pub fn lower_bound(&self) -> Option<f64> {
        match self {
            Builtin::Exp | Builtin::Square | Builtin::Abs => Some(0.0),
            Builtin::Linear { a, b } if *a == 0.0 => Some(*b),
            _ => None,
        }
    }

    fn expr(&self, arity: usize) -> Expr {
        let sum_of = |term: &dyn Fn(usize) -> Expr| {
            (1..arity).fold(term(0), |acc, k| Expr::binary(BinaryOp::Add, acc, term(k)))
        };
        let var = |k: usize| Expr::Var(k);
        let square = |k: usize| Expr::binary(BinaryOp::Pow, Expr::Var(k), Expr::Const(2.0));
        let abs = |k: usize| Expr::Call(Func::Abs, vec![Expr::Var(k)]);
        match self {
            Builtin::Exp => Expr::Call(Func::Exp, vec![sum_of(&var)]),
            Builtin::Square => sum_of(&square),
            Builtin::Abs => sum_of(&abs),
            Builtin::NegSquare => Expr::Neg(Box::new(sum_of(&square))),
            Builtin::Linear { a, b } => Expr::binary(
                BinaryOp::Add,
                Expr::binary(BinaryOp::Mul, Expr::Const(*a), sum_of(&var)),
                Expr::Const(*b),
            ),
        }
    }

    /// Lipschitz constant on the Euclidean ball of radius `radius` about the origin.
    fn lipschitz_on_ball(&self, arity: usize, radius: f64) -> f64 {
        let sqrt_d = (arity as f64).sqrt();
        match self {
            Builtin::Exp => sqrt_d * (sqrt_d * radius).exp(),
            Builtin::Square | Builtin::NegSquare => 2.0 * radius,
            Builtin::Abs => sqrt_d,
            Builtin::Linear { a, .. } => a.abs() * sqrt_d,
        }
    }
}

fn unknown_builtin(name: &str) -> Error {
    Error::Precondition(format!(
        "unknown builtin '{name}' (expected exp, square, abs, neg-square, linear(a,b))"
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    arity: usize,
    body: Expr,
    lower_bound: Option<f64>,
    tag: ConvexityTag,
    builtin: Option<Builtin>,
    source: String,
}

/// Parses `source` as a function of `arity` variables. Parsed expressions carry
/// [`ConvexityTag::Unknown`] and no lower bound.
pub fn parse_function(source: &str, arity: usize) -> Result<ScalarFunction> {
    if arity == 0 {
        return Err(Error::Precondition("arity must be positive".into()));
    }
    let body = parser::parse_expr(source, arity)?;
    Ok(ScalarFunction {
        arity,
        body,
        lower_bound: None,
        tag: ConvexityTag::Unknown,
        builtin: None,
        source: source.to_string(),
    })
}

/// Builtin catalog entry in one variable.
pub fn builtin(name: &str) -> Result<ScalarFunction> {
    builtin_with_arity(name, 1)
}

pub fn builtin_with_arity(name: &str, arity: usize) -> Result<ScalarFunction> {
    if arity == 0 {
        return Err(Error::Precondition("arity must be positive".into()));
    }
    let b = Builtin::from_name(name)?;
    Ok(ScalarFunction {
        arity,
        body: b.expr(arity),
        lower_bound: b.lower_bound(),
        tag: b.tag(),
        builtin: Some(b),
        source: format!("builtin:{}", b.label()),
    })
}

/// Resolves either `builtin:<name>` or expression text.
pub fn resolve_function(spec: &str, arity: usize) -> Result<ScalarFunction> {
    match spec.trim().strip_prefix("builtin:") {
        Some(name) => builtin_with_arity(name, arity),
        None => parse_function(spec, arity),
    }
}

pub fn evaluate(f: &ScalarFunction, x: &[f64]) -> Result<f64, EvalError> {
    f.eval(x)
}

impl ScalarFunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn tag(&self) -> ConvexityTag {
        self.tag
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn builtin(&self) -> Option<Builtin> {
        self.builtin
    }

    /// Original text, or `builtin:<name>`.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn with_lower_bound(mut self, bound: f64) -> Self {
        self.lower_bound = Some(bound);
        self
    }

    pub fn with_tag(mut self, tag: ConvexityTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn is_known_convex(&self) -> bool {
        self.tag == ConvexityTag::KnownConvex
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.arity {
            return Err(EvalError::DimensionMismatch {
                expected: self.arity,
                found: x.len(),
            });
        }
        let v = self.body.eval(x)?;
        if let Some(b) = self.lower_bound {
            if v < b - 1e-12 {
                return Err(EvalError::Domain(format!(
                    "value {v} below declared lower bound {b}"
                )));
            }
        }
        Ok(v)
    }

    /// Upper bound of `f` over the box `∏[loₖ, hiₖ]` by interval evaluation.
    pub fn upper_bound_on_box(&self, bounds: &[(f64, f64)]) -> Option<f64> {
        if bounds.len() != self.arity {
            return None;
        }
        self.body.enclose(bounds).map(|(_, hi)| hi)
    }

    /// Enclosure of `f` over a box.
    pub fn range_on_box(&self, bounds: &[(f64, f64)]) -> Option<(f64, f64)> {
        if bounds.len() != self.arity {
            return None;
        }
        self.body.enclose(bounds)
    }

    /// Known Lipschitz constant on the origin-centered ball of radius `radius`
    /// (builtins only).
    pub fn lipschitz_on_ball(&self, radius: f64) -> Option<f64> {
        self.builtin
            .map(|b| b.lipschitz_on_ball(self.arity, radius))
    }

    /// Fully parenthesized text that re-parses to the same function.
    pub fn pretty(&self) -> String {
        self.body.to_string()
    }
}
