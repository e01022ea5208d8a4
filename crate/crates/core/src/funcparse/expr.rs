use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: function takes {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
    Min,
    Max,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    /// Accepted argument counts `(min, max)`.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Func::Min | Func::Max => (2, usize::MAX),
            _ => (1, 1),
        }
    }
}

/// Expression tree over variables `x1..xd` (stored 0-based).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

fn domain(msg: impl Into<String>) -> EvalError {
    EvalError::Domain(msg.into())
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Largest variable index referenced, 0-based.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
            Expr::Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                    BinaryOp::Pow => pow(a, b)?,
                }
            }
            Expr::Call(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(x))
                    .collect::<Result<Vec<_>, _>>()?;
                match f {
                    Func::Exp => vals[0].exp(),
                    Func::Log => {
                        if vals[0] <= 0.0 {
                            return Err(domain(format!("log of nonpositive {}", vals[0])));
                        }
                        vals[0].ln()
                    }
                    Func::Abs => vals[0].abs(),
                    Func::Sqrt => {
                        if vals[0] < 0.0 {
                            return Err(domain(format!("sqrt of negative {}", vals[0])));
                        }
                        vals[0].sqrt()
                    }
                    Func::Min => vals.into_iter().fold(f64::INFINITY, f64::min),
                    Func::Max => vals.into_iter().fold(f64::NEG_INFINITY, f64::max),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain(format!("non-finite intermediate value {v}")))
        }
    }

    /// Interval enclosure of the expression over the box `vars`; `None` when
    /// the box may hit a domain error or the bound is not finite.
    pub fn enclose(&self, vars: &[(f64, f64)]) -> Option<(f64, f64)> {
        let r = match self {
            Expr::Const(c) => return Some((*c, *c)),
            Expr::Var(i) => return Some(vars[*i]),
            Expr::Neg(e) => {
                let (lo, hi) = e.enclose(vars)?;
                (-hi, -lo)
            }
            Expr::Binary(op, a, b) => {
                let a = a.enclose(vars)?;
                let b = b.enclose(vars)?;
                match op {
                    BinaryOp::Add => (a.0 + b.0, a.1 + b.1),
                    BinaryOp::Sub => (a.0 - b.1, a.1 - b.0),
                    BinaryOp::Mul => hull4(a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1),
                    BinaryOp::Div => {
                        if b.0 <= 0.0 && b.1 >= 0.0 {
                            return None;
                        }
                        hull4(a.0 / b.0, a.0 / b.1, a.1 / b.0, a.1 / b.1)
                    }
                    BinaryOp::Pow => enclose_pow(a, b)?,
                }
            }
            Expr::Call(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.enclose(vars))
                    .collect::<Option<Vec<_>>>()?;
                match f {
                    Func::Exp => (vals[0].0.exp(), vals[0].1.exp()),
                    Func::Log => {
                        if vals[0].0 <= 0.0 {
                            return None;
                        }
                        (vals[0].0.ln(), vals[0].1.ln())
                    }
                    Func::Abs => {
                        let (lo, hi) = vals[0];
                        if lo >= 0.0 {
                            (lo, hi)
                        } else if hi <= 0.0 {
                            (-hi, -lo)
                        } else {
                            (0.0, hi.max(-lo))
                        }
                    }
                    Func::Sqrt => {
                        if vals[0].0 < 0.0 {
                            return None;
                        }
                        (vals[0].0.sqrt(), vals[0].1.sqrt())
                    }
                    Func::Min => vals.iter().fold((f64::INFINITY, f64::INFINITY), |acc, v| {
                        (acc.0.min(v.0), acc.1.min(v.1))
                    }),
                    Func::Max => vals
                        .iter()
                        .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |acc, v| {
                            (acc.0.max(v.0), acc.1.max(v.1))
                        }),
                }
            }
        };
        // widen by a few ulps to absorb rounding in the endpoint arithmetic
        let widen = |v: f64| 4.0 * f64::EPSILON * v.abs() + f64::MIN_POSITIVE;
        let r = (r.0 - widen(r.0), r.1 + widen(r.1));
        (r.0.is_finite() && r.1.is_finite()).then_some(r)
    }
}

fn pow(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exponent < 0.0 {
        return Err(domain("zero raised to a negative power"));
    }
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(domain(format!(
            "negative base {base} with non-integer exponent {exponent}"
        )));
    }
    Ok(base.powf(exponent))
}

fn hull4(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    (a.min(b).min(c).min(d), a.max(b).max(c).max(d))
}

fn enclose_pow(base: (f64, f64), exponent: (f64, f64)) -> Option<(f64, f64)> {
    if exponent.0 == exponent.1 && exponent.0.fract() == 0.0 {
        let n = exponent.0;
        if n == 0.0 {
            return Some((1.0, 1.0));
        }
        if n < 0.0 && base.0 <= 0.0 && base.1 >= 0.0 {
            return None;
        }
        let a = base.0.powf(n);
        let b = base.1.powf(n);
        let even = n % 2.0 == 0.0;
        if even && base.0 < 0.0 && base.1 > 0.0 {
            return Some((0.0, a.max(b)));
        }
        return Some((a.min(b), a.max(b)));
    }
    if base.0 <= 0.0 {
        return None;
    }
    // x^y = exp(y ln x), monotone in each argument on a positive base
    Some(hull4(
        base.0.powf(exponent.0),
        base.0.powf(exponent.1),
        base.1.powf(exponent.0),
        base.1.powf(exponent.1),
    ))
}

/// Fully parenthesized infix; re-parses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
