//! Recursive-descent parser.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right-associative).

use thiserror::Error;

use super::expr::{BinaryOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unsupported operator '{0}'")]
    UnsupportedOperator(String),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("variable x{index} exceeds arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("{name} takes {expected} argument(s), got {found}")]
    WrongArgCount {
        name: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("invalid number literal '{0}'")]
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

fn err(offset: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { offset, kind }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' if bytes.get(i + 1) == Some(&b'*') => {
                return Err(err(i, ParseErrorKind::UnsupportedOperator("**".into())))
            }
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| err(start, ParseErrorKind::BadNumber(text.into())))?;
            out.push((start, Tok::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        let ch = src[i..].chars().next().unwrap();
        return Err(err(i, ParseErrorKind::UnexpectedChar(ch)));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.bump() {
            Some((_, t)) if t == want => Ok(()),
            Some((o, t)) => Err(err(o, ParseErrorKind::UnexpectedToken(t.describe()))),
            None => Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            // right-associative; the exponent may carry its own sign
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (offset, tok) = self
            .bump()
            .ok_or_else(|| err(self.end, ParseErrorKind::UnexpectedEnd))?;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.call(offset, &name)
                } else {
                    self.atom(offset, &name)
                }
            }
            other => Err(err(
                offset,
                ParseErrorKind::UnexpectedToken(other.describe()),
            )),
        }
    }

    fn call(&mut self, offset: usize, name: &str) -> Result<Expr, ParseError> {
        let func = Func::from_name(name)
            .ok_or_else(|| err(offset, ParseErrorKind::UnknownIdentifier(name.into())))?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        let (lo, hi) = func.arity();
        if args.len() < lo || args.len() > hi {
            return Err(err(
                offset,
                ParseErrorKind::WrongArgCount {
                    name: func.name(),
                    expected: if hi == 1 { "1" } else { "2 or more" },
                    found: args.len(),
                },
            ));
        }
        Ok(Expr::Call(func, args))
    }

    fn atom(&mut self, offset: usize, name: &str) -> Result<Expr, ParseError> {
        match name {
            "e" => return Ok(Expr::Const(std::f64::consts::E)),
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "x" if self.arity == 1 => return Ok(Expr::Var(0)),
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().unwrap_or(usize::MAX);
                if index == 0 || index > self.arity {
                    return Err(err(
                        offset,
                        ParseErrorKind::VariableOutOfRange {
                            index,
                            arity: self.arity,
                        },
                    ));
                }
                return Ok(Expr::Var(index - 1));
            }
        }
        Err(err(offset, ParseErrorKind::UnknownIdentifier(name.into())))
    }
}

pub fn parse_expr(src: &str, arity: usize) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(err(0, ParseErrorKind::Empty));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        arity,
    };
    let e = p.expr()?;
    if let Some((o, t)) = p.bump() {
        return Err(err(o, ParseErrorKind::UnexpectedToken(t.describe())));
    }
    Ok(e)
}
