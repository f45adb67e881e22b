//! A small expression language for parametric curves and surfaces.
//!
//! Maps are written as `[x(u,v), y(u,v), z(u,v)]` with the usual arithmetic,
//! `sin`, `cos`, `sqrt`, integer powers and the constants `pi` and `sqrt2`.
//! Curve-arity maps may only use `u`. Expressions evaluate either to plain
//! numbers or to [`Jet`]s with respect to a chosen variable, which is how the
//! rest of the crate obtains exact derivatives of user-supplied geometry.
//!
//! Precedence, tightest first: `^`, unary `-`, `*` `/`, `+` `-`; the binary
//! operators associate to the left and `^` takes a literal nonnegative
//! integer exponent.

use crate::jets::{Jet, JetError, VecJet, MAX_ORDER};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

/// Whether a map depends on `u` alone or on both parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Curve,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Neg,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Var),
    Number(f64),
    Pi,
    Sqrt2,
    Unary(UnaryFn, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LangError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("curve expression refers to 'v' at byte {offset}")]
    Arity { offset: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{op} undefined at (u, v) = ({u}, {v})")]
    Numeric { op: &'static str, u: f64, v: f64 },
}

// ---------------------------------------------------------------- lexing --

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(n) => format!("number {n}"),
            Token::Ident(s) => format!("'{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::LBracket => "'['".into(),
            Token::RBracket => "']'".into(),
            Token::Comma => "','".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                tokens.push((Token::Plus, start));
                i += 1;
            }
            b'-' => {
                tokens.push((Token::Minus, start));
                i += 1;
            }
            b'*' => {
                tokens.push((Token::Star, start));
                i += 1;
            }
            b'/' => {
                tokens.push((Token::Slash, start));
                i += 1;
            }
            b'^' => {
                tokens.push((Token::Caret, start));
                i += 1;
            }
            b'(' => {
                tokens.push((Token::LParen, start));
                i += 1;
            }
            b')' => {
                tokens.push((Token::RParen, start));
                i += 1;
            }
            b'[' => {
                tokens.push((Token::LBracket, start));
                i += 1;
            }
            b']' => {
                tokens.push((Token::RBracket, start));
                i += 1;
            }
            b',' => {
                tokens.push((Token::Comma, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &source[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("'{text}'"),
                })?;
                tokens.push((Token::Number(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((Token::Ident(source[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["token"],
                    found: format!("'{}'", &source[start..start + 1]),
                });
            }
        }
    }
    Ok(tokens)
}

// --------------------------------------------------------------- parsing --

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    arity: Arity,
    source_len: usize,
    _source: &'a str,
}

const ATOM_EXPECTED: &[&str] = &[
    "number", "'u'", "'v'", "'pi'", "'sqrt2'", "'sin'", "'cos'", "'sqrt'", "'('", "'-'",
];

impl<'a> Parser<'a> {
    fn new(source: &'a str, arity: Arity) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(source)?,
            pos: 0,
            arity,
            source_len: source.len(),
            _source: source,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.source_len)
    }

    fn found(&self) -> String {
        match self.tokens.get(self.pos) {
            Some((t, _)) => t.describe(),
            None => "end of input".into(),
        }
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.found(),
        }
    }

    fn expect(&mut self, token: Token, name: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            Ok(Expr::Unary(UnaryFn::Neg, Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, LangError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Token::Number(n)) if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => {
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), n as u32))
            }
            _ => Err(self.error(&["nonnegative integer exponent"]).into()),
        }
    }

    fn atom(&mut self) -> Result<Expr, LangError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::Number(n)) => {
                self.pos += 1;
                Ok(Expr::Number(n))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "u" => Ok(Expr::Var(Var::U)),
                    "v" => {
                        if self.arity == Arity::Curve {
                            Err(LangError::Arity { offset })
                        } else {
                            Ok(Expr::Var(Var::V))
                        }
                    }
                    "pi" => Ok(Expr::Pi),
                    "sqrt2" => Ok(Expr::Sqrt2),
                    "sin" | "cos" | "sqrt" => {
                        let f = match name.as_str() {
                            "sin" => UnaryFn::Sin,
                            "cos" => UnaryFn::Cos,
                            _ => UnaryFn::Sqrt,
                        };
                        self.expect(Token::LParen, "'('")?;
                        let arg = self.expr()?;
                        self.expect(Token::RParen, "')'")?;
                        Ok(Expr::Unary(f, Box::new(arg)))
                    }
                    _ => Err(ParseError {
                        offset,
                        expected: ATOM_EXPECTED.to_vec(),
                        found: format!("'{name}'"),
                    }
                    .into()),
                }
            }
            _ => Err(self.error(ATOM_EXPECTED).into()),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// Parse a single scalar expression.
pub fn parse_expr(source: &str, arity: Arity) -> Result<Expr, LangError> {
    let mut parser = Parser::new(source, arity)?;
    let expr = parser.expr()?;
    parser.finish()?;
    Ok(expr)
}

impl Expr {
    /// Evaluate over jets, one per variable.
    pub fn eval_jet(&self, u: &Jet, v: &Jet) -> Result<Jet, LangError> {
        Ok(match self {
            Expr::Var(Var::U) => u.clone(),
            Expr::Var(Var::V) => v.clone(),
            Expr::Number(n) => Jet::constant(*n, u.base_point(), u.order()),
            Expr::Pi => Jet::constant(std::f64::consts::PI, u.base_point(), u.order()),
            Expr::Sqrt2 => Jet::constant(std::f64::consts::SQRT_2, u.base_point(), u.order()),
            Expr::Unary(f, inner) => {
                let a = inner.eval_jet(u, v)?;
                match f {
                    UnaryFn::Neg => a.neg(),
                    UnaryFn::Sin => a.sin(),
                    UnaryFn::Cos => a.cos(),
                    UnaryFn::Sqrt => a.try_sqrt()?,
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_jet(u, v)?;
                let b = rhs.eval_jet(u, v)?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.try_div(&b)?,
                }
            }
            Expr::Pow(base, n) => base.eval_jet(u, v)?.powi(*n),
        })
    }

    /// Plain floating-point evaluation, independent of the jet machinery.
    pub fn eval_value(&self, u: f64, v: f64) -> Result<f64, LangError> {
        Ok(match self {
            Expr::Var(Var::U) => u,
            Expr::Var(Var::V) => v,
            Expr::Number(n) => *n,
            Expr::Pi => std::f64::consts::PI,
            Expr::Sqrt2 => std::f64::consts::SQRT_2,
            Expr::Unary(f, inner) => {
                let a = inner.eval_value(u, v)?;
                match f {
                    UnaryFn::Neg => -a,
                    UnaryFn::Sin => a.sin(),
                    UnaryFn::Cos => a.cos(),
                    UnaryFn::Sqrt => {
                        if a < 0.0 {
                            return Err(LangError::Numeric {
                                op: "sqrt",
                                u,
                                v,
                            });
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_value(u, v)?;
                let b = rhs.eval_value(u, v)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(LangError::Numeric {
                                op: "division",
                                u,
                                v,
                            });
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, n) => base.eval_value(u, v)?.powi(*n as i32),
        })
    }

    /// Exact symbolic partial derivative, lightly simplified.
    pub fn derivative(&self, var: Var) -> Expr {
        match self {
            Expr::Var(v) if *v == var => Expr::Number(1.0),
            Expr::Var(_) | Expr::Number(_) | Expr::Pi | Expr::Sqrt2 => Expr::Number(0.0),
            Expr::Unary(f, inner) => {
                let df = inner.derivative(var);
                match f {
                    UnaryFn::Neg => neg(df),
                    UnaryFn::Sin => mul(Expr::Unary(UnaryFn::Cos, inner.clone()), df),
                    UnaryFn::Cos => neg(mul(Expr::Unary(UnaryFn::Sin, inner.clone()), df)),
                    UnaryFn::Sqrt => div(
                        df,
                        mul(Expr::Number(2.0), Expr::Unary(UnaryFn::Sqrt, inner.clone())),
                    ),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let da = lhs.derivative(var);
                let db = rhs.derivative(var);
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul((**lhs).clone(), db), mul((**rhs).clone(), da)),
                    BinOp::Div => div(
                        sub(mul(da, (**rhs).clone()), mul((**lhs).clone(), db)),
                        Expr::Pow(rhs.clone(), 2),
                    ),
                }
            }
            Expr::Pow(base, n) => match n {
                0 => Expr::Number(0.0),
                1 => base.derivative(var),
                _ => mul(
                    mul(
                        Expr::Number(*n as f64),
                        Expr::Pow(base.clone(), n - 1),
                    ),
                    base.derivative(var),
                ),
            },
        }
    }

    /// Replace a variable by a number.
    pub fn substitute(&self, var: Var, value: f64) -> Expr {
        match self {
            Expr::Var(v) if *v == var => Expr::Number(value),
            Expr::Var(_) | Expr::Number(_) | Expr::Pi | Expr::Sqrt2 => self.clone(),
            Expr::Unary(f, inner) => Expr::Unary(*f, Box::new(inner.substitute(var, value))),
            Expr::Binary(op, lhs, rhs) => Expr::Binary(
                *op,
                Box::new(lhs.substitute(var, value)),
                Box::new(rhs.substitute(var, value)),
            ),
            Expr::Pow(base, n) => Expr::Pow(Box::new(base.substitute(var, value)), *n),
        }
    }

    pub fn contains_var(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Number(_) | Expr::Pi | Expr::Sqrt2 => false,
            Expr::Unary(_, inner) => inner.contains_var(var),
            Expr::Binary(_, lhs, rhs) => lhs.contains_var(var) || rhs.contains_var(var),
            Expr::Pow(base, _) => base.contains_var(var),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Unary(UnaryFn::Neg, _) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

// Simplifying constructors keep symbolic derivatives readable.
fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Number(n) if *n == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Number(n) if *n == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Number(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        Expr::Number(0.0)
    } else if is_one(&b) {
        a
    } else {
        Expr::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    if is_zero(&a) {
        a
    } else {
        Expr::Unary(UnaryFn::Neg, Box::new(a))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parens = |expr: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if expr.precedence() < min {
                write!(f, "({expr})")
            } else {
                write!(f, "{expr}")
            }
        };
        match self {
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::V) => write!(f, "v"),
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Sqrt2 => write!(f, "sqrt2"),
            Expr::Unary(UnaryFn::Neg, inner) => {
                write!(f, "-")?;
                parens(inner, 3, f)
            }
            Expr::Unary(func, inner) => {
                let name = match func {
                    UnaryFn::Sin => "sin",
                    UnaryFn::Cos => "cos",
                    UnaryFn::Sqrt => "sqrt",
                    UnaryFn::Neg => unreachable!(),
                };
                write!(f, "{name}({inner})")
            }
            Expr::Binary(op, lhs, rhs) => {
                let (symbol, prec) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                parens(lhs, prec, f)?;
                write!(f, "{symbol}")?;
                // Left associativity: an equal-precedence right child needs
                // parentheses to parse back to the same tree.
                if rhs.precedence() <= prec {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
            Expr::Pow(base, n) => {
                parens(base, 4, f)?;
                write!(f, "^{n}")
            }
        }
    }
}

/// A parsed 3-component map `[x, y, z]` of declared arity.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricMap {
    pub components: [Expr; 3],
    pub arity: Arity,
}

/// Parse a bracketed 3-component map.
pub fn parse_map(source: &str, arity: Arity) -> Result<ParametricMap, LangError> {
    let mut parser = Parser::new(source, arity)?;
    parser.expect(Token::LBracket, "'['")?;
    let x = parser.expr()?;
    parser.expect(Token::Comma, "','")?;
    let y = parser.expr()?;
    parser.expect(Token::Comma, "','")?;
    let z = parser.expr()?;
    parser.expect(Token::RBracket, "']'")?;
    parser.finish()?;
    Ok(ParametricMap {
        components: [x, y, z],
        arity,
    })
}

impl ParametricMap {
    /// Jet of the map along `wrt` at `(u0, v0)`, the other variable held
    /// constant. `order` may not exceed [`MAX_ORDER`].
    pub fn eval_jet(&self, u0: f64, v0: f64, order: usize, wrt: Var) -> Result<VecJet, LangError> {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let base = match wrt {
            Var::U => u0,
            Var::V => v0,
        };
        let (u, v) = match wrt {
            Var::U => (Jet::variable(u0, order), Jet::constant(v0, u0, order)),
            Var::V => (Jet::constant(u0, v0, order), Jet::variable(v0, order)),
        };
        debug_assert_eq!(u.base_point(), base);
        let [x, y, z] = &self.components;
        Ok(VecJet::new(
            x.eval_jet(&u, &v)?,
            y.eval_jet(&u, &v)?,
            z.eval_jet(&u, &v)?,
        ))
    }

    /// Plain evaluation at `(u, v)`.
    pub fn eval_value(&self, u: f64, v: f64) -> Result<[f64; 3], LangError> {
        let [x, y, z] = &self.components;
        Ok([
            x.eval_value(u, v)?,
            y.eval_value(u, v)?,
            z.eval_value(u, v)?,
        ])
    }

    /// Componentwise symbolic partial derivative.
    pub fn partial(&self, var: Var) -> ParametricMap {
        let [x, y, z] = &self.components;
        ParametricMap {
            components: [x.derivative(var), y.derivative(var), z.derivative(var)],
            arity: self.arity,
        }
    }

    /// Fix one variable to a number; substituting `v` yields a curve.
    pub fn substitute(&self, var: Var, value: f64) -> ParametricMap {
        let [x, y, z] = &self.components;
        ParametricMap {
            components: [
                x.substitute(var, value),
                y.substitute(var, value),
                z.substitute(var, value),
            ],
            arity: if var == Var::V { Arity::Curve } else { self.arity },
        }
    }
}

impl fmt::Display for ParametricMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.components;
        write!(f, "[{x}, {y}, {z}]")
    }
}
