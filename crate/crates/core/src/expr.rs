//! A small arithmetic expression language used to describe piecewise
//! coefficients, sources and jump data in problem definitions.
//!
//! Grammar (highest precedence first):
//!
//! ```text
//! primary := number | x | y | pi | name | func '(' expr ')' | '(' expr ')'
//! power   := primary ('^' unary)?          // right-associative
//! unary   := '-' unary | '+' unary | power
//! term    := unary (('*' | '/') unary)*
//! expr    := term (('+' | '-') term)*
//! ```
//!
//! Any identifier other than `x`, `y`, `pi` and the function names is a named
//! parameter resolved from a [`Params`] map at evaluation time (or substituted
//! ahead of time with [`Expr::bind`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Named real parameters, e.g. `k1 = 5`.
pub type Params = BTreeMap<String, f64>;

/// Evaluation point. One-dimensional fields ignore `y`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of an expression. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParens { offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
}

/// Parses `source` into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: source.len(),
    };
    if parser.tokens.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some((Tok::RParen, off)) => Err(ParseError::UnbalancedParens { offset: off }),
        Some((tok, off)) => Err(ParseError::Syntax {
            offset: off,
            message: format!("unexpected {tok}"),
        }),
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    /// Evaluates the tree at `point`, resolving named parameters in `params`.
    pub fn eval(&self, point: Point, params: &Params) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(Var::X) => Ok(point.x),
            Expr::Var(Var::Y) => Ok(point.y),
            Expr::Param(name) => params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            Expr::Neg(e) => Ok(-e.eval(point, params)?),
            Expr::Binary(op, l, r) => {
                let a = l.eval(point, params)?;
                let b = r.eval(point, params)?;
                self.check(apply_binary(*op, a, b))
            }
            Expr::Call(f, arg) => {
                let a = arg.eval(point, params)?;
                self.check(apply_func(*f, a))
            }
        }
    }

    fn check(&self, r: Result<f64, &'static str>) -> Result<f64, EvalError> {
        match r {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(self.domain("non-finite result")),
            Err(reason) => Err(self.domain(reason)),
        }
    }

    fn domain(&self, reason: &'static str) -> EvalError {
        EvalError::Domain {
            expr: self.to_string(),
            reason,
        }
    }

    /// Replaces every parameter that has a value in `params` by a literal.
    pub fn bind(&self, params: &Params) -> Expr {
        match self {
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Num(*v),
                None => self.clone(),
            },
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.bind(params))),
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.bind(params)), Box::new(r.bind(params)))
            }
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.bind(params))),
        }
    }

    /// Names of all parameters referenced by the tree, sorted and deduplicated.
    pub fn param_names(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param(n) => out.push(n.clone()),
                Expr::Num(_) | Expr::Var(_) => {}
                Expr::Neg(a) | Expr::Call(_, a) => walk(a, out),
                Expr::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    pub fn uses_var(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses_var(var),
            Expr::Binary(_, l, r) => l.uses_var(var) || r.uses_var(var),
        }
    }
}

pub(crate) fn apply_binary(op: BinOp, a: f64, b: f64) -> Result<f64, &'static str> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div => {
            if b == 0.0 {
                Err("division by zero")
            } else {
                Ok(a / b)
            }
        }
        BinOp::Pow => power(a, b),
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, &'static str> {
    let integral = exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64;
    if base == 0.0 && exponent < 0.0 {
        return Err("division by zero");
    }
    if integral {
        Ok(base.powi(exponent as i32))
    } else if base < 0.0 {
        Err("non-integer power of a negative base")
    } else {
        Ok(base.powf(exponent))
    }
}

pub(crate) fn apply_func(f: Func, a: f64) -> Result<f64, &'static str> {
    match f {
        Func::Sin => Ok(a.sin()),
        Func::Cos => Ok(a.cos()),
        Func::Tan => Ok(a.tan()),
        Func::Exp => Ok(a.exp()),
        Func::Log => {
            if a <= 0.0 {
                Err("logarithm of a non-positive value")
            } else {
                Ok(a.ln())
            }
        }
        Func::Sqrt => {
            if a < 0.0 {
                Err("square root of a negative value")
            } else {
                Ok(a.sqrt())
            }
        }
        Func::Abs => Ok(a.abs()),
    }
}

/// Fully parenthesized rendering; reparsing yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{:?})", -v)
            }
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Param(n) => f.write_str(n),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Op(c) => write!(f, "operator `{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut k = i + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        i = k;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(Tok, usize)> {
        self.tokens.get(self.pos).cloned()
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some((Tok::Op(c), _)) if ops.contains(&c) => {
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Expr::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some((tok, off)) = self.bump() else {
            return Err(ParseError::Syntax {
                offset: self.end,
                message: "unexpected end of input".into(),
            });
        };
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    _ => Err(ParseError::UnbalancedParens { offset: off }),
                }
            }
            Tok::Ident(name) => {
                let is_call = matches!(self.peek(), Some((Tok::LParen, _)));
                if is_call {
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        offset: off,
                    })?;
                    let (_, open) = self.bump().expect("peeked");
                    let arg = self.expr()?;
                    match self.bump() {
                        Some((Tok::RParen, _)) => Ok(Expr::Call(func, Box::new(arg))),
                        _ => Err(ParseError::UnbalancedParens { offset: open }),
                    }
                } else if Func::from_name(&name).is_some() {
                    Err(ParseError::Syntax {
                        offset: off,
                        message: format!("function `{name}` requires an argument list"),
                    })
                } else {
                    Ok(match name.as_str() {
                        "x" => Expr::Var(Var::X),
                        "y" => Expr::Var(Var::Y),
                        "pi" => Expr::Num(std::f64::consts::PI),
                        _ => Expr::Param(name),
                    })
                }
            }
            Tok::RParen => Err(ParseError::UnbalancedParens { offset: off }),
            Tok::Op(c) => Err(ParseError::Syntax {
                offset: off,
                message: format!("unexpected operator `{c}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: f64) -> f64 {
        parse(src).unwrap().eval(Point::on_line(x), &Params::new()).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(ev("sin(5*x)", 0.0), 0.0);
        assert_eq!(ev("1 + x^2", 2.0), 5.0);
        let e = std::f64::consts::E;
        assert!((ev("log(2+x)", e - 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn params_and_two_dimensions() {
        let mut p = Params::new();
        p.insert("k1".into(), 5.0);
        let v = parse("k1*x").unwrap().eval(Point::on_line(1.0 / 3.0), &p).unwrap();
        assert_eq!(v, 5.0 * (1.0 / 3.0));
        let v = parse("x^2 * y").unwrap().eval(Point::new(2.0, 3.0), &p).unwrap();
        assert_eq!(v, 12.0);
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("1.25e-01 * 8E0", 0.0), 1.0);
        assert_eq!(ev("-x*3", 2.0), -6.0);
    }

    #[test]
    fn domain_errors() {
        let e = parse("1/(x-1)").unwrap();
        match e.eval(Point::on_line(1.0), &Params::new()) {
            Err(EvalError::Domain { expr, reason }) => {
                assert_eq!(reason, "division by zero");
                assert!(expr.contains('/'));
            }
            other => panic!("{other:?}"),
        }
        let e = parse("log(x)").unwrap();
        assert!(matches!(
            e.eval(Point::on_line(0.0), &Params::new()),
            Err(EvalError::Domain { .. })
        ));
        let e = parse("x^0.5").unwrap();
        assert!(matches!(
            e.eval(Point::on_line(-4.0), &Params::new()),
            Err(EvalError::Domain { .. })
        ));
        assert_eq!(ev("x^3", -2.0), -8.0);
        let e = parse("k + x").unwrap();
        assert_eq!(
            e.eval(Point::on_line(0.0), &Params::new()),
            Err(EvalError::Unbound("k".into()))
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(
            parse("foo(x)"),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(parse("(1 + x"), Err(ParseError::UnbalancedParens { offset: 0 })));
        assert!(matches!(parse("1 + x)"), Err(ParseError::UnbalancedParens { offset: 5 })));
        assert!(matches!(parse("sin(x"), Err(ParseError::UnbalancedParens { offset: 3 })));
        assert!(matches!(parse("1 + * 2"), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(parse("2 $ 3"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("sin"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn bind_substitutes_parameters() {
        let mut p = Params::new();
        p.insert("k".into(), -3.0);
        let e = parse("k*x + q").unwrap();
        assert_eq!(e.param_names(), vec!["k".to_string(), "q".to_string()]);
        let b = e.bind(&p);
        assert_eq!(b.param_names(), vec!["q".to_string()]);
        // a negative literal survives a display round trip numerically
        let mut q = Params::new();
        q.insert("q".into(), 1.0);
        let again = parse(&b.to_string()).unwrap();
        assert_eq!(
            again.eval(Point::on_line(2.0), &q).unwrap(),
            b.eval(Point::on_line(2.0), &q).unwrap()
        );
    }
}
