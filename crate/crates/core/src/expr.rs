//! Expression trees in the curve parameter `t`, and the curve DSL parser.
//!
//! Grammar:
//!
//! ```text
//! curve   := "(" expr "," expr "," expr ")" "t" "in" "(" number "," number ")"
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "t" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::jet::Jet3;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Atan,
    Sinh,
    Cosh,
    Tanh,
    /// `max(x, 0)`. Not reachable from the DSL.
    Ramp,
    /// `exp(-1/x^2)` patched to 0 at the origin. Not reachable from the DSL.
    Flat,
}

impl Func {
    /// Functions available by name in the DSL.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "atan" => Func::Atan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan => "atan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Ramp => "ramp",
            Func::Flat => "flat",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr<S> {
    Num(S),
    Param,
    Neg(Box<Expr<S>>),
    Add(Box<Expr<S>>, Box<Expr<S>>),
    Sub(Box<Expr<S>>, Box<Expr<S>>),
    Mul(Box<Expr<S>>, Box<Expr<S>>),
    Div(Box<Expr<S>>, Box<Expr<S>>),
    Pow(Box<Expr<S>>, Box<Expr<S>>),
    Call(Func, Box<Expr<S>>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("expression is not finite at t = {t}")]
    Pole { t: f64 },
    #[error("`{func}` is not differentiable at t = {t}")]
    NotDifferentiable { func: &'static str, t: f64 },
}

impl<S: Scalar> Expr<S> {
    pub fn num(v: f64) -> Self {
        Expr::Num(S::lit(v))
    }

    pub fn param() -> Self {
        Expr::Param
    }

    pub fn call(f: Func, arg: Self) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    pub fn pow(self, e: Self) -> Self {
        Expr::Pow(Box::new(self), Box::new(e))
    }

    /// Evaluate value and first three derivatives in `t` at `t0`.
    pub fn eval_jet(&self, t0: S) -> Result<Jet3<S>, EvalError> {
        let j = self.jet(Jet3::variable(t0), t0)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(EvalError::Pole { t: t0.to_f64_lossy() })
        }
    }

    pub fn eval(&self, t0: S) -> Result<S, EvalError> {
        self.eval_jet(t0).map(|j| j.value())
    }

    fn jet(&self, t: Jet3<S>, t0: S) -> Result<Jet3<S>, EvalError> {
        Ok(match self {
            Expr::Num(v) => Jet3::constant(*v),
            Expr::Param => t,
            Expr::Neg(a) => -a.jet(t, t0)?,
            Expr::Add(a, b) => a.jet(t, t0)? + b.jet(t, t0)?,
            Expr::Sub(a, b) => a.jet(t, t0)? - b.jet(t, t0)?,
            Expr::Mul(a, b) => a.jet(t, t0)? * b.jet(t, t0)?,
            Expr::Div(a, b) => a.jet(t, t0)? / b.jet(t, t0)?,
            Expr::Pow(a, b) => {
                let base = a.jet(t, t0)?;
                let ex = b.jet(t, t0)?;
                let constant_exponent = ex.c[1..].iter().all(|v| v.is_zero());
                let p = ex.value();
                if constant_exponent && p == p.round() && p.abs() <= S::lit(64.0) {
                    base.powi(p.to_i32().unwrap_or(0))
                } else if constant_exponent {
                    base.powf(p)
                } else {
                    (base.ln() * ex).exp()
                }
            }
            Expr::Call(f, a) => {
                let x = a.jet(t, t0)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs().ok_or(EvalError::NotDifferentiable {
                        func: "abs",
                        t: t0.to_f64_lossy(),
                    })?,
                    Func::Atan => x.atan(),
                    Func::Sinh => x.sinh_cosh().0,
                    Func::Cosh => x.sinh_cosh().1,
                    Func::Tanh => x.tanh(),
                    Func::Ramp => x.ramp(),
                    Func::Flat => x.flat(),
                }
            }
        })
    }
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl<S> $tr for Expr<S> {
            type Output = Expr<S>;
            fn $m(self, o: Self) -> Self {
                Expr::$v(Box::new(self), Box::new(o))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl<S> Neg for Expr<S> {
    type Output = Expr<S>;
    fn neg(self) -> Self {
        Expr::Neg(Box::new(self))
    }
}

impl<S: fmt::Display> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Param => write!(f, "t"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("domain ({a}, {b}) is empty or inverted")]
    EmptyDomain { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(_, s) => write!(f, "number `{s}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                // exponent only if followed by digits (optionally signed)
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(text.to_string()),
                position: start,
            })?;
            out.push((Tok::Num(v, text.to_string()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "()+-*/^,".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), position: i });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::Unexpected { expected: expected.to_string(), found: t.to_string() },
            None => ParseErrorKind::UnexpectedEnd(expected.to_string()),
        };
        Err(ParseError { kind, position: self.here() })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == name) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("`{name}`"))
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let neg = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        match self.peek() {
            Some(Tok::Num(v, _)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("number"),
        }
    }

    fn expr<S: Scalar>(&mut self) -> Result<Expr<S>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = lhs + self.term()?;
            } else if self.eat_sym('-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<Expr<S>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym('*') {
                lhs = lhs * self.unary()?;
            } else if self.eat_sym('/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary<S: Scalar>(&mut self) -> Result<Expr<S>, ParseError> {
        if self.eat_sym('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power<S: Scalar>(&mut self) -> Result<Expr<S>, ParseError> {
        let base = self.primary()?;
        if self.eat_sym('^') {
            Ok(base.pow(self.unary()?))
        } else {
            Ok(base)
        }
    }

    fn primary<S: Scalar>(&mut self) -> Result<Expr<S>, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(v, _)) => {
                self.pos += 1;
                Ok(Expr::Num(S::lit(v)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Sym('(')) {
                    let f = Func::from_name(&name).ok_or(ParseError {
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                        position: at,
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_sym(')')?;
                    return Ok(Expr::call(f, arg));
                }
                match name.as_str() {
                    "t" => Ok(Expr::Param),
                    "pi" => Ok(Expr::Num(S::PI())),
                    "e" => Ok(Expr::Num(S::E())),
                    _ => Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), position: at }),
                }
            }
            _ => self.err("expression"),
        }
    }
}

/// Parsed `( x(t), y(t), z(t) ) t in (a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCurve<S> {
    pub components: [Expr<S>; 3],
    pub domain: (S, S),
}

pub fn parse_curve<S: Scalar>(src: &str) -> Result<ParsedCurve<S>, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    p.expect_sym('(')?;
    let x = p.expr()?;
    p.expect_sym(',')?;
    let y = p.expr()?;
    p.expect_sym(',')?;
    let z = p.expr()?;
    p.expect_sym(')')?;
    p.expect_ident("t")?;
    p.expect_ident("in")?;
    let dom_at = p.here();
    p.expect_sym('(')?;
    let a = p.signed_number()?;
    p.expect_sym(',')?;
    let b = p.signed_number()?;
    p.expect_sym(')')?;
    if p.peek().is_some() {
        return p.err("end of input");
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(ParseError { kind: ParseErrorKind::EmptyDomain { a, b }, position: dom_at });
    }
    Ok(ParsedCurve { components: [x, y, z], domain: (S::lit(a), S::lit(b)) })
}

/// Parse a single expression in `t` (no domain clause).
pub fn parse_expr<S: Scalar>(src: &str) -> Result<Expr<S>, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_helix() {
        let c: ParsedCurve<f64> = parse_curve("(cos(t), sin(t), t) t in (0, 6.5)").unwrap();
        assert_eq!(c.domain, (0.0, 6.5));
        assert_eq!(c.components[2], Expr::Param);
        assert!((c.components[0].eval(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unbalanced_paren_is_a_syntax_error() {
        let e = parse_curve::<f64>("(cos(t), sin(t)").unwrap_err();
        assert_eq!(e.position, "(cos(t), sin(t)".len());
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd(_)));
    }

    #[test]
    fn unsupported_function_is_named() {
        let e = parse_curve::<f64>("(t, exp(-1/t^2)*step(t), 0) t in (-1,1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownFunction("step".into()));
        assert_eq!(e.position, 16);
    }

    #[test]
    fn internal_functions_are_not_exposed() {
        for name in ["ramp", "flat"] {
            let src = format!("({name}(t), 0, 0) t in (0, 1)");
            assert!(matches!(
                parse_curve::<f64>(&src).unwrap_err().kind,
                ParseErrorKind::UnknownFunction(_)
            ));
        }
    }

    #[test]
    fn unknown_identifier_and_inverted_domain() {
        let e = parse_curve::<f64>("(x, 0, 0) t in (0, 1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("x".into()));
        let e = parse_curve::<f64>("(t, 0, 0) t in (1, 1)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::EmptyDomain { .. }));
        let e = parse_curve::<f64>("(t, 0, 0) t in (2, -1)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::EmptyDomain { .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let e: Expr<f64> = parse_expr("-t^2 + 2^3^2 / 2e2 * pi - e").unwrap();
        let t = 1.5;
        let want = -(t * t) + 2f64.powf(9.0) / 200.0 * std::f64::consts::PI - std::f64::consts::E;
        assert!((e.eval(t).unwrap() - want).abs() < 1e-12);
        let e: Expr<f64> = parse_expr("2^-1").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 0.5);
    }

    #[test]
    fn whitespace_insignificant_and_exponents() {
        let a: ParsedCurve<f64> = parse_curve("(  1.5e-1*t ,t,\n t )t in(-1e0 , 2.5E+0)").unwrap();
        assert_eq!(a.domain, (-1.0, 2.5));
        assert!((a.components[0].eval(2.0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(parse_curve::<f64>("(t, 0, 0) t in (0, 1) extra").is_err());
        assert!(matches!(
            parse_curve::<f64>("(t # 1, 0, 0) t in (0, 1)").unwrap_err().kind,
            ParseErrorKind::UnexpectedChar('#')
        ));
    }

    #[test]
    fn pole_reported() {
        let e: Expr<f64> = parse_expr("1/t").unwrap();
        assert!(matches!(e.eval_jet(0.0), Err(EvalError::Pole { .. })));
        let e: Expr<f64> = parse_expr("abs(t)").unwrap();
        assert!(matches!(e.eval_jet(0.0), Err(EvalError::NotDifferentiable { .. })));
    }

    #[test]
    fn non_integer_power_of_negative_base_is_a_pole() {
        let e: Expr<f64> = parse_expr("t^0.5").unwrap();
        assert!(e.eval_jet(-1.0).is_err());
        assert!((e.eval(4.0).unwrap() - 2.0).abs() < 1e-15);
        let e: Expr<f64> = parse_expr("t^t").unwrap();
        let d = e.eval_jet(2.0).unwrap().derivatives();
        // d/dt t^t = t^t (ln t + 1)
        assert!((d[1] - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-12);
    }
}
