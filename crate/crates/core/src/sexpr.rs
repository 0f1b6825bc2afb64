//! Component expressions in the variable `t`.
//!
//! Grammar, highest binding last:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := base ('^' uint)?
//! base  := number | 'pi' | 't' | 'j' | func '(' expr ')' | '(' expr ')'
//! func  := 'sin' | 'cos' | 'sinh' | 'cosh' | 'exp'
//! ```
//!
//! Only entire functions are accepted: exponents are non-negative integers and
//! every denominator must be an invertible constant.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dnum::DNum;
use crate::holo::{HoloMap, NullBox, RealFn1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    fn apply_real(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
        }
    }

    fn apply_dnum(self, x: DNum) -> DNum {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
        }
    }
}

// Names that would parse as functions but are not entire on 𝔻.
const NON_ENTIRE: &[&str] = &[
    "tan", "tanh", "cot", "coth", "sec", "sech", "csc", "csch", "log", "ln", "sqrt", "asin",
    "acos", "atan", "asinh", "acosh", "atanh", "abs",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    T,
    J,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Apply(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unbalanced parentheses")]
    UnbalancedParen,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("function {0:?} is not entire on the double numbers")]
    NonEntireFunction(String),
    #[error("function {0:?} must be applied with parentheses")]
    BareFunction(String),
    #[error("exponent must be a non-negative integer literal")]
    NonIntegerExponent,
    #[error("division by the literal 0")]
    DivisionByZeroLiteral,
    #[error("denominator depends on t; only constant denominators keep the map entire")]
    NonConstantDenominator,
    #[error("denominator is a non-invertible constant ({0})")]
    NonInvertibleDenominator(DNum),
    #[error("malformed number")]
    BadNumber,
}

/// A parse failure at a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { offset, kind })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn peek_tok(&mut self) -> Option<u8> {
        self.skip_ws();
        self.peek()
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.src[self.pos..].chars().next() {
            None => self.err(self.pos, ParseErrorKind::UnexpectedEnd),
            Some(')') => self.err(self.pos, ParseErrorKind::UnbalancedParen),
            Some(c) => self.err(self.pos, ParseErrorKind::UnexpectedChar(c)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek_tok() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek_tok() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let rhs = self.unary()?;
                    check_denominator(&rhs, at)?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_tok() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Num(c) => Expr::Num(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek_tok() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start
            || matches!(self.peek(), Some(b'.' | b'e' | b'E'))
            || self.pos - start > 9
        {
            return self.err(start, ParseErrorKind::NonIntegerExponent);
        }
        let n: u32 = self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::NonIntegerExponent,
            })?;
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let Some(c) = self.peek_tok() else {
            return self.unexpected();
        };
        match c {
            b'0'..=b'9' | b'.' => self.number(),
            b'(' => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_tok() != Some(b')') {
                    if self.peek().is_none() {
                        return self.err(self.pos, ParseErrorKind::UnbalancedParen);
                    }
                    let _ = open;
                    return self.unexpected();
                }
                self.pos += 1;
                Ok(inner)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => self.unexpected(),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
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
        self.pos = i;
        match self.src[start..i].parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => self.err(start, ParseErrorKind::BadNumber),
        }
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        match name {
            "t" => return Ok(Expr::T),
            "j" => return Ok(Expr::J),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        if NON_ENTIRE.contains(&name) {
            return self.err(start, ParseErrorKind::NonEntireFunction(name.to_string()));
        }
        let Some(func) = Func::from_name(name) else {
            return self.err(start, ParseErrorKind::UnknownIdentifier(name.to_string()));
        };
        if self.peek_tok() != Some(b'(') {
            return self.err(start, ParseErrorKind::BareFunction(name.to_string()));
        }
        self.pos += 1;
        let arg = self.expr()?;
        if self.peek_tok() != Some(b')') {
            if self.peek().is_none() {
                return self.err(self.pos, ParseErrorKind::UnbalancedParen);
            }
            return self.unexpected();
        }
        self.pos += 1;
        Ok(Expr::Apply(func, Box::new(arg)))
    }
}

fn check_denominator(e: &Expr, at: usize) -> Result<(), ParseError> {
    let fail = |kind| Err(ParseError { offset: at, kind });
    if let Expr::Num(c) = e {
        if *c == 0.0 {
            return fail(ParseErrorKind::DivisionByZeroLiteral);
        }
    }
    if e.depends_on_t() {
        return fail(ParseErrorKind::NonConstantDenominator);
    }
    let value = e.eval_dnum(DNum::ZERO);
    if value.checked_inv().is_err() {
        return fail(ParseErrorKind::NonInvertibleDenominator(value));
    }
    Ok(())
}

/// Parses a component expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if p.peek_tok().is_some() {
        return p.unexpected();
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// Smart constructors with constant folding. These never change the value of
// an expression, only its shape.
impl Expr {
    pub fn num(c: f64) -> Expr {
        Expr::Num(c)
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_num() == Some(1.0)
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Num(c) => Expr::Num(-c),
            Expr::Neg(inner) => *inner,
            Expr::Mul(l, r) if l.as_num().is_some() => Expr::mul(Expr::Num(-l.as_num().unwrap()), *r),
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        match (l.as_num(), r.as_num()) {
            (Some(a), Some(b)) => Expr::Num(a + b),
            (Some(0.0), _) => r,
            (_, Some(0.0)) => l,
            _ => match r {
                Expr::Neg(inner) => Expr::Sub(Box::new(l), inner),
                r => match r.negated_literal() {
                    Some(pos) => Expr::Sub(Box::new(l), Box::new(pos)),
                    None => Expr::Add(Box::new(l), Box::new(r)),
                },
            },
        }
    }

    /// `-c` or `-c*x` with a literal `c > 0`, returned as the positive form.
    fn negated_literal(&self) -> Option<Expr> {
        match self {
            Expr::Num(c) if *c < 0.0 => Some(Expr::Num(-c)),
            Expr::Mul(l, r) => match **l {
                Expr::Num(c) if c < 0.0 => Some(Expr::Mul(Box::new(Expr::Num(-c)), r.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn sub(l: Expr, r: Expr) -> Expr {
        match (l.as_num(), r.as_num()) {
            (Some(a), Some(b)) => Expr::Num(a - b),
            (Some(0.0), _) => Expr::neg(r),
            (_, Some(0.0)) => l,
            _ => Expr::Sub(Box::new(l), Box::new(r)),
        }
    }

    pub fn mul(l: Expr, r: Expr) -> Expr {
        if l.is_zero() || r.is_zero() {
            return Expr::Num(0.0);
        }
        if l.is_one() {
            return r;
        }
        if r.is_one() {
            return l;
        }
        match (l, r) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a * b),
            (Expr::Num(a), Expr::Neg(x)) => Expr::mul(Expr::Num(-a), *x),
            (Expr::Num(a), Expr::Mul(x, y)) if x.as_num().is_some() => {
                Expr::mul(Expr::Num(a * x.as_num().unwrap()), *y)
            }
            (l, Expr::Num(b)) => Expr::mul(Expr::Num(b), l),
            (Expr::Num(-1.0), r) => Expr::Neg(Box::new(r)),
            (l, r) => Expr::Mul(Box::new(l), Box::new(r)),
        }
    }

    pub fn div(l: Expr, r: Expr) -> Expr {
        if r.is_one() {
            return l;
        }
        if l.is_zero() {
            return Expr::Num(0.0);
        }
        match (l.as_num(), r.as_num()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::Num(a / b),
            _ => Expr::Div(Box::new(l), Box::new(r)),
        }
    }

    pub fn pow(base: Expr, n: u32) -> Expr {
        match n {
            0 => Expr::Num(1.0),
            1 => base,
            _ => match base.as_num() {
                Some(c) => Expr::Num(c.powi(n as i32)),
                None => Expr::Pow(Box::new(base), n),
            },
        }
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        Expr::Apply(f, Box::new(arg))
    }

    /// `c + s·j` as an expression, dropping zero parts.
    pub fn dnum_const(c: DNum) -> Expr {
        let im = Expr::mul(Expr::Num(c.im), Expr::J);
        if c.im == 0.0 {
            Expr::Num(c.re)
        } else {
            Expr::add(Expr::Num(c.re), im)
        }
    }

    /// Multiplies by a double-number constant, folding real factors.
    pub fn scale_by(self, k: DNum) -> Expr {
        if k.im == 0.0 {
            Expr::mul(Expr::Num(k.re), self)
        } else {
            Expr::mul(Expr::dnum_const(k), self)
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::T => true,
            Expr::Num(_) | Expr::Pi | Expr::J => false,
            Expr::Neg(x) | Expr::Pow(x, _) | Expr::Apply(_, x) => x.depends_on_t(),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.depends_on_t() || r.depends_on_t()
            }
        }
    }

    /// Replaces every occurrence of `t` with `with`.
    pub fn subst_t(&self, with: &Expr) -> Expr {
        let go = |x: &Expr| Box::new(x.subst_t(with));
        match self {
            Expr::T => with.clone(),
            Expr::Num(_) | Expr::Pi | Expr::J => self.clone(),
            Expr::Neg(x) => Expr::Neg(go(x)),
            Expr::Pow(x, n) => Expr::Pow(go(x), *n),
            Expr::Apply(f, x) => Expr::Apply(*f, go(x)),
            Expr::Add(l, r) => Expr::Add(go(l), go(r)),
            Expr::Sub(l, r) => Expr::Sub(go(l), go(r)),
            Expr::Mul(l, r) => Expr::Mul(go(l), go(r)),
            Expr::Div(l, r) => Expr::Div(go(l), go(r)),
        }
    }

    /// Evaluates with `t = x` real and `j` replaced by the real `j_value`
    /// (`−1` on the `q` axis, `+1` on the `q̄` axis).
    pub fn eval_real(&self, x: f64, j_value: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Pi => std::f64::consts::PI,
            Expr::T => x,
            Expr::J => j_value,
            Expr::Neg(e) => -e.eval_real(x, j_value),
            Expr::Add(l, r) => l.eval_real(x, j_value) + r.eval_real(x, j_value),
            Expr::Sub(l, r) => l.eval_real(x, j_value) - r.eval_real(x, j_value),
            Expr::Mul(l, r) => l.eval_real(x, j_value) * r.eval_real(x, j_value),
            Expr::Div(l, r) => l.eval_real(x, j_value) / r.eval_real(x, j_value),
            Expr::Pow(b, n) => b.eval_real(x, j_value).powi(*n as i32),
            Expr::Apply(f, e) => f.apply_real(e.eval_real(x, j_value)),
        }
    }

    /// Evaluates directly in 𝔻 with (u, v)-form arithmetic.
    pub fn eval_dnum(&self, t: DNum) -> DNum {
        match self {
            Expr::Num(c) => DNum::real(*c),
            Expr::Pi => DNum::real(std::f64::consts::PI),
            Expr::T => t,
            Expr::J => crate::dnum::J,
            Expr::Neg(e) => -e.eval_dnum(t),
            Expr::Add(l, r) => l.eval_dnum(t) + r.eval_dnum(t),
            Expr::Sub(l, r) => l.eval_dnum(t) - r.eval_dnum(t),
            Expr::Mul(l, r) => {
                let (a, b) = (l.eval_dnum(t), r.eval_dnum(t));
                DNum::new(a.re * b.re + a.im * b.im, a.re * b.im + a.im * b.re)
            }
            Expr::Div(l, r) => {
                let (a, b) = (l.eval_dnum(t), r.eval_dnum(t));
                let d = b.re * b.re - b.im * b.im;
                DNum::new(
                    (a.re * b.re - a.im * b.im) / d,
                    (a.im * b.re - a.re * b.im) / d,
                )
            }
            Expr::Pow(b, n) => {
                let base = b.eval_dnum(t);
                let mut acc = DNum::ONE;
                for _ in 0..*n {
                    acc = DNum::new(
                        acc.re * base.re + acc.im * base.im,
                        acc.re * base.im + acc.im * base.re,
                    );
                }
                acc
            }
            Expr::Apply(f, e) => f.apply_dnum(e.eval_dnum(t)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Symbolic `d/dt`, treating `j` and `pi` as constants.
pub fn diff_t(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Pi | Expr::J => Expr::Num(0.0),
        Expr::T => Expr::Num(1.0),
        Expr::Neg(x) => Expr::neg(diff_t(x)),
        Expr::Add(l, r) => Expr::add(diff_t(l), diff_t(r)),
        Expr::Sub(l, r) => Expr::sub(diff_t(l), diff_t(r)),
        Expr::Mul(l, r) => Expr::add(
            Expr::mul(diff_t(l), (**r).clone()),
            Expr::mul((**l).clone(), diff_t(r)),
        ),
        Expr::Div(l, r) => {
            let dr = diff_t(r);
            if dr.is_zero() {
                Expr::div(diff_t(l), (**r).clone())
            } else {
                Expr::div(
                    Expr::sub(
                        Expr::mul(diff_t(l), (**r).clone()),
                        Expr::mul((**l).clone(), dr),
                    ),
                    Expr::pow((**r).clone(), 2),
                )
            }
        }
        Expr::Pow(x, n) => match n {
            0 => Expr::Num(0.0),
            _ => Expr::mul(
                Expr::mul(Expr::Num(*n as f64), Expr::pow((**x).clone(), n - 1)),
                diff_t(x),
            ),
        },
        Expr::Apply(f, x) => {
            let inner = (**x).clone();
            let outer = match f {
                Func::Sin => Expr::apply(Func::Cos, inner),
                Func::Cos => Expr::neg(Expr::apply(Func::Sin, inner)),
                Func::Sinh => Expr::apply(Func::Cosh, inner),
                Func::Cosh => Expr::apply(Func::Sinh, inner),
                Func::Exp => Expr::apply(Func::Exp, inner),
            };
            Expr::mul(outer, diff_t(x))
        }
    }
}

/// Symbolic antiderivative vanishing at `t = 0`, when the expression is a
/// linear combination of terms with a known rule.
pub fn integrate_t(e: &Expr) -> Option<Expr> {
    if !e.depends_on_t() {
        return Some(Expr::mul(e.clone(), Expr::T));
    }
    match e {
        Expr::T => Some(Expr::div(Expr::pow(Expr::T, 2), Expr::Num(2.0))),
        Expr::Neg(x) => integrate_t(x).map(Expr::neg),
        Expr::Add(l, r) => Some(Expr::add(integrate_t(l)?, integrate_t(r)?)),
        Expr::Sub(l, r) => Some(Expr::sub(integrate_t(l)?, integrate_t(r)?)),
        Expr::Mul(l, r) if !l.depends_on_t() => Some(Expr::mul((**l).clone(), integrate_t(r)?)),
        Expr::Mul(l, r) if !r.depends_on_t() => Some(Expr::mul((**r).clone(), integrate_t(l)?)),
        Expr::Div(l, r) if !r.depends_on_t() => Some(Expr::div(integrate_t(l)?, (**r).clone())),
        Expr::Pow(x, n) if **x == Expr::T => Some(Expr::div(
            Expr::pow(Expr::T, n + 1),
            Expr::Num((n + 1) as f64),
        )),
        Expr::Apply(f, x) if **x == Expr::T => Some(match f {
            Func::Sin => Expr::sub(Expr::Num(1.0), Expr::apply(Func::Cos, Expr::T)),
            Func::Cos => Expr::apply(Func::Sin, Expr::T),
            Func::Sinh => Expr::sub(Expr::apply(Func::Cosh, Expr::T), Expr::Num(1.0)),
            Func::Cosh => Expr::apply(Func::Sinh, Expr::T),
            Func::Exp => Expr::sub(Expr::apply(Func::Exp, Expr::T), Expr::Num(1.0)),
        }),
        _ => None,
    }
}

/// Lowers to the null-component pair: `t ↦ a, j ↦ −1` on the `q` axis and
/// `t ↦ b, j ↦ +1` on the `q̄` axis, since `j = q̄ − q`.
pub fn lower(e: &Expr) -> HoloMap {
    let shared = Arc::new(e.clone());
    HoloMap::from_parts(
        RealFn1::symbolic(shared.clone(), -1.0),
        RealFn1::symbolic(shared.clone(), 1.0),
        NullBox::ENTIRE,
        Some(shared),
    )
}

fn fmt_num(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let plain = format!("{c}");
    if plain.len() > 24 {
        write!(f, "{c:e}")
    } else {
        f.write_str(&plain)
    }
}

fn fmt_child(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.prec() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Serializes with the minimal parentheses that re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => fmt_num(*c, f),
            Expr::Pi => f.write_str("pi"),
            Expr::T => f.write_str("t"),
            Expr::J => f.write_str("j"),
            Expr::Neg(x) => {
                f.write_str("-")?;
                fmt_child(x, 3, f)
            }
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                fmt_child(l, 1, f)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                fmt_child(r, 2, f)
            }
            Expr::Mul(l, r) | Expr::Div(l, r) => {
                fmt_child(l, 2, f)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                fmt_child(r, 3, f)
            }
            Expr::Pow(b, n) => {
                fmt_child(b, 5, f)?;
                write!(f, "^{n}")
            }
            Expr::Apply(func, x) => write!(f, "{}({x})", func.name()),
        }
    }
}
