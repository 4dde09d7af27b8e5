//! Scalar coefficient functions `a(x)` on `[0,1]^d`.
//!
//! Grammar (positions in errors are 0-based byte offsets):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := number | var | func '(' expr ')' | '(' expr ')' | '-' base
//! var    := 'x' integer            (1-based level index)
//! func   := 'sin' | 'cos' | 'exp' | 'abs'
//! ```
//!
//! The grammar is followed literally, so unary minus binds tighter than `^`:
//! `-x1^2` is `(-x1)^2`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{domain, Error, ParseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// `x_j`, 1-based.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at `x`; division by zero and non-finite values are errors.
    pub fn eval(&self, x: &[f64]) -> std::result::Result<f64, String> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var(j) => x[j - 1],
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err("division by zero".into());
                }
                a.eval(x)? / den
            }
            Expr::Pow(a, k) => a.eval(x)?.powi(*k as i32),
            Expr::Call(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Abs => v.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err("non-finite value".into())
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(j) => {
                out.insert(*j);
            }
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised; numbers use the shortest round-trip form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "(-{})", -c),
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var(j) => write!(f, "x{j}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

fn lex(text: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'0'..=b'9' | b'.' => {
                let mut integer = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integer = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integer = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("malformed number `{lit}`"),
                })?;
                out.push((Tok::Num(v, integer), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    levels: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> PResult<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(v, true) if v <= u32::MAX as f64 => {
                self.bump();
                Ok(Expr::Pow(Box::new(base), v as u32))
            }
            _ => self.syntax("expected a non-negative integer exponent after `^`"),
        }
    }

    fn base(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v, _) => Ok(Expr::Num(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.base()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            Tok::End => {
                self.at = self.toks.len() - 1;
                Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() })
            }
            other => Err(ParseError::Syntax { pos, msg: format!("unexpected {}", describe(&other)) }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> PResult<Expr> {
        if let Some(idx) = name.strip_prefix('x') {
            if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) {
                return match idx.parse::<usize>() {
                    Ok(j) if j >= 1 && j <= self.levels => Ok(Expr::Var(j)),
                    _ => Err(ParseError::UnknownIdentifier { pos, name }),
                };
            }
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(ParseError::UnknownIdentifier { pos, name });
        };
        self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
        // parse a comma-separated argument list so arity errors are reported
        // as such rather than as stray commas
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() != 1 {
            return Err(ParseError::Arity { pos, name, expected: 1, found: args.len() });
        }
        Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v, _) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses `text` as an expression in the variables `x1..x{levels}`.
pub fn parse_expr(text: &str, levels: usize) -> std::result::Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, levels };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let t = p.peek().clone();
        return p.syntax(format!("unexpected {} after expression", describe(&t)));
    }
    Ok(e)
}

/// Body of a coefficient function.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffBody {
    Expr(Expr),
    Constant(f64),
    /// `x_j`, 1-based.
    Coordinate(usize),
    /// `1` for `x_var ≥ at`, `0` otherwise.
    Step { var: usize, at: f64 },
    /// Midpoint staircase of `x_var` with `steps` steps: on
    /// `[k/steps, (k+1)/steps)` the value is `(k + 1/2)/steps`.
    Staircase { var: usize, steps: usize },
    /// Pointwise product, all factors on the same variables.
    Product(Vec<CoeffFn>),
    /// `a_1(x_1) a_2(x_2) ⋯` on consecutive blocks of variables.
    Tensor(Vec<CoeffFn>),
}

/// A real scalar function on `[0,1]^levels`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffFn {
    levels: usize,
    body: CoeffBody,
}

impl CoeffFn {
    pub fn parse(text: &str, levels: usize) -> Result<Self> {
        if levels == 0 {
            return domain("coefficient functions need at least one variable");
        }
        Ok(CoeffFn { levels, body: CoeffBody::Expr(parse_expr(text, levels)?) })
    }

    pub fn from_expr(expr: Expr, levels: usize) -> Result<Self> {
        let mut vars = BTreeSet::new();
        expr.collect_vars(&mut vars);
        if vars.iter().any(|&j| j == 0 || j > levels) {
            return domain(format!("expression uses variables outside x1..x{levels}"));
        }
        Ok(CoeffFn { levels, body: CoeffBody::Expr(expr) })
    }

    pub fn one(levels: usize) -> Self {
        Self::constant(levels, 1.0)
    }

    pub fn constant(levels: usize, c: f64) -> Self {
        CoeffFn { levels, body: CoeffBody::Constant(c) }
    }

    pub fn coordinate(levels: usize, j: usize) -> Result<Self> {
        Self::check_var(levels, j)?;
        Ok(CoeffFn { levels, body: CoeffBody::Coordinate(j) })
    }

    pub fn step(levels: usize, var: usize, at: f64) -> Result<Self> {
        Self::check_var(levels, var)?;
        Ok(CoeffFn { levels, body: CoeffBody::Step { var, at } })
    }

    pub fn staircase(levels: usize, var: usize, steps: usize) -> Result<Self> {
        Self::check_var(levels, var)?;
        if steps == 0 {
            return domain("a staircase needs at least one step");
        }
        Ok(CoeffFn { levels, body: CoeffBody::Staircase { var, steps } })
    }

    fn check_var(levels: usize, j: usize) -> Result<()> {
        if j == 0 || j > levels {
            return domain(format!("variable x{j} outside x1..x{levels}"));
        }
        Ok(())
    }

    pub fn product(factors: Vec<CoeffFn>) -> Result<Self> {
        let levels = factors.first().map(|f| f.levels).ok_or_else(|| Error::Domain("empty product".into()))?;
        if factors.iter().any(|f| f.levels != levels) {
            return domain("product factors must share their variables");
        }
        if factors.len() == 1 {
            return Ok(factors.into_iter().next().unwrap());
        }
        Ok(CoeffFn { levels, body: CoeffBody::Product(factors) })
    }

    /// `(a_1 ⊗ ⋯ ⊗ a_k)(x_1,…,x_k) = a_1(x_1)⋯a_k(x_k)`.
    pub fn tensor(parts: Vec<CoeffFn>) -> Result<Self> {
        if parts.is_empty() {
            return domain("empty tensor product");
        }
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let levels = parts.iter().map(|p| p.levels).sum();
        Ok(CoeffFn { levels, body: CoeffBody::Tensor(parts) })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn body(&self) -> &CoeffBody {
        &self.body
    }

    pub fn is_constant(&self) -> Option<f64> {
        match &self.body {
            CoeffBody::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// Value at `x ∈ [0,1]^levels`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.levels {
            return domain(format!("point of dimension {} for {} variables", x.len(), self.levels));
        }
        self.eval_unchecked(x).map_err(|reason| Error::Eval { point: x.to_vec(), reason })
    }

    fn eval_unchecked(&self, x: &[f64]) -> std::result::Result<f64, String> {
        Ok(match &self.body {
            CoeffBody::Expr(e) => e.eval(x)?,
            CoeffBody::Constant(c) => *c,
            CoeffBody::Coordinate(j) => x[j - 1],
            CoeffBody::Step { var, at } => {
                if x[var - 1] >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            CoeffBody::Staircase { var, steps } => {
                let m = *steps as f64;
                let k = ((m * x[var - 1]).floor().max(0.0)).min(m - 1.0);
                (k + 0.5) / m
            }
            CoeffBody::Product(fs) => {
                let mut v = 1.0;
                for f in fs {
                    v *= f.eval_unchecked(x)?;
                }
                v
            }
            CoeffBody::Tensor(parts) => {
                let mut v = 1.0;
                let mut at = 0;
                for p in parts {
                    v *= p.eval_unchecked(&x[at..at + p.levels])?;
                    at += p.levels;
                }
                v
            }
        })
    }

    /// 1-based indices of the variables the function may depend on.
    pub fn variables_used(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        match &self.body {
            CoeffBody::Expr(e) => e.collect_vars(&mut out),
            CoeffBody::Constant(_) => {}
            CoeffBody::Coordinate(j) => {
                out.insert(*j);
            }
            CoeffBody::Step { var, .. } | CoeffBody::Staircase { var, .. } => {
                out.insert(*var);
            }
            CoeffBody::Product(fs) => {
                for f in fs {
                    out.extend(f.variables_used());
                }
            }
            CoeffBody::Tensor(parts) => {
                let mut at = 0;
                for p in parts {
                    out.extend(p.variables_used().into_iter().map(|j| j + at));
                    at += p.levels;
                }
            }
        }
        out
    }
}

impl fmt::Display for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            CoeffBody::Expr(e) => write!(f, "{e}"),
            CoeffBody::Constant(c) => write!(f, "{}", Expr::Num(*c)),
            CoeffBody::Coordinate(j) => write!(f, "x{j}"),
            CoeffBody::Step { var, at } => write!(f, "step(x{var} >= {at})"),
            CoeffBody::Staircase { var, steps } => write!(f, "staircase{steps}(x{var})"),
            CoeffBody::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", parts.join(" * "))
            }
            CoeffBody::Tensor(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| format!("[{p}]")).collect();
                write!(f, "{}", parts.join(" ⊗ "))
            }
        }
    }
}
