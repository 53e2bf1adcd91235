//! A small expression language for user-declared potentials.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' number)?
//! base   := number | 'r' | 'x' | 'ln' '(' expr ')' | 'exp' '(' expr ')'
//!         | '(' expr ')' | '-' factor
//! ```
//!
//! Numbers are decimal with an optional exponent. The printer emits the
//! minimal parenthesization that parses back to the same tree.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The single coordinate; the letter is kept for printing.
    Var(char),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    /// A literal; negative values become `Neg(Num)` so printing round-trips.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn var() -> Expr {
        Expr::Var('r')
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: f64) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::Ln(Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    pub fn is_zero_literal(&self) -> bool {
        match self {
            Expr::Num(v) => *v == 0.0,
            Expr::Neg(a) => a.is_zero_literal(),
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(_) => x,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, n) => {
                let b = a.eval(x);
                if n.fract() == 0.0 && n.abs() <= 64.0 {
                    b.powi(*n as i32)
                } else {
                    b.powf(*n)
                }
            }
            Expr::Neg(a) => -a.eval(x),
            Expr::Ln(a) => a.eval(x).ln(),
            Expr::Exp(a) => a.eval(x).exp(),
        }
    }

    /// Replace the coordinate by another expression.
    pub fn substitute(&self, with: &Expr) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(_) => with.clone(),
            Expr::Add(a, b) => Expr::add(a.substitute(with), b.substitute(with)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(with), b.substitute(with)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(with), b.substitute(with)),
            Expr::Div(a, b) => Expr::div(a.substitute(with), b.substitute(with)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(with), *n),
            Expr::Neg(a) => Expr::neg(a.substitute(with)),
            Expr::Ln(a) => Expr::ln(a.substitute(with)),
            Expr::Exp(a) => Expr::exp(a.substitute(with)),
        }
    }

    /// Rewrite ln(exp(a)) → a, exp(ln(a)) → a and ln(c·exp(a)) → ln c + a.
    pub fn simplify_logs(&self) -> Expr {
        let s = |e: &Expr| e.simplify_logs();
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::div(s(a), s(b)),
            Expr::Pow(a, n) => Expr::pow(s(a), *n),
            Expr::Neg(a) => Expr::neg(s(a)),
            Expr::Exp(a) => match s(a) {
                Expr::Ln(inner) => *inner,
                other => Expr::exp(other),
            },
            Expr::Ln(a) => match s(a) {
                Expr::Exp(inner) => *inner,
                Expr::Mul(c, e) => match (*c, *e) {
                    (Expr::Num(c), Expr::Exp(inner)) if c > 0.0 => {
                        Expr::add(Expr::num(c.ln()), *inner)
                    }
                    (c, e) => Expr::ln(Expr::mul(c, e)),
                },
                other => Expr::ln(other),
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) | Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn write_ctx(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(v) => write_number(f, *v)?,
            Expr::Var(c) => write!(f, "{c}")?,
            Expr::Add(a, b) => {
                a.write_ctx(f, 1)?;
                f.write_str(" + ")?;
                b.write_ctx(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.write_ctx(f, 1)?;
                f.write_str(" - ")?;
                b.write_ctx(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.write_ctx(f, 2)?;
                f.write_str("*")?;
                b.write_ctx(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.write_ctx(f, 2)?;
                f.write_str("/")?;
                b.write_ctx(f, 3)?;
            }
            Expr::Pow(a, n) => {
                a.write_ctx(f, 4)?;
                f.write_str("^")?;
                write_number(f, *n)?;
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_ctx(f, 3)?;
            }
            Expr::Ln(a) => {
                f.write_str("ln(")?;
                a.write_ctx(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Exp(a) => {
                f.write_str("exp(")?;
                a.write_ctx(f, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    // Debug gives the shortest round-tripping form ("0.1", "1e-5").
    if v < 0.0 {
        write!(f, "({:?})", v)
    } else {
        write!(f, "{:?}", v)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_ctx(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
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
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                } else {
                    return Err(Error::Parse {
                        line: tl,
                        column: tc + (j - start),
                        message: "malformed exponent".into(),
                    });
                }
            }
            let text: String = chars[start..i].iter().collect();
            column += i - start;
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                line: tl,
                column: tc,
                message: format!("invalid number '{text}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: tl,
                    column: tc,
                    message: format!("number '{text}' is not finite"),
                });
            }
            out.push(Token {
                tok: Tok::Num(v),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Ident(text),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(Error::Parse {
            line: tl,
            column: tc,
            message: format!("unexpected character '{c}'"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

// Recursion guard for pathological inputs such as "------...x".
const MAX_DEPTH: usize = 256;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek().clone();
            return self.err(&t, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        self.enter()?;
        let base = self.base()?;
        let out = if self.peek().tok == Tok::Caret {
            self.bump();
            let t = self.bump();
            match t.tok {
                Tok::Num(n) => Expr::pow(base, n),
                _ => return self.err(&t, "expected a number after '^'"),
            }
        } else {
            base
        };
        self.depth -= 1;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Num(*v)),
            Tok::Minus => Ok(Expr::neg(self.factor()?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "r" => Ok(Expr::Var('r')),
                "x" => Ok(Expr::Var('x')),
                "ln" | "exp" => {
                    let open = self.bump();
                    if open.tok != Tok::LParen {
                        return self.err(&open, format!("expected '(' after '{name}'"));
                    }
                    let inner = self.expr()?;
                    self.expect_rparen()?;
                    Ok(if name == "ln" {
                        Expr::ln(inner)
                    } else {
                        Expr::exp(inner)
                    })
                }
                _ => self.err(&t, format!("unknown identifier '{name}'")),
            },
            Tok::End => self.err(&t, "unexpected end of input"),
            other => self.err(&t, format!("unexpected token {}", describe(other))),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.bump();
        if t.tok != Tok::RParen {
            return self.err(&t, "expected ')'");
        }
        Ok(())
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::Num(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::End => "end of input",
    }
}

/// Parse an expression. Errors carry 1-based line and column.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, format!("unexpected trailing {}", describe(&t.tok)));
    }
    Ok(e)
}

/// `c · x^p · (ln x)^q · (ln ln x)^s`, the building block of tail asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

impl Monomial {
    pub fn constant(c: f64) -> Self {
        Monomial {
            c,
            p: 0.0,
            q: 0.0,
            s: 0.0,
        }
    }

    fn key(&self) -> (f64, f64, f64) {
        (self.p, self.q, self.s)
    }

    /// Ordering by growth rate as x → ∞.
    pub fn growth_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        let a = self.key();
        let b = other.key();
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    }

    /// True when the monomial tends to zero as x → ∞.
    pub fn vanishes(&self) -> bool {
        self.growth_cmp(&Monomial::constant(1.0)) == std::cmp::Ordering::Less
    }

    pub fn is_constant(&self) -> bool {
        self.p == 0.0 && self.q == 0.0 && self.s == 0.0
    }

    fn times(&self, o: &Monomial) -> Monomial {
        Monomial {
            c: self.c * o.c,
            p: self.p + o.p,
            q: self.q + o.q,
            s: self.s + o.s,
        }
    }
}

/// Asymptotic expansion of an expression as a sum of monomials, ordered from
/// dominant to subdominant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TailSeries {
    pub terms: Vec<Monomial>,
}

const MAX_TERMS: usize = 256;
const BINOMIAL_ORDER: usize = 5;

impl TailSeries {
    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        let mut s = TailSeries { terms };
        s.normalize();
        s
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![Monomial::constant(c)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    fn normalize(&mut self) {
        self.terms
            .sort_by(|a, b| b.growth_cmp(a));
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.key() == t.key() => last.c += t.c,
                _ => merged.push(t),
            }
        }
        // Relative cancellation below 1e-13 of the largest coefficient is
        // treated as exact.
        let scale = merged.iter().fold(0.0f64, |m, t| m.max(t.c.abs()));
        merged.retain(|t| t.c != 0.0 && t.c.abs() > 1e-13 * scale);
        merged.truncate(MAX_TERMS);
        self.terms = merged;
    }

    pub fn add(&self, o: &TailSeries) -> TailSeries {
        let mut t = self.terms.clone();
        t.extend_from_slice(&o.terms);
        Self::from_terms(t)
    }

    pub fn scale(&self, k: f64) -> TailSeries {
        Self::from_terms(
            self.terms
                .iter()
                .map(|m| Monomial { c: m.c * k, ..*m })
                .collect(),
        )
    }

    pub fn mul(&self, o: &TailSeries) -> TailSeries {
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                t.push(a.times(b));
            }
        }
        Self::from_terms(t)
    }

    pub fn mul_monomial(&self, m: Monomial) -> TailSeries {
        Self::from_terms(self.terms.iter().map(|a| a.times(&m)).collect())
    }

    /// Raise to a real power by binomial expansion around the leading term.
    pub fn powf(&self, n: f64) -> Option<TailSeries> {
        if n == 0.0 {
            return Some(TailSeries::constant(1.0));
        }
        let lead = *self.leading()?;
        let integral = n.fract() == 0.0;
        if self.terms.len() == 1 {
            if lead.c < 0.0 && !integral {
                return None;
            }
            return Some(Self::from_terms(vec![Monomial {
                c: lead.c.powf(n),
                p: lead.p * n,
                q: lead.q * n,
                s: lead.s * n,
            }]));
        }
        if integral && (1.0..=8.0).contains(&n) {
            let mut acc = self.clone();
            for _ in 1..(n as usize) {
                acc = acc.mul(self);
            }
            return Some(acc);
        }
        if lead.c < 0.0 && !integral {
            return None;
        }
        let lead_pow = Monomial {
            c: lead.c.powf(n),
            p: lead.p * n,
            q: lead.q * n,
            s: lead.s * n,
        };
        let inv_lead = Monomial {
            c: 1.0 / lead.c,
            p: -lead.p,
            q: -lead.q,
            s: -lead.s,
        };
        let eps = TailSeries::from_terms(self.terms[1..].to_vec()).mul_monomial(inv_lead);
        let mut sum = TailSeries::constant(1.0);
        let mut eps_k = TailSeries::constant(1.0);
        let mut binom = 1.0;
        for k in 1..=BINOMIAL_ORDER {
            binom *= (n - (k as f64 - 1.0)) / k as f64;
            eps_k = eps_k.mul(&eps);
            sum = sum.add(&eps_k.scale(binom));
        }
        Some(sum.mul_monomial(lead_pow))
    }

    fn ln(&self) -> Option<TailSeries> {
        let lead = *self.leading()?;
        if lead.c <= 0.0 {
            return None;
        }
        let log_lead = if lead.q == 0.0 && lead.s == 0.0 {
            // ln(c x^p) = ln c + p ln x
            let mut t = vec![Monomial::constant(lead.c.ln())];
            if lead.p != 0.0 {
                t.push(Monomial {
                    c: lead.p,
                    p: 0.0,
                    q: 1.0,
                    s: 0.0,
                });
            }
            TailSeries::from_terms(t)
        } else if lead.p == 0.0 && lead.s == 0.0 {
            // ln(c (ln x)^q) = ln c + q ln ln x
            TailSeries::from_terms(vec![
                Monomial::constant(lead.c.ln()),
                Monomial {
                    c: lead.q,
                    p: 0.0,
                    q: 0.0,
                    s: 1.0,
                },
            ])
        } else {
            return None;
        };
        if self.terms.len() == 1 {
            return Some(log_lead);
        }
        let inv_lead = Monomial {
            c: 1.0 / lead.c,
            p: -lead.p,
            q: -lead.q,
            s: -lead.s,
        };
        let eps = TailSeries::from_terms(self.terms[1..].to_vec()).mul_monomial(inv_lead);
        let mut sum = log_lead;
        let mut eps_k = TailSeries::constant(1.0);
        for k in 1..=BINOMIAL_ORDER {
            eps_k = eps_k.mul(&eps);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum = sum.add(&eps_k.scale(sign / k as f64));
        }
        Some(sum)
    }

    fn exp(&self) -> Option<TailSeries> {
        let Some(lead) = self.leading() else {
            return Some(TailSeries::constant(1.0));
        };
        if !lead.vanishes() && !lead.is_constant() {
            // exp of something unbounded: decays faster than any monomial
            // when negative, grows otherwise.
            return if lead.c < 0.0 {
                Some(TailSeries::default())
            } else {
                None
            };
        }
        let (c0, rest) = if lead.is_constant() {
            (lead.c, TailSeries::from_terms(self.terms[1..].to_vec()))
        } else {
            (0.0, self.clone())
        };
        let mut sum = TailSeries::constant(1.0);
        let mut eps_k = TailSeries::constant(1.0);
        let mut fact = 1.0;
        for k in 1..=BINOMIAL_ORDER {
            fact *= k as f64;
            eps_k = eps_k.mul(&rest);
            sum = sum.add(&eps_k.scale(1.0 / fact));
        }
        Some(sum.scale(c0.exp()))
    }

    /// Expand an expression as x → +∞ (or x → −∞ when `reflect` is set, in
    /// which case the series is in t = −x). Returns `None` when the
    /// expression is outside the supported pattern family.
    pub fn of_expr(e: &Expr, reflect: bool) -> Option<TailSeries> {
        Some(match e {
            Expr::Num(v) => TailSeries::constant(*v),
            Expr::Var(_) => TailSeries::from_terms(vec![Monomial {
                c: if reflect { -1.0 } else { 1.0 },
                p: 1.0,
                q: 0.0,
                s: 0.0,
            }]),
            Expr::Add(a, b) => Self::of_expr(a, reflect)?.add(&Self::of_expr(b, reflect)?),
            Expr::Sub(a, b) => {
                Self::of_expr(a, reflect)?.add(&Self::of_expr(b, reflect)?.scale(-1.0))
            }
            Expr::Mul(a, b) => Self::of_expr(a, reflect)?.mul(&Self::of_expr(b, reflect)?),
            Expr::Div(a, b) => {
                let den = Self::of_expr(b, reflect)?;
                Self::of_expr(a, reflect)?.mul(&den.powf(-1.0)?)
            }
            Expr::Pow(a, n) => {
                let base = Self::of_expr(a, reflect)?;
                if base.is_zero() {
                    if *n > 0.0 {
                        TailSeries::default()
                    } else {
                        return None;
                    }
                } else {
                    base.powf(*n)?
                }
            }
            Expr::Neg(a) => Self::of_expr(a, reflect)?.scale(-1.0),
            Expr::Ln(a) => Self::of_expr(a, reflect)?.ln()?,
            Expr::Exp(a) => Self::of_expr(a, reflect)?.exp()?,
        })
    }
}
