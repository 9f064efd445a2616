//! Set-expression language.
//!
//! ```text
//! expr  := term ("u" term)*
//! term  := "[a,b]" | "(a,b]" | "[a,b)" | "(a,b)" | "{p, ...}"
//!        | "tail(b=<form>, c=<form>, from=<int>[, to=<int>])"
//!        | "blocks(lo=<form>, hi=<form>, from=<int>[, to=<int>])"
//!        | "copies(ifs=<ifs>, lo=<form>, hi=<form>, from=<int>[, to=<int>])"
//!        | "ifs(<preset> | r:t, ...)" | "place(ifs(...), lo, hi)"
//!        | "shift(expr, t)" | "scale(expr, a)" | "clip(expr, x, y)" | "recip(expr)"
//! ```
//!
//! Forms are sums of products of rationals, the index `n`, powers such as
//! `n^-6`, `2^n`, `(1/2)^n` or `2^-n`, and the printed shapes of lazy
//! sequences (`1/(...)`, `(a)*(...) + (t)`).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;
use unbounded_means::error::SetError;
use unbounded_means::ext::ExtReal;
use unbounded_means::ifs::Ifs;
use unbounded_means::num::{pow_q, Q};
use unbounded_means::seq::{ExpPoly, Seq};
use unbounded_means::sets::{BlockFamily, RealSet, Shape};

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("semantic error at {pos}: {source}")]
    Semantic { pos: Pos, source: SetError },
}

impl DslError {
    pub fn pos(&self) -> Pos {
        match self {
            DslError::Syntax { pos, .. } | DslError::Semantic { pos, .. } => *pos,
        }
    }
}

/// Parsed set expression.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    Interval { lo: ExtReal, hi: ExtReal, lo_closed: bool, hi_closed: bool },
    Points(Vec<Q>),
    Family { lo: Seq, hi: Seq, shape: Shape, from: u64, to: Option<u64> },
    Fractal { ifs: Ifs, lo: Q, hi: Q },
    Union(Vec<(Pos, SetExpr)>),
    Affine { inner: Box<SetExpr>, a: Q, t: Q, pos: Pos },
    Clip { inner: Box<SetExpr>, x: ExtReal, y: ExtReal, pos: Pos },
    Recip { inner: Box<SetExpr>, pos: Pos },
}

impl SetExpr {
    /// Lower to the canonical set.
    pub fn lower(&self) -> Result<RealSet, DslError> {
        self.lower_at(Pos { line: 1, col: 1 })
    }

    fn lower_at(&self, at: Pos) -> Result<RealSet, DslError> {
        let sem = |pos: Pos| move |source: SetError| DslError::Semantic { pos, source };
        match self {
            SetExpr::Interval { lo, hi, lo_closed, hi_closed } => {
                Ok(RealSet::interval(lo.clone(), hi.clone(), *lo_closed, *hi_closed))
            }
            SetExpr::Points(ps) => Ok(RealSet::points(ps.clone())),
            SetExpr::Family { lo, hi, shape, from, to } => {
                let f = BlockFamily::new(lo.clone(), hi.clone(), shape.clone(), *from, *to).map_err(sem(at))?;
                RealSet::family(f).map_err(sem(at))
            }
            SetExpr::Fractal { ifs, lo, hi } => Ok(RealSet::fractal(ifs.clone(), lo.clone(), hi.clone())),
            SetExpr::Union(parts) => {
                let mut acc = RealSet::empty();
                for (pos, p) in parts {
                    let s = p.lower_at(*pos)?;
                    acc = acc.union(&s).map_err(sem(*pos))?;
                }
                Ok(acc)
            }
            SetExpr::Affine { inner, a, t, pos } => inner.lower_at(*pos)?.affine(a, t).map_err(sem(*pos)),
            SetExpr::Clip { inner, x, y, pos } => inner.lower_at(*pos)?.clip(x, y).map_err(sem(*pos)),
            SetExpr::Recip { inner, pos } => inner.lower_at(*pos)?.reciprocal().map_err(sem(*pos)),
        }
    }
}

/// Parse a set expression.
pub fn parse_set_expr(text: &str) -> Result<SetExpr, DslError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        _ => Err(p.unexpected("'u' or end of input")),
    }
}

/// Parse and lower in one step.
pub fn parse_set(text: &str) -> Result<RealSet, DslError> {
    parse_set_expr(text)?.lower()
}

/// Parse a constant: a rational expression such as `-3/2`, `2^-5` or `0.25`.
pub fn parse_rational(text: &str) -> Result<Q, DslError> {
    let mut p = Parser::new(text)?;
    let start = p.pos();
    let f = p.form()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(p.unexpected("end of input"));
    }
    f.constant().ok_or_else(|| syntax(start, "expected a constant"))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) => write!(f, "number '{s}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), pos));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if "()[]{},=+-*/^:".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else if c == '∪' {
            out.push((Tok::Ident("u".into()), pos));
            i += 1;
        } else {
            return Err(syntax(pos, format!("unexpected character '{c}'")));
        }
        col += i - start;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Value of a form: an exact closed form or a lazy sequence.
#[derive(Clone, Debug)]
enum Form {
    Poly(ExpPoly),
    Lazy(Seq),
}

impl Form {
    fn constant(&self) -> Option<Q> {
        match self {
            Form::Poly(p) => p.as_constant(),
            Form::Lazy(_) => None,
        }
    }

    fn seq(self) -> Seq {
        match self {
            Form::Poly(p) => Seq::Poly(p),
            Form::Lazy(s) => s,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, DslError> {
        Ok(Parser { toks: lex(text)?, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, want: &str) -> DslError {
        syntax(self.pos(), format!("expected {want}, found {}", self.peek()))
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DslError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn expr(&mut self) -> Result<SetExpr, DslError> {
        let mut parts = vec![(self.pos(), self.term()?)];
        while self.is_ident("u") {
            self.bump();
            parts.push((self.pos(), self.term()?));
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap().1 } else { SetExpr::Union(parts) })
    }

    fn term(&mut self) -> Result<SetExpr, DslError> {
        match self.peek().clone() {
            Tok::Sym('[') | Tok::Sym('(') => self.interval(),
            Tok::Sym('{') => self.points(),
            Tok::Ident(name) => {
                let pos = self.pos();
                self.bump();
                self.expect('(')?;
                let e = self.call(&name, pos)?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.unexpected("a set term")),
        }
    }

    fn interval(&mut self) -> Result<SetExpr, DslError> {
        let lo_closed = self.bump() == Tok::Sym('[');
        let lo = self.endpoint()?;
        self.expect(',')?;
        let hi = self.endpoint()?;
        let hi_closed = match self.peek() {
            Tok::Sym(']') => true,
            Tok::Sym(')') => false,
            _ => return Err(self.unexpected("']' or ')'")),
        };
        self.bump();
        Ok(SetExpr::Interval { lo, hi, lo_closed, hi_closed })
    }

    fn points(&mut self) -> Result<SetExpr, DslError> {
        self.expect('{')?;
        let mut ps = Vec::new();
        if !self.eat('}') {
            loop {
                ps.push(self.constant()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(SetExpr::Points(ps))
    }

    fn endpoint(&mut self) -> Result<ExtReal, DslError> {
        let sign = match (self.peek(), self.peek_at(1)) {
            (Tok::Sym(c @ ('+' | '-')), Tok::Ident(s)) if s == "inf" => Some(*c),
            (Tok::Ident(s), _) if s == "inf" => Some('+'),
            _ => None,
        };
        match sign {
            Some(c) => {
                if self.is_ident("inf") {
                    self.bump();
                } else {
                    self.bump();
                    self.bump();
                }
                Ok(if c == '-' { ExtReal::NegInf } else { ExtReal::PosInf })
            }
            None => Ok(ExtReal::Finite(self.constant()?)),
        }
    }

    fn constant(&mut self) -> Result<Q, DslError> {
        let pos = self.pos();
        self.form()?.constant().ok_or_else(|| syntax(pos, "expected a constant (the index n is not allowed here)"))
    }

    fn index(&mut self) -> Result<u64, DslError> {
        match self.peek().clone() {
            Tok::Num(s) if !s.contains('.') => {
                let pos = self.pos();
                self.bump();
                s.parse().map_err(|_| syntax(pos, "index out of range"))
            }
            _ => Err(self.unexpected("a non-negative integer")),
        }
    }

    fn call(&mut self, name: &str, pos: Pos) -> Result<SetExpr, DslError> {
        match name {
            "tail" | "blocks" | "copies" => self.family(name),
            "ifs" => {
                let (ifs, lo, hi) = self.ifs_body()?;
                Ok(SetExpr::Fractal { ifs, lo, hi })
            }
            "place" => {
                let at = self.pos();
                let inner = self.ident()?;
                if inner != "ifs" {
                    return Err(syntax(at, "expected ifs(...)"));
                }
                self.expect('(')?;
                let (ifs, _, _) = self.ifs_body()?;
                self.expect(')')?;
                self.expect(',')?;
                let lo = self.constant()?;
                self.expect(',')?;
                let hi = self.constant()?;
                if lo >= hi {
                    return Err(syntax(at, "placement needs lo < hi"));
                }
                Ok(SetExpr::Fractal { ifs, lo, hi })
            }
            "shift" | "scale" => {
                let inner = self.expr()?;
                self.expect(',')?;
                let v = self.constant()?;
                let (a, t) = if name == "shift" { (Q::one(), v) } else { (v, Q::zero()) };
                Ok(SetExpr::Affine { inner: Box::new(inner), a, t, pos })
            }
            "clip" => {
                let inner = self.expr()?;
                self.expect(',')?;
                let x = self.endpoint()?;
                self.expect(',')?;
                let y = self.endpoint()?;
                Ok(SetExpr::Clip { inner: Box::new(inner), x, y, pos })
            }
            "recip" => {
                let inner = self.expr()?;
                Ok(SetExpr::Recip { inner: Box::new(inner), pos })
            }
            _ => Err(syntax(pos, format!("unknown function '{name}'"))),
        }
    }

    /// Body of `ifs(...)`: a preset name or a list of maps `r:t`.
    fn ifs_body(&mut self) -> Result<(Ifs, Q, Q), DslError> {
        let pos = self.pos();
        if let Tok::Ident(name) = self.peek().clone() {
            self.bump();
            let ifs = Ifs::preset(&name).map_err(|source| DslError::Semantic { pos, source })?;
            return Ok((ifs, Q::zero(), Q::one()));
        }
        let mut maps = Vec::new();
        loop {
            let r = self.constant()?;
            self.expect(':')?;
            let t = self.constant()?;
            maps.push((r, t));
            if !self.eat(',') {
                break;
            }
        }
        Ifs::from_maps(maps).map_err(|source| DslError::Semantic { pos, source })
    }

    fn family(&mut self, kind: &str) -> Result<SetExpr, DslError> {
        let mut ifs = None;
        let (mut a, mut b, mut from, mut to) = (None, None, None, None);
        loop {
            let pos = self.pos();
            let key = self.ident()?;
            self.expect('=')?;
            match (kind, key.as_str()) {
                ("copies", "ifs") => {
                    let bracket = self.eat('(');
                    let (i, _, _) = self.ifs_body()?;
                    if bracket {
                        self.expect(')')?;
                    }
                    ifs = Some(i);
                }
                ("tail", "b") | ("blocks" | "copies", "lo") => a = Some(self.form()?),
                ("tail", "c") | ("blocks" | "copies", "hi") => b = Some(self.form()?),
                (_, "from") => from = Some(self.index()?),
                (_, "to") => to = Some(self.index()?),
                _ => return Err(syntax(pos, format!("unknown argument '{key}' for {kind}"))),
            }
            if !self.eat(',') {
                break;
            }
        }
        let here = self.pos();
        let missing = |what: &str| syntax(here, format!("{kind} needs {what}="));
        let from = from.ok_or_else(|| missing("from"))?;
        let (a, b) = match kind {
            "tail" => (a.ok_or_else(|| missing("b"))?, b.ok_or_else(|| missing("c"))?),
            _ => (a.ok_or_else(|| missing("lo"))?, b.ok_or_else(|| missing("hi"))?),
        };
        let (lo, hi, shape) = match kind {
            "tail" => {
                let (Form::Poly(bp), Form::Poly(cp)) = (a, b) else {
                    return Err(syntax(here, "tail needs closed-form b and c; use blocks(lo=, hi=)"));
                };
                if cp.is_zero() {
                    (Seq::Poly(bp.clone()), Seq::Poly(bp), Shape::Point)
                } else {
                    let h = bp.add(&cp);
                    (Seq::Poly(bp), Seq::Poly(h), Shape::Interval)
                }
            }
            "blocks" => {
                let (lo, hi) = (a.seq(), b.seq());
                let shape = if lo == hi { Shape::Point } else { Shape::Interval };
                (lo, hi, shape)
            }
            _ => {
                let ifs = ifs.ok_or_else(|| missing("ifs"))?;
                (a.seq(), b.seq(), Shape::Fractal(ifs))
            }
        };
        Ok(SetExpr::Family { lo, hi, shape, from, to })
    }

    fn form(&mut self) -> Result<Form, DslError> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let mut acc = self.product()?;
        if neg {
            acc = self.scale_form(acc, &-Q::one())?;
        }
        loop {
            let sign = match self.peek() {
                Tok::Sym('+') => Q::one(),
                Tok::Sym('-') => -Q::one(),
                _ => break,
            };
            let pos = self.pos();
            self.bump();
            let rhs = self.product()?;
            let rhs = self.scale_form(rhs, &sign)?;
            acc = add_forms(acc, rhs).ok_or_else(|| syntax(pos, "cannot add two non-closed-form sequences"))?;
        }
        Ok(acc)
    }

    fn scale_form(&self, f: Form, k: &Q) -> Result<Form, DslError> {
        Ok(match f {
            Form::Poly(p) => Form::Poly(p.scale(k)),
            Form::Lazy(s) => Form::Lazy(s.affine(k, &Q::zero())),
        })
    }

    fn product(&mut self) -> Result<Form, DslError> {
        let mut acc = self.power()?;
        loop {
            let div = match self.peek() {
                Tok::Sym('*') => false,
                Tok::Sym('/') => true,
                _ => break,
            };
            let pos = self.pos();
            self.bump();
            let rhs = self.power()?;
            acc = if div { div_forms(acc, rhs) } else { mul_forms(acc, rhs) }
                .ok_or_else(|| syntax(pos, "unsupported product of sequences"))?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Form, DslError> {
        let base_pos = self.pos();
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat('-');
        let bad = |m: &str| syntax(pos, m.to_string());
        match self.peek().clone() {
            Tok::Ident(s) if s == "n" => {
                self.bump();
                let b = base.constant().ok_or_else(|| bad("only a constant may be raised to the power n"))?;
                if !b.is_positive() {
                    return Err(syntax(base_pos, "geometric base must be positive"));
                }
                let b = if neg { b.recip() } else { b };
                Ok(Form::Poly(ExpPoly::term(Q::one(), 0, b)))
            }
            Tok::Num(s) if !s.contains('.') => {
                self.bump();
                let e: i32 = s.parse().map_err(|_| bad("exponent out of range"))?;
                let e = if neg { -e } else { e };
                let Form::Poly(p) = base else {
                    return Err(bad("cannot raise a lazy sequence to a power"));
                };
                if let Some(c) = p.as_constant() {
                    if c.is_zero() && e < 0 {
                        return Err(bad("division by zero"));
                    }
                    return Ok(Form::Poly(ExpPoly::constant(pow_q(&c, e))));
                }
                if e >= 0 {
                    return Ok(Form::Poly(p.powi(e as u32)));
                }
                let r = p.recip().ok_or_else(|| bad("negative power of a sum"))?;
                Ok(Form::Poly(r.powi(e.unsigned_abs())))
            }
            _ => Err(self.unexpected("an integer exponent or n")),
        }
    }

    fn atom(&mut self) -> Result<Form, DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Ok(Form::Poly(ExpPoly::constant(decimal(&s).ok_or_else(|| syntax(pos, "bad number"))?)))
            }
            Tok::Ident(s) if s == "n" => {
                self.bump();
                Ok(Form::Poly(ExpPoly::index()))
            }
            Tok::Sym('(') => {
                self.bump();
                let f = self.form()?;
                self.expect(')')?;
                Ok(f)
            }
            Tok::Sym('-') => {
                self.bump();
                let f = self.power()?;
                self.scale_form(f, &-Q::one())
            }
            _ => Err(self.unexpected("a number, n or '('")),
        }
    }
}

fn decimal(s: &str) -> Option<Q> {
    match s.split_once('.') {
        None => Some(Q::from_integer(s.parse::<BigInt>().ok()?)),
        Some((int, frac)) => {
            let digits = format!("{int}{frac}");
            let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
            let den = num_traits::pow(BigInt::from(10), frac.len());
            Some(Q::new(num, den))
        }
    }
}

fn add_forms(a: Form, b: Form) -> Option<Form> {
    match (a, b) {
        (Form::Poly(x), Form::Poly(y)) => Some(Form::Poly(x.add(&y))),
        (Form::Lazy(s), Form::Poly(p)) | (Form::Poly(p), Form::Lazy(s)) => {
            let c = p.as_constant()?;
            Some(Form::Lazy(s.affine(&Q::one(), &c)))
        }
        _ => None,
    }
}

fn mul_forms(a: Form, b: Form) -> Option<Form> {
    match (a, b) {
        (Form::Poly(x), Form::Poly(y)) => Some(Form::Poly(x.mul(&y))),
        (Form::Lazy(s), Form::Poly(p)) | (Form::Poly(p), Form::Lazy(s)) => {
            let c = p.as_constant()?;
            Some(Form::Lazy(s.affine(&c, &Q::zero())))
        }
        _ => None,
    }
}

fn div_forms(a: Form, b: Form) -> Option<Form> {
    if let Some(c) = b.constant() {
        if c.is_zero() {
            return None;
        }
        return mul_forms(a, Form::Poly(ExpPoly::constant(c.recip())));
    }
    let r = match b {
        Form::Poly(p) => match p.recip() {
            Some(r) => Form::Poly(r),
            None => Form::Lazy(Seq::Poly(p).recip()),
        },
        Form::Lazy(s) => match s.recip() {
            Seq::Poly(p) => Form::Poly(p),
            other => Form::Lazy(other),
        },
    };
    mul_forms(a, r)
}

/// Integer value of a small constant, used for CLI arguments.
pub fn small_int(q: &Q) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use unbounded_means::catalog::catalog;
    use unbounded_means::num::{q, qf};

    #[test]
    fn two_intervals() {
        let s = parse_set("[0,1] u [2,3]").unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.to_dsl(), "[0,1] u [2,3]");
    }

    #[test]
    fn trailing_union_reports_column_eight() {
        let e = parse_set_expr("[0,1] u").unwrap_err();
        assert_eq!(e.pos(), Pos { line: 1, col: 8 });
        assert!(matches!(e, DslError::Syntax { .. }));
    }

    #[test]
    fn errors_track_lines() {
        let e = parse_set_expr("[0,1] u\n  [2,3} ").unwrap_err();
        assert_eq!(e.pos(), Pos { line: 2, col: 7 });
    }

    #[test]
    fn tail_family() {
        let s = parse_set("tail(b=n, c=2^-n, from=1)").unwrap();
        assert_eq!(s, unbounded_means::catalog::geometric_blocks());
        assert_eq!(s.to_dsl(), "tail(b=n, c=(1/2)^n, from=1)");
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(parse_rational("2^-5").unwrap(), qf(1, 32));
        assert_eq!(parse_rational("0.125").unwrap(), qf(1, 8));
        assert_eq!(parse_rational("-3/2").unwrap(), qf(-3, 2));
        assert_eq!(parse_rational("1/3 + 1/6").unwrap(), qf(1, 2));
        assert!(parse_rational("n").is_err());
    }

    #[test]
    fn rays_and_points() {
        let s = parse_set("(-inf, 0] u {1/2, 3} u [1,+inf)").unwrap();
        assert_eq!(s.to_dsl(), "(-inf,0] u [1,inf) u {1/2}");
        assert_eq!(parse_set("{}").unwrap(), RealSet::empty());
    }

    #[test]
    fn operators() {
        let s = parse_set("shift([0,1], 2)").unwrap();
        assert_eq!(s, RealSet::closed(q(2), q(3)));
        let s = parse_set("scale([1,2], -1)").unwrap();
        assert_eq!(s, RealSet::closed(q(-2), q(-1)));
        let s = parse_set("clip([0,1] u [2,3], -inf, 3/2)").unwrap();
        assert_eq!(s, RealSet::closed(q(0), q(1)));
        let s = parse_set("recip([1,2])").unwrap();
        assert_eq!(s, RealSet::closed(qf(1, 2), q(1)));
    }

    #[test]
    fn semantic_errors_are_positioned() {
        let e = parse_set_expr("[1,2] u recip([-1,1])").unwrap().lower().unwrap_err();
        assert!(matches!(e, DslError::Semantic { pos: Pos { line: 1, col: 9 }, .. }), "{e}");
        let e = parse_set("ifs(nope)").unwrap_err();
        assert!(matches!(e, DslError::Semantic { .. }));
    }

    #[test]
    fn ifs_literals() {
        let s = parse_set("ifs(cantor3)").unwrap();
        assert_eq!(s, unbounded_means::catalog::cantor());
        let m = parse_set("ifs(1/3:0, 1/3:2/3)").unwrap();
        assert_eq!(m, s);
        let p = parse_set("place(ifs(cantor3), 2, 5)").unwrap();
        assert_eq!(p.to_dsl(), "place(ifs(cantor3), 2, 5)");
    }

    #[test]
    fn catalog_round_trips() {
        for e in catalog() {
            let text = e.set.to_dsl();
            let back = parse_set(&text).unwrap_or_else(|err| panic!("{}: {text}: {err}", e.name));
            assert_eq!(back, e.set, "{}: {text}", e.name);
        }
    }

    #[test]
    fn derived_sets_round_trip() {
        for e in catalog() {
            for s in [e.set.reciprocal(), e.set.affine(&qf(-3, 2), &q(1))].into_iter().flatten() {
                let text = s.to_dsl();
                let back = parse_set(&text).unwrap_or_else(|err| panic!("{}: {text}: {err}", e.name));
                assert_eq!(back, s, "{text}");
            }
        }
    }
}
