//! Closed-form index sequences for block families.
//!
//! An [`ExpPoly`] is a finite sum of terms `c * n^p * r^n` with rational
//! `c`, integer `p` and rational `r > 0`. The family is closed under sums,
//! products and index shifts (for `p >= 0`), and single terms are closed under
//! reciprocals, so every sequence used by the catalog (arithmetic positions,
//! geometric lengths, `n^2`, `2^n`, `1/n`, `1/(n^2 2^n)`) stays symbolic.
//!
//! [`Seq`] adds the lazy reciprocal and affine wrappers needed for `1/H`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ext::ExtReal;
use crate::num::{fmt_q, ln_q, pow_q, q, to_f64, Q};

/// Above this estimated bit size exact evaluation is skipped in favour of f64.
pub const EXACT_BITS_LIMIT: u64 = 24_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: Q,
    pub pow: i32,
    pub base: Q,
}

impl Term {
    pub fn new(coef: Q, pow: i32, base: Q) -> Term {
        assert!(base.is_positive(), "geometric base must be positive");
        Term { coef, pow, base }
    }

    /// Growth order: larger base first, then larger power.
    fn order_key_cmp(&self, other: &Term) -> Ordering {
        self.base.cmp(&other.base).then(self.pow.cmp(&other.pow))
    }

    pub fn ln_base(&self) -> f64 {
        ln_q(&self.base)
    }

    fn eval_exact(&self, n: u64) -> Option<Q> {
        if n == 0 && self.pow < 0 {
            return None;
        }
        if !self.base.is_one() {
            let bits = (self.base.numer().bits() + self.base.denom().bits()).saturating_mul(n);
            if bits > EXACT_BITS_LIMIT {
                return None;
            }
        }
        let nq = q(n as i64);
        let pw = if n == 0 {
            if self.pow == 0 {
                Q::one()
            } else {
                Q::zero()
            }
        } else {
            pow_q(&nq, self.pow)
        };
        let geo = if self.base.is_one() {
            Q::one()
        } else {
            num_traits::pow(self.base.clone(), n as usize)
        };
        Some(&self.coef * pw * geo)
    }

    /// `ln |term(n)|`; `-inf` when the term vanishes.
    pub fn ln_abs(&self, n: f64) -> f64 {
        if self.coef.is_zero() {
            return f64::NEG_INFINITY;
        }
        let pow_part = if self.pow == 0 {
            0.0
        } else if n == 0.0 {
            if self.pow > 0 {
                return f64::NEG_INFINITY;
            } else {
                return f64::INFINITY;
            }
        } else {
            self.pow as f64 * n.ln()
        };
        ln_q(&self.coef.abs()) + pow_part + n * self.ln_base()
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        let c = to_f64(&self.coef);
        let direct = c
            * if self.pow == 0 { 1.0 } else { n.powi(self.pow) }
            * if self.base.is_one() { 1.0 } else { to_f64(&self.base).powf(n) };
        if direct.is_finite() && direct.abs() > 1e-290 || (direct == 0.0 && self.pow > 0 && n == 0.0) {
            return direct;
        }
        let l = self.ln_abs(n);
        let v = l.exp();
        if self.coef.is_negative() {
            -v
        } else {
            v
        }
    }
}

/// Finite sum of `c * n^p * r^n` terms, kept normalised: like terms merged,
/// zero terms dropped, sorted from the dominant term down.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn zero() -> ExpPoly {
        ExpPoly { terms: vec![] }
    }

    pub fn constant(c: Q) -> ExpPoly {
        ExpPoly::from_terms(vec![Term::new(c, 0, Q::one())])
    }

    /// The index itself, `n`.
    pub fn index() -> ExpPoly {
        ExpPoly::from_terms(vec![Term::new(Q::one(), 1, Q::one())])
    }

    pub fn term(coef: Q, pow: i32, base: Q) -> ExpPoly {
        ExpPoly::from_terms(vec![Term::new(coef, pow, base)])
    }

    pub fn from_terms(terms: Vec<Term>) -> ExpPoly {
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.coef.is_zero() {
                continue;
            }
            if let Some(same) = out.iter_mut().find(|o| o.pow == t.pow && o.base == t.base) {
                same.coef += t.coef;
            } else {
                out.push(t);
            }
        }
        out.retain(|t| !t.coef.is_zero());
        out.sort_by(|a, b| b.order_key_cmp(a));
        ExpPoly { terms: out }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dominant(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn single_term(&self) -> Option<&Term> {
        if self.terms.len() == 1 {
            self.terms.first()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [t] if t.pow == 0 && t.base.is_one() => Some(t.coef.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        ExpPoly::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .cloned()
                .collect(),
        )
    }

    pub fn neg(&self) -> ExpPoly {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Q) -> ExpPoly {
        ExpPoly::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(&t.coef * k, t.pow, t.base.clone()))
                .collect(),
        )
    }

    pub fn add_const(&self, c: &Q) -> ExpPoly {
        self.add(&ExpPoly::constant(c.clone()))
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term::new(
                    &a.coef * &b.coef,
                    a.pow + b.pow,
                    &a.base * &b.base,
                ));
            }
        }
        ExpPoly::from_terms(terms)
    }

    pub fn powi(&self, e: u32) -> ExpPoly {
        let mut acc = ExpPoly::constant(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reciprocal of a single term.
    pub fn recip(&self) -> Option<ExpPoly> {
        let t = self.single_term()?;
        Some(ExpPoly::term(t.coef.recip(), -t.pow, t.base.recip()))
    }

    /// The sequence `n -> self(n + k)`; only available when every power is
    /// non-negative (binomial expansion).
    pub fn shift_index(&self, k: i64) -> Option<ExpPoly> {
        let kq = q(k);
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.pow < 0 {
                return None;
            }
            let geo = pow_q(&t.base, k as i32);
            for j in 0..=t.pow {
                let c = Q::from_integer(binomial(BigInt::from(t.pow), BigInt::from(j)));
                let kp = pow_q(&kq, t.pow - j);
                terms.push(Term::new(&t.coef * &geo * c * kp, j, t.base.clone()));
            }
        }
        Some(ExpPoly::from_terms(terms))
    }

    pub fn min_pow(&self) -> i32 {
        self.terms.iter().map(|t| t.pow).min().unwrap_or(0)
    }

    pub fn has_negative_pow(&self) -> bool {
        self.terms.iter().any(|t| t.pow < 0)
    }

    pub fn eval_exact(&self, n: u64) -> Option<Q> {
        let mut acc = Q::zero();
        for t in &self.terms {
            acc += t.eval_exact(n)?;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.terms.iter().map(|t| t.eval_f64(n)).sum()
    }

    /// Limit as `n -> inf`.
    pub fn limit(&self) -> ExtReal {
        let Some(d) = self.dominant() else {
            return ExtReal::Finite(Q::zero());
        };
        let grows = d.base > Q::one() || (d.base.is_one() && d.pow > 0);
        if grows {
            return if d.coef.is_positive() {
                ExtReal::PosInf
            } else {
                ExtReal::NegInf
            };
        }
        let c: Q = self
            .terms
            .iter()
            .filter(|t| t.base.is_one() && t.pow == 0)
            .map(|t| t.coef.clone())
            .sum();
        ExtReal::Finite(c)
    }

    /// Sign of the sequence for all large `n` (0 for the zero sequence).
    pub fn eventual_sign(&self) -> i8 {
        match self.dominant() {
            None => 0,
            Some(t) if t.coef.is_positive() => 1,
            Some(_) => -1,
        }
    }

    /// True when `n -> self(n)` maps non-negative integers to integers.
    pub fn is_integer_valued(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coef.is_integer() && t.pow >= 0 && t.base.is_integer())
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coef.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let c = t.coef.abs();
            let mut parts: Vec<String> = Vec::new();
            if !c.is_one() || (t.pow == 0 && t.base.is_one()) {
                if c.is_integer() {
                    parts.push(fmt_q(&c));
                } else {
                    parts.push(format!("({})", fmt_q(&c)));
                }
            }
            match t.pow {
                0 => {}
                1 => parts.push("n".into()),
                p => parts.push(format!("n^{p}")),
            }
            if !t.base.is_one() {
                if t.base.is_integer() {
                    parts.push(format!("{}^n", fmt_q(&t.base)));
                } else {
                    parts.push(format!("({})^n", fmt_q(&t.base)));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Asymptotic magnitude `|s_n| ~ exp(ln_coef) * n^pow * exp(n * ln_base)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asym {
    pub ln_coef: f64,
    pub pow: f64,
    pub ln_base: f64,
}

impl Asym {
    pub fn grows(&self) -> bool {
        self.ln_base > 0.0 || (self.ln_base == 0.0 && self.pow > 0.0)
    }

    pub fn vanishes(&self) -> bool {
        self.ln_base < 0.0 || (self.ln_base == 0.0 && self.pow < 0.0)
    }

    pub fn recip(self) -> Asym {
        Asym {
            ln_coef: -self.ln_coef,
            pow: -self.pow,
            ln_base: -self.ln_base,
        }
    }

    pub fn mul(self, o: Asym) -> Asym {
        Asym {
            ln_coef: self.ln_coef + o.ln_coef,
            pow: self.pow + o.pow,
            ln_base: self.ln_base + o.ln_base,
        }
    }

    pub fn powf(self, s: f64) -> Asym {
        Asym {
            ln_coef: self.ln_coef * s,
            pow: self.pow * s,
            ln_base: self.ln_base * s,
        }
    }

    pub fn eval(&self, n: f64) -> f64 {
        (self.ln_coef + self.pow * n.ln() + self.ln_base * n).exp()
    }

    /// Whether `sum_n s_n` converges for a sequence of this order.
    pub fn summable(&self) -> bool {
        self.ln_base < 0.0 || (self.ln_base == 0.0 && self.pow < -1.0)
    }
}

/// Index sequence: a closed form, or a lazy reciprocal/affine image of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Seq {
    Poly(ExpPoly),
    Recip(Box<Seq>),
    Affine { scale: Q, shift: Q, inner: Box<Seq> },
}

impl From<ExpPoly> for Seq {
    fn from(p: ExpPoly) -> Seq {
        Seq::Poly(p)
    }
}

impl Seq {
    pub fn as_poly(&self) -> Option<&ExpPoly> {
        match self {
            Seq::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn recip(&self) -> Seq {
        match self {
            Seq::Poly(p) => match p.recip() {
                Some(r) => Seq::Poly(r),
                None => Seq::Recip(Box::new(self.clone())),
            },
            Seq::Recip(inner) => (**inner).clone(),
            Seq::Affine { .. } => Seq::Recip(Box::new(self.clone())),
        }
    }

    /// The sequence `a * s_n + t`.
    pub fn affine(&self, a: &Q, t: &Q) -> Seq {
        if a.is_zero() {
            return Seq::Poly(ExpPoly::constant(t.clone()));
        }
        match self {
            Seq::Poly(p) => Seq::Poly(p.scale(a).add_const(t)),
            Seq::Affine {
                scale,
                shift,
                inner,
            } => {
                let s = scale * a;
                let sh = shift * a + t;
                if s.is_one() && sh.is_zero() {
                    (**inner).clone()
                } else {
                    Seq::Affine {
                        scale: s,
                        shift: sh,
                        inner: inner.clone(),
                    }
                }
            }
            Seq::Recip(_) => {
                if a.is_one() && t.is_zero() {
                    self.clone()
                } else {
                    Seq::Affine {
                        scale: a.clone(),
                        shift: t.clone(),
                        inner: Box::new(self.clone()),
                    }
                }
            }
        }
    }

    pub fn has_negative_pow(&self) -> bool {
        match self {
            Seq::Poly(p) => p.has_negative_pow(),
            Seq::Recip(s) => s.has_negative_pow(),
            Seq::Affine { inner, .. } => inner.has_negative_pow(),
        }
    }

    pub fn eval_exact(&self, n: u64) -> Option<Q> {
        match self {
            Seq::Poly(p) => p.eval_exact(n),
            Seq::Recip(s) => {
                let v = s.eval_exact(n)?;
                if v.is_zero() {
                    None
                } else {
                    Some(v.recip())
                }
            }
            Seq::Affine {
                scale,
                shift,
                inner,
            } => Some(inner.eval_exact(n)? * scale + shift),
        }
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        match self {
            Seq::Poly(p) => p.eval_f64(n),
            Seq::Recip(s) => 1.0 / s.eval_f64(n),
            Seq::Affine {
                scale,
                shift,
                inner,
            } => to_f64(scale) * inner.eval_f64(n) + to_f64(shift),
        }
    }

    /// Exact when affordable, else a rational image of the f64 value.
    pub fn eval(&self, n: u64) -> Q {
        match self.eval_exact(n) {
            Some(v) => v,
            None => {
                let f = self.eval_f64(n as f64);
                Q::from_float(f).unwrap_or_else(Q::zero)
            }
        }
    }

    /// Value at `n` as an extended real: exact when affordable, otherwise the
    /// f64 value (overflow mapped to an infinity).
    pub fn eval_ext(&self, n: u64) -> ExtReal {
        if let Some(v) = self.eval_exact(n) {
            return ExtReal::Finite(v);
        }
        let f = self.eval_f64(n as f64);
        if f == f64::INFINITY {
            ExtReal::PosInf
        } else if f == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(Q::from_float(f).unwrap_or_else(Q::zero))
        }
    }

    /// Sign of `s_n` for all large `n`.
    pub fn eventual_sign(&self) -> i8 {
        match self {
            Seq::Poly(p) => p.eventual_sign(),
            Seq::Recip(s) => s.eventual_sign(),
            Seq::Affine { .. } => {
                let v = self.eval_f64(1048576.0);
                if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn limit(&self) -> ExtReal {
        match self {
            Seq::Poly(p) => p.limit(),
            Seq::Recip(s) => match s.limit() {
                ExtReal::Finite(l) if l.is_zero() => {
                    if s.eventual_sign() >= 0 {
                        ExtReal::PosInf
                    } else {
                        ExtReal::NegInf
                    }
                }
                ExtReal::Finite(l) => ExtReal::Finite(l.recip()),
                _ => ExtReal::Finite(Q::zero()),
            },
            Seq::Affine {
                scale,
                shift,
                inner,
            } => {
                let l = inner.limit();
                match l.scale(scale) {
                    Ok(v) => v.shift(shift),
                    Err(_) => ExtReal::Finite(shift.clone()),
                }
            }
        }
    }

    /// Asymptotic order of `|s_n|`, when it can be read off the closed form.
    pub fn asym(&self) -> Option<Asym> {
        match self {
            Seq::Poly(p) => {
                let d = p.dominant()?;
                Some(Asym {
                    ln_coef: ln_q(&d.coef.abs()),
                    pow: d.pow as f64,
                    ln_base: d.ln_base(),
                })
            }
            Seq::Recip(s) => s.asym().map(Asym::recip),
            Seq::Affine {
                scale,
                shift,
                inner,
            } => {
                let a = inner.asym()?;
                if a.grows() {
                    Some(Asym {
                        ln_coef: a.ln_coef + ln_q(&scale.abs()),
                        ..a
                    })
                } else if a.vanishes() {
                    if shift.is_zero() {
                        Some(Asym {
                            ln_coef: a.ln_coef + ln_q(&scale.abs()),
                            ..a
                        })
                    } else {
                        Some(Asym {
                            ln_coef: ln_q(&shift.abs()),
                            pow: 0.0,
                            ln_base: 0.0,
                        })
                    }
                } else {
                    let c = inner.limit();
                    let v = c.finite()? * scale + shift;
                    if v.is_zero() {
                        None
                    } else {
                        Some(Asym {
                            ln_coef: ln_q(&v.abs()),
                            pow: 0.0,
                            ln_base: 0.0,
                        })
                    }
                }
            }
        }
    }

    /// Parenthesised form for use inside larger expressions.
    pub fn to_form(&self) -> String {
        match self {
            Seq::Poly(p) => p.to_string(),
            Seq::Recip(s) => format!("1/({})", s.to_form()),
            Seq::Affine {
                scale,
                shift,
                inner,
            } => {
                let sc = if scale.is_one() {
                    String::new()
                } else {
                    format!("({})*", fmt_q(scale))
                };
                if shift.is_zero() {
                    format!("{sc}({})", inner.to_form())
                } else {
                    format!("{sc}({}) + ({})", inner.to_form(), fmt_q(shift))
                }
            }
        }
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_form())
    }
}

/// Index of `n` as f64, saturating.
pub fn idx_f64(n: u64) -> f64 {
    n.to_f64().unwrap_or(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qf;

    fn geo(c: Q, p: i32, b: Q) -> ExpPoly {
        ExpPoly::term(c, p, b)
    }

    #[test]
    fn normalisation_merges_like_terms() {
        let a = ExpPoly::index().add(&ExpPoly::index());
        assert_eq!(a, geo(q(2), 1, q(1)));
        assert!(ExpPoly::index().sub(&ExpPoly::index()).is_zero());
    }

    #[test]
    fn dominant_term_orders_by_base_then_power() {
        let p = ExpPoly::index().powi(3).add(&geo(q(1), 0, q(2)));
        assert_eq!(p.dominant().unwrap().base, q(2));
        assert_eq!(p.limit(), ExtReal::PosInf);
        let decaying = geo(q(1), 0, qf(1, 2)).add_const(&q(3));
        assert_eq!(decaying.limit(), ExtReal::Finite(q(3)));
    }

    #[test]
    fn shift_index_expands_binomially() {
        let sq = ExpPoly::index().powi(2);
        let shifted = sq.shift_index(1).unwrap();
        for n in 0..10u64 {
            assert_eq!(shifted.eval_exact(n), sq.eval_exact(n + 1));
        }
        let g = geo(q(3), 1, qf(1, 2));
        let gs = g.shift_index(2).unwrap();
        assert_eq!(gs.eval_exact(5), g.eval_exact(7));
        assert!(geo(q(1), -1, q(1)).shift_index(1).is_none());
    }

    #[test]
    fn exact_and_float_evaluation_agree() {
        let p = geo(q(1), -2, qf(1, 2)).add(&ExpPoly::index().powi(2));
        for n in 1..40u64 {
            let e = to_f64(&p.eval_exact(n).unwrap());
            assert!((e - p.eval_f64(n as f64)).abs() <= 1e-12 * e.abs());
        }
    }

    #[test]
    fn reciprocal_seq_is_an_involution() {
        let b = ExpPoly::index().add_const(&q(1));
        let s = Seq::Poly(b);
        let r = s.recip();
        assert!(matches!(r, Seq::Recip(_)));
        assert_eq!(r.recip(), s);
        let single = Seq::Poly(geo(q(1), 0, q(2)));
        assert_eq!(single.recip(), Seq::Poly(geo(q(1), 0, qf(1, 2))));
    }

    #[test]
    fn lazy_limits() {
        let s = Seq::Poly(ExpPoly::index().add_const(&q(1))).recip();
        assert_eq!(s.limit(), ExtReal::Finite(q(0)));
        let t = s.affine(&q(-2), &q(5));
        assert_eq!(t.limit(), ExtReal::Finite(q(5)));
        assert_eq!(t.eval_exact(1), Some(q(4)));
        let back = t.affine(&qf(-1, 2), &qf(5, 2));
        assert_eq!(back, s);
    }

    #[test]
    fn integer_valued_detection() {
        assert!(ExpPoly::index().powi(2).is_integer_valued());
        assert!(geo(q(1), 0, q(2)).is_integer_valued());
        assert!(!geo(q(1), 0, qf(1, 2)).is_integer_valued());
    }

    #[test]
    fn display_forms() {
        assert_eq!(geo(q(1), 0, qf(1, 2)).to_string(), "(1/2)^n");
        assert_eq!(geo(q(1), -2, qf(1, 2)).to_string(), "n^-2*(1/2)^n");
        assert_eq!(ExpPoly::index().add_const(&q(-1)).to_string(), "n - 1");
    }
}
