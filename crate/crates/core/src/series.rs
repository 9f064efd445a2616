//! Series summation with remainder control.
//!
//! Sums of closed-form terms `c * n^p * r^n` are evaluated per term: exact
//! rational closed forms where they exist (polynomial ranges, geometric-type
//! tails with `p >= 0`), Hurwitz zeta / digamma for `r = 1`, and partial sums
//! with a rigorous geometric or integral remainder bound otherwise.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::num::{ln_q, pow_q, q, to_f64, Q};
use crate::seq::{ExpPoly, Term, EXACT_BITS_LIMIT};

/// Relative remainder target for partial sums.
pub const REL_TOL: f64 = 1e-13;
/// Term cap for partial sums without a usable closed form.
pub const TERM_CAP: u64 = 1_000_000;

/// Outcome of summing a (possibly infinite) series.
#[derive(Clone, Debug, PartialEq)]
pub enum Sum {
    Finite {
        value: f64,
        exact: Option<Q>,
    },
    PosInf,
    NegInf,
    /// Positive and negative parts are both infinite.
    Divergent,
    /// Term cap reached before the remainder bound became small.
    Unresolved {
        partial: f64,
    },
}

impl Sum {
    pub fn zero() -> Sum {
        Sum::Finite {
            value: 0.0,
            exact: Some(Q::zero()),
        }
    }

    pub fn exact(v: Q) -> Sum {
        Sum::Finite {
            value: to_f64(&v),
            exact: Some(v),
        }
    }

    pub fn approx(v: f64) -> Sum {
        if v == f64::INFINITY {
            Sum::PosInf
        } else if v == f64::NEG_INFINITY {
            Sum::NegInf
        } else {
            Sum::Finite {
                value: v,
                exact: None,
            }
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Sum::Finite { value, .. } => *value,
            Sum::PosInf => f64::INFINITY,
            Sum::NegInf => f64::NEG_INFINITY,
            Sum::Divergent => f64::NAN,
            Sum::Unresolved { partial } => *partial,
        }
    }

    pub fn exact_value(&self) -> Option<&Q> {
        match self {
            Sum::Finite { exact, .. } => exact.as_ref(),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Sum::Finite { .. })
    }

    pub fn add(&self, other: &Sum) -> Sum {
        use Sum::*;
        match (self, other) {
            (
                Finite {
                    value: a,
                    exact: ea,
                },
                Finite {
                    value: b,
                    exact: eb,
                },
            ) => {
                let exact = match (ea, eb) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                };
                match exact {
                    Some(e) => Sum::exact(e),
                    None => Sum::approx(a + b),
                }
            }
            (Divergent, _) | (_, Divergent) => Divergent,
            (PosInf, NegInf) | (NegInf, PosInf) => Divergent,
            (Unresolved { partial: a }, x) | (x, Unresolved { partial: a }) => Unresolved {
                partial: a + x.value(),
            },
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }

    pub fn neg(&self) -> Sum {
        match self {
            Sum::Finite { value, exact } => Sum::Finite {
                value: -value,
                exact: exact.as_ref().map(|e| -e),
            },
            Sum::PosInf => Sum::NegInf,
            Sum::NegInf => Sum::PosInf,
            Sum::Divergent => Sum::Divergent,
            Sum::Unresolved { partial } => Sum::Unresolved { partial: -partial },
        }
    }

    pub fn scale(&self, k: &Q) -> Sum {
        if k.is_zero() {
            return Sum::zero();
        }
        let s = match self {
            Sum::Finite { value, exact } => {
                return match exact {
                    Some(e) => Sum::exact(e * k),
                    None => Sum::approx(value * to_f64(k)),
                }
            }
            other => other.clone(),
        };
        if k.is_negative() {
            s.neg()
        } else {
            s
        }
    }
}

/// `sum_{n=from}^{to} p(n)`, `to = None` meaning an infinite tail.
pub fn sum_exppoly(p: &ExpPoly, from: u64, to: Option<u64>) -> Sum {
    if let Some(t) = to {
        if t < from {
            return Sum::zero();
        }
    }
    p.terms()
        .iter()
        .map(|t| sum_term(t, from, to))
        .fold(Sum::zero(), |acc, s| acc.add(&s))
}

/// Sum of one closed-form term over an index range.
pub fn sum_term(t: &Term, from: u64, to: Option<u64>) -> Sum {
    if let Some(end) = to {
        if end < from {
            return Sum::zero();
        }
    }
    let from = if t.pow < 0 { from.max(1) } else { from };
    let one = Q::one();
    if t.base == one {
        if t.pow >= 0 {
            return match to {
                None => sign_inf(&t.coef),
                Some(end) => {
                    let below = if from == 0 {
                        Q::zero()
                    } else {
                        faulhaber(t.pow as u32, from - 1)
                    };
                    let zero_term = if from == 0 && t.pow == 0 {
                        Q::one()
                    } else {
                        Q::zero()
                    };
                    Sum::exact(&t.coef * (faulhaber(t.pow as u32, end) - below + zero_term))
                }
            };
        }
        let s = (-t.pow) as f64;
        let c = to_f64(&t.coef);
        if t.pow == -1 {
            return match to {
                None => sign_inf(&t.coef),
                Some(end) => Sum::approx(c * (digamma(end as f64 + 1.0) - digamma(from as f64))),
            };
        }
        let upper = match to {
            None => 0.0,
            Some(end) => hurwitz_zeta(s, end as f64 + 1.0),
        };
        return Sum::approx(c * (hurwitz_zeta(s, from as f64) - upper));
    }
    if t.base < one {
        if t.pow >= 0 {
            if let Some(v) = geometric_tail_exact(t, from) {
                let upper = match to {
                    None => Some(Q::zero()),
                    Some(end) => geometric_tail_exact(t, end + 1),
                };
                if let Some(u) = upper {
                    return Sum::exact(v - u);
                }
            }
        }
        return partial_sum_with_bound(t, from, to);
    }
    // Growing term: only finite ranges have finite sums.
    match to {
        None => sign_inf(&t.coef),
        Some(end) => {
            if end - from <= 4096 {
                if let Some(ex) = exact_direct(t, from, end) {
                    return Sum::exact(ex);
                }
            }
            if end - from > TERM_CAP {
                return sign_inf(&t.coef);
            }
            let mut acc = 0.0;
            for n in from..=end {
                acc += t.eval_f64(n as f64);
                if !acc.is_finite() {
                    break;
                }
            }
            Sum::approx(acc)
        }
    }
}

fn sign_inf(c: &Q) -> Sum {
    if c.is_positive() {
        Sum::PosInf
    } else if c.is_negative() {
        Sum::NegInf
    } else {
        Sum::zero()
    }
}

fn exact_direct(t: &Term, from: u64, to: u64) -> Option<Q> {
    let mut acc = Q::zero();
    for n in from..=to {
        acc += t_exact(t, n)?;
    }
    Some(acc)
}

fn t_exact(t: &Term, n: u64) -> Option<Q> {
    ExpPoly::from_terms(vec![t.clone()]).eval_exact(n)
}

/// `sum_{n=1}^{m} n^p` for `p >= 0` (zero when `m = 0`).
pub fn faulhaber(p: u32, m: u64) -> Q {
    if m == 0 {
        return Q::zero();
    }
    if m <= 64 {
        return (1..=m)
            .map(|n| num_traits::pow(q(n as i64), p as usize))
            .sum();
    }
    // Recurrence: (p+1) S_p(m) = (m+1)^{p+1} - 1 - sum_{j<p} C(p+1, j) S_j(m).
    let mq = q(m as i64);
    let mut s: Vec<Q> = Vec::with_capacity(p as usize + 1);
    for k in 0..=p {
        let mut rhs = num_traits::pow(&mq + Q::one(), k as usize + 1) - Q::one();
        for (j, sj) in s.iter().enumerate() {
            let c = Q::from_integer(binomial(BigInt::from(k + 1), BigInt::from(j)));
            rhs -= c * sj;
        }
        s.push(rhs / q(k as i64 + 1));
    }
    s.pop().unwrap()
}

/// Exact `sum_{n>=N} c n^p r^n` for `0 < r < 1`, `p >= 0`.
fn geometric_tail_exact(t: &Term, start: u64) -> Option<Q> {
    let bits = (t.base.numer().bits() + t.base.denom().bits()).saturating_mul(start);
    if bits > EXACT_BITS_LIMIT {
        return None;
    }
    let r = &t.base;
    let rn = num_traits::pow(r.clone(), start as usize);
    let one_minus = Q::one() - r;
    let nq = q(start as i64);
    // tails[j] = sum_{n>=N} n^j r^n
    let mut tails: Vec<Q> = Vec::with_capacity(t.pow as usize + 1);
    for p in 0..=t.pow {
        let mut rhs = pow_q(&nq, p) * &rn;
        if start == 0 && p == 0 {
            rhs = rn.clone();
        }
        for (j, tj) in tails.iter().enumerate() {
            let c = Q::from_integer(binomial(BigInt::from(p), BigInt::from(j as i32)));
            let sign = if (p - j as i32 + 1) % 2 == 0 {
                Q::one()
            } else {
                -Q::one()
            };
            let tj_next = tj - pow_q(&nq, j as i32) * &rn;
            let tj_next = if start == 0 && j == 0 {
                tj - &rn
            } else {
                tj_next
            };
            rhs += sign * c * tj_next;
        }
        tails.push(rhs / &one_minus);
    }
    Some(&t.coef * tails.pop().unwrap())
}

/// Rigorous bound on `sum_{n>N} |c| n^p r^n` for a summable term.
pub fn term_tail_bound(coef_abs: f64, pow: f64, ln_base: f64, n: u64) -> f64 {
    let nf = n as f64;
    if ln_base < 0.0 {
        let r = ln_base.exp();
        if pow <= 0.0 {
            return coef_abs * (pow * nf.ln() + (nf + 1.0) * ln_base).exp() / (1.0 - r);
        }
        let qratio = ((nf + 1.0) / nf).powf(pow) * r;
        if qratio >= 1.0 || n == 0 {
            return f64::INFINITY;
        }
        return coef_abs * (pow * (nf + 1.0).ln() + (nf + 1.0) * ln_base).exp() / (1.0 - qratio);
    }
    if ln_base == 0.0 && pow < -1.0 && n > 0 {
        return coef_abs * nf.powf(pow + 1.0) / (-pow - 1.0);
    }
    f64::INFINITY
}

fn partial_sum_with_bound(t: &Term, from: u64, to: Option<u64>) -> Sum {
    let c_abs = to_f64(&t.coef.abs());
    let ln_base = ln_q(&t.base);
    let pow = t.pow as f64;
    let mut acc = 0.0f64;
    let mut n = from;
    let mut count = 0u64;
    loop {
        if let Some(end) = to {
            if n > end {
                return Sum::approx(acc);
            }
        }
        acc += t.eval_f64(n as f64);
        count += 1;
        let bound = term_tail_bound(c_abs, pow, ln_base, n);
        if bound <= REL_TOL * acc.abs() || bound < 1e-300 {
            return Sum::approx(acc);
        }
        if count >= TERM_CAP {
            return Sum::Unresolved { partial: acc };
        }
        n += 1;
    }
}

/// A real-exponent term `c * n^pow * exp(n * ln_base)`, used for Hausdorff
/// masses where lengths are raised to a non-integer dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealTerm {
    pub coef: f64,
    pub pow: f64,
    pub ln_base: f64,
}

/// Exponents within this distance of the convergence boundary `-1` are
/// treated as exactly `-1`.
const POW_EPS: f64 = 1e-9;

impl RealTerm {
    pub fn eval(&self, n: f64) -> f64 {
        self.coef * (self.pow * n.ln() + self.ln_base * n).exp()
    }

    pub fn summable(&self) -> bool {
        self.ln_base < 0.0 || (self.ln_base == 0.0 && self.pow < -1.0 - POW_EPS)
    }

    pub fn from_term(t: &Term) -> RealTerm {
        RealTerm {
            coef: to_f64(&t.coef),
            pow: t.pow as f64,
            ln_base: t.ln_base(),
        }
    }

    pub fn sum(&self, from: u64, to: Option<u64>) -> Sum {
        if let Some(end) = to {
            if end < from {
                return Sum::zero();
            }
        }
        let from = from.max(1);
        let sgn_inf = || {
            if self.coef > 0.0 {
                Sum::PosInf
            } else {
                Sum::NegInf
            }
        };
        if self.coef == 0.0 {
            return Sum::zero();
        }
        if self.ln_base == 0.0 {
            if (self.pow + 1.0).abs() <= POW_EPS {
                return match to {
                    None => sgn_inf(),
                    Some(end) => {
                        Sum::approx(self.coef * (digamma(end as f64 + 1.0) - digamma(from as f64)))
                    }
                };
            }
            if self.pow < -1.0 {
                let s = -self.pow;
                let upper = to.map(|e| hurwitz_zeta(s, e as f64 + 1.0)).unwrap_or(0.0);
                return Sum::approx(self.coef * (hurwitz_zeta(s, from as f64) - upper));
            }
            if to.is_none() {
                return sgn_inf();
            }
        }
        if !self.summable() && to.is_none() {
            return sgn_inf();
        }
        let mut acc = 0.0;
        let mut n = from;
        let mut count = 0u64;
        loop {
            if let Some(end) = to {
                if n > end {
                    return Sum::approx(acc);
                }
            }
            acc += self.eval(n as f64);
            count += 1;
            if self.summable() {
                let b = term_tail_bound(self.coef.abs(), self.pow, self.ln_base, n);
                if b <= REL_TOL * acc.abs() || b < 1e-300 {
                    return Sum::approx(acc);
                }
            }
            if count >= TERM_CAP {
                return Sum::Unresolved { partial: acc };
            }
            n += 1;
        }
    }
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `sum_{n>=0} (n + a)^{-s}` for `s > 1`, `a > 0`, by
/// Euler-Maclaurin after shifting `a` past 16.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0);
    let mut acc = 0.0;
    let mut x = a;
    while x < 16.0 {
        acc += x.powf(-s);
        x += 1.0;
    }
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xp = x.powf(-s - 1.0);
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let term = b / fact * rising * xp;
        tail += term;
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + k2 - 1.0) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        xp /= x * x;
    }
    acc + tail
}

/// Digamma function for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut acc = 0.0;
    let mut y = x;
    while y < 16.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let mut r = y.ln() - 0.5 / y;
    let y2 = y * y;
    let mut yp = y2;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let k2 = 2.0 * (k as f64 + 1.0);
        r -= b / (k2 * yp);
        yp *= y2;
    }
    acc + r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qf;
    use std::f64::consts::PI;

    fn term(c: Q, p: i32, b: Q) -> Term {
        Term::new(c, p, b)
    }

    #[test]
    fn faulhaber_matches_direct_sums() {
        for p in 0..5u32 {
            for m in [0u64, 1, 7, 65, 200] {
                let direct: Q = (1..=m)
                    .map(|n| num_traits::pow(q(n as i64), p as usize))
                    .sum();
                assert_eq!(faulhaber(p, m), direct, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn geometric_tails_are_exact() {
        // sum_{i>=n} i/2^i = (n+1)/2^(n-1)
        for n in 1..8u64 {
            let t = term(q(1), 1, qf(1, 2));
            let s = sum_term(&t, n, None);
            let expect = q(n as i64 + 1) / pow_q(&q(2), n as i32 - 1);
            assert_eq!(s.exact_value(), Some(&expect));
        }
        let t = term(q(1), 2, qf(1, 2));
        assert_eq!(sum_term(&t, 1, None).exact_value(), Some(&q(6)));
        let t0 = term(q(3), 0, qf(1, 4));
        assert_eq!(sum_term(&t0, 0, None).exact_value(), Some(&q(4)));
        assert_eq!(sum_term(&t0, 0, Some(1)).exact_value(), Some(&qf(15, 4)));
    }

    #[test]
    fn zeta_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        let direct: f64 = (0..2000)
            .map(|n| (n as f64 + 3.5f64).powf(-3.0))
            .sum::<f64>();
        let tail = hurwitz_zeta(3.0, 2003.5);
        assert!((hurwitz_zeta(3.0, 3.5) - direct - tail).abs() < 1e-14);
    }

    #[test]
    fn digamma_differences_give_harmonic_numbers() {
        let h: f64 = (1..=100).map(|n| 1.0 / n as f64).sum();
        assert!((digamma(101.0) - digamma(1.0) - h).abs() < 1e-12);
    }

    #[test]
    fn divergent_terms_report_sign() {
        assert_eq!(sum_term(&term(q(1), 0, q(1)), 1, None), Sum::PosInf);
        assert_eq!(sum_term(&term(q(-1), -1, q(1)), 1, None), Sum::NegInf);
        assert_eq!(sum_term(&term(q(1), 0, q(2)), 0, None), Sum::PosInf);
    }

    #[test]
    fn polylog_type_sums_need_the_bound() {
        // sum 1/(n^2 2^n) = Li2(1/2) = pi^2/12 - ln(2)^2/2
        let s = sum_term(&term(q(1), -2, qf(1, 2)), 1, None);
        let li2 = PI * PI / 12.0 - 2f64.ln().powi(2) / 2.0;
        assert!((s.value() - li2).abs() < 1e-12);
    }

    #[test]
    fn huge_polynomial_ranges_stay_exact() {
        let s = sum_term(&term(q(1), 1, q(1)), 1, Some(1 << 40));
        let m = q(1 << 40);
        assert_eq!(s.exact_value(), Some(&(&m * (&m + q(1)) / q(2))));
    }

    #[test]
    fn real_terms_use_zeta() {
        let t = RealTerm {
            coef: 1.0,
            pow: -2.0,
            ln_base: 0.0,
        };
        assert!((t.sum(1, None).value() - PI * PI / 6.0).abs() < 1e-14);
        let h = RealTerm {
            coef: 1.0,
            pow: -1.0 + 1e-12,
            ln_base: 0.0,
        };
        assert_eq!(h.sum(1, None), Sum::PosInf);
    }

    #[test]
    fn sum_arithmetic() {
        assert_eq!(Sum::PosInf.add(&Sum::NegInf), Sum::Divergent);
        assert_eq!(
            Sum::exact(q(1)).add(&Sum::exact(qf(1, 2))),
            Sum::exact(qf(3, 2))
        );
        assert_eq!(Sum::PosInf.scale(&q(-1)), Sum::NegInf);
    }
}
