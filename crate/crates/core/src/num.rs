//! Exact rational helpers shared by the set algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all set data.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Large numerators/denominators: divide in log space.
    let n = x.numer();
    let d = x.denom();
    let ln = big_ln(&n.abs()) - big_ln(d);
    let v = ln.exp();
    if n.is_negative() {
        -v
    } else {
        v
    }
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of a positive rational, safe for huge values.
pub fn ln_q(x: &Q) -> f64 {
    debug_assert!(x.is_positive());
    big_ln(x.numer()) - big_ln(x.denom())
}

/// Approximate bit size of a rational, used to bound the cost of exact work.
pub fn bit_size(x: &Q) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Closest rational with bounded denominator (continued fractions).
pub fn from_f64_approx(v: f64, max_den: i64) -> Q {
    if v == 0.0 || !v.is_finite() {
        return Q::zero();
    }
    let neg = v < 0.0;
    let mut x = v.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    for _ in 0..64 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if k1.is_zero() {
        return Q::zero();
    }
    let r = Q::new(h1, k1);
    if neg {
        -r
    } else {
        r
    }
}

/// Exact dyadic rational for a finite f64.
pub fn from_f64_exact(v: f64) -> Option<Q> {
    Q::from_float(v)
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_q(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn pow_q(x: &Q, e: i32) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Parse `"p"` or `"p/q"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let d: BigInt = b.trim().parse().ok()?;
            let n: BigInt = a.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Render a rational as "p" or "p/q".
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with `sig` significant digits, trailing zeros trimmed.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == f64::INFINITY {
        return "+inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", sig.saturating_sub(1), v);
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..16).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let t = format!("{:.*}", decimals, v);
        trim_zeros(&t)
    } else {
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
