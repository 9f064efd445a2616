//! Borel measures on canonical sets: densities given by power-sum
//! antiderivatives, and the self-similar `s`-measure standing in for the
//! `s`-dimensional Hausdorff measure.

use num_traits::{One, Signed, Zero};

use crate::error::{SetError, SetResult};
use crate::ext::ExtReal;
use crate::ifs::Ifs;
use crate::num::{ln_q, q, to_f64, Q};
use crate::seq::{Asym, ExpPoly, Seq};
use crate::series::{sum_exppoly, term_tail_bound, RealTerm, Sum, REL_TOL, TERM_CAP};
use crate::sets::{BlockFamily, FractalPiece, Interval, RealSet, Shape};

/// Dimensions closer than this are treated as equal.
pub const DIM_EPS: f64 = 1e-9;

/// Blocks below this index are integrated in exact arithmetic.
const EXACT_BLOCKS: u64 = 512;
/// Terms summed one by one before a long finite range switches to
/// Euler-Maclaurin.
const DIRECT_TERMS: u64 = 4096;

/// `sum c_k x^{e_k}` with rational coefficients and integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSum {
    terms: Vec<(Q, i32)>,
}

impl PowerSum {
    pub fn new(mut terms: Vec<(Q, i32)>) -> PowerSum {
        terms.retain(|(c, _)| !c.is_zero());
        terms.sort_by(|a, b| b.1.cmp(&a.1));
        PowerSum { terms }
    }

    pub fn terms(&self) -> &[(Q, i32)] {
        &self.terms
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(_, e)| *e >= 0)
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        let mut acc = Q::zero();
        for (c, e) in &self.terms {
            if x.is_zero() && *e < 0 {
                return None;
            }
            acc += c * crate::num::pow_q(x, *e);
        }
        Some(acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, e)| to_f64(c) * x.powi(*e)).sum()
    }

    pub fn derivative(&self) -> PowerSum {
        PowerSum::new(
            self.terms
                .iter()
                .filter(|(_, e)| *e != 0)
                .map(|(c, e)| (c * q(*e as i64), e - 1))
                .collect(),
        )
    }

    /// `F(p_n)` as a closed-form sequence (polynomials only).
    pub fn compose(&self, p: &ExpPoly) -> Option<ExpPoly> {
        if !self.is_polynomial() {
            return None;
        }
        Some(self.terms.iter().fold(ExpPoly::zero(), |acc, (c, e)| {
            acc.add(&p.powi(*e as u32).scale(c))
        }))
    }

    /// One-sided limit at `x` (from the right when `from_right`).
    pub fn limit(&self, x: &ExtReal, from_right: bool) -> ExtReal {
        let sign_inf = |positive: bool| {
            if positive {
                ExtReal::PosInf
            } else {
                ExtReal::NegInf
            }
        };
        match x {
            ExtReal::Finite(v) if !v.is_zero() || self.terms.iter().all(|(_, e)| *e >= 0) => {
                ExtReal::Finite(self.eval(v).unwrap())
            }
            ExtReal::Finite(_) => {
                let (c, e) = self.terms.last().unwrap();
                let odd = e % 2 != 0;
                sign_inf(c.is_positive() ^ (!from_right && odd))
            }
            inf => match self.terms.first() {
                None => ExtReal::Finite(Q::zero()),
                Some((c, e)) if *e > 0 => {
                    let odd = e % 2 != 0;
                    sign_inf(c.is_positive() ^ (*inf == ExtReal::NegInf && odd))
                }
                _ => ExtReal::Finite(
                    self.terms
                        .iter()
                        .filter(|(_, e)| *e == 0)
                        .map(|(c, _)| c.clone())
                        .sum(),
                ),
            },
        }
    }

    /// Asymptotic order of `|P(s_n)|` for `s_n -> target` with order `s`.
    fn asym_along(&self, s: Asym, target: &ExtReal) -> Option<Asym> {
        let pick = match target {
            ExtReal::Finite(v) if !v.is_zero() => {
                let val = self.eval(v)?;
                if val.is_zero() {
                    return None;
                }
                return Some(Asym {
                    ln_coef: ln_q(&val.abs()),
                    pow: 0.0,
                    ln_base: 0.0,
                });
            }
            ExtReal::Finite(_) => self.terms.last()?,
            _ => self.terms.first()?,
        };
        let (c, e) = pick;
        let e = *e as f64;
        Some(Asym {
            ln_coef: ln_q(&c.abs()) + e * s.ln_coef,
            pow: e * s.pow,
            ln_base: e * s.ln_base,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    /// Absolutely continuous measure with `mu([a,b]) = F(b) - F(a)` and
    /// `int_a^b x dmu = G(b) - G(a)`, supported on `(lo, hi)`.
    Density {
        name: String,
        f: PowerSum,
        g: PowerSum,
        support: (ExtReal, ExtReal),
    },
    /// Self-similar `s`-measure: length on intervals (`s = 1`), counting on
    /// points (`s = 0`), `width^s` on placed attractors of dimension `s`.
    Hausdorff { s: f64 },
}

impl MeasureSpec {
    pub fn lebesgue() -> MeasureSpec {
        MeasureSpec::Density {
            name: "lebesgue".into(),
            f: PowerSum::new(vec![(q(1), 1)]),
            g: PowerSum::new(vec![(Q::new(1.into(), 2.into()), 2)]),
            support: (ExtReal::NegInf, ExtReal::PosInf),
        }
    }

    /// Density `2/x^3` on `(0, +inf)`.
    pub fn harmonic() -> MeasureSpec {
        MeasureSpec::Density {
            name: "harmonic".into(),
            f: PowerSum::new(vec![(q(-1), -2)]),
            g: PowerSum::new(vec![(q(-2), -1)]),
            support: (ExtReal::Finite(Q::zero()), ExtReal::PosInf),
        }
    }

    pub fn hausdorff(s: f64) -> MeasureSpec {
        MeasureSpec::Hausdorff { s }
    }

    pub fn name(&self) -> String {
        match self {
            MeasureSpec::Density { name, .. } => name.clone(),
            MeasureSpec::Hausdorff { s } => format!("hausdorff({s})"),
        }
    }

    pub fn by_name(name: &str) -> Option<MeasureSpec> {
        match name {
            "lebesgue" | "lambda" => Some(MeasureSpec::lebesgue()),
            "harmonic" => Some(MeasureSpec::harmonic()),
            _ => None,
        }
    }
}

/// Mass and first moment of a set.
#[derive(Clone, Debug, PartialEq)]
pub struct MassMoment {
    pub mass: Sum,
    pub moment: Sum,
}

pub fn measure_of(mu: &MeasureSpec, h: &RealSet) -> SetResult<Sum> {
    Ok(mass_and_moment(mu, h)?.mass)
}

pub fn moment_of(mu: &MeasureSpec, h: &RealSet) -> SetResult<Sum> {
    Ok(mass_and_moment(mu, h)?.moment)
}

pub fn mass_and_moment(mu: &MeasureSpec, h: &RealSet) -> SetResult<MassMoment> {
    let mut parts: Vec<MassMoment> = Vec::new();
    match mu {
        MeasureSpec::Density { f, g, support, .. } => {
            check_support(h, support)?;
            for i in h.intervals() {
                parts.push(density_interval(f, g, i));
            }
            for fam in h.families() {
                if *fam.shape() == Shape::Interval {
                    parts.push(density_family(f, g, fam));
                } else if let Shape::Fractal(_) = fam.shape() {
                    return Err(SetError::Unsupported(
                        "density measure of self-similar blocks".into(),
                    ));
                }
            }
            if !h.fractals().is_empty() {
                return Err(SetError::Unsupported(
                    "density measure of self-similar pieces".into(),
                ));
            }
        }
        MeasureSpec::Hausdorff { s } => {
            let s = *s;
            for i in h.intervals() {
                parts.push(hausdorff_interval(s, i));
            }
            if !h.point_list().is_empty() && s.abs() < DIM_EPS {
                let n = q(h.point_list().len() as i64);
                let m: Q = h.point_list().iter().sum();
                parts.push(MassMoment {
                    mass: Sum::exact(n),
                    moment: Sum::exact(m),
                });
            }
            for p in h.fractals() {
                parts.push(hausdorff_piece(s, p));
            }
            for fam in h.families() {
                parts.push(hausdorff_family(s, fam));
            }
        }
    }
    Ok(combine(parts))
}

/// Mass and moment of a disjoint union (overlaps of measure zero allowed).
pub fn combine(parts: Vec<MassMoment>) -> MassMoment {
    let mut mass = Sum::zero();
    let mut moment = Sum::zero();
    let mut mass_inf = false;
    for p in parts {
        if p.mass == Sum::PosInf {
            mass_inf = true;
        }
        mass = mass.add(&p.mass);
        moment = moment.add(&p.moment);
    }
    if mass_inf {
        mass = Sum::PosInf;
    }
    MassMoment { mass, moment }
}

fn check_support(h: &RealSet, support: &(ExtReal, ExtReal)) -> SetResult<()> {
    if h.is_empty() {
        return Ok(());
    }
    let b = h.bounds();
    if b.inf < support.0 || b.sup > support.1 {
        return Err(SetError::Domain(format!(
            "set [{}, {}] leaves the support ({}, {})",
            b.inf, b.sup, support.0, support.1
        )));
    }
    Ok(())
}

fn ext_diff(hi: ExtReal, lo: ExtReal) -> Sum {
    match (hi, lo) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => Sum::exact(a - b),
        (ExtReal::PosInf, ExtReal::PosInf) | (ExtReal::NegInf, ExtReal::NegInf) => Sum::Divergent,
        (ExtReal::PosInf, _) | (_, ExtReal::NegInf) => Sum::PosInf,
        _ => Sum::NegInf,
    }
}

fn density_interval(f: &PowerSum, g: &PowerSum, i: &Interval) -> MassMoment {
    MassMoment {
        mass: ext_diff(f.limit(&i.hi, false), f.limit(&i.lo, true)),
        moment: ext_diff(g.limit(&i.hi, false), g.limit(&i.lo, true)),
    }
}

/// Signed length `hi_n - lo_n` evaluated without cancellation where the
/// structure allows it.
fn diff_f64(lo: &Seq, hi: &Seq, n: f64) -> f64 {
    match (lo, hi) {
        (Seq::Poly(a), Seq::Poly(b)) => b.sub(a).eval_f64(n),
        (Seq::Recip(a), Seq::Recip(b)) => diff_f64(b, a, n) / (a.eval_f64(n) * b.eval_f64(n)),
        (
            Seq::Affine {
                scale: s1,
                shift: t1,
                inner: a,
            },
            Seq::Affine {
                scale: s2,
                shift: t2,
                inner: b,
            },
        ) if s1 == s2 && t1 == t2 => to_f64(s1) * diff_f64(a, b, n),
        _ => match (recip_inner(lo), recip_inner(hi)) {
            (Some(a), Some(b)) => diff_f64(&b, &a, n) / (a.eval_f64(n) * b.eval_f64(n)),
            _ => match (affine_recip(lo), affine_recip(hi)) {
                (Some((s1, t1, a)), Some((s2, t2, b))) if s1 == s2 && t1 == t2 => {
                    to_f64(&s1) * diff_f64(&b, &a, n) / (a.eval_f64(n) * b.eval_f64(n))
                }
                _ => hi.eval_f64(n) - lo.eval_f64(n),
            },
        },
    }
}

/// `(a, t, X)` with `s = a / X + t`, when such a form is at hand.
fn affine_recip(s: &Seq) -> Option<(Q, Q, Seq)> {
    match s {
        Seq::Recip(x) => Some((Q::one(), Q::zero(), (**x).clone())),
        Seq::Affine { scale, shift, inner } => match &**inner {
            Seq::Recip(x) => Some((scale.clone(), shift.clone(), (**x).clone())),
            _ => None,
        },
        Seq::Poly(p) => {
            let c = p.terms().iter().find(|t| t.pow == 0 && t.base.is_one()).map_or(Q::zero(), |t| t.coef.clone());
            let rest = p.add_const(&-c.clone());
            Some((Q::one(), c, Seq::Poly(rest.recip()?)))
        }
    }
}

/// `X` with `s = 1/X`, when such a closed form is at hand.
fn recip_inner(s: &Seq) -> Option<Seq> {
    match s {
        Seq::Recip(x) => Some((**x).clone()),
        Seq::Poly(p) => p.recip().map(Seq::Poly),
        _ => None,
    }
}

fn diff_asym(lo: &Seq, hi: &Seq) -> Option<Asym> {
    match (lo, hi) {
        (Seq::Poly(a), Seq::Poly(b)) => Seq::Poly(b.sub(a)).asym(),
        (Seq::Recip(a), Seq::Recip(b)) => {
            let d = diff_asym(b, a)?;
            Some(d.mul(a.asym()?.recip()).mul(b.asym()?.recip()))
        }
        (
            Seq::Affine {
                scale: s1,
                shift: t1,
                inner: a,
            },
            Seq::Affine {
                scale: s2,
                shift: t2,
                inner: b,
            },
        ) if s1 == s2 && t1 == t2 => {
            let d = diff_asym(a, b)?;
            Some(Asym {
                ln_coef: d.ln_coef + ln_q(&s1.abs()),
                ..d
            })
        }
        (Seq::Poly(_), Seq::Recip(_)) | (Seq::Recip(_), Seq::Poly(_)) => {
            let (a, b) = (recip_inner(lo)?, recip_inner(hi)?);
            let d = diff_asym(&b, &a)?;
            Some(d.mul(a.asym()?.recip()).mul(b.asym()?.recip()))
        }
        _ => {
            let ((s1, t1, a), (s2, t2, b)) = (affine_recip(lo)?, affine_recip(hi)?);
            if s1 != s2 || t1 != t2 {
                return None;
            }
            let d = diff_asym(&b, &a)?;
            let d = Asym { ln_coef: d.ln_coef + ln_q(&s1.abs()), ..d };
            Some(d.mul(a.asym()?.recip()).mul(b.asym()?.recip()))
        }
    }
}

/// Asymptotic order of the block lengths `hi_n - lo_n`.
pub fn block_length_asym(fam: &BlockFamily) -> Option<Asym> {
    diff_asym(fam.lo(), fam.hi())
}

/// Order of `|s_n|` near its limit; constant when the limit is finite and
/// nonzero.
fn position_asym(s: &Seq) -> Option<Asym> {
    match s.limit() {
        ExtReal::Finite(v) if !v.is_zero() => Some(Asym {
            ln_coef: ln_q(&v.abs()),
            pow: 0.0,
            ln_base: 0.0,
        }),
        _ => s.asym(),
    }
}

fn density_family(f: &PowerSum, g: &PowerSum, fam: &BlockFamily) -> MassMoment {
    if let (Some(lo), Some(hi)) = (fam.lo().as_poly(), fam.hi().as_poly()) {
        if let (Some(fl), Some(fh), Some(gl), Some(gh)) =
            (f.compose(lo), f.compose(hi), g.compose(lo), g.compose(hi))
        {
            return MassMoment {
                mass: sum_exppoly(&fh.sub(&fl), fam.start(), fam.end()),
                moment: sum_exppoly(&gh.sub(&gl), fam.start(), fam.end()),
            };
        }
    }
    let dens = f.derivative();
    let xdens = g.derivative();
    let target = fam.lo().limit();
    let len = diff_asym(fam.lo(), fam.hi());
    let pos = position_asym(fam.lo());
    let env_mass = match (len, pos) {
        (Some(l), Some(p)) => dens.asym_along(p, &target).map(|d| l.mul(d)),
        _ => None,
    };
    let env_moment = match (len, pos) {
        (Some(l), Some(p)) => xdens.asym_along(p, &target).map(|d| l.mul(d)),
        _ => None,
    };
    let block = |prim: &PowerSum, dens: &PowerSum, x: f64| -> f64 {
        if x < EXACT_BLOCKS as f64 && x.fract() == 0.0 {
            let n = x as u64;
            if let (Some(a), Some(b)) = (fam.lo().eval_exact(n), fam.hi().eval_exact(n)) {
                if let (Some(fa), Some(fb)) = (prim.eval(&a), prim.eval(&b)) {
                    return to_f64(&(fb - fa));
                }
            }
        }
        let a = fam.lo().eval_f64(x);
        let w = diff_f64(fam.lo(), fam.hi(), x);
        // Simpson's rule on a block far too short for cancellation-free F.
        w / 6.0 * (dens.eval_f64(a) + 4.0 * dens.eval_f64(a + 0.5 * w) + dens.eval_f64(a + w))
    };
    MassMoment {
        mass: sum_smooth(|x| block(f, &dens, x), env_mass, fam.start(), fam.end()),
        moment: sum_smooth(|x| block(g, &xdens, x), env_moment, fam.start(), fam.end()),
    }
}

fn legendre() -> &'static gauss_quad::GaussLegendre {
    static RULE: std::sync::OnceLock<gauss_quad::GaussLegendre> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_quad::GaussLegendre::new(std::num::NonZeroUsize::new(20).expect("degree")))
}

/// `sum_{n=c}^{b} f(n)` for a smooth `f` by Euler-Maclaurin, the integral
/// taken on panels of width 1/4 in `ln x`.
fn euler_maclaurin(f: &impl Fn(f64) -> f64, c: u64, b: u64) -> f64 {
    let (cf, bf) = (c as f64, b as f64);
    let (lc, lb) = (cf.ln(), bf.ln());
    let panels = ((lb - lc) * 4.0).ceil().max(1.0) as usize;
    let du = (lb - lc) / panels as f64;
    let rule = legendre();
    let integral: f64 = (0..panels)
        .map(|i| {
            let u0 = lc + du * i as f64;
            rule.integrate(u0, u0 + du, |u| {
                let x = u.exp();
                f(x) * x
            })
        })
        .sum();
    let d = |x: f64| {
        let h = x * 1e-4;
        (f(x + h) - f(x - h)) / (2.0 * h)
    };
    integral + 0.5 * (f(cf) + f(bf)) + (d(bf) - d(cf)) / 12.0
}

/// [`sum_numeric`] for terms that extend to a smooth function of a real
/// index, so that long finite ranges need not be walked term by term.
pub fn sum_smooth(term: impl Fn(f64) -> f64, env: Option<Asym>, from: u64, to: Option<u64>) -> Sum {
    match to {
        Some(e) if env.is_some() && e.saturating_sub(from) > 16 * DIRECT_TERMS => {
            let head = sum_numeric(|n| term(n as f64), env, from, Some(from + DIRECT_TERMS - 1));
            match head {
                Sum::Finite { value, .. } => {
                    Sum::approx(value + euler_maclaurin(&term, from + DIRECT_TERMS, e))
                }
                other => other,
            }
        }
        _ => sum_numeric(|n| term(n as f64), env, from, to),
    }
}

/// Partial sums of a numerically evaluated series, stopped with a remainder
/// estimate from the envelope calibrated at the current index.
pub fn sum_numeric(
    term: impl Fn(u64) -> f64,
    env: Option<Asym>,
    from: u64,
    to: Option<u64>,
) -> Sum {
    if let Some(e) = to {
        if e < from {
            return Sum::zero();
        }
    }
    if to.is_none() {
        if let Some(a) = env {
            if !a.summable() {
                let probe = (0..=20)
                    .rev()
                    .map(|j| term(from.saturating_add(1 << j)))
                    .find(|t| t.is_finite() && *t != 0.0)
                    .unwrap_or(f64::NAN);
                return if probe > 0.0 {
                    Sum::PosInf
                } else if probe < 0.0 {
                    Sum::NegInf
                } else {
                    Sum::Unresolved { partial: f64::NAN }
                };
            }
        }
    }
    let mut acc = 0.0f64;
    let mut n = from;
    let mut count = 0u64;
    let mut zeros = 0;
    loop {
        if let Some(e) = to {
            if n > e {
                return Sum::approx(acc);
            }
        }
        let t = term(n);
        acc += t;
        count += 1;
        if t == 0.0 {
            zeros += 1;
            if zeros > 64 && env.is_some_and(|a| a.vanishes()) {
                return Sum::approx(acc);
            }
        } else {
            zeros = 0;
        }
        if let Some(a) = env {
            if a.summable() && t != 0.0 {
                let nf = n as f64;
                let lnk = t.abs().ln() - (a.ln_coef + a.pow * nf.ln() + a.ln_base * nf);
                let bound = 2.0 * term_tail_bound((a.ln_coef + lnk).exp(), a.pow, a.ln_base, n);
                if bound <= REL_TOL * acc.abs() {
                    return Sum::approx(acc);
                }
            }
        }
        if count >= TERM_CAP {
            return match to {
                Some(_) => Sum::Unresolved { partial: acc },
                None => Sum::Unresolved { partial: acc },
            };
        }
        n += 1;
    }
}

fn dim_cmp(s: f64, d: f64) -> std::cmp::Ordering {
    if (s - d).abs() < DIM_EPS {
        std::cmp::Ordering::Equal
    } else if s < d {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

fn zero_mm() -> MassMoment {
    MassMoment {
        mass: Sum::zero(),
        moment: Sum::zero(),
    }
}

fn infinite_mm() -> MassMoment {
    MassMoment {
        mass: Sum::PosInf,
        moment: Sum::Divergent,
    }
}

fn hausdorff_interval(s: f64, i: &Interval) -> MassMoment {
    match dim_cmp(s, 1.0) {
        std::cmp::Ordering::Equal => {
            let MeasureSpec::Density { f, g, .. } = MeasureSpec::lebesgue() else {
                unreachable!()
            };
            density_interval(&f, &g, i)
        }
        std::cmp::Ordering::Less => infinite_mm(),
        std::cmp::Ordering::Greater => zero_mm(),
    }
}

fn hausdorff_piece(s: f64, p: &FractalPiece) -> MassMoment {
    match dim_cmp(s, p.ifs.dim()) {
        std::cmp::Ordering::Equal => {
            let mass = to_f64(&p.width()).powf(s);
            MassMoment {
                mass: Sum::approx(mass),
                moment: Sum::approx(mass * p.mean()),
            }
        }
        std::cmp::Ordering::Less => infinite_mm(),
        std::cmp::Ordering::Greater => zero_mm(),
    }
}

fn hausdorff_family(s: f64, fam: &BlockFamily) -> MassMoment {
    let d = fam.shape().dim();
    match dim_cmp(s, d) {
        std::cmp::Ordering::Less => return infinite_mm(),
        std::cmp::Ordering::Greater => return zero_mm(),
        std::cmp::Ordering::Equal => {}
    }
    match fam.shape() {
        Shape::Interval => {
            let MeasureSpec::Density { f, g, .. } = MeasureSpec::lebesgue() else {
                unreachable!()
            };
            density_family(&f, &g, fam)
        }
        Shape::Point => {
            let mass = match fam.count() {
                Some(c) => Sum::exact(q(c as i64)),
                None => Sum::PosInf,
            };
            let moment = match fam.lo().as_poly() {
                Some(p) => sum_exppoly(p, fam.start(), fam.end()),
                None => sum_smooth(
                    |x| fam.lo().eval_f64(x),
                    fam.lo().asym(),
                    fam.start(),
                    fam.end(),
                ),
            };
            MassMoment { mass, moment }
        }
        Shape::Fractal(ifs) => fractal_family(s, ifs, fam),
    }
}

fn fractal_family(s: f64, ifs: &Ifs, fam: &BlockFamily) -> MassMoment {
    let m = ifs.mean();
    if let (Some(lo), Some(hi)) = (fam.lo().as_poly(), fam.hi().as_poly()) {
        let w = hi.sub(lo);
        if let Some(t) = w.single_term() {
            if t.coef.is_positive() {
                let base = RealTerm {
                    coef: to_f64(&t.coef).powf(s),
                    pow: t.pow as f64 * s,
                    ln_base: t.ln_base() * s,
                };
                let mass = base.sum(fam.start(), fam.end());
                let mut moment = RealTerm {
                    coef: base.coef * to_f64(&t.coef) * m,
                    pow: base.pow + t.pow as f64,
                    ln_base: base.ln_base + t.ln_base(),
                }
                .sum(fam.start(), fam.end());
                for lt in lo.terms() {
                    let rt = RealTerm {
                        coef: base.coef * to_f64(&lt.coef),
                        pow: base.pow + lt.pow as f64,
                        ln_base: base.ln_base + lt.ln_base(),
                    };
                    moment = moment.add(&rt.sum(fam.start(), fam.end()));
                }
                return MassMoment { mass, moment };
            }
        }
    }
    let len = diff_asym(fam.lo(), fam.hi()).map(|a| a.powf(s));
    let env_moment = match (len, position_asym(fam.lo())) {
        (Some(l), Some(p)) => Some(l.mul(p)),
        _ => None,
    };
    let width = |x: f64| diff_f64(fam.lo(), fam.hi(), x).powf(s);
    MassMoment {
        mass: sum_smooth(width, len, fam.start(), fam.end()),
        moment: sum_smooth(
            |x| width(x) * (fam.lo().eval_f64(x) + m * diff_f64(fam.lo(), fam.hi(), x)),
            env_moment,
            fam.start(),
            fam.end(),
        ),
    }
}

/// Dimension, normalised mass and mean of the invariant measure of an IFS.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IfsStats {
    pub s: f64,
    pub mass: f64,
    pub mean: f64,
}

pub fn ifs_invariant_stats(ifs: &Ifs) -> IfsStats {
    IfsStats {
        s: ifs.dim(),
        mass: 1.0,
        mean: ifs.mean(),
    }
}

/// Monte-Carlo mean of the invariant measure by the chaos game.
pub fn chaos_game_mean(ifs: &Ifs, samples: u64, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let maps: Vec<(f64, f64)> = ifs
        .maps()
        .iter()
        .map(|m| (to_f64(&m.r), to_f64(&m.t)))
        .collect();
    let cum: Vec<f64> = ifs
        .weights()
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let mut x = 0.0f64;
    let mut total = 0.0f64;
    for k in 0..samples + 64 {
        let u: f64 = rng.gen::<f64>() * cum[cum.len() - 1];
        let i = cum.iter().position(|c| u < *c).unwrap_or(maps.len() - 1);
        x = maps[i].0 * x + maps[i].1;
        if k >= 64 {
            total += x;
        }
    }
    total / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qf;
    use crate::sets::BlockFamily;

    fn ray(a: Q) -> RealSet {
        RealSet::interval(a.into(), ExtReal::PosInf, true, false)
    }

    #[test]
    fn lebesgue_on_intervals() {
        let mu = MeasureSpec::lebesgue();
        let h = RealSet::closed(q(1), q(3));
        let mm = mass_and_moment(&mu, &h).unwrap();
        assert_eq!(mm.mass, Sum::exact(q(2)));
        assert_eq!(mm.moment, Sum::exact(q(4)));
        assert_eq!(measure_of(&mu, &ray(q(0))).unwrap(), Sum::PosInf);
    }

    #[test]
    fn harmonic_on_rays() {
        let mu = MeasureSpec::harmonic();
        let mm = mass_and_moment(&mu, &ray(q(1))).unwrap();
        assert_eq!(mm.mass, Sum::exact(q(1)));
        assert_eq!(mm.moment, Sum::exact(q(2)));
        let mm = mass_and_moment(&mu, &RealSet::closed(q(1), q(2))).unwrap();
        assert_eq!(mm.mass, Sum::exact(qf(3, 4)));
        assert_eq!(mm.moment, Sum::exact(q(1)));
        assert!(measure_of(&mu, &RealSet::closed(q(-1), q(1))).is_err());
        assert_eq!(
            measure_of(&mu, &RealSet::closed(q(0), q(1))).unwrap(),
            Sum::PosInf
        );
    }

    #[test]
    fn geometric_blocks_have_unit_mass() {
        let f =
            BlockFamily::tail(ExpPoly::index(), ExpPoly::term(q(1), 0, qf(1, 2)), 1, None).unwrap();
        let h = RealSet::family(f).unwrap();
        let mm = mass_and_moment(&MeasureSpec::lebesgue(), &h).unwrap();
        assert_eq!(mm.mass, Sum::exact(q(1)));
        assert_eq!(mm.moment, Sum::exact(qf(13, 6)));
    }

    #[test]
    fn long_finite_range_matches_direct_sum() {
        let f = |x: f64| 1.0 / (x * x) - 1.0 / ((x + 0.5) * (x + 0.5));
        let direct: f64 = (1..=200_000u64).map(|n| f(n as f64)).sum();
        let env = Some(Asym { ln_coef: 0.0, pow: -3.0, ln_base: 0.0 });
        let got = sum_smooth(f, env, 1, Some(200_000)).value();
        assert!((got - direct).abs() < 1e-12 * direct, "{got} vs {direct}");
    }

    #[test]
    fn harmonic_on_blocks_matches_exact_prefix() {
        let f =
            BlockFamily::tail(ExpPoly::index(), ExpPoly::term(q(1), 0, qf(1, 2)), 1, None).unwrap();
        let h = RealSet::family(f).unwrap();
        let mm = mass_and_moment(&MeasureSpec::harmonic(), &h).unwrap();
        let oracle: f64 = (1..200)
            .map(|i| {
                let a = i as f64;
                let b = a + 0.5f64.powi(i);
                1.0 / (a * a) - 1.0 / (b * b)
            })
            .sum();
        assert!((mm.mass.value() - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn reciprocal_blocks_sum_numerically() {
        let f = BlockFamily::tail(
            ExpPoly::term(q(1), 0, q(2)),
            ExpPoly::term(q(1), 0, qf(1, 2)),
            1,
            None,
        )
        .unwrap();
        let h = RealSet::family(f).unwrap().reciprocal().unwrap();
        let mm = mass_and_moment(&MeasureSpec::lebesgue(), &h).unwrap();
        let oracle: f64 = (1..200)
            .map(|i| {
                let b = 2f64.powi(i);
                let c = 0.5f64.powi(i);
                1.0 / b - 1.0 / (b + c)
            })
            .sum();
        assert!((mm.mass.value() - oracle).abs() < 1e-10 * oracle);
    }

    #[test]
    fn cantor_stats() {
        let c = Ifs::preset("cantor3").unwrap();
        let st = ifs_invariant_stats(&c);
        assert_eq!(st.mean, 0.5);
        let h = RealSet::fractal(c.clone(), q(0), q(1))
            .union(&RealSet::fractal(c, q(2), q(3)))
            .unwrap();
        let mm = mass_and_moment(&MeasureSpec::hausdorff(st.s), &h).unwrap();
        assert!((mm.moment.value() / mm.mass.value() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn chaos_game_agrees_with_fixed_point() {
        let s = Ifs::preset("skew").unwrap();
        let mc = chaos_game_mean(&s, 200_000, 7);
        assert!((mc - s.mean()).abs() < 5e-3);
    }

    #[test]
    fn power_sum_limits() {
        let f = PowerSum::new(vec![(q(-1), -2)]);
        assert_eq!(f.limit(&ExtReal::Finite(q(0)), true), ExtReal::NegInf);
        assert_eq!(f.limit(&ExtReal::PosInf, false), ExtReal::Finite(q(0)));
        let p = PowerSum::new(vec![(q(1), 3)]);
        assert_eq!(p.limit(&ExtReal::NegInf, true), ExtReal::NegInf);
    }
}
