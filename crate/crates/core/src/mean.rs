//! Generalised means as uniform evaluators `RealSet -> MeanValue`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ext::ExtReal;
use crate::measure::{mass_and_moment, measure_of, MassMoment, MeasureSpec};
use crate::num::{floor_q, fmt_q, fmt_sig, from_f64_approx, q, to_f64, Q};
use crate::seq::{ExpPoly, Seq};
use crate::series::{digamma, sum_exppoly, Sum};
use crate::sets::{Block, RealSet, Shape};

/// Value of a mean on a set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MeanValue {
    Finite(f64),
    PlusInf,
    MinusInf,
    /// In the domain, but the defining limit or series fails to settle.
    Divergent,
    /// Outside the domain of the mean.
    Undefined,
}

impl MeanValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            MeanValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, MeanValue::Finite(_))
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, MeanValue::Undefined)
    }

    /// Position on the extended line, for the three ordered variants.
    pub fn as_ext(&self) -> Option<f64> {
        match self {
            MeanValue::Finite(v) => Some(*v),
            MeanValue::PlusInf => Some(f64::INFINITY),
            MeanValue::MinusInf => Some(f64::NEG_INFINITY),
            _ => None,
        }
    }

    pub fn from_ext(v: f64) -> MeanValue {
        if v == f64::INFINITY {
            MeanValue::PlusInf
        } else if v == f64::NEG_INFINITY {
            MeanValue::MinusInf
        } else if v.is_nan() {
            MeanValue::Divergent
        } else {
            MeanValue::Finite(v)
        }
    }

    pub fn close_to(&self, other: &MeanValue, tol: f64) -> bool {
        match (self, other) {
            (MeanValue::Finite(a), MeanValue::Finite(b)) => (a - b).abs() <= tol * (1.0f64).max(a.abs().max(b.abs())),
            (a, b) => a == b,
        }
    }

    /// A small rational matching the value to near machine precision.
    pub fn as_small_rational(&self) -> Option<Q> {
        let v = self.finite()?;
        let r = from_f64_approx(v, 10_000);
        ((to_f64(&r) - v).abs() <= 1e-12 * v.abs().max(1.0)).then_some(r)
    }
}

impl fmt::Display for MeanValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanValue::Finite(v) => match self.as_small_rational() {
                Some(r) => write!(f, "{}", fmt_q(&r)),
                None => write!(f, "{}", fmt_sig(*v, 12)),
            },
            MeanValue::PlusInf => write!(f, "+inf"),
            MeanValue::MinusInf => write!(f, "-inf"),
            MeanValue::Divergent => write!(f, "divergent"),
            MeanValue::Undefined => write!(f, "undefined"),
        }
    }
}

impl From<Sum> for MeanValue {
    fn from(s: Sum) -> MeanValue {
        match s {
            Sum::Finite { value, .. } => MeanValue::Finite(value),
            Sum::PosInf => MeanValue::PlusInf,
            Sum::NegInf => MeanValue::MinusInf,
            Sum::Divergent | Sum::Unresolved { .. } => MeanValue::Divergent,
        }
    }
}

/// Structural facts about a mean used to pick applicable checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Domain contains unbounded sets.
    pub unbounded: bool,
    /// Domain restricted to subsets of `[0, +inf)` or `(0, +inf)`.
    pub positive_support: bool,
    /// Domain restricted to `s`-sets.
    pub s_set: bool,
    pub monotone: bool,
    pub shift_invariant: bool,
    pub symmetric: bool,
}

pub trait Mean: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, h: &RealSet) -> MeanValue;
    fn caps(&self) -> Caps {
        Caps::default()
    }
    /// The underlying measure, for measure-average means.
    fn measure(&self) -> Option<MeasureSpec> {
        None
    }
}

pub type MeanRef = Arc<dyn Mean>;

/// `M^mu(H) = int_H x dmu / mu(H)`.
#[derive(Clone, Debug)]
pub struct MeasureMean {
    pub mu: MeasureSpec,
}

impl MeasureMean {
    pub fn new(mu: MeasureSpec) -> MeasureMean {
        MeasureMean { mu }
    }
}

pub fn mmu_eval(mu: &MeasureSpec, h: &RealSet) -> MeanValue {
    let Ok(mm) = mass_and_moment(mu, h) else {
        return MeanValue::Undefined;
    };
    ratio(&mm.mass, &mm.moment)
}

/// Mean from a mass and a first moment.
pub fn mean_of_mass_moment(mm: &MassMoment) -> MeanValue {
    ratio(&mm.mass, &mm.moment)
}

fn ratio(mass: &Sum, moment: &Sum) -> MeanValue {
    match mass {
        Sum::Finite { value, exact } => {
            if *value <= 0.0 && exact.as_ref().is_none_or(|e| e.is_zero()) {
                return MeanValue::Undefined;
            }
            match (moment, exact) {
                (Sum::Finite { exact: Some(m), .. }, Some(e)) => MeanValue::Finite(to_f64(&(m / e))),
                (Sum::Finite { value: m, .. }, _) => MeanValue::Finite(m / value),
                (other, _) => MeanValue::from(other.clone()),
            }
        }
        Sum::PosInf | Sum::NegInf => MeanValue::Undefined,
        Sum::Divergent | Sum::Unresolved { .. } => MeanValue::Divergent,
    }
}

impl Mean for MeasureMean {
    fn name(&self) -> String {
        format!("mmu:{}", self.mu.name())
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        mmu_eval(&self.mu, h)
    }

    fn measure(&self) -> Option<MeasureSpec> {
        Some(self.mu.clone())
    }

    fn caps(&self) -> Caps {
        let lebesgue = self.mu == MeasureSpec::lebesgue();
        Caps {
            unbounded: true,
            positive_support: !lebesgue,
            s_set: false,
            monotone: true,
            shift_invariant: lebesgue,
            symmetric: lebesgue,
        }
    }
}

/// Mean with respect to the `s`-measure, `s` the dimension of the set.
/// The strict variant rejects sets whose components differ in dimension.
#[derive(Clone, Copy, Debug)]
pub struct HausdorffMean {
    pub strict: bool,
}

pub fn avg_s_eval(h: &RealSet, strict: bool) -> MeanValue {
    let Some(s) = h.dim() else {
        return MeanValue::Undefined;
    };
    if strict && component_dims(h).iter().any(|d| (d - s).abs() > crate::measure::DIM_EPS) {
        return MeanValue::Undefined;
    }
    mmu_eval(&MeasureSpec::hausdorff(s), h)
}

fn component_dims(h: &RealSet) -> Vec<f64> {
    let mut d = Vec::new();
    d.extend(h.intervals().iter().map(|_| 1.0));
    if !h.point_list().is_empty() {
        d.push(0.0);
    }
    d.extend(h.fractals().iter().map(|p| p.ifs.dim()));
    d.extend(h.families().iter().map(|f| f.shape().dim()));
    d
}

impl Mean for HausdorffMean {
    fn name(&self) -> String {
        if self.strict { "avg-s" } else { "avg" }.into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        avg_s_eval(h, self.strict)
    }

    fn caps(&self) -> Caps {
        Caps {
            unbounded: true,
            s_set: true,
            monotone: self.strict,
            shift_invariant: true,
            symmetric: true,
            ..Caps::default()
        }
    }
}

/// `(liminf H + limsup H) / 2` on bounded sets with accumulation points.
#[derive(Clone, Copy, Debug)]
pub struct Mlis;

pub fn mlis_eval(h: &RealSet) -> MeanValue {
    if h.is_empty() || !h.is_bounded() {
        return MeanValue::Undefined;
    }
    let b = h.bounds();
    match (b.liminf, b.limsup) {
        (Some(ExtReal::Finite(a)), Some(ExtReal::Finite(c))) => MeanValue::Finite(to_f64(&((a + c) / q(2)))),
        _ => MeanValue::Undefined,
    }
}

impl Mean for Mlis {
    fn name(&self) -> String {
        "mlis".into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        mlis_eval(h)
    }

    fn caps(&self) -> Caps {
        Caps { monotone: true, shift_invariant: true, symmetric: true, ..Caps::default() }
    }
}

/// Midpoint of the closed hull, on bounded sets.
#[derive(Clone, Copy, Debug)]
pub struct Midpoint;

impl Mean for Midpoint {
    fn name(&self) -> String {
        "midpoint".into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        if h.is_empty() || !h.is_bounded() {
            return MeanValue::Undefined;
        }
        let b = h.bounds();
        match (b.inf, b.sup) {
            (ExtReal::Finite(a), ExtReal::Finite(c)) => MeanValue::Finite(to_f64(&((a + c) / q(2)))),
            _ => MeanValue::Undefined,
        }
    }

    fn caps(&self) -> Caps {
        Caps { monotone: true, shift_invariant: true, symmetric: true, ..Caps::default() }
    }
}

/// Transfinite gap iteration on subsets of `[0, +inf)`.
#[derive(Clone, Copy, Debug)]
pub struct OrdinalGap {
    pub cap: u32,
}

impl Default for OrdinalGap {
    fn default() -> Self {
        OrdinalGap { cap: 10_000 }
    }
}

/// `inf ([k, +inf) - H)`, or `None` when that set is empty.
fn gap_after(h: &RealSet, k: &Q) -> Option<Q> {
    if let Some(i) = h.intervals().iter().find(|i| i.contains(k)) {
        return i.hi.finite().cloned();
    }
    for f in h.families() {
        if let Some(n) = f.locate(k) {
            if let Block::Interval(_, b) = f.block(n) {
                return Some(b);
            }
        }
    }
    Some(k.clone())
}

pub fn ordinal_gap_mean(h: &RealSet, cap: u32) -> (MeanValue, bool) {
    if h.is_empty() {
        return (MeanValue::Undefined, true);
    }
    let ExtReal::Finite(mut k) = h.bounds().inf else {
        return (MeanValue::Undefined, true);
    };
    if k.is_negative() {
        return (MeanValue::Undefined, true);
    }
    let mut history = vec![k.clone()];
    for _ in 0..cap {
        let Some(next) = gap_after(h, &k) else {
            return (MeanValue::Finite(to_f64(&k)), true);
        };
        if next == k {
            return (MeanValue::Finite(to_f64(&k)), true);
        }
        k = next;
        history.push(k.clone());
    }
    let sup = history.into_iter().max().unwrap();
    (MeanValue::Finite(to_f64(&sup)), false)
}

impl Mean for OrdinalGap {
    fn name(&self) -> String {
        "ordgap".into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        ordinal_gap_mean(h, self.cap).0
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, positive_support: true, ..Caps::default() }
    }
}

/// `inf H + sum_{i >= 1} f(i)/i` with `f(i) = 1` iff `[i, i+1)` meets `H`.
#[derive(Clone, Copy, Debug)]
pub struct HarmonicHit;

/// Cells below this index are collected explicitly.
const HIT_CELLS: u64 = 1 << 16;

fn harmonic_range(a: u64, b: u64) -> f64 {
    if b < a {
        return 0.0;
    }
    if b - a < 4096 {
        return (a..=b).map(|i| 1.0 / i as f64).sum();
    }
    digamma(b as f64 + 1.0) - digamma(a as f64)
}

fn floor_u64(x: &Q) -> u64 {
    floor_q(x).to_u64().unwrap_or(u64::MAX)
}

pub fn harmonic_hit_mean(h: &RealSet) -> MeanValue {
    let b = h.bounds();
    if h.is_empty() || b.inf < ExtReal::Finite(q(1)) || b.sup != ExtReal::PosInf {
        return MeanValue::Undefined;
    }
    if h.intervals().iter().any(|i| i.hi == ExtReal::PosInf) {
        return MeanValue::PlusInf;
    }
    let mut cells: BTreeSet<u64> = BTreeSet::new();
    let mut tail = Sum::zero();
    let add_range = |cells: &mut BTreeSet<u64>, tail: &mut Sum, lo: u64, hi: u64| {
        for i in lo..=hi.min(HIT_CELLS - 1) {
            cells.insert(i);
        }
        if hi >= HIT_CELLS {
            *tail = tail.add(&Sum::approx(harmonic_range(lo.max(HIT_CELLS), hi)));
        }
    };
    for i in h.intervals() {
        let (ExtReal::Finite(a), ExtReal::Finite(c)) = (&i.lo, &i.hi) else { unreachable!() };
        let mut top = floor_u64(c);
        if !i.hi_closed && c.is_integer() {
            top -= 1;
        }
        add_range(&mut cells, &mut tail, floor_u64(a), top);
    }
    for p in h.point_list() {
        let f = floor_u64(p);
        add_range(&mut cells, &mut tail, f, f);
    }
    for p in h.fractals() {
        add_range(&mut cells, &mut tail, floor_u64(&p.lo), floor_u64(&p.hi));
    }
    for fam in h.families() {
        let to_inf = fam.lo().limit() == ExtReal::PosInf;
        if fam.is_infinite() && !to_inf {
            let (ExtReal::Finite(a), ExtReal::Finite(c)) = fam.hull() else {
                return MeanValue::Undefined;
            };
            for i in floor_u64(&a)..=floor_u64(&c) {
                let (x, y) = (ExtReal::Finite(q(i as i64)), ExtReal::Finite(q(i as i64 + 1)));
                if let Some((s, e)) = fam.range_touching(&x, &y) {
                    let only_top = e == Some(s) && fam.extent(s).0 == y;
                    if !only_top {
                        cells.insert(i);
                    }
                }
            }
            continue;
        }
        if to_inf {
            let Some(inv) = fam.lo().asym().map(|a| a.recip()) else {
                return MeanValue::Divergent;
            };
            let wide = crate::measure::block_length_asym(fam).map(|l| l.mul(inv));
            if !inv.summable() || wide.is_some_and(|w| !w.summable() && w.grows()) {
                return MeanValue::PlusInf;
            }
        }
        let mut n = fam.start();
        loop {
            if fam.end().is_some_and(|e| n > e) {
                break;
            }
            let (lo, hi) = fam.extent(n);
            let (ExtReal::Finite(lo), ExtReal::Finite(hi)) = (lo, hi) else {
                return MeanValue::Divergent;
            };
            if to_inf && lo >= q(HIT_CELLS as i64) {
                tail = tail.add(&hit_tail(fam, n));
                break;
            }
            add_range(&mut cells, &mut tail, floor_u64(&lo), floor_u64(&hi));
            n += 1;
        }
    }
    let head: f64 = cells.iter().filter(|&&i| i >= 1).map(|&i| 1.0 / i as f64).sum();
    let total = tail.add(&Sum::approx(head));
    match (total, b.inf) {
        (Sum::Finite { value, .. }, ExtReal::Finite(inf)) => MeanValue::Finite(to_f64(&inf) + value),
        (s, _) => MeanValue::from(s),
    }
}

/// Contribution of the blocks `n0..` of a family running to `+inf`, each
/// block in cells beyond the explicit range.
fn hit_tail(fam: &crate::sets::BlockFamily, n0: u64) -> Sum {
    if let Some(lo) = fam.lo().as_poly() {
        let in_one_cell = match fam.hi() {
            Seq::Poly(hi) => {
                let w = hi.sub(lo);
                w.limit() < ExtReal::Finite(q(1)) && w.eventual_sign() >= 0
            }
            _ => false,
        };
        if lo.is_integer_valued() && in_one_cell {
            if let Some(r) = lo.recip() {
                return sum_exppoly(&r, n0, fam.end());
            }
        }
    }
    let env = fam.lo().asym().map(|a| a.recip());
    crate::measure::sum_numeric(
        |n| {
            let a = fam.lo().eval_f64(n as f64).floor();
            let b = fam.hi().eval_f64(n as f64).floor();
            if a < 1e15 {
                harmonic_range(a as u64, b as u64)
            } else {
                (b - a + 1.0) / a
            }
        },
        env,
        n0,
        fam.end(),
    )
}

impl Mean for HarmonicHit {
    fn name(&self) -> String {
        "hhit".into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        harmonic_hit_mean(h)
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, positive_support: true, ..Caps::default() }
    }
}

/// `sup { a_n : a_n in H }` when some anchor lies in `H`, else `inf H`.
#[derive(Clone, Debug)]
pub struct Anchor {
    pub seq: ExpPoly,
    pub start: u64,
}

impl Default for Anchor {
    fn default() -> Self {
        Anchor { seq: ExpPoly::index(), start: 1 }
    }
}

/// Anchors examined on sets that are bounded or end in sparse families.
const ANCHOR_CAP: u64 = 1_000_000;
/// Block index from which a family is probed for anchors.
const ANCHOR_PROBE: u64 = 1 << 12;

impl Anchor {
    fn at(&self, m: u64) -> Q {
        self.seq.eval_exact(m).unwrap_or_else(|| crate::num::from_f64_approx(self.seq.eval_f64(m as f64), 1))
    }

    /// Smallest index with `a_m >= x`.
    fn first_at_least(&self, x: &Q) -> u64 {
        let mut hi = self.start.max(1);
        while self.at(hi) < *x {
            hi *= 2;
        }
        let mut lo = self.start;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.at(mid) < *x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn block_has_anchor(&self, lo: &Q, hi: &Q) -> bool {
        let m = self.first_at_least(lo);
        self.at(m) <= *hi
    }
}

pub fn anchor_mean(a: &Anchor, h: &RealSet) -> MeanValue {
    if h.is_empty() {
        return MeanValue::Undefined;
    }
    let b = h.bounds();
    if b.inf < ExtReal::Finite(Q::zero()) {
        return MeanValue::Undefined;
    }
    let mut limit = b.sup.clone();
    if b.sup == ExtReal::PosInf {
        if h.intervals().iter().any(|i| i.hi == ExtReal::PosInf) {
            return MeanValue::PlusInf;
        }
        let mut reach = Q::zero();
        for p in h.intervals().iter().filter_map(|i| i.hi.finite()) {
            reach = reach.max(p.clone());
        }
        for p in h.point_list().iter().chain(h.fractals().iter().map(|f| &f.hi)) {
            reach = reach.max(p.clone());
        }
        for fam in h.families() {
            if fam.lo().limit() != ExtReal::PosInf || !fam.is_infinite() {
                if let ExtReal::Finite(v) = fam.hull().1 {
                    reach = reach.max(v);
                }
                continue;
            }
            let probe = fam.start() + ANCHOR_PROBE;
            for n in probe..probe + 64 {
                if let (ExtReal::Finite(lo), ExtReal::Finite(hi)) = fam.extent(n) {
                    if a.block_has_anchor(&lo, &hi) {
                        return MeanValue::PlusInf;
                    }
                }
            }
            if let ExtReal::Finite(v) = fam.extent(probe).0 {
                reach = reach.max(v);
            }
        }
        limit = ExtReal::Finite(reach);
    }
    let mut best: Option<Q> = None;
    let mut m = a.start;
    while m < a.start + ANCHOR_CAP {
        let v = a.at(m);
        if ExtReal::Finite(v.clone()) > limit {
            break;
        }
        if h.contains(&v) == Some(true) {
            best = Some(v);
        }
        m += 1;
    }
    match (best, b.inf) {
        (Some(v), _) => MeanValue::Finite(to_f64(&v)),
        (None, ExtReal::Finite(i)) => MeanValue::Finite(to_f64(&i)),
        _ => MeanValue::Undefined,
    }
}

impl Mean for Anchor {
    fn name(&self) -> String {
        if self.seq == ExpPoly::index() && self.start == 1 {
            "anchor".into()
        } else {
            format!("anchor:{}", self.seq)
        }
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        anchor_mean(self, h)
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, positive_support: true, ..Caps::default() }
    }
}

/// `+inf` on unbounded sets, the inner mean otherwise.
#[derive(Clone)]
pub struct SimpleExtension {
    pub inner: MeanRef,
}

impl Mean for SimpleExtension {
    fn name(&self) -> String {
        format!("simple:{}", self.inner.name())
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        if !h.is_empty() && !h.is_bounded() {
            MeanValue::PlusInf
        } else {
            self.inner.eval(h)
        }
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, ..self.inner.caps() }
    }
}

pub fn simple_extension(inner: MeanRef) -> MeanRef {
    Arc::new(SimpleExtension { inner })
}

/// `1 / K(1/H)` on sets in `(0, +inf)` with `sup H = +inf`.
#[derive(Clone)]
pub struct ReciprocalExtension {
    pub inner: MeanRef,
}

pub fn reciprocal_extension(k: &dyn Mean, h: &RealSet) -> MeanValue {
    if h.is_empty() {
        return MeanValue::Undefined;
    }
    let b = h.bounds();
    if b.inf <= ExtReal::Finite(Q::zero()) {
        return MeanValue::Undefined;
    }
    if b.sup != ExtReal::PosInf {
        return k.eval(h);
    }
    let Ok(r) = h.reciprocal() else {
        return MeanValue::Undefined;
    };
    match k.eval(&r) {
        MeanValue::Finite(v) if v == 0.0 => MeanValue::PlusInf,
        MeanValue::Finite(v) => MeanValue::Finite(1.0 / v),
        MeanValue::PlusInf => MeanValue::Finite(0.0),
        other => other,
    }
}

impl Mean for ReciprocalExtension {
    fn name(&self) -> String {
        format!("recipext:{}", self.inner.name())
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        reciprocal_extension(self.inner.as_ref(), h)
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, positive_support: true, ..Caps::default() }
    }
}

fn left_mass(h: &RealSet, x: &Q) -> Option<Q> {
    let part = h.clip(&ExtReal::NegInf, &ExtReal::Finite(x.clone())).ok()?;
    measure_of(&MeasureSpec::lebesgue(), &part).ok()?.exact_value().cloned()
}

/// Leftmost point splitting `H` into two halves of Lebesgue mass.
fn lower_median(h: &RealSet, total: &Q) -> Option<Q> {
    let half = total / q(2);
    let b = h.bounds();
    let mut a = match &b.inf {
        ExtReal::Finite(v) => v - q(1),
        _ => {
            let mut a = q(-1);
            while left_mass(h, &a)? >= half {
                a *= q(2);
            }
            a
        }
    };
    let mut c = match &b.sup {
        ExtReal::Finite(v) => v.clone(),
        _ => {
            let mut c = q(1);
            while left_mass(h, &c)? < half {
                c *= q(2);
            }
            c
        }
    };
    for _ in 0..96 {
        let m = (&a + &c) / q(2);
        if left_mass(h, &m)? >= half {
            c = m;
        } else {
            a = m;
        }
    }
    let need = &half - left_mass(h, &a)?;
    let window = h.clip(&ExtReal::Finite(a.clone()), &ExtReal::Finite(c.clone())).ok()?;
    let mut pieces: Vec<(Q, Q)> = Vec::new();
    for i in window.intervals() {
        if let (ExtReal::Finite(x), ExtReal::Finite(y)) = (&i.lo, &i.hi) {
            pieces.push((x.clone(), y.clone()));
        }
    }
    for f in window.families() {
        if *f.shape() != Shape::Interval {
            continue;
        }
        let Some(count) = f.count() else {
            return f.limit().and_then(|l| l.finite().cloned());
        };
        for n in f.start()..f.start() + count.min(10_000) {
            if let Block::Interval(x, y) = f.block(n) {
                pieces.push((x, y));
            }
        }
    }
    pieces.sort();
    let mut acc = Q::zero();
    for (x, y) in pieces {
        let len = &y - &x;
        if &acc + &len >= need {
            return Some(x + (&need - &acc));
        }
        acc += len;
    }
    Some(c)
}

/// `{x : lambda(H^{x-}) = lambda(H^{x+})}` as a closed interval.
pub fn mean_set_hf(h: &RealSet) -> Option<(Q, Q)> {
    let total = measure_of(&MeasureSpec::lebesgue(), h).ok()?.exact_value().cloned()?;
    if !total.is_positive() {
        return None;
    }
    let lo = lower_median(h, &total)?;
    let hi = -lower_median(&h.affine(&q(-1), &Q::zero()).ok()?, &total)?;
    Some((lo, hi))
}

/// Midpoint of the median interval.
#[derive(Clone, Copy, Debug)]
pub struct Median;

impl Mean for Median {
    fn name(&self) -> String {
        "median".into()
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        match mean_set_hf(h) {
            Some((a, b)) => MeanValue::Finite(to_f64(&((a + b) / q(2)))),
            None => MeanValue::Undefined,
        }
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, monotone: true, shift_invariant: true, symmetric: true, ..Caps::default() }
    }
}

pub fn lebesgue_mean() -> MeanRef {
    Arc::new(MeasureMean::new(MeasureSpec::lebesgue()))
}

pub fn harmonic_mean() -> MeanRef {
    Arc::new(MeasureMean::new(MeasureSpec::harmonic()))
}

/// Names accepted by [`mean_by_name`], without the wrapper prefixes.
pub const MEAN_NAMES: &[&str] = &[
    "mmu:lebesgue",
    "avg1",
    "mmu:harmonic",
    "avg",
    "avg-s",
    "mlis",
    "midpoint",
    "median",
    "ordgap",
    "hhit",
    "anchor",
];

/// Resolve a mean name, including `simple:`, `recipext:` and `ext:` wrappers.
pub fn mean_by_name(name: &str) -> Option<MeanRef> {
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("simple:") {
        return Some(simple_extension(mean_by_name(inner)?));
    }
    if let Some(inner) = name.strip_prefix("recipext:") {
        return Some(Arc::new(ReciprocalExtension { inner: mean_by_name(inner)? }));
    }
    if let Some(inner) = name.strip_prefix("ext:") {
        return Some(crate::extension::extended(mean_by_name(inner)?));
    }
    Some(match name {
        "mmu:lebesgue" | "avg1" | "lebesgue" => lebesgue_mean(),
        "mmu:harmonic" | "harmonic" => harmonic_mean(),
        "avg" => Arc::new(HausdorffMean { strict: false }),
        "avg-s" => Arc::new(HausdorffMean { strict: true }),
        "mlis" => Arc::new(Mlis),
        "midpoint" => Arc::new(Midpoint),
        "median" => Arc::new(Median),
        "ordgap" => Arc::new(OrdinalGap::default()),
        "hhit" => Arc::new(HarmonicHit),
        "anchor" => Arc::new(Anchor::default()),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Ifs;
    use crate::num::qf;
    use crate::sets::BlockFamily;

    fn ray(a: Q) -> RealSet {
        RealSet::interval(ExtReal::Finite(a), ExtReal::PosInf, true, false)
    }

    fn ex224() -> RealSet {
        let f = BlockFamily::tail(ExpPoly::index(), ExpPoly::term(q(1), 0, qf(1, 2)), 1, None).unwrap();
        RealSet::family(f).unwrap()
    }

    fn points_family(b: ExpPoly, start: u64) -> RealSet {
        RealSet::family(BlockFamily::tail(b, ExpPoly::zero(), start, None).unwrap()).unwrap()
    }

    #[test]
    fn harmonic_rays() {
        for (a, want) in [(q(1), 2.0), (q(2), 4.0), (qf(5, 2), 5.0)] {
            assert_eq!(mmu_eval(&MeasureSpec::harmonic(), &ray(a)), MeanValue::Finite(want));
        }
    }

    #[test]
    fn lebesgue_midpoint_and_undefined() {
        assert_eq!(mmu_eval(&MeasureSpec::lebesgue(), &RealSet::closed(q(2), q(5))), MeanValue::Finite(3.5));
        assert_eq!(mmu_eval(&MeasureSpec::lebesgue(), &ray(q(0))), MeanValue::Undefined);
        assert_eq!(mmu_eval(&MeasureSpec::lebesgue(), &RealSet::points(vec![q(1)])), MeanValue::Undefined);
        assert_eq!(mmu_eval(&MeasureSpec::lebesgue(), &ex224()).to_string(), "13/6");
    }

    #[test]
    fn cantor_means() {
        let c = Ifs::preset("cantor3").unwrap();
        let one = RealSet::fractal(c.clone(), q(0), q(1));
        assert_eq!(avg_s_eval(&one, true), MeanValue::Finite(0.5));
        let two = one.union(&RealSet::fractal(c, q(2), q(3))).unwrap();
        assert!(avg_s_eval(&two, true).close_to(&MeanValue::Finite(1.5), 1e-12));
        let mixed = one.union(&RealSet::closed(q(5), q(6))).unwrap();
        assert_eq!(avg_s_eval(&mixed, true), MeanValue::Undefined);
        assert_eq!(avg_s_eval(&mixed, false), MeanValue::Finite(5.5));
    }

    #[test]
    fn infinite_mean_fractal_copies() {
        let ifs = Ifs::preset("cantor8").unwrap();
        let lo = Seq::Poly(ExpPoly::index());
        let hi = Seq::Poly(ExpPoly::index().add(&ExpPoly::term(q(1), -6, q(1))));
        let f = BlockFamily::new(lo, hi, Shape::Fractal(ifs), 2, None).unwrap();
        let h = RealSet::family(f).unwrap();
        assert_eq!(avg_s_eval(&h, true), MeanValue::PlusInf);
        let with = h.union(&RealSet::closed(q(-1), q(0))).unwrap();
        assert_eq!(avg_s_eval(&with, false), MeanValue::Finite(-0.5));
    }

    #[test]
    fn mlis_examples() {
        assert_eq!(mlis_eval(&RealSet::closed(q(0), q(1))), MeanValue::Finite(0.5));
        let recips = points_family(ExpPoly::term(q(1), -1, q(1)), 1);
        let h = recips.union(&RealSet::closed(q(2), q(3))).unwrap();
        assert_eq!(mlis_eval(&h), MeanValue::Finite(1.5));
        assert_eq!(mlis_eval(&RealSet::points(vec![q(1), q(2), q(5)])), MeanValue::Undefined);
    }

    #[test]
    fn ordinal_gap_examples() {
        let g = OrdinalGap::default();
        assert_eq!(g.eval(&RealSet::closed(q(0), q(1))), MeanValue::Finite(1.0));
        let two = RealSet::closed(q(0), q(1)).union(&RealSet::closed(q(2), q(3))).unwrap();
        assert_eq!(g.eval(&two), MeanValue::Finite(1.0));
        assert_eq!(g.eval(&RealSet::points(vec![q(0)])), MeanValue::Finite(0.0));
        assert_eq!(g.eval(&RealSet::closed(q(-1), q(1))), MeanValue::Undefined);
    }

    #[test]
    fn harmonic_hit_examples() {
        assert_eq!(harmonic_hit_mean(&ray(q(1))), MeanValue::PlusInf);
        let pow2 = points_family(ExpPoly::term(q(1), 0, q(2)), 0);
        assert!(harmonic_hit_mean(&pow2).close_to(&MeanValue::Finite(3.0), 1e-10));
        let squares = points_family(ExpPoly::index().powi(2), 1);
        let want = 1.0 + std::f64::consts::PI.powi(2) / 6.0;
        assert!(harmonic_hit_mean(&squares).close_to(&MeanValue::Finite(want), 1e-10));
        assert_eq!(harmonic_hit_mean(&points_family(ExpPoly::index(), 1)), MeanValue::PlusInf);
        assert_eq!(harmonic_hit_mean(&RealSet::closed(q(1), q(2))), MeanValue::Undefined);
    }

    #[test]
    fn anchor_examples() {
        let a = Anchor::default();
        assert_eq!(a.eval(&RealSet::points(vec![qf(1, 2), q(3)])), MeanValue::Finite(3.0));
        assert_eq!(a.eval(&RealSet::points(vec![qf(1, 2)])), MeanValue::Finite(0.5));
        assert_eq!(a.eval(&ray(q(0))), MeanValue::PlusInf);
        assert_eq!(a.eval(&points_family(ExpPoly::index().powi(2), 1)), MeanValue::PlusInf);
        let off = points_family(ExpPoly::index().add_const(&qf(1, 2)), 1);
        assert_eq!(a.eval(&off), MeanValue::Finite(1.5));
    }

    #[test]
    fn simple_and_reciprocal_extensions() {
        let s = simple_extension(Arc::new(Midpoint));
        assert_eq!(s.eval(&ray(q(0))), MeanValue::PlusInf);
        assert_eq!(s.eval(&RealSet::closed(q(0), q(1))), MeanValue::Finite(0.5));
        assert_eq!(s.eval(&points_family(ExpPoly::index(), 1)), MeanValue::PlusInf);
        let pow2 = points_family(ExpPoly::term(q(1), 0, q(2)), 0);
        assert_eq!(reciprocal_extension(&Mlis, &pow2), MeanValue::PlusInf);
        assert_eq!(reciprocal_extension(&Midpoint, &ray(q(1))), MeanValue::Finite(2.0));
        assert_eq!(reciprocal_extension(&Midpoint, &ray(q(2))), MeanValue::Finite(4.0));
        assert_eq!(reciprocal_extension(&Midpoint, &ray(q(0))), MeanValue::Undefined);
    }

    #[test]
    fn median_intervals() {
        assert_eq!(mean_set_hf(&RealSet::closed(q(0), q(2))), Some((q(1), q(1))));
        let gap = RealSet::closed(q(0), q(1)).union(&RealSet::closed(q(2), q(3))).unwrap();
        assert_eq!(mean_set_hf(&gap), Some((q(1), q(2))));
        let lop = RealSet::closed(q(0), q(1)).union(&RealSet::closed(q(10), q(13))).unwrap();
        assert_eq!(mean_set_hf(&lop), Some((q(11), q(11))));
        assert_eq!(mean_set_hf(&ray(q(0))), None);
    }

    #[test]
    fn display_prefers_small_rationals() {
        assert_eq!(MeanValue::Finite(13.0 / 6.0).to_string(), "13/6");
        assert_eq!(MeanValue::Finite(2.0).to_string(), "2");
        assert_eq!(MeanValue::Finite(std::f64::consts::PI).to_string(), "3.14159265359");
        assert_eq!(MeanValue::PlusInf.to_string(), "+inf");
    }

    #[test]
    fn registry_resolves_wrappers() {
        for n in MEAN_NAMES {
            assert!(mean_by_name(n).is_some(), "{n}");
        }
        assert_eq!(mean_by_name("simple:midpoint").unwrap().name(), "simple:midpoint");
        assert_eq!(mean_by_name("recipext:midpoint").unwrap().name(), "recipext:midpoint");
        assert!(mean_by_name("nope").is_none());
    }
}
