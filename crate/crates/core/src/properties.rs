//! Executable checkers for the axioms of generalised means.
//!
//! Every checker runs over a list of [`Case`]s. A case either passes, is
//! skipped (hypothesis not met, or a value outside the domain), fails with a
//! witness, or stays unsure. Universal statements therefore become claims
//! about the catalog: `holds-on-catalog`, never theorems.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::catalog;
use crate::ext::ExtReal;
use crate::extension::{extend_mean, extended, WindowSchedule, Status};
use crate::mean::{mean_by_name, Mean, MeanRef, MeanValue};
use crate::measure::measure_of;
use crate::num::{fmt_q, from_f64_exact, q, qf, to_f64, Q};
use crate::series::Sum;
use crate::sets::RealSet;

/// Three-valued outcome of a property check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict3 {
    #[serde(rename = "holds-on-catalog")]
    Holds,
    #[serde(rename = "counterexample")]
    Counterexample,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict3::Holds => "holds-on-catalog",
            Verdict3::Counterexample => "counterexample",
            Verdict3::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    Plain,
    Strong,
    IStrong,
}

/// The checkable properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Internal(Level),
    Monotone,
    BaseMonotone,
    DisjointMonotone,
    StrongBaseMonotone,
    SliceContinuous,
    ISliceContinuous,
    IntervalContinuous,
    PartSliceContinuous,
    IntervalInfinite,
    BoundedSmall,
    Finite,
    SubsetFinite,
    BoundedFinite,
    LimitFinite,
    ShiftInvariant,
    Homogeneous,
    Symmetric,
    FiniteIndependent,
    /// `M(A u B) = (mu(A) M(A) + mu(B) M(B)) / (mu(A) + mu(B))` for disjoint sets.
    UnionIdentity,
    /// `x -> K(H^{x+})` nondecreasing.
    TailMonotone,
    /// `K^ = K` on bounded sets of the domain.
    Extension,
    /// `K^ = K` on unbounded sets where the measure mean is defined.
    MeasureAgreement,
    /// `K^(H) = +inf` when `inf H > -inf` and `mu(H) = +inf`.
    InfiniteMeasure,
    /// Finite one-sided extensions combine into a finite two-sided one.
    TwoSided,
    /// Disjoint positive sets with `K^ = +inf` have a union with `K^ = +inf`.
    UnionInfinite,
    /// Disjoint positive sets with finite `K^` have a union with finite `K^`.
    UnionFinite,
}

pub const PROPERTY_NAMES: &[&str] = &[
    "internal",
    "strong-internal",
    "i-strong-internal",
    "monotone",
    "base-monotone",
    "disjoint-monotone",
    "strong-base-monotone",
    "slice-continuous",
    "i-slice-continuous",
    "interval-continuous",
    "part-slice-continuous",
    "interval-infinite",
    "bounded-small",
    "finite",
    "subset-finite",
    "bounded-finite",
    "limit-finite",
    "shift-invariant",
    "homogeneous",
    "symmetric",
    "finite-independent",
    "union-identity",
    "tail-monotone",
    "extension",
    "measure-agreement",
    "infinite-measure",
    "two-sided",
    "union-infinite",
    "union-finite",
];

impl Property {
    pub fn by_name(name: &str) -> Option<Property> {
        use Property::*;
        Some(match name {
            "internal" => Internal(Level::Plain),
            "strong-internal" => Internal(Level::Strong),
            "i-strong-internal" => Internal(Level::IStrong),
            "monotone" => Monotone,
            "base-monotone" => BaseMonotone,
            "disjoint-monotone" => DisjointMonotone,
            "strong-base-monotone" => StrongBaseMonotone,
            "slice-continuous" => SliceContinuous,
            "i-slice-continuous" => ISliceContinuous,
            "interval-continuous" => IntervalContinuous,
            "part-slice-continuous" => PartSliceContinuous,
            "interval-infinite" => IntervalInfinite,
            "bounded-small" => BoundedSmall,
            "finite" => Finite,
            "subset-finite" => SubsetFinite,
            "bounded-finite" => BoundedFinite,
            "limit-finite" => LimitFinite,
            "shift-invariant" | "shift" => ShiftInvariant,
            "homogeneous" => Homogeneous,
            "symmetric" => Symmetric,
            "finite-independent" => FiniteIndependent,
            "union-identity" => UnionIdentity,
            "tail-monotone" => TailMonotone,
            "extension" => Extension,
            "measure-agreement" => MeasureAgreement,
            "infinite-measure" => InfiniteMeasure,
            "two-sided" => TwoSided,
            "union-infinite" => UnionInfinite,
            "union-finite" => UnionFinite,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        use Property::*;
        match self {
            Internal(Level::Plain) => "internal",
            Internal(Level::Strong) => "strong-internal",
            Internal(Level::IStrong) => "i-strong-internal",
            Monotone => "monotone",
            BaseMonotone => "base-monotone",
            DisjointMonotone => "disjoint-monotone",
            StrongBaseMonotone => "strong-base-monotone",
            SliceContinuous => "slice-continuous",
            ISliceContinuous => "i-slice-continuous",
            IntervalContinuous => "interval-continuous",
            PartSliceContinuous => "part-slice-continuous",
            IntervalInfinite => "interval-infinite",
            BoundedSmall => "bounded-small",
            Finite => "finite",
            SubsetFinite => "subset-finite",
            BoundedFinite => "bounded-finite",
            LimitFinite => "limit-finite",
            ShiftInvariant => "shift-invariant",
            Homogeneous => "homogeneous",
            Symmetric => "symmetric",
            FiniteIndependent => "finite-independent",
            UnionIdentity => "union-identity",
            TailMonotone => "tail-monotone",
            Extension => "extension",
            MeasureAgreement => "measure-agreement",
            InfiniteMeasure => "infinite-measure",
            TwoSided => "two-sided",
            UnionInfinite => "union-infinite",
            UnionFinite => "union-finite",
        }
    }
}

/// Input of a single check.
#[derive(Clone, Debug, PartialEq)]
pub enum Case {
    Set(RealSet),
    Pair(RealSet, RealSet),
    Triple(RealSet, RealSet, RealSet),
    /// A set with a rational parameter (shift, factor, slice end).
    Scalar(RealSet, Q),
}

impl Case {
    pub fn sets(&self) -> Vec<&RealSet> {
        match self {
            Case::Set(h) | Case::Scalar(h, _) => vec![h],
            Case::Pair(a, b) => vec![a, b],
            Case::Triple(a, b, c) => vec![a, b, c],
        }
    }

    pub fn scalars(&self) -> Vec<String> {
        match self {
            Case::Scalar(_, t) => vec![fmt_q(t)],
            _ => Vec::new(),
        }
    }
}

/// Tolerances and sampling budget.
#[derive(Clone, Debug, Serialize)]
pub struct CheckConfig {
    /// Relative tolerance for value comparisons.
    pub tol: f64,
    /// Jump tolerance for continuity scans.
    pub jump_tol: f64,
    pub rounds: u32,
    /// Grid cells on the compactified line `t in [-1, 1]`, `x = tan(pi t / 2)`.
    pub resolution: usize,
    /// Shifts and cut points `2^j` for `j = 0..=shift_exp`.
    pub shift_exp: u32,
    pub schedule: WindowSchedule,
    pub seed: u64,
    /// Random triples for strong-base-monotonicity.
    pub triples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tol: 1e-9,
            jump_tol: 1e-6,
            rounds: 20,
            resolution: 64,
            shift_exp: 20,
            schedule: WindowSchedule::default(),
            seed: 7,
            triples: 240,
        }
    }
}

/// A case that realises a violation, or the first undecided one.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub case_index: usize,
    pub sets: Vec<String>,
    pub scalars: Vec<String>,
    pub values: Vec<String>,
    pub detail: String,
    #[serde(skip)]
    pub case: Case,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Skip,
    Fail,
    Unsure,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub index: usize,
    pub status: CaseStatus,
    pub sets: Vec<String>,
    pub scalars: Vec<String>,
    pub values: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub mean: String,
    pub verdict: Verdict3,
    pub witness: Option<Witness>,
    /// Cases that were decided (passed or failed).
    pub samples: usize,
    pub skipped: usize,
    pub records: Vec<CaseRecord>,
}

impl PropertyReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "property: {}\nmean: {}\nverdict: {}\nsamples: {} (skipped {})\n",
            self.property, self.mean, self.verdict, self.samples, self.skipped
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!("witness: case {}\n", w.case_index));
            for (i, set) in w.sets.iter().enumerate() {
                s.push_str(&format!("  set {}: {}\n", i + 1, set));
            }
            if !w.scalars.is_empty() {
                s.push_str(&format!("  scalars: {}\n", w.scalars.join(", ")));
            }
            if !w.values.is_empty() {
                s.push_str(&format!("  values: {}\n", w.values.join(", ")));
            }
            s.push_str(&format!("  detail: {}\n", w.detail));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One JSON object per case.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

enum Outcome {
    Pass(Vec<String>),
    Skip(String),
    Fail(Vec<String>, String),
    Unsure(Vec<String>, String),
}

fn show(v: &MeanValue) -> String {
    v.to_string()
}

/// `a <= b` on the extended line, with relative slack.
fn le(a: f64, b: f64, tol: f64) -> bool {
    if a <= b {
        return true;
    }
    a.is_finite() && b.is_finite() && a - b <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    le(a, b, tol) && le(b, a, tol)
}

/// Ordered value, or `None` for `Divergent` / `Undefined`.
fn ordered(v: &MeanValue) -> Option<f64> {
    v.as_ext()
}

fn eval_opt(k: &dyn Mean, h: &SetTry) -> Option<MeanValue> {
    match h {
        Ok(h) if !h.is_empty() => Some(k.eval(h)),
        _ => None,
    }
}

type SetTry = Result<RealSet, String>;

fn union(a: &RealSet, b: &RealSet) -> SetTry {
    a.union(b).map_err(|e| e.to_string())
}

fn clip(h: &RealSet, x: &ExtReal, y: &ExtReal) -> SetTry {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    h.clip(x, y).map_err(|e| e.to_string())
}

fn ext_of(v: f64) -> ExtReal {
    if v == f64::INFINITY {
        ExtReal::PosInf
    } else if v == f64::NEG_INFINITY {
        ExtReal::NegInf
    } else {
        ExtReal::Finite(from_f64_exact(v).expect("finite grid point"))
    }
}

fn ext_q(x: &Q) -> ExtReal {
    ExtReal::Finite(x.clone())
}

/// Distance on the extended line: relative for finite pairs, through
/// `atan` when `arc` is set or an infinite value is involved.
fn ext_dist(a: f64, b: f64, arc: bool) -> f64 {
    if a == b {
        0.0
    } else if arc || !a.is_finite() || !b.is_finite() {
        (a.atan() - b.atan()).abs() * 2.0 / PI
    } else {
        (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
    }
}

fn compact(t: f64) -> f64 {
    if t >= 1.0 {
        f64::INFINITY
    } else if t <= -1.0 {
        f64::NEG_INFINITY
    } else {
        (PI * t / 2.0).tan()
    }
}

/// Grid scan of a function on the compactified line with jump refinement.
fn scan_continuity(f: &(dyn Fn(&ExtReal) -> Option<MeanValue> + Sync), cfg: &CheckConfig, with_ends: bool) -> Outcome {
    let n = cfg.resolution.max(2);
    let ts: Vec<f64> = (0..=n)
        .map(|i| -1.0 + 2.0 * i as f64 / n as f64)
        .filter(|t| with_ends || t.abs() < 1.0)
        .collect();
    let sample = |t: f64| -> Option<f64> { f(&ext_of(compact(t))).and_then(|v| ordered(&v)) };
    let vals: Vec<Option<f64>> = ts.iter().map(|&t| sample(t)).collect();
    let defined = vals.iter().filter(|v| v.is_some()).count();
    if defined < 2 {
        return Outcome::Skip("fewer than two samples in the domain".into());
    }
    let mut unsure: Option<(Vec<String>, String)> = None;
    for i in 0..ts.len() - 1 {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
        let arc = !a.is_finite() || !b.is_finite();
        let d0 = ext_dist(a, b, arc);
        if d0 <= cfg.jump_tol {
            continue;
        }
        let (mut t0, mut t1, mut v0, mut v1) = (ts[i], ts[i + 1], a, b);
        let mut gap = false;
        for _ in 0..cfg.rounds {
            let tm = 0.5 * (t0 + t1);
            let Some(vm) = sample(tm) else {
                gap = true;
                break;
            };
            if ext_dist(v0, vm, arc) >= ext_dist(vm, v1, arc) {
                t1 = tm;
                v1 = vm;
            } else {
                t0 = tm;
                v0 = vm;
            }
        }
        if gap {
            continue;
        }
        let d = ext_dist(v0, v1, arc);
        let values = vec![format!("{}", MeanValue::from_ext(v0)), format!("{}", MeanValue::from_ext(v1))];
        let where_ = format!("x in [{}, {}]", compact(t0), compact(t1));
        // a gap shrinking at the bisection rate is read as a Lipschitz piece
        if d <= cfg.jump_tol || d <= d0 * 0.5f64.powi(cfg.rounds as i32 - 4) {
            continue;
        }
        if d >= 0.5 * d0 {
            return Outcome::Fail(values, format!("jump of {d:.6} persists at {where_}"));
        }
        if unsure.is_none() {
            unsure = Some((values, format!("gap {d:.3e} still above tolerance at {where_}")));
        }
    }
    match unsure {
        Some((v, d)) => Outcome::Unsure(v, d),
        None => Outcome::Pass(vec![format!("{defined} samples")]),
    }
}

fn shifts(cfg: &CheckConfig) -> Vec<Q> {
    (0..=cfg.shift_exp).map(|j| crate::num::pow_q(&q(2), j as i32)).collect()
}

/// Behaviour of `K(H u (I + x))` as `x -> sign * inf`.
fn interval_infinite_side(k: &dyn Mean, h: &RealSet, i: &RealSet, sign: i64, cfg: &CheckConfig) -> Option<Outcome> {
    let mut vals = Vec::new();
    for x in shifts(cfg) {
        let moved = i.shift(&(x * q(sign))).ok()?;
        let v = eval_opt(k, &union(h, &moved))?;
        {
            let f = ordered(&v)?;
            vals.push(f)
        }
    }
    let last = *vals.last()?;
    let prev = vals[vals.len() - 2];
    let s = sign as f64;
    let shown = vec![
        format!("x={}: {}", sign * (1i64 << (cfg.shift_exp - 1)), MeanValue::from_ext(prev)),
        format!("x={}: {}", sign * (1i64 << cfg.shift_exp), MeanValue::from_ext(last)),
    ];
    if last * s == f64::INFINITY {
        return Some(Outcome::Pass(shown));
    }
    let bound = (1u64 << (cfg.shift_exp / 2)) as f64;
    let growing = vals.windows(2).rev().take(4).all(|w| w[1] * s >= w[0] * s);
    if last * s >= bound && growing {
        return Some(Outcome::Pass(shown));
    }
    if (last - prev).abs() <= cfg.jump_tol * 1f64.max(last.abs()) {
        return Some(Outcome::Fail(shown, format!("values settle at {} as the interval moves off", MeanValue::from_ext(last))));
    }
    Some(Outcome::Unsure(shown, "neither bounded nor crossing the bound".into()))
}

/// Combine two side outcomes: a failure wins, then unsure, then pass.
fn combine(outs: Vec<Option<Outcome>>) -> Outcome {
    let mut best: Option<Outcome> = None;
    let rank = |o: &Outcome| match o {
        Outcome::Fail(..) => 3,
        Outcome::Unsure(..) => 2,
        Outcome::Pass(_) => 1,
        Outcome::Skip(_) => 0,
    };
    for o in outs.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| rank(&o) > rank(b)) {
            best = Some(o);
        }
    }
    best.unwrap_or_else(|| Outcome::Skip("no side in the domain".into()))
}

fn mass(k: &dyn Mean, h: &RealSet) -> Option<f64> {
    let mu = k.measure()?;
    match measure_of(&mu, h).ok()? {
        Sum::Finite { value, .. } => Some(value),
        Sum::PosInf => Some(f64::INFINITY),
        _ => None,
    }
}

fn is_infinite_set(h: &RealSet) -> bool {
    !h.intervals().is_empty() || !h.fractals().is_empty() || h.families().iter().any(|f| f.is_infinite())
}

fn check_case(prop: Property, k: &dyn Mean, case: &Case, cfg: &CheckConfig) -> Outcome {
    use Outcome::*;
    use Property::*;
    let tol = cfg.tol;
    match (prop, case) {
        (Internal(level), Case::Set(h)) => {
            let v = k.eval(h);
            let Some(x) = ordered(&v) else { return Skip(format!("value {v}")) };
            let b = h.bounds();
            let (lo, hi) = match level {
                Level::Plain => (b.inf.to_f64(), b.sup.to_f64()),
                Level::Strong => match (b.liminf, b.limsup) {
                    (Some(a), Some(c)) => (a.to_f64(), c.to_f64()),
                    _ => return Skip("no accumulation points".into()),
                },
                Level::IStrong => {
                    if b.liminf.is_none() {
                        return Skip("no accumulation points".into());
                    }
                    (
                        b.acc_finite_inf.map_or(f64::INFINITY, |e| e.to_f64()),
                        b.acc_finite_sup.map_or(f64::NEG_INFINITY, |e| e.to_f64()),
                    )
                }
            };
            let vals = vec![show(&v), format!("bounds [{lo}, {hi}]")];
            if le(lo, x, tol) && le(x, hi, tol) {
                Pass(vals)
            } else {
                Fail(vals, "value outside the bounds".into())
            }
        }
        (Monotone | BaseMonotone | DisjointMonotone, Case::Pair(a, b)) => {
            if prop == Monotone && a.bounds().sup > b.bounds().inf {
                return Skip("sup H1 > inf H2".into());
            }
            let (va, vb) = (k.eval(a), k.eval(b));
            let Some(vu) = eval_opt(k, &union(a, b)) else { return Skip("union not representable".into()) };
            let (Some(x), Some(y), Some(u)) = (ordered(&va), ordered(&vb), ordered(&vu)) else {
                return Skip(format!("values {va}, {vb}, {vu}"));
            };
            let vals = vec![show(&va), show(&vu), show(&vb)];
            let (lo, hi) = if prop == Monotone { (x, y) } else { (x.min(y), x.max(y)) };
            if le(lo, u, tol) && le(u, hi, tol) {
                Pass(vals)
            } else {
                Fail(vals, "union value not between the parts".into())
            }
        }
        (StrongBaseMonotone, Case::Triple(h1, h2, kk)) => strong_base(k, h1, h2, kk, tol),
        (SliceContinuous, Case::Scalar(h, y)) => {
            let y = ext_q(y);
            scan_continuity(&|x: &ExtReal| eval_opt(k, &clip(h, x, &y)), cfg, true)
        }
        (ISliceContinuous, Case::Set(h)) => combine(vec![
            Some(scan_continuity(&|x: &ExtReal| eval_opt(k, &clip(h, &ExtReal::NegInf, x)), cfg, true)),
            Some(scan_continuity(&|x: &ExtReal| eval_opt(k, &clip(h, x, &ExtReal::PosInf)), cfg, true)),
        ]),
        (PartSliceContinuous, Case::Pair(h1, h2)) => {
            let part = |lower: bool| {
                move |x: &ExtReal| {
                    let piece = if lower { clip(h2, &ExtReal::NegInf, x) } else { clip(h2, x, &ExtReal::PosInf) };
                    match piece {
                        Ok(p) if p.is_empty() => Some(k.eval(h1)),
                        Ok(p) => eval_opt(k, &union(h1, &p)),
                        Err(_) => None,
                    }
                }
            };
            combine(vec![
                Some(scan_continuity(&part(true), cfg, true)),
                Some(scan_continuity(&part(false), cfg, true)),
            ])
        }
        (IntervalContinuous, Case::Pair(h, i)) => scan_continuity(
            &|x: &ExtReal| {
                let t = x.finite()?;
                eval_opt(k, &union(h, &i.shift(t).ok()?))
            },
            cfg,
            false,
        ),
        (IntervalInfinite, Case::Pair(h, i)) => combine(vec![
            interval_infinite_side(k, h, i, 1, cfg),
            interval_infinite_side(k, h, i, -1, cfg),
        ]),
        (BoundedSmall, Case::Pair(h, kk)) => {
            let v = k.eval(h);
            let Some(x) = ordered(&v).filter(|x| x.is_infinite()) else { return Skip(format!("K(H) = {v}")) };
            if !kk.is_bounded() {
                return Skip("K unbounded".into());
            }
            let vk = k.eval(kk);
            if !vk.is_defined() {
                return Skip("K outside the domain".into());
            }
            let Some(vu) = eval_opt(k, &union(h, kk)) else { return Skip("union not representable".into()) };
            let vals = vec![show(&v), show(&vk), show(&vu)];
            if ordered(&vu) == Some(x) {
                Pass(vals)
            } else if vu.is_defined() {
                Fail(vals, format!("adding a bounded set moves {v} to {vu}"))
            } else {
                Skip("union outside the domain".into())
            }
        }
        (Finite, Case::Set(h)) => {
            let v = k.eval(h);
            match v {
                MeanValue::Undefined => Skip("outside the domain".into()),
                MeanValue::Finite(_) => Pass(vec![show(&v)]),
                _ => Fail(vec![show(&v)], "value is not finite".into()),
            }
        }
        (SubsetFinite | BoundedFinite, Case::Pair(h, kk)) => {
            let v = k.eval(h);
            if !v.is_finite() {
                return Skip(format!("K(H) = {v}"));
            }
            let (target, label) = if prop == SubsetFinite {
                (Ok(kk.clone()), "subset")
            } else {
                if !kk.is_bounded() || !k.eval(kk).is_defined() {
                    return Skip("K not a bounded set of the domain".into());
                }
                (union(h, kk), "union")
            };
            let Some(w) = eval_opt(k, &target) else { return Skip(format!("{label} not representable")) };
            let vals = vec![show(&v), show(&w)];
            match w {
                MeanValue::Finite(_) => Pass(vals),
                MeanValue::Undefined => Skip(format!("{label} outside the domain")),
                _ => Fail(vals, format!("{label} value is not finite")),
            }
        }
        (LimitFinite, Case::Set(h)) => limit_finite(k, h, cfg),
        (ShiftInvariant | Homogeneous, Case::Scalar(h, t)) => {
            let v = k.eval(h);
            let Some(x) = ordered(&v) else { return Skip(format!("K(H) = {v}")) };
            let (image, expect) = if prop == ShiftInvariant {
                (h.shift(t), x + to_f64(t))
            } else {
                (h.affine(t, &q(0)), if x == 0.0 { 0.0 } else { x * to_f64(t) })
            };
            let Ok(image) = image else { return Skip("image not representable".into()) };
            let w = k.eval(&image);
            let Some(y) = ordered(&w) else { return Skip(format!("image value {w}")) };
            let vals = vec![show(&v), show(&w), format!("expected {}", MeanValue::from_ext(expect))];
            if close(y, expect, tol) {
                Pass(vals)
            } else {
                Fail(vals, "image value differs from the transformed value".into())
            }
        }
        (Symmetric, Case::Set(h)) => {
            let b = h.bounds();
            let s = match (&b.inf, &b.sup) {
                (ExtReal::Finite(a), ExtReal::Finite(c)) => (a + c) / q(2),
                _ => q(0),
            };
            match h.affine(&q(-1), &(&s * q(2))) {
                Ok(r) if r == *h => {}
                _ => return Skip("not symmetric".into()),
            }
            let v = k.eval(h);
            let Some(x) = ordered(&v) else { return Skip(format!("K(H) = {v}")) };
            let vals = vec![show(&v), format!("centre {}", fmt_q(&s))];
            if close(x, to_f64(&s), tol) {
                Pass(vals)
            } else {
                Fail(vals, "value differs from the centre of symmetry".into())
            }
        }
        (FiniteIndependent, Case::Set(h)) => {
            if !is_infinite_set(h) {
                return Skip("finite set".into());
            }
            let v = k.eval(h);
            if !v.is_defined() {
                return Skip("outside the domain".into());
            }
            let extra: Vec<Q> = [qf(-7, 3), qf(13, 7), qf(101, 3)]
                .into_iter()
                .filter(|p| h.contains(p) == Some(false))
                .collect();
            let Some(w) = eval_opt(k, &union(h, &RealSet::points(extra))) else {
                return Skip("union not representable".into());
            };
            let vals = vec![show(&v), show(&w)];
            if v.close_to(&w, tol) {
                Pass(vals)
            } else {
                Fail(vals, "adding finitely many points changes the value".into())
            }
        }
        (UnionIdentity, Case::Pair(a, b)) => {
            let (Some(ma), Some(mb)) = (mass(k, a), mass(k, b)) else {
                return Skip("no measure".into());
            };
            if !(ma > 0.0 && mb > 0.0 && ma.is_finite() && mb.is_finite()) {
                return Skip("masses not in (0, inf)".into());
            }
            let (va, vb) = (k.eval(a), k.eval(b));
            let Some(vu) = eval_opt(k, &union(a, b)) else { return Skip("union not representable".into()) };
            let (Some(x), Some(y), Some(u)) = (va.finite(), vb.finite(), vu.finite()) else {
                return Skip("infinite parts".into());
            };
            let expect = (ma * x + mb * y) / (ma + mb);
            let vals = vec![show(&va), show(&vb), show(&vu), format!("expected {}", MeanValue::Finite(expect))];
            if close(u, expect, tol) {
                Pass(vals)
            } else {
                Fail(vals, "union mean differs from the mass-weighted combination".into())
            }
        }
        (TailMonotone, Case::Set(h)) => {
            let n = cfg.resolution.max(2);
            let mut last: Option<(f64, f64)> = None;
            let mut seen = 0;
            for i in 0..=n {
                let x = compact(-1.0 + 2.0 * i as f64 / n as f64);
                if x.is_infinite() {
                    continue;
                }
                let Some(v) = eval_opt(k, &clip(h, &ext_of(x), &ExtReal::PosInf)).and_then(|v| ordered(&v)) else {
                    continue;
                };
                if let Some((px, pv)) = last {
                    if !le(pv, v, tol) {
                        return Fail(
                            vec![format!("x={px}: {}", MeanValue::from_ext(pv)), format!("x={x}: {}", MeanValue::from_ext(v))],
                            "K(H^{x+}) decreases".into(),
                        );
                    }
                }
                last = Some((x, v));
                seen += 1;
            }
            if seen < 2 {
                Skip("fewer than two tails in the domain".into())
            } else {
                Pass(vec![format!("{seen} tails")])
            }
        }
        (Extension, Case::Set(h)) => {
            if !h.is_bounded() {
                return Skip("unbounded".into());
            }
            let v = k.eval(h);
            if !v.is_defined() {
                return Skip("outside the domain".into());
            }
            let e = extend_mean(k, h, &cfg.schedule);
            let vals = vec![show(&v), e.to_string()];
            if e.value.close_to(&v, tol) {
                Pass(vals)
            } else {
                Fail(vals, "extension differs from the mean on a bounded set".into())
            }
        }
        (MeasureAgreement, Case::Set(h)) => {
            let v = k.eval(h);
            if k.measure().is_none() || h.is_bounded() || !v.is_finite() {
                return Skip(format!("K(H) = {v}"));
            }
            let e = extend_mean(k, h, &cfg.schedule);
            if e.status == Status::Unresolved {
                return Skip("extension not resolved within the window schedule".into());
            }
            let vals = vec![show(&v), e.to_string()];
            if e.value.close_to(&v, 1e-8) {
                Pass(vals)
            } else {
                Fail(vals, "extension differs from the measure mean".into())
            }
        }
        (InfiniteMeasure, Case::Set(h)) => {
            if h.bounds().inf == ExtReal::NegInf || mass(k, h) != Some(f64::INFINITY) {
                return Skip("hypothesis not met".into());
            }
            let e = extend_mean(k, h, &cfg.schedule);
            if e.value == MeanValue::Undefined {
                return Skip("some window outside the domain".into());
            }
            let vals = vec![e.to_string()];
            if e.value == MeanValue::PlusInf {
                Pass(vals)
            } else {
                Fail(vals, "expected +inf".into())
            }
        }
        (TwoSided, Case::Set(h)) => two_sided(k, h, cfg),
        (UnionInfinite | UnionFinite, Case::Pair(a, b)) => {
            if a.bounds().inf < ExtReal::Finite(q(0)) || b.bounds().inf < ExtReal::Finite(q(0)) {
                return Skip("not positive".into());
            }
            let va = extend_mean(k, a, &cfg.schedule).value;
            let vb = extend_mean(k, b, &cfg.schedule).value;
            let want_inf = prop == UnionInfinite;
            let hyp = if want_inf {
                va == MeanValue::PlusInf && vb == MeanValue::PlusInf
            } else {
                va.is_finite() && vb.is_finite()
            };
            if !hyp {
                return Skip(format!("values {va}, {vb}"));
            }
            let Ok(u) = union(a, b) else { return Skip("union not representable".into()) };
            let vu = extend_mean(k, &u, &cfg.schedule).value;
            let vals = vec![show(&va), show(&vb), show(&vu)];
            let ok = if want_inf { vu == MeanValue::PlusInf } else { vu.is_finite() };
            if ok {
                Pass(vals)
            } else {
                Fail(vals, "union value has the wrong kind".into())
            }
        }
        _ => Skip("case shape does not fit the property".into()),
    }
}

fn strong_base(k: &dyn Mean, h1: &RealSet, h2: &RealSet, kk: &RealSet, tol: f64) -> Outcome {
    let vals: Option<Vec<MeanValue>> = [Ok(h1.clone()), Ok(h2.clone()), Ok(kk.clone()), union(h1, kk), union(h2, kk)]
        .iter()
        .map(|s| eval_opt(k, s))
        .collect();
    let Some(vals) = vals else { return Outcome::Skip("set not representable".into()) };
    let xs: Option<Vec<f64>> = vals.iter().map(|v| v.finite()).collect();
    let Some(xs) = xs else { return Outcome::Skip("non-finite value".into()) };
    let (v1, v2, vk, v1k, v2k) = (xs[0], xs[1], xs[2], xs[3], xs[4]);
    let shown: Vec<String> = vals.iter().map(show).collect();
    let eq = |a: f64, b: f64| close(a, b, tol);
    // weight of the first argument in K(A u K) = c K(A) + (1 - c) K(K)
    let weight = |va: f64, vak: f64, tie: f64| -> Option<f64> {
        if eq(va, vk) {
            eq(vak, va).then_some(tie)
        } else {
            Some((vak - vk) / (va - vk))
        }
    };
    let (Some(c), Some(c2)) = (weight(v1, v1k, 0.0), weight(v2, v2k, 1.0)) else {
        return Outcome::Unsure(shown, "weight not determined: K(A) = K(K) but K(A u K) differs".into());
    };
    let mut shown = shown;
    shown.push(format!("c={}", MeanValue::Finite(c)));
    shown.push(format!("c'={}", MeanValue::Finite(c2)));
    if c <= c2 + tol {
        Outcome::Pass(shown)
    } else {
        Outcome::Fail(shown, "c > c'".into())
    }
}

fn limit_finite(k: &dyn Mean, h: &RealSet, cfg: &CheckConfig) -> Outcome {
    let v = k.eval(h);
    if !v.is_finite() {
        return Outcome::Skip(format!("K(H) = {v}"));
    }
    let b = h.bounds();
    let side = |up: bool| -> Option<Outcome> {
        if (up && b.sup != ExtReal::PosInf) || (!up && b.inf != ExtReal::NegInf) {
            return None;
        }
        let mut ds = Vec::new();
        for x in shifts(cfg) {
            let x = if up { ext_q(&x) } else { ext_q(&-x) };
            let part = if up { clip(h, &x, &ExtReal::PosInf) } else { clip(h, &ExtReal::NegInf, &x) };
            let Some(w) = part.ok().filter(|p| !p.is_empty()).and_then(|p| Some((k.eval(&p).finite()?, p.bounds())))
            else {
                break;
            };
            let edge = if up { w.1.inf.to_f64() } else { w.1.sup.to_f64() };
            ds.push(w.0 - edge);
        }
        if ds.len() < 3 {
            return None;
        }
        let (last, prev) = (ds[ds.len() - 1], ds[ds.len() - 2]);
        let vals = vec![format!("gap {}", MeanValue::Finite(prev)), format!("gap {}", MeanValue::Finite(last))];
        if last.abs() <= cfg.jump_tol {
            Some(Outcome::Pass(vals))
        } else if (last - prev).abs() <= 1e-3 * 1f64.max(last.abs()) {
            Some(Outcome::Fail(
                vals,
                format!("K(H^{{x+}}) - inf H^{{x+}} tends to {}, not 0", MeanValue::Finite(last)),
            ))
        } else {
            Some(Outcome::Unsure(vals, "gap not settled".into()))
        }
    };
    combine(vec![side(true), side(false)])
}

fn two_sided(k: &dyn Mean, h: &RealSet, cfg: &CheckConfig) -> Outcome {
    let zero = ext_q(&q(0));
    let (Ok(neg), Ok(pos)) = (clip(h, &ExtReal::NegInf, &zero), clip(h, &zero, &ExtReal::PosInf)) else {
        return Outcome::Skip("halves not representable".into());
    };
    if neg.is_empty() || pos.is_empty() || h.is_bounded() {
        return Outcome::Skip("needs both halves and an unbounded set".into());
    }
    let a = extend_mean(k, &neg, &cfg.schedule).value;
    let b = extend_mean(k, &pos, &cfg.schedule).value;
    let (Some(x), Some(y)) = (a.finite(), b.finite()) else {
        return Outcome::Skip(format!("one-sided values {a}, {b}"));
    };
    let e = extend_mean(k, h, &cfg.schedule);
    let mut vals = vec![show(&a), show(&b), e.to_string()];
    let Some(v) = e.value.finite() else { return Outcome::Fail(vals, "two-sided value not finite".into()) };
    if let (Some(ma), Some(mb)) = (mass(k, &neg), mass(k, &pos)) {
        if ma.is_finite() && mb.is_finite() && ma + mb > 0.0 {
            let expect = (ma * x + mb * y) / (ma + mb);
            vals.push(format!("expected {}", MeanValue::Finite(expect)));
            if !close(v, expect, 1e-8) {
                return Outcome::Fail(vals, "two-sided value differs from the combination".into());
            }
        }
    }
    Outcome::Pass(vals)
}

/// Run a property over explicit cases, in parallel, merged by case index.
pub fn check(prop: Property, k: &dyn Mean, cases: &[Case], cfg: &CheckConfig) -> PropertyReport {
    let outs: Vec<Outcome> = cases.par_iter().map(|c| check_case(prop, k, c, cfg)).collect();
    report(prop.name(), &k.name(), cases, outs)
}

fn report(property: &str, mean: &str, cases: &[Case], outs: Vec<Outcome>) -> PropertyReport {
    let mut records = Vec::with_capacity(cases.len());
    let mut fail: Option<Witness> = None;
    let mut unsure: Option<Witness> = None;
    let (mut samples, mut skipped) = (0, 0);
    for (index, (case, out)) in cases.iter().zip(outs).enumerate() {
        let sets: Vec<String> = case.sets().iter().map(|s| s.to_dsl()).collect();
        let scalars = case.scalars();
        let (status, values, detail) = match out {
            Outcome::Pass(v) => (CaseStatus::Pass, v, String::new()),
            Outcome::Skip(d) => (CaseStatus::Skip, Vec::new(), d),
            Outcome::Fail(v, d) => (CaseStatus::Fail, v, d),
            Outcome::Unsure(v, d) => (CaseStatus::Unsure, v, d),
        };
        match status {
            CaseStatus::Pass => samples += 1,
            CaseStatus::Skip => skipped += 1,
            CaseStatus::Fail => samples += 1,
            CaseStatus::Unsure => {}
        }
        let witness = || Witness {
            case_index: index,
            sets: sets.clone(),
            scalars: scalars.clone(),
            values: values.clone(),
            detail: detail.clone(),
            case: case.clone(),
        };
        if status == CaseStatus::Fail && fail.is_none() {
            fail = Some(witness());
        }
        if status == CaseStatus::Unsure && unsure.is_none() {
            unsure = Some(witness());
        }
        records.push(CaseRecord { index, status, sets, scalars, values, detail });
    }
    let (verdict, witness) = if fail.is_some() {
        (Verdict3::Counterexample, fail)
    } else if unsure.is_some() {
        (Verdict3::Inconclusive, unsure)
    } else if samples == 0 {
        (Verdict3::Inconclusive, None)
    } else {
        (Verdict3::Holds, None)
    };
    PropertyReport { property: property.to_string(), mean: mean.to_string(), verdict, witness, samples, skipped, records }
}

impl PropertyReport {
    /// Re-run the witness case alone; `Some(true)` when it yields the same
    /// kind of outcome again.
    pub fn recheck(&self, k: &dyn Mean, cfg: &CheckConfig) -> Option<bool> {
        let w = self.witness.as_ref()?;
        let prop = Property::by_name(&self.property)?;
        let again = check(prop, k, std::slice::from_ref(&w.case), cfg);
        Some(again.verdict == self.verdict)
    }
}

/// `K1 <= K2` on the bounded sets is assumed; `K1^ <= K2^` is checked on the
/// unbounded ones.
pub fn check_dominance(k1: &dyn Mean, k2: &dyn Mean, sets: &[RealSet], cfg: &CheckConfig) -> PropertyReport {
    let cases: Vec<Case> = sets.iter().cloned().map(Case::Set).collect();
    let outs: Vec<Outcome> = sets
        .par_iter()
        .map(|h| {
            let (a, b) = if h.is_bounded() {
                (k1.eval(h), k2.eval(h))
            } else {
                (extend_mean(k1, h, &cfg.schedule).value, extend_mean(k2, h, &cfg.schedule).value)
            };
            let (Some(x), Some(y)) = (ordered(&a), ordered(&b)) else {
                return Outcome::Skip(format!("values {a}, {b}"));
            };
            let vals = vec![show(&a), show(&b)];
            match (le(x, y, cfg.tol), h.is_bounded()) {
                (true, _) => Outcome::Pass(vals),
                (false, true) => Outcome::Unsure(vals, "hypothesis K1 <= K2 fails on this bounded set".into()),
                (false, false) => Outcome::Fail(vals, "extension order reversed".into()),
            }
        })
        .collect();
    report("dominance", &format!("{} <= {}", k1.name(), k2.name()), &cases, outs)
}

// ---------------------------------------------------------------------------
// Case generators

fn catalog_sets() -> Vec<RealSet> {
    catalog().into_iter().map(|e| e.set).collect()
}

fn positive(k: &dyn Mean) -> bool {
    k.caps().positive_support
}

/// Default interval `I` (and bounded `H`) for the translation properties.
pub fn default_interval(k: &dyn Mean) -> RealSet {
    if positive(k) {
        RealSet::closed(q(1), q(2))
    } else {
        RealSet::closed(q(0), q(1))
    }
}

/// A run of disjoint closed intervals starting at `base`.
fn random_intervals(rng: &mut ChaCha8Rng, base: Q, count: usize) -> Vec<RealSet> {
    let mut at = base;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        at += qf(rng.gen_range(1..=12), 4);
        let len = qf(rng.gen_range(1..=12), 4);
        out.push(RealSet::closed(at.clone(), &at + &len));
        at += len;
    }
    out
}

fn union_all(parts: &[RealSet]) -> RealSet {
    parts.iter().fold(RealSet::empty(), |acc, p| acc.union(p).expect("disjoint intervals"))
}

/// Disjoint pairs with interleaved intervals.
pub fn random_disjoint_pairs(seed: u64, count: usize) -> Vec<(RealSet, RealSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=6);
        let base = qf(rng.gen_range(0..=8), 2);
        let parts = random_intervals(&mut rng, base, n);
        let tags: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if tags.iter().all(|&t| t) || tags.iter().all(|&t| !t) {
            continue;
        }
        let a: Vec<RealSet> = parts.iter().zip(&tags).filter(|(_, &t)| t).map(|(p, _)| p.clone()).collect();
        let b: Vec<RealSet> = parts.iter().zip(&tags).filter(|(_, &t)| !t).map(|(p, _)| p.clone()).collect();
        out.push((union_all(&a), union_all(&b)));
    }
    out
}

/// Triples `H1 ⊂ H2`, `K` disjoint from `H2`, all bounded and positive.
pub fn random_triples(seed: u64, count: usize) -> Vec<(RealSet, RealSet, RealSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(3..=7);
        let base = qf(rng.gen_range(2..=8), 2);
        let parts = random_intervals(&mut rng, base, n);
        let in_k: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        let h2: Vec<RealSet> = parts.iter().zip(&in_k).filter(|(_, &t)| !t).map(|(p, _)| p.clone()).collect();
        let kk: Vec<RealSet> = parts.iter().zip(&in_k).filter(|(_, &t)| t).map(|(p, _)| p.clone()).collect();
        if h2.is_empty() || kk.is_empty() {
            continue;
        }
        let mut h1: Vec<RealSet> = h2.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if h1.is_empty() {
            h1.push(h2[rng.gen_range(0..h2.len())].clone());
        }
        if rng.gen_bool(0.5) {
            // shrink one block of H1 to a sub-interval
            let i = rng.gen_range(0..h1.len());
            let iv = h1[i].intervals()[0].clone();
            let (a, b) = (iv.lo.finite().unwrap().clone(), iv.hi.finite().unwrap().clone());
            let cut = &a + (&b - &a) * qf(rng.gen_range(1..=3), 4);
            h1[i] = RealSet::closed(a, cut);
        }
        out.push((union_all(&h1), union_all(&h2), union_all(&kk)));
    }
    out
}

/// Ordered pairs `sup A <= inf B` from the catalog and from shifted copies.
fn ordered_pairs(sets: &[RealSet], strict: bool) -> Vec<(RealSet, RealSet)> {
    let mut out = Vec::new();
    for a in sets {
        for b in sets {
            let (sa, ib) = (a.bounds().sup, b.bounds().inf);
            if a != b && (sa < ib || (!strict && sa == ib)) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    for a in sets.iter().filter(|s| s.is_bounded()) {
        for b in sets {
            let (ExtReal::Finite(sa), ExtReal::Finite(ib)) = (a.bounds().sup, b.bounds().inf) else { continue };
            if let Ok(moved) = a.shift(&(ib - sa - qf(1, 2))) {
                out.push((moved, b.clone()));
            }
        }
    }
    out
}

/// Thin out to at most `max` cases, keeping the order.
fn cap<T>(v: Vec<T>, max: usize) -> Vec<T> {
    if v.len() <= max {
        return v;
    }
    let step = v.len() as f64 / max as f64;
    let keep: Vec<usize> = (0..max).map(|i| (i as f64 * step) as usize).collect();
    v.into_iter().enumerate().filter(|(i, _)| keep.binary_search(i).is_ok()).map(|(_, x)| x).collect()
}

const MAX_PAIRS: usize = 400;

/// Default cases for a property, drawn from the catalog and seeded generators.
pub fn default_cases(prop: Property, k: &dyn Mean, cfg: &CheckConfig) -> Vec<Case> {
    use Property::*;
    let sets = catalog_sets();
    let all = || sets.iter().cloned().map(Case::Set).collect::<Vec<_>>();
    let bounded: Vec<RealSet> = sets.iter().filter(|s| s.is_bounded()).cloned().collect();
    match prop {
        Internal(_) | Finite | LimitFinite | Symmetric | FiniteIndependent | TailMonotone | Extension
        | MeasureAgreement | InfiniteMeasure | TwoSided | ISliceContinuous => all(),
        Monotone => cap(ordered_pairs(&sets, false), MAX_PAIRS).into_iter().map(|(a, b)| Case::Pair(a, b)).collect(),
        BaseMonotone | DisjointMonotone | UnionIdentity => {
            let mut pairs = ordered_pairs(&sets, true);
            pairs.extend(random_disjoint_pairs(cfg.seed, 100));
            cap(pairs, MAX_PAIRS).into_iter().map(|(a, b)| Case::Pair(a, b)).collect()
        }
        StrongBaseMonotone => random_triples(cfg.seed, cfg.triples)
            .into_iter()
            .map(|(a, b, c)| Case::Triple(a, b, c))
            .collect(),
        SliceContinuous => {
            let mut out = Vec::new();
            for h in &sets {
                for y in [q(0), qf(1, 2), qf(5, 2)] {
                    out.push(Case::Scalar(h.clone(), y));
                }
            }
            out
        }
        PartSliceContinuous => {
            let firsts = [default_interval(k), RealSet::points(vec![q(3)])];
            let mut out = Vec::new();
            for h1 in &firsts {
                for h2 in &sets {
                    out.push(Case::Pair(h1.clone(), h2.clone()));
                }
            }
            out
        }
        IntervalContinuous | IntervalInfinite => {
            let i = default_interval(k);
            let mut hs = vec![default_interval(k)];
            hs.extend(bounded.iter().cloned());
            hs.into_iter().map(|h| Case::Pair(h, i.clone())).collect()
        }
        BoundedSmall | BoundedFinite => {
            let heads: Vec<RealSet> = sets
                .par_iter()
                .filter(|h| {
                    let v = k.eval(h);
                    if prop == BoundedSmall {
                        matches!(v, MeanValue::PlusInf | MeanValue::MinusInf)
                    } else {
                        v.is_finite()
                    }
                })
                .cloned()
                .collect();
            let mut out = Vec::new();
            for h in &heads {
                for b in &bounded {
                    out.push(Case::Pair(h.clone(), b.clone()));
                }
            }
            out
        }
        SubsetFinite => {
            let windows = [
                (ExtReal::NegInf, ExtReal::Finite(q(0))),
                (ExtReal::Finite(q(0)), ExtReal::PosInf),
                (ExtReal::Finite(q(0)), ExtReal::Finite(q(1))),
                (ExtReal::Finite(q(1)), ExtReal::Finite(q(3))),
                (ExtReal::Finite(qf(3, 2)), ExtReal::PosInf),
                (ExtReal::Finite(q(-2)), ExtReal::Finite(q(2))),
                (ExtReal::Finite(q(2)), ExtReal::Finite(q(12))),
                (ExtReal::Finite(q(5)), ExtReal::PosInf),
            ];
            let mut out = Vec::new();
            for h in &sets {
                for (x, y) in &windows {
                    if let Ok(sub) = h.clip(x, y) {
                        if !sub.is_empty() && sub != *h {
                            out.push(Case::Pair(h.clone(), sub));
                        }
                    }
                }
            }
            out
        }
        ShiftInvariant => scaled(&sets, &[q(-3), qf(1, 2), q(5)]),
        Homogeneous => scaled(&sets, &[q(2), qf(1, 3), q(-1)]),
        UnionInfinite | UnionFinite => union_pairs(prop == UnionInfinite),
    }
}

fn scaled(sets: &[RealSet], ts: &[Q]) -> Vec<Case> {
    let mut out = Vec::new();
    for h in sets {
        for t in ts {
            out.push(Case::Scalar(h.clone(), t.clone()));
        }
    }
    out
}

/// Disjoint positive block families, interleaved, with infinite (resp.
/// finite) extended Lebesgue means.
fn union_pairs(infinite: bool) -> Vec<Case> {
    use crate::seq::ExpPoly;
    use crate::sets::BlockFamily;
    let fam = |off: i64, c: ExpPoly| {
        let b = ExpPoly::index().scale(&q(2)).add(&ExpPoly::constant(q(off)));
        RealSet::family(BlockFamily::tail(b, c, 1, None).expect("family")).expect("set")
    };
    let widths: Vec<ExpPoly> = if infinite {
        vec![ExpPoly::constant(qf(1, 2)), ExpPoly::constant(qf(1, 4))]
    } else {
        vec![ExpPoly::term(q(1), 0, qf(1, 2)), ExpPoly::term(qf(1, 2), -2, q(1)), ExpPoly::term(qf(1, 2), -3, q(1))]
    };
    let mut out = Vec::new();
    for c in &widths {
        for d in &widths {
            out.push(Case::Pair(fam(0, c.clone()), fam(1, d.clone())));
        }
    }
    out
}

/// Run a property by name with default cases. `dominance:<mean>` compares
/// against a second mean.
pub fn run_property(k: &MeanRef, name: &str, cfg: &CheckConfig) -> Option<PropertyReport> {
    if let Some(other) = name.strip_prefix("dominance:") {
        let k2 = mean_by_name(other)?;
        return Some(check_dominance(k.as_ref(), k2.as_ref(), &catalog_sets(), cfg));
    }
    let prop = Property::by_name(name)?;
    let cases = default_cases(prop, k.as_ref(), cfg);
    Some(check(prop, k.as_ref(), &cases, cfg))
}

/// Convenience: the extension of a named mean.
pub fn extended_by_name(name: &str) -> Option<MeanRef> {
    Some(extended(mean_by_name(name)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{by_name, geometric_blocks};
    use crate::mean::{harmonic_mean, lebesgue_mean, simple_extension, Anchor, Midpoint};
    use std::sync::Arc;

    fn ray(a: i64) -> RealSet {
        RealSet::interval(ExtReal::Finite(q(a)), ExtReal::PosInf, true, false)
    }

    fn cl(a: i64, b: i64) -> RealSet {
        RealSet::closed(q(a), q(b))
    }

    #[test]
    fn strong_base_weights_for_lebesgue() {
        let k = lebesgue_mean();
        let case = Case::Triple(cl(0, 1), cl(0, 2), cl(3, 4));
        let r = check(Property::StrongBaseMonotone, k.as_ref(), &[case], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        let vals = &r.records[0].values;
        assert!(vals.contains(&"c=1/2".to_string()), "{vals:?}");
        assert!(vals.contains(&"c'=2/3".to_string()), "{vals:?}");
    }

    #[test]
    fn monotone_simple_pair() {
        let k = lebesgue_mean();
        let r = check(Property::Monotone, k.as_ref(), &[Case::Pair(cl(0, 1), cl(2, 3))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        assert_eq!(r.records[0].values, vec!["1/2", "3/2", "5/2"]);
    }

    #[test]
    fn base_monotone_of_simple_extension() {
        let k = simple_extension(Arc::new(Midpoint));
        let r = check(Property::BaseMonotone, k.as_ref(), &[Case::Pair(cl(0, 1), ray(2))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        assert_eq!(r.records[0].values, vec!["1/2", "+inf", "+inf"]);
    }

    #[test]
    fn anchor_slice_jumps() {
        let k: MeanRef = Arc::new(Anchor::default());
        let r = check(Property::SliceContinuous, k.as_ref(), &[Case::Scalar(ray(0), qf(1, 2))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Counterexample, "{}", r.to_text());
        assert_eq!(r.recheck(k.as_ref(), &CheckConfig::default()), Some(true));
    }

    #[test]
    fn islice_examples() {
        let cfg = CheckConfig::default();
        let two = cl(0, 1).union(&cl(2, 3)).unwrap();
        let r = check(Property::ISliceContinuous, lebesgue_mean().as_ref(), &[Case::Set(two)], &cfg);
        assert_eq!(r.verdict, Verdict3::Holds, "{}", r.to_text());
        let k = simple_extension(Arc::new(Midpoint));
        let r = check(Property::ISliceContinuous, k.as_ref(), &[Case::Set(ray(0))], &cfg);
        assert_eq!(r.verdict, Verdict3::Holds, "{}", r.to_text());
    }

    #[test]
    fn harmonic_not_interval_infinite() {
        let k = harmonic_mean();
        let r = run_property(&k, "interval-infinite", &CheckConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict3::Counterexample);
        let w = r.witness.as_ref().unwrap();
        assert_eq!(w.sets, vec!["[1,2]", "[1,2]"]);
        assert!(w.values[1].ends_with("1.33333333334"), "{:?}", w.values);
        assert_eq!(r.recheck(k.as_ref(), &CheckConfig::default()), Some(true));
    }

    #[test]
    fn lebesgue_interval_infinite() {
        let k = lebesgue_mean();
        let r = check(
            Property::IntervalInfinite,
            k.as_ref(),
            &[Case::Pair(cl(0, 1), cl(0, 1))],
            &CheckConfig::default(),
        );
        assert_eq!(r.verdict, Verdict3::Holds, "{}", r.to_text());
    }

    #[test]
    fn limit_finite_fails_on_geometric_blocks() {
        let k = lebesgue_mean();
        let r = check(Property::LimitFinite, k.as_ref(), &[Case::Set(geometric_blocks())], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Counterexample, "{}", r.to_json());
        assert!(r.witness.unwrap().detail.contains("tends to 1"));
    }

    #[test]
    fn harmonic_shift_counterexample() {
        let k = harmonic_mean();
        let r = check(Property::ShiftInvariant, k.as_ref(), &[Case::Scalar(cl(1, 2), q(1))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Counterexample);
        let r = check(Property::ShiftInvariant, lebesgue_mean().as_ref(), &[Case::Scalar(cl(0, 1), q(5))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        assert_eq!(r.records[0].values[1], "11/2");
    }

    #[test]
    fn symmetric_detects_centre() {
        let k = lebesgue_mean();
        let r = check(Property::Symmetric, k.as_ref(), &[Case::Set(cl(-1, 1))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        let mirrored = by_name("mirrored-blocks").unwrap();
        let r = check(Property::Symmetric, extended(k).as_ref(), &[Case::Set(mirrored)], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds, "{}", r.to_text());
    }

    #[test]
    fn internality_with_anchor() {
        let k: MeanRef = Arc::new(Anchor::default());
        let h = cl(0, 1).union(&RealSet::points(vec![q(3)])).unwrap();
        let r = check(Property::Internal(Level::Plain), k.as_ref(), &[Case::Set(h)], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Holds);
        assert_eq!(r.records[0].values[0], "3");
    }

    #[test]
    fn mixed_dimension_not_bounded_small() {
        let k = mean_by_name("avg").unwrap();
        let h = crate::catalog::cantor_copies();
        let r = check(Property::BoundedSmall, k.as_ref(), &[Case::Pair(h, cl(0, 1))], &CheckConfig::default());
        assert_eq!(r.verdict, Verdict3::Counterexample, "{}", r.to_text());
        assert_eq!(r.witness.unwrap().values, vec!["+inf", "1/2", "1/2"]);
    }

    #[test]
    fn reports_serialize() {
        let r = check(Property::Finite, lebesgue_mean().as_ref(), &[Case::Set(cl(0, 1))], &CheckConfig::default());
        assert!(r.to_json().contains("\"verdict\": \"holds-on-catalog\""));
        assert_eq!(r.to_json_lines().lines().count(), 1);
        assert!(r.to_text().contains("verdict: holds-on-catalog"));
    }

    #[test]
    fn property_names_resolve() {
        for n in PROPERTY_NAMES {
            assert_eq!(Property::by_name(n).unwrap().name(), *n);
        }
    }
}
