//! Greedy constructions of sets with prescribed measure and mean behaviour.
//!
//! Each builder places short intervals one at a time, choosing positions by
//! doubling to a bracket and then bisecting. The finite prefix is followed by
//! a closed-form block family so the result is a genuine infinite set. A
//! certificate is then computed from scratch by [`verify`], which rebuilds
//! every stage from the recorded blocks and evaluates it again.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ext::ExtReal;
use crate::extension::{extend_mean, Status, WindowSchedule};
use crate::mean::{mean_by_name, Mean, MeanRef, MeanValue};
use crate::measure::{measure_of, MeasureSpec};
use crate::num::{ceil_q, fmt_q, fmt_sig, pow_q, q, qf, to_f64, Q};
use crate::seq::ExpPoly;
use crate::sets::{BlockFamily, RealSet};

/// Doublings tried before a placement search gives up.
pub const DOUBLINGS: u32 = 64;
pub const BISECTIONS: u32 = 60;
/// Tolerance for prescribed-mean targets.
pub const TARGET_TOL: f64 = 1e-8;

pub const BUILDER_NAMES: &[&str] = &["thin-infinite", "oscillating", "thin-finite", "prescribed-mean"];

#[derive(Debug, Clone, Error)]
pub enum ConstructionError {
    #[error("construction-failed at stage {stage}: {reason}")]
    Failed { stage: u32, reason: String, trace: Vec<String> },
}

/// What a construction claims about its result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Goal {
    /// `lambda(H) < eps`, stage `n` mean `> n`, extended mean `+inf`.
    ThinInfinite { eps: String },
    /// `lambda(H) < eps`, stage means alternate beyond `1` and `-1`,
    /// extended mean divergent.
    Oscillating { eps: String },
    /// `lambda(H) <= eps`, every stage mean `< 1`, extended mean `<= 1`.
    ThinFinite { eps: String },
    /// Extended mean equal to `h`, both halves unbounded.
    PrescribedMean { h: String },
}

/// One greedy placement.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub n: u32,
    pub lo: String,
    pub hi: String,
    /// Mean of the prefix up to and including this block.
    pub value: MeanValue,
    /// Hull `[x_n, y_n]` of the prefix.
    pub window: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Exact Lebesgue measure of the result.
    pub lambda: String,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Construction {
    pub builder: &'static str,
    pub mean: String,
    pub goal: Goal,
    #[serde(skip)]
    pub set: RealSet,
    pub dsl: String,
    /// Greedy blocks, in placement order.
    #[serde(skip)]
    pub blocks: Vec<(Q, Q)>,
    /// Family continuing the prefix (DSL), if any.
    pub continuation: Vec<String>,
    pub stages: Vec<Stage>,
    pub certificate: Certificate,
}

impl Construction {
    pub fn to_text(&self) -> String {
        let mut s = format!("builder: {}\nmean: {}\nset: {}\n", self.builder, self.mean, self.dsl);
        for st in &self.stages {
            s.push_str(&format!(
                "stage {}: [{}, {}] value {} window [{}, {}]\n",
                st.n, st.lo, st.hi, st.value, fmt_sig(st.window.0, 12), fmt_sig(st.window.1, 12)
            ));
        }
        s.push_str(&format!("lambda: {}\n", self.certificate.lambda));
        for c in &self.certificate.checks {
            s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s
    }
}

fn fail(stage: u32, reason: impl Into<String>, trace: Vec<String>) -> ConstructionError {
    ConstructionError::Failed { stage, reason: reason.into(), trace }
}

/// Mean of a set, through the extension when the set is unbounded and the
/// mean does not settle it directly.
pub fn value(k: &dyn Mean, h: &RealSet) -> MeanValue {
    let v = k.eval(h);
    if h.is_bounded() || matches!(v, MeanValue::Finite(_) | MeanValue::PlusInf | MeanValue::MinusInf) {
        return v;
    }
    extend_mean(k, h, &WindowSchedule::default()).value
}

fn closed(a: &Q, b: &Q) -> RealSet {
    RealSet::closed(a.clone(), b.clone())
}

fn prefix_set(blocks: &[(Q, Q)]) -> RealSet {
    blocks
        .iter()
        .fold(RealSet::empty(), |acc, (a, b)| acc.union(&closed(a, b)).expect("disjoint blocks"))
}

fn hull(blocks: &[(Q, Q)]) -> (Q, Q) {
    let lo = blocks.iter().map(|b| b.0.clone()).min().expect("nonempty");
    let hi = blocks.iter().map(|b| b.1.clone()).max().expect("nonempty");
    (lo, hi)
}

/// Find a block of length `len` beyond the prefix, to the right when `up`,
/// on which `accept(K(prefix u block))` holds; the placement closest to the
/// prefix found by bisection is returned.
fn place(
    k: &dyn Mean,
    prefix: &RealSet,
    start: &Q,
    len: &Q,
    up: bool,
    accept: &dyn Fn(&MeanValue) -> bool,
    trace: &mut Vec<String>,
    stage: u32,
) -> Result<(Q, Q, MeanValue), ConstructionError> {
    let block_at = |x: &Q| if up { (x.clone(), x + len) } else { (x - len, x.clone()) };
    let try_at = |x: &Q| {
        let (a, b) = block_at(x);
        let v = value(k, &prefix.union(&closed(&a, &b)).expect("disjoint block"));
        (accept(&v), v)
    };
    let dir = if up { q(1) } else { q(-1) };
    let mut below = start.clone();
    let (ok0, v0) = try_at(start);
    if ok0 {
        let (a, b) = block_at(start);
        return Ok((a, b, v0));
    }
    let mut found = None;
    for j in 0..DOUBLINGS {
        let x = start + &dir * pow_q(&q(2), j as i32);
        let (ok, v) = try_at(&x);
        trace.push(format!("stage {stage}: x={} -> {v}", fmt_q(&x)));
        if ok {
            found = Some((x, v));
            break;
        }
        below = x;
    }
    let Some((mut above, mut best)) = found else {
        return Err(fail(stage, format!("no placement within {DOUBLINGS} doublings"), std::mem::take(trace)));
    };
    for _ in 0..BISECTIONS {
        let mid = (&below + &above) / q(2);
        let (ok, v) = try_at(&mid);
        if ok {
            above = mid;
            best = v;
        } else {
            below = mid;
        }
    }
    let (a, b) = block_at(&above);
    Ok((a, b, best))
}

/// Family `[R 2^m, R 2^m + l 2^-m]`, `m >= 1`: total length `l`, and each
/// block adds the same amount `l R` to the first moment.
fn geometric_tail(r: &Q, l: &Q) -> RealSet {
    let b = ExpPoly::term(r.clone(), 0, q(2));
    let c = ExpPoly::term(l.clone(), 0, qf(1, 2));
    RealSet::family(BlockFamily::tail(b, c, 1, None).expect("tail family")).expect("tail set")
}

fn next_integer_beyond(x: &Q) -> Q {
    Q::from_integer(ceil_q(x)) + Q::one()
}

fn stage_record(n: u32, blocks: &[(Q, Q)], value: MeanValue) -> Stage {
    let (lo, hi) = hull(blocks);
    let last = blocks.last().expect("block");
    Stage { n, lo: fmt_q(&last.0), hi: fmt_q(&last.1), value, window: (to_f64(&lo), to_f64(&hi)) }
}

fn finish(
    builder: &'static str,
    k: &MeanRef,
    goal: Goal,
    set: RealSet,
    blocks: Vec<(Q, Q)>,
    continuation: Vec<String>,
    stages: Vec<Stage>,
) -> Result<Construction, ConstructionError> {
    let mut c = Construction {
        builder,
        mean: k.name(),
        goal,
        dsl: set.to_dsl(),
        set,
        blocks,
        continuation,
        stages,
        certificate: Certificate { lambda: String::new(), checks: Vec::new() },
    };
    c.certificate = verify(&c);
    if !c.certificate.ok() {
        let failed: Vec<String> = c.certificate.checks.iter().filter(|x| !x.passed).map(|x| format!("{}: {}", x.name, x.detail)).collect();
        return Err(fail(c.stages.len() as u32, "certificate rejected", failed));
    }
    Ok(c)
}

/// `lambda(H) < eps` with `K^(H) = +inf`.
pub fn build_thin_infinite(k: &MeanRef, eps: &Q, n_max: u32) -> Result<Construction, ConstructionError> {
    let mut blocks: Vec<(Q, Q)> = Vec::new();
    let mut stages = Vec::new();
    let mut trace = Vec::new();
    for n in 1..=n_max {
        let len = eps / pow_q(&q(2), n as i32 + 1);
        let prefix = prefix_set(&blocks);
        let start = match blocks.last() {
            Some((_, hi)) => next_integer_beyond(hi).max(q(n as i64)),
            None => q(n as i64),
        };
        let target = n as f64;
        let accept = move |v: &MeanValue| v.as_ext().is_some_and(|x| x > target);
        let (a, b, v) = place(k.as_ref(), &prefix, &start, &len, true, &accept, &mut trace, n)?;
        blocks.push((a, b));
        stages.push(stage_record(n, &blocks, v));
    }
    let r = next_integer_beyond(&hull(&blocks).1);
    let tail = geometric_tail(&r, &(eps / pow_q(&q(2), n_max as i32 + 2)));
    let set = prefix_set(&blocks).union(&tail).expect("disjoint tail");
    finish("thin-infinite", k, Goal::ThinInfinite { eps: fmt_q(eps) }, set, blocks, vec![tail.to_dsl()], stages)
}

/// Alternating placements: even stages push the mean above `1`, odd stages
/// below `-1`.
pub fn build_oscillating(k: &MeanRef, eps: &Q, n_max: u32) -> Result<Construction, ConstructionError> {
    let mut blocks: Vec<(Q, Q)> = Vec::new();
    let mut stages = Vec::new();
    let mut trace = Vec::new();
    for n in 1..=n_max {
        let len = eps / pow_q(&q(2), n as i32 + 1);
        let prefix = prefix_set(&blocks);
        let up = n % 2 == 0;
        let start = match (blocks.is_empty(), up) {
            (true, _) => q(-1),
            (false, true) => next_integer_beyond(&hull(&blocks).1),
            (false, false) => -next_integer_beyond(&-hull(&blocks).0),
        };
        let accept = move |v: &MeanValue| v.as_ext().is_some_and(|x| if up { x > 1.0 } else { x < -1.0 });
        let (a, b, v) = place(k.as_ref(), &prefix, &start, &len, up, &accept, &mut trace, n)?;
        blocks.push((a, b));
        stages.push(stage_record(n, &blocks, v));
    }
    let (lo, hi) = hull(&blocks);
    let l = eps / pow_q(&q(2), n_max as i32 + 3);
    let right = geometric_tail(&next_integer_beyond(&hi), &l);
    let left = geometric_tail(&next_integer_beyond(&-lo), &l).affine(&q(-1), &q(0)).expect("reflection");
    let set = prefix_set(&blocks).union(&right).and_then(|s| s.union(&left)).expect("disjoint tails");
    finish(
        "oscillating",
        k,
        Goal::Oscillating { eps: fmt_q(eps) },
        set,
        blocks,
        vec![right.to_dsl(), left.to_dsl()],
        stages,
    )
}

/// Blocks `I_n ⊂ [n, n + eps 2^-(n+1)]` keeping every prefix mean below `1`.
fn thin_finite_parts(k: &dyn Mean, eps: &Q, n_max: u32) -> Result<(Vec<(Q, Q)>, Vec<Stage>, RealSet), ConstructionError> {
    let mut blocks = vec![(q(0), eps / q(2))];
    let mut stages = vec![stage_record(0, &blocks, value(k, &prefix_set(&blocks)))];
    for n in 1..=n_max {
        let nq = q(n as i64);
        let full = &nq + eps / pow_q(&q(2), n as i32 + 1);
        let prefix = prefix_set(&blocks);
        let f = |x: &Q| value(k, &prefix.union(&closed(&nq, x)).expect("disjoint block"));
        // aim halfway between the current mean and 1 so later stages keep room
        let cap = value(k, &prefix).finite().map_or(1.0, |m| 0.5 * (1.0 + m)).min(1.0);
        let below = |v: &MeanValue| v.as_ext().is_some_and(|x| x < cap);
        let mut v = f(&full);
        let mut end = full.clone();
        if !below(&v) {
            let (mut good, mut bad) = (nq.clone(), full.clone());
            for _ in 0..BISECTIONS {
                let mid = (&good + &bad) / q(2);
                if below(&f(&mid)) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            if good == nq {
                return Err(fail(n, "every block at this position pushes the mean to 1", Vec::new()));
            }
            end = good;
            v = f(&end);
        }
        blocks.push((nq, end));
        stages.push(stage_record(n, &blocks, v));
    }
    // tail blocks [n, n + theta eps 2^-(n+1)] for n > n_max, halving theta
    // until the whole set stays below 1
    let mut theta = Q::one();
    let prefix = prefix_set(&blocks);
    for _ in 0..32 {
        let c = ExpPoly::term(&theta * eps / q(2), 0, qf(1, 2));
        let fam = BlockFamily::tail(ExpPoly::index(), c, n_max as u64 + 1, None).expect("tail family");
        let tail = RealSet::family(fam).expect("tail set");
        let whole = prefix.union(&tail).expect("disjoint tail");
        if value(k, &whole).as_ext().is_some_and(|x| x <= 1.0) {
            return Ok((blocks, stages, tail));
        }
        theta /= q(2);
    }
    Err(fail(n_max + 1, "no tail keeps the mean below 1", Vec::new()))
}

/// Unbounded `H` with `lambda(H) <= eps` and finite mean.
pub fn build_thin_finite_unbounded(k: &MeanRef, eps: &Q, n_max: u32) -> Result<Construction, ConstructionError> {
    let (blocks, stages, tail) = thin_finite_parts(k.as_ref(), eps, n_max)?;
    let set = prefix_set(&blocks).union(&tail).expect("disjoint tail");
    finish("thin-finite", k, Goal::ThinFinite { eps: fmt_q(eps) }, set, blocks, vec![tail.to_dsl()], stages)
}

/// Stages of the one-sided thin tails used by the prescribed-mean builder.
const PRESCRIBED_STAGES: u32 = 6;

/// `H` with unbounded negative and positive parts and `K^(H) = h`.
pub fn build_with_prescribed_mean(k: &MeanRef, h: &Q) -> Result<Construction, ConstructionError> {
    let eps = q(1);
    let (blocks, mut stages, tail) = thin_finite_parts(k.as_ref(), &eps, PRESCRIBED_STAGES)?;
    let right = prefix_set(&blocks).union(&tail).expect("disjoint tail");
    // the mirror image shifted off zero keeps the two halves disjoint
    let left = right.affine(&q(-1), &q(-1)).map_err(|e| fail(0, e.to_string(), Vec::new()))?;
    let base = left.union(&right).expect("disjoint halves");
    let target = to_f64(h);
    let f = |x: &Q| -> Option<(RealSet, MeanValue)> {
        let piece = if x > h {
            RealSet::interval(ExtReal::Finite(h.clone()), ExtReal::Finite(x.clone()), true, false)
        } else {
            RealSet::interval(ExtReal::Finite(x.clone()), ExtReal::Finite(h.clone()), false, true)
        };
        let s = base.union(&piece).ok()?;
        let v = value(k.as_ref(), &s);
        Some((s, v))
    };
    let v0 = value(k.as_ref(), &base);
    let Some(a0) = v0.finite() else {
        return Err(fail(0, format!("two-sided base has mean {v0}"), Vec::new()));
    };
    let mut trace = vec![format!("base mean {v0}")];
    let (set, calib) = if (a0 - target).abs() <= TARGET_TOL * 1f64.max(target.abs()) * 0.01 {
        (base.clone(), None)
    } else {
        // grow [h, x) to the right when the base sits below h, (x, h] to the left otherwise
        let dir = if a0 < target { q(1) } else { q(-1) };
        let side = |v: &MeanValue| v.finite().map(|x| (x - target) * to_f64(&dir));
        let mut near = h.clone();
        let mut far = None;
        for j in 0..DOUBLINGS {
            let x = h + &dir * pow_q(&q(2), j as i32);
            let (_, v) = f(&x).ok_or_else(|| fail(1, "calibration set not representable", trace.clone()))?;
            trace.push(format!("x={} -> {v}", fmt_q(&x)));
            match side(&v) {
                Some(d) if d >= 0.0 => {
                    far = Some(x);
                    break;
                }
                Some(_) => near = x,
                None => return Err(fail(1, format!("calibration mean {v} not finite"), trace)),
            }
        }
        let Some(mut far) = far else { return Err(fail(1, "calibration never reaches the target", trace)) };
        for _ in 0..BISECTIONS {
            let mid = (&near + &far) / q(2);
            let (_, v) = f(&mid).ok_or_else(|| fail(1, "calibration set not representable", trace.clone()))?;
            let d = side(&v).ok_or_else(|| fail(1, format!("calibration mean {v} not finite"), trace.clone()))?;
            if d >= 0.0 {
                far = mid;
            } else {
                near = mid;
            }
        }
        let (lo_err, hi_err) = (f(&near).and_then(|p| side(&p.1)), f(&far).and_then(|p| side(&p.1)));
        let x = match (lo_err, hi_err) {
            (Some(a), Some(b)) if a.abs() < b.abs() => near,
            _ => far,
        };
        let (s, v) = f(&x).expect("representable");
        if side(&v).is_none_or(|d| d.abs() > TARGET_TOL * 1f64.max(target.abs())) {
            trace.push(format!("settled at x={} -> {v}", fmt_q(&x)));
            return Err(fail(1, "calibration is not monotone or not continuous", trace));
        }
        (s, Some(x))
    };
    let v = value(k.as_ref(), &set);
    stages.push(Stage {
        n: PRESCRIBED_STAGES + 1,
        lo: fmt_q(calib.as_ref().map_or(h, |x| x.min(h))),
        hi: fmt_q(calib.as_ref().map_or(h, |x| x.max(h))),
        value: v,
        window: (f64::NEG_INFINITY, f64::INFINITY),
    });
    let continuation = vec![tail.to_dsl()];
    finish("prescribed-mean", k, Goal::PrescribedMean { h: fmt_q(h) }, set, blocks, continuation, stages)
}

fn lebesgue_of(h: &RealSet) -> Result<Q, String> {
    match measure_of(&MeasureSpec::lebesgue(), h).map_err(|e| e.to_string())? {
        s => s.exact_value().cloned().ok_or_else(|| format!("measure {s:?} not exact")),
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

/// Independent re-evaluation of a construction's claims. The mean is
/// resolved again by name and every stage set is rebuilt from its blocks.
pub fn verify(c: &Construction) -> Certificate {
    let mut checks = Vec::new();
    let Some(k) = mean_by_name(&c.mean) else {
        return Certificate { lambda: "?".into(), checks: vec![check("mean", false, "unknown mean")] };
    };
    let lambda = lebesgue_of(&c.set);
    let lambda_text = lambda.as_ref().map(fmt_q).unwrap_or_else(|e| e.clone());
    let sched = WindowSchedule::default();
    let stage_values = || -> Vec<MeanValue> {
        (1..=c.blocks.len()).map(|i| value(k.as_ref(), &prefix_set(&c.blocks[..i]))).collect()
    };
    let disjoint = c.blocks.iter().enumerate().all(|(i, a)| {
        a.0 < a.1 && c.blocks.iter().skip(i + 1).all(|b| a.1 < b.0 || b.1 < a.0)
    });
    checks.push(check("blocks", disjoint, format!("{} disjoint non-degenerate blocks", c.blocks.len())));
    match &c.goal {
        Goal::ThinInfinite { eps } | Goal::Oscillating { eps } | Goal::ThinFinite { eps } => {
            let e: Q = crate::num::parse_q(eps).expect("eps");
            let strict = !matches!(c.goal, Goal::ThinFinite { .. });
            match &lambda {
                Ok(l) => {
                    let ok = if strict { l < &e } else { l <= &e };
                    checks.push(check("lambda", ok, format!("{} {} {}", fmt_q(l), if strict { "<" } else { "<=" }, eps)));
                }
                Err(msg) => checks.push(check("lambda", false, msg.clone())),
            }
            let vals = stage_values();
            let (name, ok) = match c.goal {
                Goal::ThinInfinite { .. } => (
                    "stage means",
                    vals.iter().enumerate().all(|(i, v)| v.as_ext().is_some_and(|x| x > (i + 1) as f64)),
                ),
                Goal::Oscillating { .. } => (
                    "stage means",
                    vals.iter().enumerate().all(|(i, v)| {
                        let n = i + 1;
                        v.as_ext().is_some_and(|x| if n % 2 == 0 { x > 1.0 } else { x < -1.0 })
                    }),
                ),
                _ => ("stage means", vals.iter().all(|v| v.as_ext().is_some_and(|x| x < 1.0))),
            };
            let shown: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
            checks.push(check(name, ok, shown.join(", ")));
            let ext = extend_mean(k.as_ref(), &c.set, &sched);
            let ok = match c.goal {
                Goal::ThinInfinite { .. } => ext.value == MeanValue::PlusInf,
                Goal::Oscillating { .. } => ext.value == MeanValue::Divergent && ext.status != Status::Undefined,
                _ => ext.value.as_ext().is_some_and(|x| x.is_finite() && x <= 1.0 + TARGET_TOL),
            };
            checks.push(check("extension", ok, ext.to_string()));
            let unbounded = c.set.bounds().sup == ExtReal::PosInf;
            checks.push(check("unbounded", unbounded, format!("sup = {}", c.set.bounds().sup)));
        }
        Goal::PrescribedMean { h } => {
            let target: Q = crate::num::parse_q(h).expect("target");
            let zero = ExtReal::Finite(Q::zero());
            let halves = c.set.clip(&ExtReal::NegInf, &zero).ok().zip(c.set.clip(&zero, &ExtReal::PosInf).ok());
            let both = halves.is_some_and(|(a, b)| a.bounds().inf == ExtReal::NegInf && b.bounds().sup == ExtReal::PosInf);
            checks.push(check("halves unbounded", both, "H^{0-} and H^{0+} unbounded"));
            let ext = extend_mean(k.as_ref(), &c.set, &sched);
            let t = to_f64(&target);
            let ok = ext.value.finite().is_some_and(|v| (v - t).abs() <= TARGET_TOL * 1f64.max(t.abs()));
            checks.push(check("extension", ok, format!("{ext} vs target {h}")));
            let direct = k.eval(&c.set);
            if direct.is_defined() {
                let ok = direct.finite().is_some_and(|v| (v - t).abs() <= TARGET_TOL * 1f64.max(t.abs()));
                checks.push(check("direct", ok, format!("{direct}")));
            }
            if let Ok(l) = &lambda {
                checks.push(check("lambda finite", l.is_positive(), fmt_q(l)));
            }
        }
    }
    Certificate { lambda: lambda_text, checks }
}

/// Dispatch by builder name.
pub fn build_by_name(name: &str, k: &MeanRef, eps: &Q, h: Option<&Q>, n_max: Option<u32>) -> Option<Result<Construction, ConstructionError>> {
    Some(match name {
        "thin-infinite" => build_thin_infinite(k, eps, n_max.unwrap_or(12)),
        "oscillating" => build_oscillating(k, eps, n_max.unwrap_or(8)),
        "thin-finite" => build_thin_finite_unbounded(k, eps, n_max.unwrap_or(20)),
        "prescribed-mean" => build_with_prescribed_mean(k, h.unwrap_or(&Q::zero())),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::{harmonic_mean, lebesgue_mean};

    #[test]
    fn thin_infinite_for_lebesgue() {
        let c = build_thin_infinite(&lebesgue_mean(), &q(1), 12).unwrap();
        assert!(c.certificate.ok(), "{}", c.to_text());
        assert_eq!(c.stages.len(), 12);
        let l = crate::num::parse_q(&c.certificate.lambda).unwrap();
        assert!(l < q(1));
        let small = build_thin_infinite(&lebesgue_mean(), &qf(1, 8), 6).unwrap();
        assert!(crate::num::parse_q(&small.certificate.lambda).unwrap() < qf(1, 8));
    }

    #[test]
    fn thin_infinite_fails_for_harmonic() {
        match build_thin_infinite(&harmonic_mean(), &q(1), 12) {
            Err(ConstructionError::Failed { trace, .. }) => assert!(!trace.is_empty()),
            Ok(c) => panic!("unexpected success: {}", c.to_text()),
        }
    }

    #[test]
    fn oscillating_for_lebesgue() {
        let c = build_oscillating(&lebesgue_mean(), &q(1), 8).unwrap();
        assert!(c.certificate.ok(), "{}", c.to_text());
        let signs: Vec<bool> = c.stages.iter().map(|s| s.value.finite().unwrap() > 1.0).collect();
        assert_eq!(signs, vec![false, true, false, true, false, true, false, true]);
    }

    #[test]
    fn prescribed_mean_five() {
        let c = build_with_prescribed_mean(&lebesgue_mean(), &q(5)).unwrap();
        assert!(c.certificate.ok(), "{}", c.to_text());
    }

    #[test]
    fn thin_finite_for_lebesgue() {
        let c = build_thin_finite_unbounded(&lebesgue_mean(), &q(1), 20).unwrap();
        assert!(c.certificate.ok(), "{}", c.to_text());
        assert_eq!(c.set.bounds().sup, ExtReal::PosInf);
    }
}
