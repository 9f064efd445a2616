//! The window-limit extension `K^(H) = lim K(H ∩ [x, y])` of a bounded-set
//! mean, with a Cauchy-box verdict, and the Cesàro double-average check.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::ext::ExtReal;
use crate::mean::{mean_of_mass_moment, Caps, Mean, MeanRef, MeanValue};
use crate::measure::{combine, mass_and_moment, MassMoment, MeasureSpec};
use crate::num::{from_f64_exact, pow_q, q, to_f64, Q};
use crate::sets::RealSet;

/// Windows `[x_k, y_k] = [-2^k, 2^k]`, `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSchedule {
    pub k_max: u32,
    pub tol: f64,
    pub big: f64,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        WindowSchedule { k_max: 48, tol: 1e-8, big: 1e12 }
    }
}

impl WindowSchedule {
    pub fn x(&self, k: u32) -> Q {
        -pow_q(&q(2), k as i32)
    }

    pub fn y(&self, k: u32) -> Q {
        pow_q(&q(2), k as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    Unbounded,
    Oscillating,
    /// Neither a stable box nor a clear divergence within the schedule.
    Unresolved,
    Undefined,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Converged => "converged",
            Status::Unbounded => "unbounded",
            Status::Oscillating => "oscillating",
            Status::Unresolved => "unresolved",
            Status::Undefined => "undefined",
        };
        f.write_str(s)
    }
}

/// One diagonal window of the lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: u32,
    pub x: f64,
    pub y: f64,
    pub value: MeanValue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub value: MeanValue,
    pub status: Status,
    /// First index from which the box `[k0, k_max]^2` is within tolerance.
    pub k0: Option<u32>,
    /// Window outside the domain of the inner mean, when that ended the run.
    pub offending: Option<(f64, f64)>,
    pub trace: Vec<TraceRow>,
    pub schedule: WindowSchedule,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.status, self.k0) {
            (Status::Converged, Some(k0)) => write!(f, "{} (converged, k0={k0})", self.value),
            (Status::Undefined, _) => match self.offending {
                Some((x, y)) => write!(f, "undefined (window [{x}, {y}])"),
                None => write!(f, "undefined"),
            },
            (s, _) => write!(f, "{} ({s})", self.value),
        }
    }
}

/// Cell value in the lattice: `None` for windows missing the set.
type Cell = Option<MeanValue>;

/// Fewest lattice steps a stable box must span.
const MIN_BOX: usize = 8;
/// Diagonal steps inspected for unbounded growth.
const GROWTH_STEPS: usize = 8;
/// Diagonal increments decaying like `k^-p` with `p` at most this are read
/// as unbounded growth.
const GROWTH_EXPONENT: f64 = 1.2;

/// Effective lattice indices: windows beyond the hull clip to the same set.
fn effective(h: &RealSet, sched: &WindowSchedule) -> (Vec<u32>, Vec<u32>) {
    let b = h.bounds();
    let n = sched.k_max + 1;
    let eff_x = (0..n)
        .map(|i| (0..=i).find(|&j| ExtReal::Finite(sched.x(j)) <= b.inf).unwrap_or(i))
        .collect();
    let eff_y = (0..n)
        .map(|i| (0..=i).find(|&j| ExtReal::Finite(sched.y(j)) >= b.sup).unwrap_or(i))
        .collect();
    (eff_x, eff_y)
}

fn unique(v: &[u32]) -> Vec<u32> {
    let mut u = v.to_vec();
    u.sort();
    u.dedup();
    u
}

type Half = (bool, Result<MassMoment, ()>);

/// Cells of a density-measure mean from the two half-line clips, using
/// additivity of mass and moment across the split at 0.
fn additive_cells(
    mu: &MeasureSpec,
    h: &RealSet,
    sched: &WindowSchedule,
    xs: &[u32],
    ys: &[u32],
) -> Option<HashMap<(u32, u32), Cell>> {
    if !matches!(mu, MeasureSpec::Density { .. }) {
        return None;
    }
    let zero = ExtReal::Finite(q(0));
    let half = |lo: ExtReal, hi: ExtReal| -> Option<Half> {
        let part = h.clip(&lo, &hi).ok()?;
        let mm = if part.is_empty() {
            Ok(combine(Vec::new()))
        } else {
            mass_and_moment(mu, &part).map_err(|_| ())
        };
        Some((part.is_empty(), mm))
    };
    let left: HashMap<u32, Half> = xs
        .par_iter()
        .map(|&i| half(ExtReal::Finite(sched.x(i)), zero.clone()).map(|v| (i, v)))
        .collect::<Option<_>>()?;
    let right: HashMap<u32, Half> = ys
        .par_iter()
        .map(|&j| half(zero.clone(), ExtReal::Finite(sched.y(j))).map(|v| (j, v)))
        .collect::<Option<_>>()?;
    let pairs: Vec<(u32, u32)> = xs.iter().flat_map(|&i| ys.iter().map(move |&j| (i, j))).collect();
    Some(
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let ((le, lm), (re, rm)) = (&left[&i], &right[&j]);
                let cell = if *le && *re {
                    None
                } else {
                    Some(match (lm, rm) {
                        (Ok(a), Ok(b)) => mean_of_mass_moment(&combine(vec![a.clone(), b.clone()])),
                        _ => MeanValue::Undefined,
                    })
                };
                ((i, j), cell)
            })
            .collect(),
    )
}

fn lattice(k: &dyn Mean, h: &RealSet, sched: &WindowSchedule) -> Vec<Vec<Cell>> {
    let (eff_x, eff_y) = effective(h, sched);
    let (xs, ys) = (unique(&eff_x), unique(&eff_y));
    let additive = k.measure().and_then(|mu| additive_cells(&mu, h, sched, &xs, &ys));
    let values = additive.unwrap_or_else(|| {
        let keys: Vec<(u32, u32)> = xs.iter().flat_map(|&i| ys.iter().map(move |&j| (i, j))).collect();
        keys.par_iter()
            .map(|&(i, j)| {
                let w = h.clip(&ExtReal::Finite(sched.x(i)), &ExtReal::Finite(sched.y(j)));
                let cell = match w {
                    Ok(w) if w.is_empty() => None,
                    Ok(w) => Some(k.eval(&w)),
                    Err(_) => Some(MeanValue::Undefined),
                };
                ((i, j), cell)
            })
            .collect()
    });
    eff_x
        .iter()
        .map(|i| eff_y.iter().map(|j| values[&(*i, *j)]).collect())
        .collect()
}

fn spread(vals: &[f64]) -> f64 {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn box_values(grid: &[Vec<Cell>], k0: usize) -> Option<Vec<MeanValue>> {
    let n = grid.len();
    let mut out = Vec::new();
    for row in grid.iter().skip(k0) {
        for cell in row.iter().skip(k0) {
            out.push((*cell)?);
        }
    }
    debug_assert!(n > k0);
    Some(out)
}

/// Increasing growth without deceleration along the diagonal.
fn grows(diag: &[f64], sign: f64, big: f64) -> bool {
    let d: Vec<f64> = diag.iter().map(|v| v * sign).collect();
    let last = *d.last().unwrap();
    let monotone = d.windows(2).all(|w| w[1] >= w[0]);
    if !monotone {
        return false;
    }
    if last > big {
        return true;
    }
    if d.len() < GROWTH_STEPS + 2 {
        return false;
    }
    let tail = &d[d.len() - GROWTH_STEPS - 1..];
    let inc: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    if !inc.iter().all(|x| *x > 0.0) {
        return false;
    }
    let k0 = d.len() - GROWTH_STEPS;
    let pts: Vec<(f64, f64)> =
        inc.iter().enumerate().map(|(i, x)| (((k0 + i) as f64).ln(), x.ln())).collect();
    decay_exponent(&pts) <= GROWTH_EXPONENT
}

/// Minus the least-squares slope of `ln y` against `ln x`.
fn decay_exponent(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

pub fn extend_mean(k: &dyn Mean, h: &RealSet, sched: &WindowSchedule) -> Verdict {
    let grid = lattice(k, h, sched);
    let n = grid.len();
    let trace: Vec<TraceRow> = (0..n)
        .map(|i| TraceRow {
            k: i as u32,
            x: to_f64(&sched.x(i as u32)),
            y: to_f64(&sched.y(i as u32)),
            value: grid[i][i].unwrap_or(MeanValue::Undefined),
        })
        .collect();
    let verdict = |value, status, k0, offending| Verdict {
        value,
        status,
        k0,
        offending,
        trace: trace.clone(),
        schedule: sched.clone(),
    };
    if h.is_empty() {
        return verdict(MeanValue::Undefined, Status::Undefined, None, None);
    }
    // Smallest k from which every window is non-empty and defined.
    let mut start = None;
    for k0 in (0..n).rev() {
        match box_values(&grid, k0) {
            Some(v) if v.iter().all(|x| *x != MeanValue::Undefined) => start = Some(k0),
            _ => break,
        }
    }
    let Some(start) = start else {
        let bad = (0..n)
            .rev()
            .flat_map(|i| (0..n).rev().map(move |j| (i, j)))
            .find(|&(i, j)| grid[i][j] == Some(MeanValue::Undefined))
            .map(|(i, j)| (to_f64(&sched.x(i as u32)), to_f64(&sched.y(j as u32))));
        return verdict(MeanValue::Undefined, Status::Undefined, None, bad);
    };
    let last = grid[n - 1][n - 1].unwrap();
    for k0 in start..n.saturating_sub(MIN_BOX) {
        let vals = box_values(&grid, k0).unwrap();
        if vals.iter().all(|v| *v == MeanValue::PlusInf) {
            return verdict(MeanValue::PlusInf, Status::Unbounded, Some(k0 as u32), None);
        }
        if vals.iter().all(|v| *v == MeanValue::MinusInf) {
            return verdict(MeanValue::MinusInf, Status::Unbounded, Some(k0 as u32), None);
        }
        let fin: Option<Vec<f64>> = vals.iter().map(|v| v.finite()).collect();
        if let Some(fin) = fin {
            let scale = fin.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if spread(&fin) <= sched.tol * scale {
                return verdict(last, Status::Converged, Some(k0 as u32), None);
            }
        }
    }
    let diag: Option<Vec<f64>> = (start..n).map(|i| grid[i][i].unwrap().as_ext()).collect();
    if let Some(diag) = diag {
        let finite_diag: Vec<f64> = diag.iter().cloned().filter(|v| v.is_finite()).collect();
        for (sign, value) in [(1.0, MeanValue::PlusInf), (-1.0, MeanValue::MinusInf)] {
            let all_inf = diag.iter().rev().take(GROWTH_STEPS).all(|v| *v == sign * f64::INFINITY);
            if all_inf || (finite_diag.len() == diag.len() && grows(&diag, sign, sched.big)) {
                return verdict(value, Status::Unbounded, None, None);
            }
        }
    }
    let tail_box = box_values(&grid, n.saturating_sub(GROWTH_STEPS)).unwrap();
    let fin: Option<Vec<f64>> = tail_box.iter().map(|v| v.as_ext()).collect();
    let t0 = n.saturating_sub(GROWTH_STEPS);
    let tail_diag: Option<Vec<f64>> = (t0..n).map(|i| grid[i][i].unwrap().finite()).collect();
    let wide = match (fin, tail_diag) {
        (Some(f), Some(d)) if f.iter().all(|v| v.is_finite()) => {
            let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let drifting = d.windows(2).all(|w| w[1] >= w[0]) || d.windows(2).all(|w| w[1] <= w[0]);
            let drift = (d[d.len() - 1] - d[0]).abs();
            let slack = 10.0 * sched.tol * scale;
            spread(&f) > slack && !(drifting && spread(&f) <= 1.01 * drift + slack)
        }
        _ => true,
    };
    if wide {
        verdict(MeanValue::Divergent, Status::Oscillating, None, None)
    } else {
        verdict(MeanValue::Divergent, Status::Unresolved, None, None)
    }
}

/// The extension `K^` packaged as a mean.
#[derive(Clone)]
pub struct Extended {
    pub inner: MeanRef,
    pub sched: WindowSchedule,
}

impl Mean for Extended {
    fn name(&self) -> String {
        format!("ext:{}", self.inner.name())
    }

    fn eval(&self, h: &RealSet) -> MeanValue {
        if h.is_bounded() && !h.is_empty() {
            let v = self.inner.eval(h);
            if v.is_defined() {
                return v;
            }
        }
        extend_mean(self.inner.as_ref(), h, &self.sched).value
    }

    fn caps(&self) -> Caps {
        Caps { unbounded: true, ..self.inner.caps() }
    }
}

pub fn extended(inner: MeanRef) -> MeanRef {
    Arc::new(Extended { inner, sched: WindowSchedule::default() })
}

pub fn extended_with(inner: MeanRef, sched: WindowSchedule) -> MeanRef {
    Arc::new(Extended { inner, sched })
}

/// Quadrature region for the Cesàro average.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CesaroRegion {
    /// `x in [-p, 0]`, `y in [0, p]`.
    Quadrant,
    /// `x, y in [-p, p]` with `[x, y] = [y, x]`.
    Square,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroRow {
    pub p: f64,
    pub value: Option<f64>,
    /// Grid cells whose window misses the set or leaves the domain.
    pub skipped: usize,
    /// Cells with an infinite or divergent window mean.
    pub untreatable: usize,
}

/// Midpoint-rule average of `K(H ∩ [x, y])` over the region, per `p`.
pub fn cesaro_average(k: &dyn Mean, h: &RealSet, ps: &[f64], grid: usize, region: CesaroRegion) -> Vec<CesaroRow> {
    let b = h.bounds();
    ps.iter()
        .map(|&p| {
            let (x0, x1, y0, y1) = match region {
                CesaroRegion::Quadrant => (-p, 0.0, 0.0, p),
                CesaroRegion::Square => (-p, p, -p, p),
            };
            let xs: Vec<f64> = (0..grid).map(|a| x0 + (a as f64 + 0.5) * (x1 - x0) / grid as f64).collect();
            let ys: Vec<f64> = (0..grid).map(|a| y0 + (a as f64 + 0.5) * (y1 - y0) / grid as f64).collect();
            let clamp = |v: f64, lo: bool| -> ExtReal {
                let e = ExtReal::Finite(from_f64_exact(v).unwrap());
                if lo && e <= b.inf {
                    ExtReal::NegInf
                } else if !lo && e >= b.sup {
                    ExtReal::PosInf
                } else {
                    e
                }
            };
            let mut keys: Vec<(ExtReal, ExtReal)> = Vec::new();
            let mut cells: Vec<(usize, usize)> = Vec::new();
            for xa in &xs {
                for ya in &ys {
                    let (lo, hi) = if xa <= ya { (*xa, *ya) } else { (*ya, *xa) };
                    keys.push((clamp(lo, true), clamp(hi, false)));
                }
            }
            let mut uniq = keys.clone();
            uniq.sort();
            uniq.dedup();
            let vals: HashMap<(ExtReal, ExtReal), MeanValue> = uniq
                .par_iter()
                .map(|(lo, hi)| {
                    let v = match h.clip(lo, hi) {
                        Ok(w) if !w.is_empty() => k.eval(&w),
                        _ => MeanValue::Undefined,
                    };
                    ((lo.clone(), hi.clone()), v)
                })
                .collect();
            cells.clear();
            let (mut sum, mut used, mut skipped, mut untreatable) = (0.0, 0usize, 0usize, 0usize);
            for key in &keys {
                match vals[key] {
                    MeanValue::Finite(v) => {
                        sum += v;
                        used += 1;
                    }
                    MeanValue::Undefined => skipped += 1,
                    _ => untreatable += 1,
                }
            }
            CesaroRow {
                p,
                value: (used > 0 && untreatable == 0).then(|| sum / used as f64),
                skipped,
                untreatable,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::{lebesgue_mean, Mlis};
    use crate::num::qf;
    use crate::seq::ExpPoly;
    use crate::sets::BlockFamily;

    fn ex224() -> RealSet {
        let f = BlockFamily::tail(ExpPoly::index(), ExpPoly::term(q(1), 0, qf(1, 2)), 1, None).unwrap();
        RealSet::family(f).unwrap()
    }

    #[test]
    fn geometric_blocks_converge() {
        let v = extend_mean(lebesgue_mean().as_ref(), &ex224(), &WindowSchedule::default());
        assert_eq!(v.status, Status::Converged);
        assert!((v.value.finite().unwrap() - 13.0 / 6.0).abs() < 1e-8);
        assert_eq!(v.trace.len(), 49);
    }

    #[test]
    fn half_line_is_unbounded() {
        let h = RealSet::interval(ExtReal::Finite(q(0)), ExtReal::PosInf, true, false);
        let v = extend_mean(lebesgue_mean().as_ref(), &h, &WindowSchedule::default());
        assert_eq!(v.value, MeanValue::PlusInf);
        assert_eq!(v.status, Status::Unbounded);
    }

    #[test]
    fn whole_line_oscillates() {
        let h = RealSet::interval(ExtReal::NegInf, ExtReal::PosInf, false, false);
        let v = extend_mean(lebesgue_mean().as_ref(), &h, &WindowSchedule::default());
        assert_eq!(v.status, Status::Oscillating);
        assert_eq!(v.value, MeanValue::Divergent);
    }

    #[test]
    fn bounded_sets_keep_their_mean() {
        let h = RealSet::closed(q(3), q(7));
        let v = extend_mean(lebesgue_mean().as_ref(), &h, &WindowSchedule::default());
        assert_eq!(v.value, MeanValue::Finite(5.0));
    }

    #[test]
    fn mlis_on_naturals_and_reciprocals() {
        let nat = BlockFamily::tail(ExpPoly::index(), ExpPoly::zero(), 1, None).unwrap();
        let rec = BlockFamily::tail(ExpPoly::term(q(1), -1, q(1)), ExpPoly::zero(), 1, None).unwrap();
        let h = RealSet::family(nat).unwrap().union(&RealSet::family(rec).unwrap()).unwrap();
        let v = extend_mean(&Mlis, &h, &WindowSchedule::default());
        assert_eq!(v.value, MeanValue::Finite(0.0));
    }

    #[test]
    fn cesaro_on_symmetric_interval() {
        let h = RealSet::closed(q(-1), q(1));
        let rows = cesaro_average(lebesgue_mean().as_ref(), &h, &[8.0, 64.0], 64, CesaroRegion::Quadrant);
        assert!(rows[1].value.unwrap().abs() < 0.05);
    }
}
