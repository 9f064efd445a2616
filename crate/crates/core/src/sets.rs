//! Canonical subsets of the real line.
//!
//! A [`RealSet`] is a disjoint union of intervals, isolated points, placed
//! self-similar pieces and block families `U_n B_n` whose blocks follow
//! closed-form endpoint sequences. Families are never expanded: clipping,
//! unions and affine images act on their index ranges and sequences.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{SetError, SetResult};
use crate::ext::ExtReal;
use crate::ifs::Ifs;
use crate::num::{fmt_q, to_f64, Q};
use crate::seq::{ExpPoly, Seq};

/// Number of leading blocks whose separation is checked exactly.
const CHECK_PREFIX: u64 = 256;
/// Largest number of blocks expanded when two components overlap.
const EXPAND_LIMIT: u64 = 10_000;
/// Number of leading blocks compared when two infinite families share a region.
const OVERLAP_SAMPLE: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// Normalising constructor: reversed endpoints are swapped, infinite ends
    /// are open, and empty intervals give `None`.
    pub fn new(lo: ExtReal, hi: ExtReal, lo_closed: bool, hi_closed: bool) -> Option<Interval> {
        let (lo, hi, lc, hc) = if lo > hi {
            (hi, lo, hi_closed, lo_closed)
        } else {
            (lo, hi, lo_closed, hi_closed)
        };
        let lc = lc && lo.is_finite();
        let hc = hc && hi.is_finite();
        if lo == hi && !(lc && hc) {
            return None;
        }
        Some(Interval {
            lo,
            hi,
            lo_closed: lc,
            hi_closed: hc,
        })
    }

    pub fn closed(a: Q, b: Q) -> Interval {
        Interval::new(a.into(), b.into(), true, true).unwrap()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Q) -> bool {
        let x = ExtReal::Finite(x.clone());
        let above = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        let below = if self.hi_closed {
            x <= self.hi
        } else {
            x < self.hi
        };
        above && below
    }

    /// Intersection with the closed window `[x, y]`.
    pub fn intersect(&self, x: &ExtReal, y: &ExtReal) -> Option<Interval> {
        let (lo, lc) = match x.cmp(&self.lo) {
            Ordering::Greater => (x.clone(), true),
            _ => (self.lo.clone(), self.lo_closed),
        };
        let (hi, hc) = match y.cmp(&self.hi) {
            Ordering::Less => (y.clone(), true),
            _ => (self.hi.clone(), self.hi_closed),
        };
        if lo > hi {
            return None;
        }
        Interval::new(lo, hi, lc, hc)
    }

    fn affine(&self, a: &Q, t: &Q) -> Interval {
        let map = |e: &ExtReal| e.scale(a).expect("nonzero scale").shift(t);
        Interval::new(map(&self.lo), map(&self.hi), self.lo_closed, self.hi_closed).unwrap()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |e: &ExtReal| match e {
            ExtReal::NegInf => "-inf".to_string(),
            ExtReal::PosInf => "inf".to_string(),
            ExtReal::Finite(v) => fmt_q(v),
        };
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            end(&self.lo),
            end(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Image of a normalised IFS attractor under `u -> lo + (hi - lo) u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FractalPiece {
    pub ifs: Ifs,
    pub lo: Q,
    pub hi: Q,
}

impl FractalPiece {
    pub fn new(ifs: Ifs, lo: Q, hi: Q) -> FractalPiece {
        assert!(lo < hi, "fractal piece needs a non-degenerate hull");
        FractalPiece { ifs, lo, hi }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    fn to_unit(&self, x: &Q) -> Q {
        (x - &self.lo) / self.width()
    }

    fn from_unit(&self, u: &Q) -> Q {
        &self.lo + self.width() * u
    }

    pub fn contains(&self, x: &Q) -> Option<bool> {
        if *x < self.lo || *x > self.hi {
            return Some(false);
        }
        self.ifs.contains(&self.to_unit(x))
    }

    /// Mean of the placed self-similar measure.
    pub fn mean(&self) -> f64 {
        match self.ifs.mean_exact() {
            Some(m) => to_f64(&self.from_unit(&m)),
            None => to_f64(&self.lo) + to_f64(&self.width()) * self.ifs.mean(),
        }
    }

    pub fn mean_exact(&self) -> Option<Q> {
        self.ifs.mean_exact().map(|m| self.from_unit(&m))
    }

    /// Intersection with `[x, y]`: sub-pieces and isolated points.
    pub fn clip(&self, x: &ExtReal, y: &ExtReal) -> SetResult<(Vec<FractalPiece>, Vec<Q>)> {
        let mut parts = vec![(Q::zero(), Q::one())];
        if let ExtReal::Finite(xv) = x {
            if *xv > self.lo {
                parts = self.cut(parts, &self.to_unit(xv), false)?;
            }
        } else if *x == ExtReal::PosInf {
            parts.clear();
        }
        if let ExtReal::Finite(yv) = y {
            if *yv < self.hi {
                parts = self.cut(parts, &self.to_unit(yv), true)?;
            }
        } else if *y == ExtReal::NegInf {
            parts.clear();
        }
        let mut pieces = Vec::new();
        let mut points = Vec::new();
        for (a, b) in parts {
            if a == b {
                points.push(self.from_unit(&a));
            } else {
                pieces.push(FractalPiece::new(
                    self.ifs.clone(),
                    self.from_unit(&a),
                    self.from_unit(&b),
                ));
            }
        }
        Ok((pieces, points))
    }

    fn cut(&self, parts: Vec<(Q, Q)>, u: &Q, keep_left: bool) -> SetResult<Vec<(Q, Q)>> {
        let mut out = Vec::new();
        for (a, b) in parts {
            let keep_whole = if keep_left { b <= *u } else { a >= *u };
            let drop_whole = if keep_left { a > *u } else { b < *u };
            if keep_whole {
                out.push((a, b));
            } else if drop_whole {
                continue;
            } else if a == b {
                out.push((a, b));
            } else if (keep_left && a == *u) || (!keep_left && b == *u) {
                out.push((u.clone(), u.clone()));
            } else {
                let w = &b - &a;
                let (l, r) = self.ifs.split(&((u - &a) / &w))?;
                let chosen = if keep_left { l } else { r };
                out.extend(chosen.into_iter().map(|(c, d)| (&a + &w * c, &a + &w * d)));
            }
        }
        Ok(out)
    }

    fn affine(&self, a: &Q, t: &Q) -> FractalPiece {
        if a.is_positive() {
            FractalPiece::new(self.ifs.clone(), a * &self.lo + t, a * &self.hi + t)
        } else {
            FractalPiece::new(self.ifs.reflect(), a * &self.hi + t, a * &self.lo + t)
        }
    }
}

/// Shape of the blocks of a family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Interval,
    Point,
    Fractal(Ifs),
}

impl Shape {
    pub fn dim(&self) -> f64 {
        match self {
            Shape::Interval => 1.0,
            Shape::Point => 0.0,
            Shape::Fractal(ifs) => ifs.dim(),
        }
    }
}

/// One block of a family, evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Interval(Q, Q),
    Point(Q),
    Fractal(FractalPiece),
}

/// The union of blocks `[lo_n, hi_n]`, `n` in `start..=end`, strictly
/// separated and monotonically ordered along the index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockFamily {
    lo: Seq,
    hi: Seq,
    shape: Shape,
    start: u64,
    end: Option<u64>,
    up: bool,
}

impl BlockFamily {
    pub fn new(
        lo: Seq,
        hi: Seq,
        shape: Shape,
        start: u64,
        end: Option<u64>,
    ) -> SetResult<BlockFamily> {
        let bad = |m: String| Err(SetError::MalformedFamily(m));
        if matches!(end, Some(e) if e < start) {
            return bad("empty index range".into());
        }
        if start == 0 && (lo.has_negative_pow() || hi.has_negative_pow()) {
            return bad("sequence undefined at n = 0".into());
        }
        if shape == Shape::Point && lo != hi {
            return bad("point blocks need equal endpoints".into());
        }
        let mut f = BlockFamily {
            lo,
            hi,
            shape,
            start,
            end,
            up: true,
        };
        if end != Some(start) {
            let a = f.lo.eval_ext(start);
            let b = f.lo.eval_ext(start + 1);
            f.up = b > a;
            if f.end.is_none() && f.lo.limit() != f.hi.limit() {
                return bad("blocks do not shrink onto the accumulation point".into());
            }
        }
        f.validate()?;
        Ok(f)
    }

    /// Blocks `[b_n, b_n + c_n]` (points when `c = 0`).
    pub fn tail(b: ExpPoly, c: ExpPoly, start: u64, end: Option<u64>) -> SetResult<BlockFamily> {
        if c.is_zero() {
            let s = Seq::Poly(b);
            return BlockFamily::new(s.clone(), s, Shape::Point, start, end);
        }
        let hi = b.add(&c);
        BlockFamily::new(Seq::Poly(b), Seq::Poly(hi), Shape::Interval, start, end)
    }

    fn validate(&self) -> SetResult<()> {
        let last_pair = match self.end {
            Some(e) => e.saturating_sub(1),
            None => u64::MAX - 1,
        };
        let upto = (self.start + CHECK_PREFIX).min(last_pair);
        for n in self.start..=upto.max(self.start) {
            self.check_block(n)?;
            if self.end != Some(n) && n <= last_pair {
                self.check_gap(n)?;
            }
        }
        if self.end == Some(self.start) {
            return Ok(());
        }
        for k in 9..62 {
            let n = self.start + (1u64 << k);
            if n > last_pair {
                break;
            }
            self.check_gap_f64(n)?;
        }
        Ok(())
    }

    fn check_block(&self, n: u64) -> SetResult<()> {
        if self.shape == Shape::Point {
            return Ok(());
        }
        let (a, b) = self.extent(n);
        if a >= b {
            return Err(SetError::MalformedFamily(format!(
                "block {n} is empty or reversed"
            )));
        }
        Ok(())
    }

    fn check_gap(&self, n: u64) -> SetResult<()> {
        let (a0, b0) = self.extent(n);
        let (a1, b1) = self.extent(n + 1);
        let ok = if self.up { b0 < a1 } else { b1 < a0 };
        if ok {
            Ok(())
        } else {
            Err(SetError::MalformedFamily(format!(
                "blocks {n} and {} are not strictly separated",
                n + 1
            )))
        }
    }

    fn check_gap_f64(&self, n: u64) -> SetResult<()> {
        let nf = n as f64;
        let (a0, b0) = (self.lo.eval_f64(nf), self.hi.eval_f64(nf));
        let (a1, b1) = (self.lo.eval_f64(nf + 1.0), self.hi.eval_f64(nf + 1.0));
        if ![a0, b0, a1, b1]
            .iter()
            .all(|v| v.is_finite() && (*v == 0.0 || v.abs() > 1e-280))
            || [a0, b0, a1, b1].iter().any(|v| *v == 0.0 && nf > 64.0)
        {
            return Ok(());
        }
        let scale = a0.abs().max(a1.abs()).max(1e-300);
        let gap = if self.up { a1 - b0 } else { a0 - b1 };
        if gap < -1e-9 * scale {
            return Err(SetError::MalformedFamily(format!(
                "blocks {n} and {} overlap",
                n + 1
            )));
        }
        Ok(())
    }

    pub fn lo(&self) -> &Seq {
        &self.lo
    }

    pub fn hi(&self) -> &Seq {
        &self.hi
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> Option<u64> {
        self.end
    }

    /// Whether blocks move right as the index grows.
    pub fn increasing(&self) -> bool {
        self.up
    }

    pub fn is_infinite(&self) -> bool {
        self.end.is_none()
    }

    pub fn count(&self) -> Option<u64> {
        self.end.map(|e| e - self.start + 1)
    }

    /// Accumulation target of an infinite family.
    pub fn limit(&self) -> Option<ExtReal> {
        if self.end.is_some() {
            None
        } else {
            Some(self.lo.limit())
        }
    }

    pub fn extent(&self, n: u64) -> (ExtReal, ExtReal) {
        let a = self.lo.eval_ext(n);
        let b = if self.shape == Shape::Point {
            a.clone()
        } else {
            self.hi.eval_ext(n)
        };
        (a, b)
    }

    pub fn block(&self, n: u64) -> Block {
        let a = self.lo.eval(n);
        match &self.shape {
            Shape::Point => Block::Point(a),
            Shape::Interval => Block::Interval(a, self.hi.eval(n)),
            Shape::Fractal(ifs) => {
                Block::Fractal(FractalPiece::new(ifs.clone(), a, self.hi.eval(n)))
            }
        }
    }

    /// Sub-family over `s..=e` (intersected with the current range).
    pub fn restrict(&self, s: u64, e: Option<u64>) -> Option<BlockFamily> {
        let s = s.max(self.start);
        let e = match (e, self.end) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        };
        if matches!(e, Some(e) if e < s) {
            return None;
        }
        Some(BlockFamily {
            start: s,
            end: e,
            ..self.clone()
        })
    }

    /// Convex hull of the family.
    pub fn hull(&self) -> (ExtReal, ExtReal) {
        let first = self.extent(self.start);
        let last = match self.end {
            Some(e) => self.extent(e),
            None => {
                let l = self.lo.limit();
                (l.clone(), l)
            }
        };
        if self.up {
            (first.0, last.1)
        } else {
            (last.0, first.1)
        }
    }

    /// Smallest index in range where the monotone predicate holds.
    fn first_true(&self, pred: impl Fn(u64) -> bool, eventually: bool) -> Option<u64> {
        let (mut lo, mut hi) = match self.end {
            Some(e) => {
                if !pred(e) {
                    return None;
                }
                if pred(self.start) {
                    return Some(self.start);
                }
                (self.start, e)
            }
            None => {
                if pred(self.start) {
                    return Some(self.start);
                }
                if !eventually {
                    return None;
                }
                let mut step = 1u64;
                let mut prev = self.start;
                loop {
                    let cand = self.start.checked_add(step)?;
                    if pred(cand) {
                        break (prev, cand);
                    }
                    prev = cand;
                    step = step.checked_mul(2)?;
                    if step > 1 << 62 {
                        return None;
                    }
                }
            }
        };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Index range of the blocks meeting the closed window `[a, b]`.
    pub fn range_touching(&self, a: &ExtReal, b: &ExtReal) -> Option<(u64, Option<u64>)> {
        let lim = self.lo.limit();
        let (first, after) = if self.up {
            let first = self.first_true(|n| self.extent(n).1 >= *a, lim > *a)?;
            let after = self.first_true(|n| self.extent(n).0 > *b, lim > *b);
            (first, after)
        } else {
            let first = self.first_true(|n| self.extent(n).0 <= *b, lim < *b)?;
            let after = self.first_true(|n| self.extent(n).1 < *a, lim < *a);
            (first, after)
        };
        let last = match after {
            Some(k) if k <= first => return None,
            Some(k) => Some(k - 1),
            None => self.end,
        };
        Some((first, last))
    }

    /// Index of the block containing `x`, if any.
    pub fn locate(&self, x: &Q) -> Option<u64> {
        let xe = ExtReal::Finite(x.clone());
        let (first, _) = self.range_touching(&xe, &xe)?;
        match self.block(first) {
            Block::Point(p) => (p == *x).then_some(first),
            Block::Interval(a, b) => (a <= *x && *x <= b).then_some(first),
            Block::Fractal(piece) => piece.contains(x).unwrap_or(false).then_some(first),
        }
    }

    fn affine(&self, a: &Q, t: &Q) -> BlockFamily {
        let lo = self.lo.affine(a, t);
        let hi = self.hi.affine(a, t);
        if a.is_positive() {
            BlockFamily {
                lo,
                hi,
                ..self.clone()
            }
        } else {
            let shape = match &self.shape {
                Shape::Fractal(ifs) => Shape::Fractal(ifs.reflect()),
                s => s.clone(),
            };
            BlockFamily {
                lo: hi,
                hi: lo,
                shape,
                up: !self.up,
                ..self.clone()
            }
        }
    }

    fn reciprocal(&self) -> SetResult<BlockFamily> {
        if let Shape::Fractal(_) = self.shape {
            return Err(SetError::Unsupported(
                "reciprocal of self-similar blocks".into(),
            ));
        }
        let f = BlockFamily {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
            up: !self.up,
            ..self.clone()
        };
        f.validate()?;
        Ok(f)
    }

    fn sort_key(&self) -> ExtReal {
        self.extent(self.start).0
    }

    fn same_rule(&self, o: &BlockFamily) -> bool {
        self.lo == o.lo && self.hi == o.hi && self.shape == o.shape
    }

    /// DSL form of the family.
    pub fn to_dsl(&self) -> String {
        let range = match self.end {
            Some(e) => format!("from={}, to={}", self.start, e),
            None => format!("from={}", self.start),
        };
        match (&self.shape, self.lo.as_poly(), self.hi.as_poly()) {
            (Shape::Point, Some(b), _) => format!("tail(b={b}, c=0, {range})"),
            (Shape::Interval, Some(b), Some(h)) => format!("tail(b={b}, c={}, {range})", h.sub(b)),
            (Shape::Point, None, _) => format!("blocks(lo={}, hi={}, {range})", self.lo, self.lo),
            (Shape::Interval, _, _) => format!("blocks(lo={}, hi={}, {range})", self.lo, self.hi),
            (Shape::Fractal(ifs), _, _) => {
                format!(
                    "copies(ifs={}, lo={}, hi={}, {range})",
                    ifs_dsl(ifs),
                    self.lo,
                    self.hi
                )
            }
        }
    }
}

fn ifs_dsl(ifs: &Ifs) -> String {
    match ifs.name() {
        Some(n) if !n.ends_with('~') => n.to_string(),
        _ => {
            let maps: Vec<String> = ifs
                .maps()
                .iter()
                .map(|m| format!("{}:{}", fmt_q(&m.r), fmt_q(&m.t)))
                .collect();
            format!("({})", maps.join(", "))
        }
    }
}

/// Extremes and accumulation data of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub inf: ExtReal,
    pub sup: ExtReal,
    /// `inf H'` and `sup H'` in the extended line; `None` when `H'` is empty.
    pub liminf: Option<ExtReal>,
    pub limsup: Option<ExtReal>,
    /// `inf (H' - {-inf})` and `sup (H' - {+inf})`.
    pub acc_finite_inf: Option<ExtReal>,
    pub acc_finite_sup: Option<ExtReal>,
}

/// Canonical subset of the real line.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RealSet {
    intervals: Vec<Interval>,
    points: Vec<Q>,
    families: Vec<BlockFamily>,
    fractals: Vec<FractalPiece>,
}

/// Loose component used when assembling a set.
#[derive(Clone, Debug)]
pub enum Component {
    Interval(Interval),
    Point(Q),
    Family(BlockFamily),
    Fractal(FractalPiece),
}

impl From<Block> for Component {
    fn from(b: Block) -> Component {
        match b {
            Block::Interval(a, b) => Component::Interval(Interval::closed(a, b)),
            Block::Point(p) => Component::Point(p),
            Block::Fractal(f) => Component::Fractal(f),
        }
    }
}

impl RealSet {
    pub fn empty() -> RealSet {
        RealSet::default()
    }

    pub fn normalize(parts: Vec<Component>) -> SetResult<RealSet> {
        let mut raw = RealSet::default();
        for c in parts {
            raw.push(c);
        }
        raw.canonicalize()
    }

    pub fn from_component(c: Component) -> SetResult<RealSet> {
        RealSet::normalize(vec![c])
    }

    pub fn interval(lo: ExtReal, hi: ExtReal, lo_closed: bool, hi_closed: bool) -> RealSet {
        match Interval::new(lo, hi, lo_closed, hi_closed) {
            Some(i) => RealSet::normalize(vec![Component::Interval(i)]).expect("single interval"),
            None => RealSet::empty(),
        }
    }

    pub fn closed(a: Q, b: Q) -> RealSet {
        RealSet::interval(a.into(), b.into(), true, true)
    }

    pub fn points(ps: Vec<Q>) -> RealSet {
        RealSet::normalize(ps.into_iter().map(Component::Point).collect()).expect("points")
    }

    pub fn family(f: BlockFamily) -> SetResult<RealSet> {
        RealSet::normalize(vec![Component::Family(f)])
    }

    pub fn fractal(ifs: Ifs, lo: Q, hi: Q) -> RealSet {
        RealSet::normalize(vec![Component::Fractal(FractalPiece::new(ifs, lo, hi))]).expect("piece")
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn point_list(&self) -> &[Q] {
        &self.points
    }

    pub fn families(&self) -> &[BlockFamily] {
        &self.families
    }

    pub fn fractals(&self) -> &[FractalPiece] {
        &self.fractals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
            && self.points.is_empty()
            && self.families.is_empty()
            && self.fractals.is_empty()
    }

    pub fn components(&self) -> Vec<Component> {
        let mut v: Vec<Component> = self
            .intervals
            .iter()
            .cloned()
            .map(Component::Interval)
            .collect();
        v.extend(self.points.iter().cloned().map(Component::Point));
        v.extend(self.families.iter().cloned().map(Component::Family));
        v.extend(self.fractals.iter().cloned().map(Component::Fractal));
        v
    }

    fn push(&mut self, c: Component) {
        match c {
            Component::Interval(i) => self.intervals.push(i),
            Component::Point(p) => self.points.push(p),
            Component::Family(f) => self.families.push(f),
            Component::Fractal(p) => self.fractals.push(p),
        }
    }

    pub fn union(&self, other: &RealSet) -> SetResult<RealSet> {
        let mut parts = self.components();
        parts.extend(other.components());
        RealSet::normalize(parts)
    }

    /// `H ∩ [x, y]`; reversed windows are read as `[y, x]`.
    pub fn clip(&self, x: &ExtReal, y: &ExtReal) -> SetResult<RealSet> {
        let (x, y) = if x > y { (y, x) } else { (x, y) };
        let mut out = RealSet::default();
        for i in &self.intervals {
            if let Some(c) = i.intersect(x, y) {
                out.intervals.push(c);
            }
        }
        for p in &self.points {
            let pe = ExtReal::Finite(p.clone());
            if *x <= pe && pe <= *y {
                out.points.push(p.clone());
            }
        }
        for piece in &self.fractals {
            let (ps, pts) = piece.clip(x, y)?;
            out.fractals.extend(ps);
            out.points.extend(pts);
        }
        for f in &self.families {
            let Some((first, last)) = f.range_touching(x, y) else {
                continue;
            };
            let inside = |n: u64| {
                let (a, b) = f.extent(n);
                *x <= a && b <= *y
            };
            let mut start = first;
            if !inside(first) {
                out.push_clipped_block(f.block(first), x, y)?;
                start += 1;
            }
            let end = match last {
                Some(l) if l < start => continue,
                Some(l) if !inside(l) => {
                    out.push_clipped_block(f.block(l), x, y)?;
                    match l.checked_sub(1) {
                        Some(e) if e >= start => Some(e),
                        _ => continue,
                    }
                }
                other => other,
            };
            if let Some(inner) = f.restrict(start, end) {
                out.families.push(inner);
            }
        }
        out.canonicalize()
    }

    fn push_clipped_block(&mut self, b: Block, x: &ExtReal, y: &ExtReal) -> SetResult<()> {
        match b {
            Block::Point(p) => {
                let pe = ExtReal::Finite(p.clone());
                if *x <= pe && pe <= *y {
                    self.points.push(p);
                }
            }
            Block::Interval(a, b) => {
                if let Some(i) = Interval::closed(a, b).intersect(x, y) {
                    self.intervals.push(i);
                }
            }
            Block::Fractal(piece) => {
                let (ps, pts) = piece.clip(x, y)?;
                self.fractals.extend(ps);
                self.points.extend(pts);
            }
        }
        Ok(())
    }

    /// `{a h + t : h in H}`.
    pub fn affine(&self, a: &Q, t: &Q) -> SetResult<RealSet> {
        if a.is_zero() {
            return Ok(if self.is_empty() {
                RealSet::empty()
            } else {
                RealSet::points(vec![t.clone()])
            });
        }
        let mut out = RealSet::default();
        out.intervals = self.intervals.iter().map(|i| i.affine(a, t)).collect();
        out.points = self.points.iter().map(|p| a * p + t).collect();
        out.fractals = self.fractals.iter().map(|p| p.affine(a, t)).collect();
        out.families = self.families.iter().map(|f| f.affine(a, t)).collect();
        out.canonicalize()
    }

    pub fn shift(&self, t: &Q) -> SetResult<RealSet> {
        self.affine(&Q::one(), t)
    }

    /// `{1/h : h in H}` for `H` inside `(0, +inf)`.
    pub fn reciprocal(&self) -> SetResult<RealSet> {
        if self.is_empty() {
            return Ok(RealSet::empty());
        }
        let b = self.bounds();
        if b.inf < ExtReal::Finite(Q::zero()) || self.contains(&Q::zero()) != Some(false) {
            return Err(SetError::Domain(format!(
                "reciprocal needs H inside (0, inf), inf H = {}",
                b.inf
            )));
        }
        if !self.fractals.is_empty() {
            return Err(SetError::Unsupported(
                "reciprocal of self-similar pieces".into(),
            ));
        }
        let inv = |e: &ExtReal| match e {
            ExtReal::Finite(v) if v.is_zero() => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(v.recip()),
            _ => ExtReal::Finite(Q::zero()),
        };
        let mut out = RealSet::default();
        for i in &self.intervals {
            out.intervals
                .push(Interval::new(inv(&i.hi), inv(&i.lo), i.hi_closed, i.lo_closed).unwrap());
        }
        out.points = self.points.iter().map(|p| p.recip()).collect();
        for f in &self.families {
            out.families.push(f.reciprocal()?);
        }
        out.canonicalize()
    }

    pub fn contains(&self, x: &Q) -> Option<bool> {
        if self.intervals.iter().any(|i| i.contains(x)) || self.points.contains(x) {
            return Some(true);
        }
        if self.families.iter().any(|f| f.locate(x).is_some()) {
            return Some(true);
        }
        let mut undecided = false;
        for p in &self.fractals {
            match p.contains(x) {
                Some(true) => return Some(true),
                None => undecided = true,
                _ => {}
            }
        }
        if undecided {
            None
        } else {
            Some(false)
        }
    }

    /// Hausdorff dimension of the representation (largest component).
    pub fn dim(&self) -> Option<f64> {
        let mut d: Option<f64> = None;
        let mut bump = |x: f64| d = Some(d.map_or(x, |y: f64| y.max(x)));
        for _ in &self.intervals {
            bump(1.0);
        }
        if !self.points.is_empty() {
            bump(0.0);
        }
        for p in &self.fractals {
            bump(p.ifs.dim());
        }
        for f in &self.families {
            bump(f.shape.dim());
        }
        d
    }

    pub fn bounds(&self) -> Bounds {
        let mut inf = ExtReal::PosInf;
        let mut sup = ExtReal::NegInf;
        let mut acc: Vec<(ExtReal, ExtReal)> = Vec::new();
        let mut see = |lo: &ExtReal, hi: &ExtReal| {
            if *lo < inf {
                inf = lo.clone();
            }
            if *hi > sup {
                sup = hi.clone();
            }
        };
        for i in &self.intervals {
            see(&i.lo, &i.hi);
            acc.push((i.lo.clone(), i.hi.clone()));
        }
        for p in &self.points {
            let e = ExtReal::Finite(p.clone());
            see(&e, &e);
        }
        for p in &self.fractals {
            let (a, b) = (ExtReal::Finite(p.lo.clone()), ExtReal::Finite(p.hi.clone()));
            see(&a, &b);
            acc.push((a, b));
        }
        for f in &self.families {
            let (a, b) = f.hull();
            see(&a, &b);
            if f.shape != Shape::Point {
                acc.push((a, b));
            } else if let Some(l) = f.limit() {
                acc.push((l.clone(), l));
            }
        }
        let liminf = acc.iter().map(|(a, _)| a.clone()).min();
        let limsup = acc.iter().map(|(_, b)| b.clone()).max();
        let finite: Vec<&(ExtReal, ExtReal)> = acc
            .iter()
            .filter(|(a, b)| !(a == b && !a.is_finite()))
            .collect();
        Bounds {
            inf,
            sup,
            liminf,
            limsup,
            acc_finite_inf: finite.iter().map(|(a, _)| a.clone()).min(),
            acc_finite_sup: finite.iter().map(|(_, b)| b.clone()).max(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        let b = self.bounds();
        self.is_empty() || (b.inf.is_finite() && b.sup.is_finite())
    }

    // ---- canonicalisation -------------------------------------------------

    fn canonicalize(mut self) -> SetResult<RealSet> {
        for _ in 0..64 {
            let before = self.clone();
            for _ in 0..64 {
                let inner = self.clone();
                self.prepare_families()?;
                self.merge_intervals();
                self.families_vs_intervals()?;
                self.merge_intervals();
                self.fractals_vs_intervals()?;
                self.families_vs_fractals()?;
                self.fractals_vs_fractals()?;
                self.families_vs_families()?;
                self.merge_intervals();
                self.clean_points();
                self.sort();
                if self == inner {
                    break;
                }
            }
            self.absorb_into_families();
            self.prepare_families()?;
            self.sort();
            if self == before {
                return Ok(self);
            }
        }
        Err(SetError::Unsupported(
            "canonical form did not settle".into(),
        ))
    }

    fn prepare_families(&mut self) -> SetResult<()> {
        let fams = std::mem::take(&mut self.families);
        let mut kept: Vec<BlockFamily> = Vec::new();
        for f in fams {
            if f.end == Some(f.start) {
                self.push(f.block(f.start).into());
                continue;
            }
            let mut merged = false;
            for g in kept.iter_mut() {
                if !g.same_rule(&f) {
                    continue;
                }
                let (lo, hi) = if g.start <= f.start {
                    (&*g, &f)
                } else {
                    (&f, &*g)
                };
                let touching = match lo.end {
                    None => true,
                    Some(e) => hi.start <= e + 1,
                };
                if touching {
                    let start = lo.start;
                    let end = match (lo.end, hi.end) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        _ => None,
                    };
                    g.start = start;
                    g.end = end;
                    merged = true;
                    break;
                }
            }
            if !merged {
                kept.push(f);
            }
        }
        self.families = kept;
        Ok(())
    }

    fn merge_intervals(&mut self) {
        let mut ivs: Vec<Interval> = Vec::new();
        for i in std::mem::take(&mut self.intervals) {
            if i.is_point() {
                self.points.push(i.lo.finite().unwrap().clone());
            } else {
                ivs.push(i);
            }
        }
        ivs.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::new();
        for i in ivs {
            if let Some(cur) = out.last_mut() {
                let joins = cur.hi > i.lo || (cur.hi == i.lo && (cur.hi_closed || i.lo_closed));
                if joins {
                    if cur.lo == i.lo {
                        cur.lo_closed |= i.lo_closed;
                    }
                    match i.hi.cmp(&cur.hi) {
                        Ordering::Greater => {
                            cur.hi = i.hi;
                            cur.hi_closed = i.hi_closed;
                        }
                        Ordering::Equal => cur.hi_closed |= i.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(i);
        }
        self.intervals = out;
    }

    /// Split families around the intervals they meet; blocks strictly inside
    /// an interval are dropped and the boundary blocks made explicit.
    fn families_vs_intervals(&mut self) -> SetResult<()> {
        let mut queue = std::mem::take(&mut self.families);
        let mut done = Vec::new();
        while let Some(f) = queue.pop() {
            let hit = self
                .intervals
                .iter()
                .find_map(|i| f.range_touching(&i.lo, &i.hi));
            let Some((first, last)) = hit else {
                done.push(f);
                continue;
            };
            self.push(f.block(first).into());
            if let Some(l) = last {
                if l != first {
                    self.push(f.block(l).into());
                }
            }
            if first > f.start {
                queue.extend(f.restrict(f.start, Some(first - 1)));
            }
            if let Some(l) = last {
                if f.end.is_none_or(|e| l < e) {
                    queue.extend(f.restrict(l + 1, f.end));
                }
            }
        }
        self.families = done;
        Ok(())
    }

    fn fractals_vs_intervals(&mut self) -> SetResult<()> {
        let mut queue = std::mem::take(&mut self.fractals);
        let mut done = Vec::new();
        while let Some(p) = queue.pop() {
            let (plo, phi) = (ExtReal::Finite(p.lo.clone()), ExtReal::Finite(p.hi.clone()));
            let hit = self
                .intervals
                .iter()
                .find(|i| i.lo < phi && i.hi > plo)
                .cloned();
            let Some(i) = hit else {
                done.push(p);
                continue;
            };
            if i.lo > plo {
                let (ps, pts) = p.clip(&ExtReal::NegInf, &i.lo)?;
                queue.extend(ps);
                self.points.extend(pts);
            }
            if i.hi < phi {
                let (ps, pts) = p.clip(&i.hi, &ExtReal::PosInf)?;
                queue.extend(ps);
                self.points.extend(pts);
            }
        }
        self.fractals = done;
        Ok(())
    }

    fn families_vs_fractals(&mut self) -> SetResult<()> {
        let mut queue = std::mem::take(&mut self.families);
        let mut done = Vec::new();
        while let Some(f) = queue.pop() {
            let hit = self.fractals.iter().find_map(|p| {
                f.range_touching(
                    &ExtReal::Finite(p.lo.clone()),
                    &ExtReal::Finite(p.hi.clone()),
                )
            });
            let Some((first, last)) = hit else {
                done.push(f);
                continue;
            };
            let Some(last) = last else {
                return Err(SetError::Unsupported(
                    "block family accumulates inside a self-similar piece".into(),
                ));
            };
            if last - first >= EXPAND_LIMIT {
                return Err(SetError::Unsupported(
                    "too many blocks inside a self-similar piece".into(),
                ));
            }
            for n in first..=last {
                self.push(f.block(n).into());
            }
            if first > f.start {
                queue.extend(f.restrict(f.start, Some(first - 1)));
            }
            if f.end.is_none_or(|e| last < e) {
                queue.extend(f.restrict(last + 1, f.end));
            }
        }
        self.families = done;
        Ok(())
    }

    fn fractals_vs_fractals(&mut self) -> SetResult<()> {
        self.fractals
            .sort_by(|a, b| a.lo.cmp(&b.lo).then(b.hi.cmp(&a.hi)));
        self.fractals.dedup();
        let mut out: Vec<FractalPiece> = Vec::new();
        for p in std::mem::take(&mut self.fractals) {
            let mut absorbed = false;
            for q in &out {
                if p.lo >= q.hi || p.hi <= q.lo {
                    continue;
                }
                let (inner, outer) = if q.lo <= p.lo && p.hi <= q.hi {
                    (&p, q)
                } else {
                    (q, &p)
                };
                let (sub, _) = outer.clip(
                    &ExtReal::Finite(inner.lo.clone()),
                    &ExtReal::Finite(inner.hi.clone()),
                )?;
                if sub.len() == 1 && sub[0] == *inner
                    && std::ptr::eq(inner, &p) {
                        absorbed = true;
                        break;
                    }
                return Err(SetError::Unsupported(
                    "overlapping self-similar pieces".into(),
                ));
            }
            if !absorbed {
                out.push(p);
            }
        }
        self.fractals = out;
        Ok(())
    }

    fn families_vs_families(&mut self) -> SetResult<()> {
        let mut i = 0;
        while i < self.families.len() {
            let mut j = i + 1;
            let mut restart = false;
            while j < self.families.len() {
                let (f, g) = (&self.families[i], &self.families[j]);
                let (fa, fb) = f.hull();
                let (ga, gb) = g.hull();
                let a = fa.max(ga);
                let b = fb.min(gb);
                if a > b {
                    j += 1;
                    continue;
                }
                let rf = f.range_touching(&a, &b);
                let rg = g.range_touching(&a, &b);
                let span = |r: &Option<(u64, Option<u64>)>| match r {
                    None => Some(0),
                    Some((s, Some(e))) => Some(e - s + 1),
                    Some((_, None)) => None,
                };
                let (sf, sg) = (span(&rf), span(&rg));
                let pick = match (sf, sg) {
                    (Some(0), _) | (_, Some(0)) => {
                        j += 1;
                        continue;
                    }
                    (Some(x), Some(y)) => Some(if x <= y { (i, rf) } else { (j, rg) }),
                    (Some(_), None) => Some((i, rf)),
                    (None, Some(_)) => Some((j, rg)),
                    (None, None) => None,
                };
                let disjoint = match (&rf, &rg) {
                    (Some((fs, _)), Some((gs, _))) => !sampled_overlap(f, *fs, g, *gs),
                    _ => false,
                };
                if disjoint {
                    j += 1;
                    continue;
                }
                match pick {
                    Some((k, Some((s, Some(e))))) => {
                        if e - s >= EXPAND_LIMIT {
                            return Err(SetError::Unsupported("overlapping block families".into()));
                        }
                        let fam = self.families.remove(k);
                        for n in s..=e {
                            self.push(fam.block(n).into());
                        }
                        if s > fam.start {
                            self.families.extend(fam.restrict(fam.start, Some(s - 1)));
                        }
                        if fam.end.is_none_or(|x| e < x) {
                            self.families.extend(fam.restrict(e + 1, fam.end));
                        }
                        restart = true;
                        break;
                    }
                    _ => {
                        let (fs, _) = rf.unwrap();
                        let (gs, _) = rg.unwrap();
                        if sampled_overlap(f, fs, g, gs) {
                            return Err(SetError::Unsupported("overlapping block families".into()));
                        }
                        j += 1;
                    }
                }
            }
            if restart {
                i = 0;
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    fn clean_points(&mut self) {
        self.points.sort();
        self.points.dedup();
        let pts = std::mem::take(&mut self.points);
        let mut kept = Vec::new();
        'next: for p in pts {
            let pe = ExtReal::Finite(p.clone());
            for i in self.intervals.iter_mut() {
                if i.contains(&p) {
                    continue 'next;
                }
                if i.lo == pe {
                    i.lo_closed = true;
                    continue 'next;
                }
                if i.hi == pe {
                    i.hi_closed = true;
                    continue 'next;
                }
            }
            if self.fractals.iter().any(|f| f.contains(&p) == Some(true)) {
                continue;
            }
            if self.families.iter().any(|f| f.locate(&p).is_some()) {
                continue;
            }
            kept.push(p);
        }
        self.points = kept;
    }

    /// Move explicit blocks equal to the block just before or after a
    /// family's range back into the family.
    fn absorb_into_families(&mut self) {
        for k in 0..self.families.len() {
            loop {
                let f = &self.families[k];
                let mut grew = false;
                let below_ok = f.start >= 1
                    && !(f.start == 1 && (f.lo.has_negative_pow() || f.hi.has_negative_pow()));
                if below_ok && f.extends_to(f.start - 1) && self.take_block(&f.block(f.start - 1)) {
                    self.families[k].start -= 1;
                    grew = true;
                }
                let f = &self.families[k];
                if let Some(e) = f.end {
                    if e < u64::MAX && f.extends_to(e + 1) && self.take_block(&f.block(e + 1)) {
                        self.families[k].end = Some(e + 1);
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
        }
    }

    fn take_block(&mut self, b: &Block) -> bool {
        match b {
            Block::Point(p) => {
                if let Some(pos) = self.points.iter().position(|x| x == p) {
                    self.points.remove(pos);
                    return true;
                }
            }
            Block::Interval(a, c) => {
                let iv = Interval::closed(a.clone(), c.clone());
                if let Some(pos) = self.intervals.iter().position(|x| *x == iv) {
                    self.intervals.remove(pos);
                    return true;
                }
            }
            Block::Fractal(piece) => {
                if let Some(pos) = self.fractals.iter().position(|x| x == piece) {
                    self.fractals.remove(pos);
                    return true;
                }
            }
        }
        false
    }

    fn sort(&mut self) {
        self.intervals
            .sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        self.points.sort();
        self.points.dedup();
        self.fractals
            .sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        self.families.sort_by(|a, b| {
            a.sort_key()
                .cmp(&b.sort_key())
                .then_with(|| a.to_dsl().cmp(&b.to_dsl()))
        });
    }

    /// DSL rendering; parsing it back yields an equal set.
    pub fn to_dsl(&self) -> String {
        let mut parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        if !self.points.is_empty() {
            let ps: Vec<String> = self.points.iter().map(fmt_q).collect();
            parts.push(format!("{{{}}}", ps.join(", ")));
        }
        for p in &self.fractals {
            parts.push(format!(
                "place(ifs({}), {}, {})",
                ifs_inner(&p.ifs),
                fmt_q(&p.lo),
                fmt_q(&p.hi)
            ));
        }
        for f in &self.families {
            parts.push(f.to_dsl());
        }
        if parts.is_empty() {
            "{}".to_string()
        } else {
            parts.join(" u ")
        }
    }
}

fn ifs_inner(ifs: &Ifs) -> String {
    let s = ifs_dsl(ifs);
    s.strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .map(str::to_string)
        .unwrap_or(s)
}

impl BlockFamily {
    /// Whether block `n` (just outside the range) keeps the ordering.
    fn extends_to(&self, n: u64) -> bool {
        let probe = BlockFamily {
            start: n.min(self.start),
            end: self.end.map(|e| e.max(n)),
            ..self.clone()
        };
        if probe.check_block(n).is_err() {
            return false;
        }
        let pair = if n < self.start { n } else { n - 1 };
        probe.check_gap(pair).is_ok()
    }
}

/// Merge-walk over the leading blocks of two families inside a shared
/// region, reporting any intersection or contact.
fn sampled_overlap(f: &BlockFamily, fs: u64, g: &BlockFamily, gs: u64) -> bool {
    let take = |h: &BlockFamily, s: u64| -> Vec<(ExtReal, ExtReal)> {
        let e = h
            .end
            .map_or(s + OVERLAP_SAMPLE, |e| e.min(s + OVERLAP_SAMPLE));
        (s..=e).map(|n| h.extent(n)).collect()
    };
    let a = take(f, fs);
    let b = take(g, gs);
    let mut all: Vec<(ExtReal, ExtReal, u8)> = a.into_iter().map(|(x, y)| (x, y, 0)).collect();
    all.extend(b.into_iter().map(|(x, y)| (x, y, 1)));
    all.sort();
    all.windows(2).any(|w| w[0].2 != w[1].2 && w[0].1 >= w[1].0)
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf};

    fn iv(a: i64, b: i64) -> RealSet {
        RealSet::closed(q(a), q(b))
    }

    fn ex2_24(start: u64) -> RealSet {
        let f = BlockFamily::tail(
            ExpPoly::index(),
            ExpPoly::term(q(1), 0, qf(1, 2)),
            start,
            None,
        )
        .unwrap();
        RealSet::family(f).unwrap()
    }

    fn naturals() -> BlockFamily {
        BlockFamily::tail(ExpPoly::index(), ExpPoly::zero(), 1, None).unwrap()
    }

    #[test]
    fn adjacent_intervals_merge() {
        assert_eq!(iv(0, 1).union(&iv(1, 2)).unwrap(), iv(0, 2));
        assert_eq!(
            iv(0, 1).union(&RealSet::points(vec![qf(1, 2)])).unwrap(),
            iv(0, 1)
        );
        let s = iv(2, 3).union(&iv(0, 1)).unwrap();
        assert_eq!(s.intervals()[0], Interval::closed(q(0), q(1)));
        assert_eq!(iv(0, 1).union(&RealSet::empty()).unwrap(), iv(0, 1));
    }

    #[test]
    fn open_end_closed_by_point() {
        let h = RealSet::interval(q(0).into(), q(1).into(), true, false);
        assert_eq!(h.union(&RealSet::points(vec![q(1)])).unwrap(), iv(0, 1));
    }

    #[test]
    fn clip_examples() {
        let h = iv(0, 1).union(&iv(2, 3)).unwrap();
        assert_eq!(
            h.clip(&ExtReal::NegInf, &qf(3, 2).into()).unwrap(),
            iv(0, 1)
        );
        let p = h.clip(&qf(1, 2).into(), &qf(1, 2).into()).unwrap();
        assert_eq!(p, RealSet::points(vec![qf(1, 2)]));
        let tail = ex2_24(1).clip(&q(5).into(), &ExtReal::PosInf).unwrap();
        assert_eq!(tail, ex2_24(5));
    }

    #[test]
    fn clip_pieces_reassemble() {
        let h = ex2_24(1);
        let x: ExtReal = qf(41, 4).into();
        let lo = h.clip(&ExtReal::NegInf, &x).unwrap();
        let hi = h.clip(&x, &ExtReal::PosInf).unwrap();
        assert_eq!(lo.union(&hi).unwrap(), h);
        let x: ExtReal = q(10).into();
        let lo = h.clip(&ExtReal::NegInf, &x).unwrap();
        let hi = h.clip(&x, &ExtReal::PosInf).unwrap();
        assert_eq!(lo.union(&hi).unwrap(), h);
    }

    #[test]
    fn affine_maps_and_inverts() {
        assert_eq!(iv(0, 1).affine(&q(1), &q(5)).unwrap(), iv(5, 6));
        assert_eq!(iv(1, 2).affine(&q(-1), &q(0)).unwrap(), iv(-2, -1));
        let h = ex2_24(1);
        let m = h.affine(&q(-2), &q(3)).unwrap();
        assert_eq!(m.affine(&qf(-1, 2), &qf(3, 2)).unwrap(), h);
        assert_eq!(m.bounds().inf, ExtReal::NegInf);
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(
            iv(1, 2).reciprocal().unwrap(),
            RealSet::closed(qf(1, 2), q(1))
        );
        let pow2 =
            BlockFamily::tail(ExpPoly::term(q(1), 0, q(2)), ExpPoly::zero(), 0, None).unwrap();
        let h = RealSet::family(pow2).unwrap();
        let r = h.reciprocal().unwrap();
        assert!(r.contains(&qf(1, 8)).unwrap());
        assert_eq!(r.bounds().liminf, Some(q(0).into()));
        assert_eq!(r.reciprocal().unwrap(), h);
        assert!(iv(0, 1).reciprocal().is_err());
        let ray = RealSet::interval(q(1).into(), ExtReal::PosInf, true, false);
        assert_eq!(
            ray.reciprocal().unwrap(),
            RealSet::interval(q(0).into(), q(1).into(), false, true)
        );
    }

    #[test]
    fn bounds_examples() {
        let h = iv(0, 1).union(&RealSet::points(vec![q(5)])).unwrap();
        let b = h.bounds();
        assert_eq!((b.inf, b.sup), (q(0).into(), q(5).into()));
        assert_eq!((b.liminf, b.limsup), (Some(q(0).into()), Some(q(1).into())));
        let n = RealSet::family(naturals()).unwrap();
        let h = n.union(&n.reciprocal().unwrap()).unwrap();
        let b = h.bounds();
        assert_eq!(b.inf, q(0).into());
        assert_eq!(b.sup, ExtReal::PosInf);
        assert_eq!(b.liminf, Some(q(0).into()));
        assert_eq!(b.limsup, Some(ExtReal::PosInf));
        assert_eq!(b.acc_finite_sup, Some(q(0).into()));
        assert!(RealSet::points(vec![q(1), q(2)]).bounds().liminf.is_none());
    }

    #[test]
    fn shared_point_of_two_families_is_kept_once() {
        let n = RealSet::family(naturals()).unwrap();
        let h = n.union(&n.reciprocal().unwrap()).unwrap();
        assert!(h.contains(&q(1)).unwrap());
        assert!(h.contains(&qf(1, 3)).unwrap());
        assert!(h.contains(&q(7)).unwrap());
        assert_eq!(h.families().len(), 2);
        assert_eq!(RealSet::normalize(h.components()).unwrap(), h);
    }

    #[test]
    fn malformed_families_are_rejected() {
        let e = BlockFamily::tail(ExpPoly::index(), ExpPoly::constant(q(2)), 1, None);
        assert!(matches!(e, Err(SetError::MalformedFamily(_))));
        let touching = BlockFamily::tail(ExpPoly::index(), ExpPoly::constant(q(1)), 1, None);
        assert!(touching.is_err());
    }

    #[test]
    fn family_meets_interval() {
        let h = ex2_24(1)
            .union(&RealSet::interval(qf(5, 2).into(), q(6).into(), true, true))
            .unwrap();
        assert_eq!(h.intervals().len(), 1);
        assert_eq!(h.families().len(), 2);
        assert!(h.contains(&q(3)).unwrap());
        assert!(!h.contains(&qf(13, 2)).unwrap());
        assert!(h.contains(&q(7)).unwrap());
        let all = ex2_24(1)
            .union(&RealSet::interval(
                q(0).into(),
                ExtReal::PosInf,
                true,
                false,
            ))
            .unwrap();
        assert_eq!(
            all,
            RealSet::interval(q(0).into(), ExtReal::PosInf, true, false)
        );
    }

    #[test]
    fn fractal_clip_and_union() {
        let c = Ifs::preset("cantor3").unwrap();
        let h = RealSet::fractal(c.clone(), q(0), q(1));
        let left = h.clip(&ExtReal::NegInf, &qf(1, 2).into()).unwrap();
        assert_eq!(left, RealSet::fractal(c.clone(), q(0), qf(1, 3)));
        assert!(h.clip(&ExtReal::NegInf, &qf(1, 4).into()).is_err());
        assert_eq!(h.union(&left).unwrap(), h);
        let two = h.union(&h.shift(&q(2)).unwrap()).unwrap();
        assert_eq!(two.fractals().len(), 2);
        let covered = h.union(&iv(0, 1)).unwrap();
        assert_eq!(covered, iv(0, 1));
    }

    #[test]
    fn singleton_family_becomes_explicit() {
        let f = BlockFamily::tail(ExpPoly::index(), ExpPoly::zero(), 3, Some(3)).unwrap();
        assert_eq!(RealSet::family(f).unwrap(), RealSet::points(vec![q(3)]));
    }

    #[test]
    fn dsl_rendering() {
        let h = iv(-1, 0).union(&ex2_24(1)).unwrap();
        assert_eq!(h.to_dsl(), "[-1,0] u tail(b=n, c=(1/2)^n, from=1)");
        let h = iv(0, 1).union(&ex2_24(1)).unwrap();
        assert_eq!(h.to_dsl(), "[0,3/2] u tail(b=n, c=(1/2)^n, from=2)");
        let r = RealSet::interval(q(1).into(), ExtReal::PosInf, true, false);
        assert_eq!(r.to_dsl(), "[1,inf)");
    }
}
