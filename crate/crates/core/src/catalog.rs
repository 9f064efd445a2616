//! A fixed catalog of representative sets used by the property suites.

use crate::ext::ExtReal;
use crate::ifs::Ifs;
use crate::num::{q, qf, Q};
use crate::seq::{ExpPoly, Seq};
use crate::sets::{BlockFamily, RealSet, Shape};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub set: RealSet,
}

fn closed(a: i64, b: i64) -> RealSet {
    RealSet::closed(q(a), q(b))
}

fn ray_up(a: Q) -> RealSet {
    RealSet::interval(ExtReal::Finite(a), ExtReal::PosInf, true, false)
}

fn ray_down(a: Q) -> RealSet {
    RealSet::interval(ExtReal::NegInf, ExtReal::Finite(a), false, true)
}

fn tail(b: ExpPoly, c: ExpPoly, from: u64, to: Option<u64>) -> RealSet {
    RealSet::family(BlockFamily::tail(b, c, from, to).expect("catalog family")).expect("catalog set")
}

fn u(a: &RealSet, b: &RealSet) -> RealSet {
    a.union(b).expect("catalog union")
}

fn half_pow() -> ExpPoly {
    ExpPoly::term(q(1), 0, qf(1, 2))
}

/// Blocks `[n, n + 2^-n]`, `n >= 1`.
pub fn geometric_blocks() -> RealSet {
    tail(ExpPoly::index(), half_pow(), 1, None)
}

/// Blocks `[b_n, b_n + c_n]` for `n >= 1`.
pub fn blocks(b: ExpPoly, c: ExpPoly) -> RealSet {
    tail(b, c, 1, None)
}

pub fn naturals() -> RealSet {
    tail(ExpPoly::index(), ExpPoly::zero(), 1, None)
}

pub fn reciprocals() -> RealSet {
    tail(ExpPoly::term(q(1), -1, q(1)), ExpPoly::zero(), 1, None)
}

pub fn cantor() -> RealSet {
    RealSet::fractal(Ifs::preset("cantor3").expect("preset"), q(0), q(1))
}

/// Copies of the `1/8` Cantor set (dimension `1/3`) placed on `[n, n + n^-6]`,
/// `n >= 2`: finite `1/3`-dimensional mass with infinite mean.
pub fn cantor_copies() -> RealSet {
    let ifs = Ifs::preset("cantor8").expect("preset");
    let lo = Seq::Poly(ExpPoly::index());
    let hi = Seq::Poly(ExpPoly::index().add(&ExpPoly::term(q(1), -6, q(1))));
    let f = BlockFamily::new(lo, hi, Shape::Fractal(ifs), 2, None).expect("catalog family");
    RealSet::family(f).expect("catalog set")
}

pub fn catalog() -> Vec<CatalogEntry> {
    let cantor3 = cantor();
    let n2 = ExpPoly::index().powi(2);
    let pow2 = ExpPoly::term(q(1), 0, q(2));
    let neg = |h: &RealSet| h.affine(&q(-1), &q(0)).expect("reflection");
    let entries: Vec<(&'static str, RealSet)> = vec![
        ("unit", closed(0, 1)),
        ("two-units", u(&closed(0, 1), &closed(2, 3))),
        ("symmetric-unit", closed(-1, 1)),
        ("zero-two", closed(0, 2)),
        ("lopsided", u(&closed(0, 1), &closed(10, 13))),
        ("one-two", closed(1, 2)),
        ("half-open-unit", RealSet::interval(ExtReal::Finite(q(0)), ExtReal::Finite(q(1)), false, true)),
        ("interval-and-point", u(&closed(2, 5), &RealSet::points(vec![q(7)]))),
        ("three-points", RealSet::points(vec![q(1), q(2), q(5)])),
        ("unit-and-five", u(&closed(0, 1), &RealSet::points(vec![q(5)]))),
        ("geometric-blocks", geometric_blocks()),
        ("geometric-prefix", tail(ExpPoly::index(), half_pow(), 1, Some(10))),
        ("square-blocks", blocks(n2.clone(), half_pow())),
        ("doubling-heavy", blocks(pow2.clone(), half_pow())),
        (
            "doubling-light",
            blocks(pow2.clone(), ExpPoly::term(q(1), -2, qf(1, 2))),
        ),
        ("ray-one", ray_up(q(1))),
        ("ray-zero", ray_up(q(0))),
        ("ray-down", ray_down(q(0))),
        ("line", RealSet::interval(ExtReal::NegInf, ExtReal::PosInf, false, false)),
        ("naturals", naturals()),
        ("reciprocals", reciprocals()),
        ("naturals-reciprocals", u(&naturals(), &reciprocals())),
        ("powers-of-two", tail(pow2.clone(), ExpPoly::zero(), 0, None)),
        ("squares", tail(n2.clone(), ExpPoly::zero(), 1, None)),
        ("cantor", cantor3.clone()),
        ("two-cantors", u(&cantor3, &cantor3.shift(&q(2)).expect("shift"))),
        ("cantor4", RealSet::fractal(Ifs::preset("cantor4").expect("preset"), q(0), q(1))),
        ("skew", RealSet::fractal(Ifs::preset("skew").expect("preset"), q(0), q(1))),
        ("mirrored-blocks", u(&geometric_blocks(), &neg(&geometric_blocks()))),
        ("ray-two", ray_up(q(2))),
        ("reciprocals-and-block", u(&reciprocals(), &closed(2, 3))),
        ("negative-blocks", neg(&geometric_blocks())),
        ("symmetric-pair", u(&closed(-3, -1), &closed(1, 3))),
        (
            "shrinking-blocks",
            tail(half_pow(), ExpPoly::term(q(1), 0, qf(1, 4)), 1, None),
        ),
        ("inverted-blocks", geometric_blocks().reciprocal().expect("reciprocal")),
        ("cantor-copies", cantor_copies()),
        ("mixed-tail", u(&closed(1, 2), &tail(ExpPoly::index(), half_pow(), 3, None))),
    ];
    entries.into_iter().map(|(name, set)| CatalogEntry { name, set }).collect()
}

pub fn by_name(name: &str) -> Option<RealSet> {
    catalog().into_iter().find(|e| e.name == name).map(|e| e.set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_large_and_named_uniquely() {
        let c = catalog();
        assert!(c.len() >= 30);
        let mut names: Vec<_> = c.iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len());
        assert!(c.iter().all(|e| !e.set.is_empty()));
    }
}
