//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//! Exits non-zero if any criterion other than the known-unattainable one
//! fails, or if that one unexpectedly passes.

use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unbounded_means::catalog::by_name;
use unbounded_means::constructions::{
    build_oscillating, build_thin_finite_unbounded, build_thin_infinite, build_with_prescribed_mean, verify,
    Construction,
};
use unbounded_means::extension::{cesaro_average, extend_mean, CesaroRegion, WindowSchedule};
use unbounded_means::ifs::Ifs;
use unbounded_means::mean::{mean_by_name, MeanRef, MeanValue};
use unbounded_means::measure::{ifs_invariant_stats, measure_of, moment_of, MeasureSpec};
use unbounded_means::num::{fmt_q, parse_q, q, qf, to_f64, Q};
use unbounded_means::properties::{run_property, CheckConfig, Verdict3};
use unbounded_means::sets::RealSet;
use umean_cli::{parse_set, reproduce};

/// Wall-clock budget for one property suite.
const SUITE_BUDGET: Duration = Duration::from_secs(60);
const CESARO_TOL: f64 = 0.05;
const TARGET_TOL: f64 = 1e-8;
const RIEMANN_TOL: f64 = 1e-6;
const CHAOS_TOL: f64 = 1e-3;
const CHAOS_POINTS: u64 = 10_000_000;
/// Criteria that cannot be met and must keep failing.
const UNATTAINABLE: &[&str] = &["golden/harmonic-interval-infinite"];

#[derive(Default)]
struct Ledger {
    rows: Vec<(String, bool)>,
}

impl Ledger {
    fn record(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        println!("{} {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        self.rows.push((id.to_string(), pass));
    }
}

fn mean(name: &str) -> MeanRef {
    mean_by_name(name).unwrap_or_else(|| panic!("mean {name}"))
}

fn golden_rows(l: &mut Ledger) {
    for r in reproduce::rows() {
        l.record(&format!("golden/{}", r.id), r.pass, format!("{} (got {}, want {})", r.what, r.got, r.want));
    }
}

fn suite(l: &mut Ledger, mean_name: &str, property: &str, min_samples: usize) {
    let k = mean(mean_name);
    let cfg = CheckConfig::default();
    let t = Instant::now();
    let report = run_property(&k, property, &cfg).unwrap_or_else(|| panic!("property {property}"));
    let dt = t.elapsed();
    let pass = report.verdict == Verdict3::Holds && report.samples >= min_samples && dt < SUITE_BUDGET;
    l.record(
        &format!("suite/{mean_name}/{property}"),
        pass,
        format!(
            "{} on {} samples, {} skipped (need >= {min_samples}), {:.1}s of {}s",
            report.verdict,
            report.samples,
            report.skipped,
            dt.as_secs_f64(),
            SUITE_BUDGET.as_secs()
        ),
    );
}

fn property_suites(l: &mut Ledger) {
    for m in ["mmu:lebesgue", "mmu:harmonic"] {
        for p in ["internal", "i-strong-internal", "union-identity", "subset-finite", "bounded-finite", "interval-continuous"] {
            suite(l, m, p, 1);
        }
        suite(l, m, "strong-base-monotone", 200);
        suite(l, m, "measure-agreement", 1);
        suite(l, m, "union-finite", 1);
    }
    suite(l, "ext:avg1", "extension", 1);
    suite(l, "ext:mmu:harmonic", "extension", 1);
    for p in ["monotone", "base-monotone", "disjoint-monotone", "shift-invariant", "symmetric"] {
        suite(l, "ext:avg1", p, 1);
    }
    suite(l, "mmu:harmonic", "dominance:mmu:lebesgue", 1);
    suite(l, "mmu:lebesgue", "infinite-measure", 1);
    suite(l, "mmu:lebesgue", "union-infinite", 1);
    for m in ["mmu:lebesgue", "mmu:harmonic", "ext:avg1"] {
        suite(l, m, "tail-monotone", 1);
    }
}

fn cesaro(l: &mut Ledger) {
    let k = mean("avg1");
    let sched = WindowSchedule::default();
    for name in ["geometric-blocks", "mirrored-blocks", "two-units"] {
        let h = by_name(name).expect("catalog set");
        let ext = extend_mean(k.as_ref(), &h, &sched).value;
        let row = cesaro_average(k.as_ref(), &h, &[64.0], 64, CesaroRegion::Quadrant).remove(0);
        let pass = match (row.value, ext.finite()) {
            (Some(c), Some(e)) => (c - e).abs() <= CESARO_TOL,
            _ => false,
        };
        let shown = row.value.map_or_else(|| "none".into(), |v| format!("{v:.6}"));
        l.record(&format!("cesaro/{name}"), pass, format!("p=64 average {shown} vs extension {ext} (tol {CESARO_TOL})"));
    }
}

/// Exact Lebesgue mass and mean of a finite union of disjoint blocks.
fn block_stats(blocks: &[(Q, Q)]) -> (Q, Q) {
    let mass: Q = blocks.iter().map(|(a, b)| b - a).sum();
    let moment: Q = blocks.iter().map(|(a, b)| (b * b - a * a) / q(2)).sum();
    let m = if mass.is_zero() { Q::zero() } else { &moment / &mass };
    (mass, m)
}

fn disjoint(blocks: &[(Q, Q)]) -> bool {
    blocks.iter().enumerate().all(|(i, a)| a.0 < a.1 && blocks[i + 1..].iter().all(|b| a.1 < b.0 || b.1 < a.0))
}

/// Certificate re-checked by `verify`, the printed set parsed back, and
/// the greedy prefix rebuilt from exact block arithmetic.
fn independent(c: &Construction, stage_ok: impl Fn(usize, &Q) -> bool) -> Result<String, String> {
    if !c.certificate.ok() || !verify(c).ok() {
        return Err("certificate rejected".into());
    }
    let reparsed = parse_set(&c.dsl).map_err(|e| format!("printed set does not parse: {e}"))?;
    if reparsed != c.set {
        return Err("printed set differs from the built set".into());
    }
    if !disjoint(&c.blocks) {
        return Err("blocks overlap".into());
    }
    for i in 1..=c.blocks.len() {
        let (_, m) = block_stats(&c.blocks[..i]);
        if !stage_ok(i, &m) {
            return Err(format!("stage {i} mean {} misses its threshold", fmt_q(&m)));
        }
    }
    let (prefix_mass, _) = block_stats(&c.blocks);
    let lambda = measure_of(&MeasureSpec::lebesgue(), &c.set).map_err(|e| e.to_string())?;
    let lambda = lambda.exact_value().cloned().ok_or("lambda not exact")?;
    if parse_q(&c.certificate.lambda) != Some(lambda.clone()) || lambda < prefix_mass {
        return Err(format!("lambda {} disagrees with the certificate {}", fmt_q(&lambda), c.certificate.lambda));
    }
    Ok(fmt_q(&lambda))
}

fn constructions(l: &mut Ledger) {
    let avg1 = mean("avg1");
    let one = q(1);
    let sched = WindowSchedule::default();

    let r = build_thin_infinite(&avg1, &one, 12).map_err(|e| e.to_string()).and_then(|c| {
        let lam = independent(&c, |n, m| m > &q(n as i64))?;
        let ext = extend_mean(avg1.as_ref(), &c.set, &sched).value;
        if parse_q(&lam).is_some_and(|x| x < one) && ext == MeanValue::PlusInf {
            Ok(format!("lambda {lam} < 1, stage n mean > n, extension {ext}"))
        } else {
            Err(format!("lambda {lam}, extension {ext}"))
        }
    });
    l.record("construct/thin-infinite", r.is_ok(), r.unwrap_or_else(|e| e));

    let r = build_oscillating(&avg1, &one, 8).map_err(|e| e.to_string()).and_then(|c| {
        let lam = independent(&c, |n, m| if n % 2 == 0 { m > &q(1) } else { m < &q(-1) })?;
        let ext = extend_mean(avg1.as_ref(), &c.set, &sched).value;
        if parse_q(&lam).is_some_and(|x| x < one) && ext == MeanValue::Divergent {
            Ok(format!("lambda {lam} < 1, stage means alternate beyond +-1, extension {ext}"))
        } else {
            Err(format!("lambda {lam}, extension {ext}"))
        }
    });
    l.record("construct/oscillating", r.is_ok(), r.unwrap_or_else(|e| e));

    let r = build_thin_finite_unbounded(&avg1, &one, 20).map_err(|e| e.to_string()).and_then(|c| {
        let lam = independent(&c, |_, m| m < &q(1))?;
        let ext = extend_mean(avg1.as_ref(), &c.set, &sched).value;
        let bounded_by_one = ext.finite().is_some_and(|v| v <= 1.0 + TARGET_TOL);
        if parse_q(&lam).is_some_and(|x| x <= one) && bounded_by_one && !c.set.is_bounded() {
            Ok(format!("lambda {lam} <= 1, stage means < 1, extension {ext}"))
        } else {
            Err(format!("lambda {lam}, extension {ext}"))
        }
    });
    l.record("construct/thin-finite", r.is_ok(), r.unwrap_or_else(|e| e));

    for h in [q(0), q(5), q(-3)] {
        let r = build_with_prescribed_mean(&avg1, &h).map_err(|e| e.to_string()).and_then(|c| {
            if !c.certificate.ok() || !verify(&c).ok() {
                return Err("certificate rejected".into());
            }
            let reparsed = parse_set(&c.dsl).map_err(|e| e.to_string())?;
            let ext = extend_mean(avg1.as_ref(), &reparsed, &sched).value;
            let t = to_f64(&h);
            match ext.finite() {
                Some(v) if (v - t).abs() <= TARGET_TOL * t.abs().max(1.0) => Ok(format!("extension {ext}, target {}", fmt_q(&h))),
                _ => Err(format!("extension {ext}, target {}", fmt_q(&h))),
            }
        });
        l.record(&format!("construct/prescribed-{}", fmt_q(&h)), r.is_ok(), r.unwrap_or_else(|e| e));
    }

    let r = build_thin_infinite(&mean("mmu:harmonic"), &one, 12);
    let detail = match &r {
        Ok(_) => "unexpectedly succeeded".to_string(),
        Err(e) => e.to_string(),
    };
    l.record("construct/harmonic-fails", r.is_err() && detail.starts_with("construction-failed"), detail);
}

/// Composite midpoint rule on `[a, b]`.
fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn riemann(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_607);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for case in 0..50 {
        let harmonic = case % 2 == 1;
        let pieces = rng.gen_range(1..=4);
        let mut cuts: Vec<Q> = (0..2 * pieces)
            .map(|_| {
                let den = rng.gen_range(1..=8i64);
                let num = if harmonic { rng.gen_range(den / 2 + 1..=6 * den) } else { rng.gen_range(-5 * den..=5 * den) };
                qf(num, den)
            })
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut h = RealSet::empty();
        let mut spans = Vec::new();
        for w in cuts.chunks_exact(2) {
            h = h.union(&RealSet::closed(w[0].clone(), w[1].clone())).expect("union");
            spans.push((to_f64(&w[0]), to_f64(&w[1])));
        }
        let (mu, density): (MeasureSpec, fn(f64) -> f64) = if harmonic {
            (MeasureSpec::harmonic(), |x| 2.0 / (x * x * x))
        } else {
            (MeasureSpec::lebesgue(), |_| 1.0)
        };
        let oracle_mass: f64 = spans.iter().map(|&(a, b)| midpoint(density, a, b, 200_000)).sum();
        let oracle_moment: f64 = spans.iter().map(|&(a, b)| midpoint(|x| x * density(x), a, b, 200_000)).sum();
        let mass = measure_of(&mu, &h).expect("mass").value();
        let moment = moment_of(&mu, &h).expect("moment").value();
        let e = rel_err(mass, oracle_mass).max(if oracle_moment.abs() > 1e-9 {
            rel_err(moment, oracle_moment)
        } else {
            (moment - oracle_moment).abs()
        });
        worst = worst.max(e);
        if e > RIEMANN_TOL {
            failures.push(format!("case {case}: {} error {e:.2e}", h.to_dsl()));
        }
    }
    let detail = if failures.is_empty() {
        format!("50 random sets, worst relative error {worst:.2e} (tol {RIEMANN_TOL:e})")
    } else {
        failures.join("; ")
    };
    l.record("oracle/riemann", failures.is_empty(), detail);
}

/// Solve `sum r_i^s = 1` by bisection.
fn dimension(ratios: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratios.iter().map(|r| r.powf(mid)).sum::<f64>() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn chaos_game(maps: &[(f64, f64)], points: u64, seed: u64) -> f64 {
    let s = dimension(&maps.iter().map(|m| m.0).collect::<Vec<_>>());
    let mut cdf = Vec::new();
    let mut acc = 0.0;
    for (r, _) in maps {
        acc += r.powf(s);
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0f64;
    let mut total = 0.0f64;
    let burn = 100;
    for i in 0..points + burn {
        let u: f64 = rng.gen::<f64>() * acc;
        let j = cdf.iter().position(|c| u < *c).unwrap_or(maps.len() - 1);
        x = maps[j].0 * x + maps[j].1;
        if i >= burn {
            total += x;
        }
    }
    total / points as f64
}

fn chaos(l: &mut Ledger) {
    for (i, name) in ["cantor3", "cantor5", "skew"].into_iter().enumerate() {
        let ifs = Ifs::preset(name).expect("preset");
        let maps: Vec<(f64, f64)> = ifs.maps().iter().map(|m| (to_f64(&m.r), to_f64(&m.t))).collect();
        assert!(maps.iter().all(|m| m.0.is_positive()));
        let stats = ifs_invariant_stats(&ifs);
        let mc = chaos_game(&maps, CHAOS_POINTS, 7 + i as u64);
        let pass = (stats.mean - mc).abs() <= CHAOS_TOL;
        l.record(
            &format!("oracle/chaos-game/{name}"),
            pass,
            format!("mean {:.6} vs {CHAOS_POINTS} points {mc:.6} (tol {CHAOS_TOL:e})", stats.mean),
        );
    }
}

fn main() {
    let mut l = Ledger::default();
    golden_rows(&mut l);
    property_suites(&mut l);
    cesaro(&mut l);
    constructions(&mut l);
    riemann(&mut l);
    chaos(&mut l);

    let unexpected: Vec<&str> = l
        .rows
        .iter()
        .filter(|(id, pass)| *pass == UNATTAINABLE.contains(&id.as_str()))
        .map(|(id, _)| id.as_str())
        .collect();
    let passed = l.rows.iter().filter(|r| r.1).count();
    println!("{passed} of {} criteria pass; expected failures: {}", l.rows.len(), UNATTAINABLE.join(", "));
    if !unexpected.is_empty() {
        println!("unexpected results: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
