use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unbounded_means::catalog::geometric_blocks;
use unbounded_means::ext::ExtReal;
use unbounded_means::ifs::Ifs;
use unbounded_means::mean::{lebesgue_mean, MeanValue};
use unbounded_means::measure::{chaos_game_mean, ifs_invariant_stats, measure_of, moment_of, MeasureSpec};
use unbounded_means::num::{q, qf, to_f64, Q};
use unbounded_means::sets::RealSet;

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn piece() -> impl Strategy<Value = RealSet> {
    prop_oneof![
        (rational(), rational(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            if a == b {
                RealSet::points(vec![a])
            } else {
                RealSet::interval(ExtReal::Finite(a), ExtReal::Finite(b), lc, hc)
            }
        }),
        prop::collection::vec(rational(), 1..4).prop_map(RealSet::points),
    ]
}

/// Finite unions of intervals and points, optionally with the geometric
/// blocks shifted far to the right.
fn set() -> impl Strategy<Value = RealSet> {
    (prop::collection::vec(piece(), 1..5), any::<bool>()).prop_map(|(ps, tail)| {
        let mut h = RealSet::empty();
        for p in ps {
            h = h.union(&p).expect("union of bounded pieces");
        }
        if tail {
            let far = geometric_blocks().shift(&q(3)).expect("shift");
            h = h.union(&far).expect("union with blocks");
        }
        h
    })
}

fn fin(x: &Q) -> ExtReal {
    ExtReal::Finite(x.clone())
}

fn lambda(h: &RealSet) -> f64 {
    measure_of(&MeasureSpec::lebesgue(), h).expect("measure").value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn clip_is_idempotent(h in set(), x in rational(), y in rational()) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let once = h.clip(&fin(&x), &fin(&y)).unwrap();
        let twice = once.clip(&fin(&x), &fin(&y)).unwrap();
        prop_assert_eq!(&once, &twice, "{} -> {} vs {}", h.to_dsl(), once.to_dsl(), twice.to_dsl());
    }

    #[test]
    fn clips_at_a_cut_reassemble(h in set(), a in rational(), b in rational(), c in rational()) {
        let mut v = [a, b, c];
        v.sort();
        let [x, m, y] = v;
        let whole = h.clip(&fin(&x), &fin(&y)).unwrap();
        let left = h.clip(&fin(&x), &fin(&m)).unwrap();
        let right = h.clip(&fin(&m), &fin(&y)).unwrap();
        let joined = left.union(&right).unwrap();
        prop_assert_eq!(&joined, &whole, "{}: {} vs {}", h.to_dsl(), joined.to_dsl(), whole.to_dsl());
        let (lw, ll, lr) = (lambda(&whole), lambda(&left), lambda(&right));
        prop_assert!((lw - ll - lr).abs() <= 1e-12 * lw.max(1.0));
    }

    #[test]
    fn clip_membership(h in set(), x in rational(), y in rational(), z in rational()) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let c = h.clip(&fin(&x), &fin(&y)).unwrap();
        let want = h.contains(&z).map(|m| m && x <= z && z <= y);
        prop_assert_eq!(c.contains(&z), want);
    }

    #[test]
    fn bounds_enclose_clips(h in set(), x in rational(), y in rational()) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let c = h.clip(&fin(&x), &fin(&y)).unwrap();
        prop_assume!(!c.is_empty());
        let (b, hb) = (c.bounds(), h.bounds());
        prop_assert!(b.inf <= b.sup);
        prop_assert!(fin(&x) <= b.inf && b.sup <= fin(&y));
        prop_assert!(hb.inf <= b.inf && b.sup <= hb.sup);
    }

    #[test]
    fn union_is_commutative(a in set(), b in set()) {
        prop_assume!(!(a.families().len() + b.families().len() > 1));
        prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
    }

    #[test]
    fn lebesgue_mean_is_affine_equivariant(h in set(), a in (1i64..=5, 1i64..=3), t in rational()) {
        prop_assume!(h.is_bounded());
        let a = qf(a.0, a.1);
        let v = lebesgue_mean().eval(&h);
        let w = lebesgue_mean().eval(&h.affine(&a, &t).unwrap());
        match (v, w) {
            (MeanValue::Finite(v), MeanValue::Finite(w)) => {
                let want = to_f64(&a) * v + to_f64(&t);
                prop_assert!((w - want).abs() <= 1e-9 * want.abs().max(1.0));
            }
            (v, w) => prop_assert_eq!(v, w),
        }
    }

    #[test]
    fn density_measures_match_riemann_sums(spans in prop::collection::vec((1i64..=48, 1i64..=8), 1..4)) {
        let mut cuts: Vec<Q> = spans.iter().flat_map(|&(a, w)| [qf(a, 4), qf(a, 4) + qf(w, 8)]).collect();
        cuts.sort();
        cuts.dedup();
        prop_assume!(cuts.len().is_multiple_of(2));
        let mut h = RealSet::empty();
        let mut ivs = Vec::new();
        for w in cuts.chunks_exact(2) {
            h = h.union(&RealSet::closed(w[0].clone(), w[1].clone())).unwrap();
            ivs.push((to_f64(&w[0]), to_f64(&w[1])));
        }
        let mid = |f: &dyn Fn(f64) -> f64| -> f64 {
            ivs.iter()
                .map(|&(a, b)| {
                    let n = 50_000;
                    let step = (b - a) / n as f64;
                    (0..n).map(|i| f(a + (i as f64 + 0.5) * step)).sum::<f64>() * step
                })
                .sum()
        };
        let cases: [(MeasureSpec, fn(f64) -> f64); 2] =
            [(MeasureSpec::lebesgue(), |_| 1.0), (MeasureSpec::harmonic(), |x| 2.0 / (x * x * x))];
        for (mu, dens) in cases {
            let mass = measure_of(&mu, &h).unwrap().value();
            let moment = moment_of(&mu, &h).unwrap().value();
            let want_mass = mid(&dens);
            let want_moment = mid(&|x| x * dens(x));
            prop_assert!((mass - want_mass).abs() <= 1e-6 * want_mass, "{} {} vs {}", mu.name(), mass, want_mass);
            prop_assert!((moment - want_moment).abs() <= 1e-6 * want_moment);
        }
    }
}

/// Chaos game written independently of the library, weights `r_i^s`.
fn chaos_oracle(maps: &[(f64, f64)], s: f64, points: u64, seed: u64) -> f64 {
    let weights: Vec<f64> = maps.iter().map(|m| m.0.powf(s)).collect();
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let mut acc = 0.0;
    for i in 0..points + 64 {
        let mut u = rng.gen::<f64>() * total;
        let mut j = 0;
        while j + 1 < maps.len() && u >= weights[j] {
            u -= weights[j];
            j += 1;
        }
        x = maps[j].0 * x + maps[j].1;
        if i >= 64 {
            acc += x;
        }
    }
    acc / points as f64
}

#[test]
fn invariant_means_agree_with_chaos_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..8 {
        let r1 = qf(rng.gen_range(1..=4), 10);
        let r2 = qf(rng.gen_range(1..=4), 10);
        let gap = Q::from_integer(1.into()) - &r1 - &r2;
        let t2 = &r1 + gap * qf(rng.gen_range(1..=9), 10);
        let (ifs, _, _) = Ifs::from_maps(vec![(r1, q(0)), (r2, t2)]).unwrap();
        let maps: Vec<(f64, f64)> = ifs.maps().iter().map(|m| (to_f64(&m.r), to_f64(&m.t))).collect();
        let stats = ifs_invariant_stats(&ifs);
        let oracle = chaos_oracle(&maps, stats.s, 1_000_000, case);
        let lib = chaos_game_mean(&ifs, 1_000_000, case + 100);
        assert!((stats.mean - oracle).abs() < 3e-3, "case {case}: {} vs {oracle}", stats.mean);
        assert!((lib - oracle).abs() < 5e-3, "case {case}: {lib} vs {oracle}");
        let sum: f64 = maps.iter().map(|m| m.0.powf(stats.s)).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}
