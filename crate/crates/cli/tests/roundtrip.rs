use proptest::prelude::*;
use umean_cli::{parse_rational, parse_set};
use unbounded_means::catalog::{catalog, geometric_blocks};
use unbounded_means::ext::ExtReal;
use unbounded_means::ifs::Ifs;
use unbounded_means::num::{fmt_q, q, qf, Q};
use unbounded_means::sets::RealSet;

fn rational() -> impl Strategy<Value = Q> {
    (-60i64..=60, 1i64..=6).prop_map(|(n, d)| qf(n, d))
}

fn piece() -> impl Strategy<Value = RealSet> {
    prop_oneof![
        (rational(), rational(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
            if a == b {
                RealSet::points(vec![a])
            } else {
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                RealSet::interval(ExtReal::Finite(a), ExtReal::Finite(b), lc, hc)
            }
        }),
        prop::collection::vec(rational(), 1..4).prop_map(RealSet::points),
        (rational(), 1i64..=3).prop_map(|(t, a)| {
            geometric_blocks().affine(&q(a), &(t + q(40))).expect("affine image")
        }),
        (prop::sample::select(Ifs::preset_names()), rational()).prop_map(|(name, lo)| {
            let ifs = Ifs::preset(name).expect("preset");
            RealSet::fractal(ifs, lo.clone(), lo + q(1))
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_sets_parse_back(pieces in prop::collection::vec(piece(), 1..4)) {
        let mut h = RealSet::empty();
        for p in &pieces {
            match h.union(p) {
                Ok(u) => h = u,
                Err(_) => return Ok(()),
            }
        }
        let text = h.to_dsl();
        let back = parse_set(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, h, "{}", text);
    }

    #[test]
    fn rationals_print_and_parse(x in rational()) {
        prop_assert_eq!(parse_rational(&fmt_q(&x)).unwrap(), x);
    }
}

#[test]
fn catalog_round_trips() {
    for e in catalog() {
        let text = e.set.to_dsl();
        let back = parse_set(&text).unwrap_or_else(|err| panic!("{}: {text}: {err}", e.name));
        assert_eq!(back, e.set, "{}", e.name);
    }
}
