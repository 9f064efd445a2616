//! The table of closed-form values checked by `umean reproduce`.

use unbounded_means::catalog;
use unbounded_means::extension::{extend_mean, WindowSchedule};
use unbounded_means::mean::{mean_by_name, MeanValue};
use num_traits::One;
use unbounded_means::ext::ExtReal;
use unbounded_means::num::{fmt_q, fmt_sig, q, to_f64, Q};
use unbounded_means::sets::RealSet;

use crate::dsl::parse_set;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub id: String,
    pub what: String,
    pub got: String,
    pub want: String,
    pub pass: bool,
}

impl Row {
    pub fn line(&self) -> String {
        format!(
            "{} {}: {} (got {}, want {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.what,
            self.got,
            self.want
        )
    }
}

fn mean(name: &str) -> Box<dyn Fn(&RealSet) -> MeanValue> {
    let k = mean_by_name(name).expect("built-in mean");
    Box::new(move |h| k.eval(h))
}

fn set(text: &str) -> RealSet {
    parse_set(text).expect("built-in set expression")
}

fn close(v: &MeanValue, want: f64, tol: f64) -> bool {
    matches!(v, MeanValue::Finite(x) if (x - want).abs() <= tol * want.abs().max(1.0))
}

fn row(id: &str, what: String, got: &MeanValue, want: String, pass: bool) -> Row {
    Row { id: id.into(), what, got: got.to_string(), want, pass }
}

/// `(sum b_n c_n + sum c_n^2 / 2) / sum c_n` by direct summation.
fn block_formula(b: impl Fn(f64) -> f64, c: impl Fn(f64) -> f64, terms: u32) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..=terms {
        let n = f64::from(i);
        let (bn, cn) = (b(n), c(n));
        num += bn * cn + 0.5 * cn * cn;
        den += cn;
    }
    num / den
}

pub fn rows() -> Vec<Row> {
    let mut out = Vec::new();
    let harmonic = mean("mmu:harmonic");
    let avg1 = mean("avg1");

    for (a, text) in [(1.0, "1"), (2.0, "2"), (2.5, "5/2")] {
        let v = harmonic(&set(&format!("[{text},inf)")));
        out.push(row(
            &format!("harmonic-ray-{text}"),
            format!("harmonic measure mean of [{text},inf) equals 2a"),
            &v,
            fmt_sig(2.0 * a, 12),
            close(&v, 2.0 * a, 1e-9),
        ));
    }

    let v = harmonic(&set("[1,2] u [1048577,1048578]"));
    out.push(row(
        "harmonic-interval-infinite",
        "harmonic measure mean of [1,2] u ([1,2] + 2^20) tends to 2/3".into(),
        &v,
        "2/3".into(),
        close(&v, 2.0 / 3.0, 1e-6),
    ));

    for n in [1u32, 2, 5, 10] {
        let v = avg1(&set(&format!("tail(b=n, c=2^-n, from={n})")));
        let want = q(i64::from(n) + 1) + Q::one() / q(3 * (1i64 << n));
        out.push(row(
            &format!("blocks-tail-{n}"),
            format!("Lebesgue mean of the blocks [i, i+2^-i], i >= {n}, equals n+1+1/(3*2^n)"),
            &v,
            fmt_q(&want),
            close(&v, to_f64(&want), 1e-9),
        ));
    }

    let lebesgue = mean_by_name("avg1").expect("built-in mean");
    let ver = extend_mean(lebesgue.as_ref(), &set("tail(b=n, c=2^-n, from=1)"), &WindowSchedule::default());
    out.push(Row {
        id: "blocks-extension".into(),
        what: "window extension of the Lebesgue mean on all blocks equals 13/6".into(),
        got: ver.to_string(),
        want: "13/6".into(),
        pass: close(&ver.value, 13.0 / 6.0, 1e-8),
    });

    let v = avg1(&set("tail(b=n^2, c=2^-n, from=1)"));
    let want = block_formula(|n| n * n, |n| 0.5f64.powf(n), 200);
    out.push(row(
        "block-formula-square",
        "b_n = n^2, c_n = 2^-n: mean equals the block series formula".into(),
        &v,
        fmt_sig(want, 12),
        close(&v, want, 1e-9),
    ));
    let v = avg1(&set("tail(b=2^n, c=n^-2*2^-n, from=1)"));
    out.push(row(
        "block-formula-light",
        "b_n = 2^n, c_n = 1/(n^2 2^n): sum b_n c_n finite, mean finite".into(),
        &v,
        "finite".into(),
        v.is_finite(),
    ));
    let v = avg1(&set("tail(b=2^n, c=2^-n, from=1)"));
    out.push(row(
        "block-formula-heavy",
        "b_n = 2^n, c_n = 2^-n: sum b_n c_n infinite, mean +inf".into(),
        &v,
        "+inf".into(),
        v == MeanValue::PlusInf,
    ));

    let h = catalog::by_name("naturals-reciprocals").expect("catalog set");
    let mlis = mean_by_name("mlis").expect("built-in mean");
    let ver = extend_mean(mlis.as_ref(), &h, &WindowSchedule::default());
    out.push(Row {
        id: "mlis-extension".into(),
        what: "window extension of the liminf/limsup mean on N u {1/n} equals 0".into(),
        got: ver.to_string(),
        want: "0".into(),
        pass: close(&ver.value, 0.0, 1e-9),
    });
    let b = h.bounds();
    let direct = match (b.liminf, b.limsup) {
        (Some(lo), Some(hi)) => ExtReal::midpoint(&lo, &hi).map_or(MeanValue::Undefined, |m| MeanValue::from_ext(m.to_f64())),
        _ => MeanValue::Undefined,
    };
    out.push(row(
        "mlis-direct",
        "(liminf + limsup)/2 of N u {1/n} is +inf".into(),
        &direct,
        "+inf".into(),
        direct == MeanValue::PlusInf,
    ));

    let avg = mean("avg");
    let v = avg(&RealSet::closed(q(0), q(1)).union(&catalog::cantor_copies()).expect("disjoint union"));
    out.push(row(
        "mixed-dimension",
        "Avg of [0,1] u (dimension 1/3 copies with infinite mean) equals Avg([0,1])".into(),
        &v,
        "1/2".into(),
        close(&v, 0.5, 1e-12),
    ));

    let v = mean("avg-s")(&set("ifs(cantor3)"));
    out.push(row(
        "cantor-avg-s",
        "Avg^s of the ternary Cantor set equals 1/2".into(),
        &v,
        "1/2".into(),
        v == MeanValue::Finite(0.5),
    ));
    out
}
