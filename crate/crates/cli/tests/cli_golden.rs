use std::path::PathBuf;
use std::process::Command;

use umean_cli::{run_command, Outcome, EXIT_FAILED, EXIT_OK, EXIT_UNDEFINED, EXIT_USAGE};

fn run(args: &[&str]) -> Outcome {
    run_command(std::iter::once("umean").chain(args.iter().copied()))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

const BLOCKS: &str = "tail(b=n, c=2^-n, from=1)";

/// Mean of the blocks `[i, i + 2^-i]` with `i < 2^k`, summed in f64.
fn blocks_window_oracle(k: u32) -> Option<f64> {
    let top = 1u64 << k;
    let (mut mass, mut moment) = (0.0f64, 0.0f64);
    for i in 1..top.min(200) {
        let w = 0.5f64.powi(i as i32);
        mass += w;
        moment += i as f64 * w + w * w / 2.0;
    }
    (mass > 0.0).then(|| moment / mass)
}

#[test]
fn eval_harmonic_rays() {
    for (set, want) in [("[1,inf)", "2"), ("[2,inf)", "4"), ("[5/2,inf)", "5")] {
        let out = run(&["eval", "--mean", "mmu:harmonic", "--set", set]);
        assert_eq!(out.status, EXIT_OK, "{out:?}");
        assert_eq!(out.stdout, format!("{want}\n"));
    }
}

#[test]
fn eval_reciprocal_of_half_open_interval() {
    let out = run(&["eval", "--mean", "mmu:harmonic", "--set", "recip((0,1])"]);
    assert_eq!(out.status, EXIT_OK, "{out:?}");
    assert_eq!(out.stdout, "2\n");
}

#[test]
fn extend_prints_verdict_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = run(&[
        "extend",
        "--mean",
        "avg1",
        "--set",
        BLOCKS,
        "--kmax",
        "16",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status, EXIT_OK, "{out:?}");
    assert!(out.stdout.starts_with("13/6 (converged, k0="), "{}", out.stdout);

    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["k", "x", "y", "value"]);
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let k: u32 = rec[0].parse().unwrap();
        let x: f64 = rec[1].parse().unwrap();
        let y: f64 = rec[2].parse().unwrap();
        assert_eq!(x, -(2f64.powi(k as i32)));
        assert_eq!(y, 2f64.powi(k as i32));
        match blocks_window_oracle(k) {
            None => assert_eq!(&rec[3], "undefined"),
            Some(want) => {
                let got: f64 = rec[3].parse().unwrap();
                assert!((got - want).abs() <= 1e-11 * want, "k={k}: {got} vs {want}");
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 17);

    let written = std::fs::read_to_string(&path).unwrap();
    let expected = std::fs::read_to_string(golden("extend_blocks.csv")).unwrap();
    assert_eq!(written, expected);
}

#[test]
fn cesaro_prints_csv_trace() {
    let out = run(&["cesaro", "--mean", "avg1", "--set", BLOCKS, "--pmax", "64"]);
    assert_eq!(out.status, EXIT_OK, "{out:?}");
    let mut rdr = csv::Reader::from_reader(out.stdout.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["p", "value", "skipped", "untreatable"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let ps: Vec<&str> = rows.iter().map(|r| r.get(0).unwrap()).collect();
    assert_eq!(ps, ["1", "2", "4", "8", "16", "32", "64"]);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!((last - 13.0 / 6.0).abs() <= 0.05, "{last}");
}

#[test]
fn parse_error_reports_column() {
    let out = run(&["eval", "--mean", "avg1", "--set", "[0,1] u"]);
    assert_eq!(out.status, EXIT_USAGE);
    assert!(out.stderr.contains("line 1, column 8"), "{}", out.stderr);
}

#[test]
fn unknown_names_are_usage_errors() {
    let cases: [&[&str]; 4] = [
        &["eval", "--mean", "nope", "--set", "[0,1]"],
        &["check", "--mean", "avg1", "--property", "nope"],
        &["construct", "--builder", "nope"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status, EXIT_USAGE, "{args:?}: {out:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn undefined_value_exits_three() {
    let out = run(&["eval", "--mean", "avg1", "--set", "[0,inf)"]);
    assert_eq!(out.status, EXIT_UNDEFINED);
    assert!(out.stderr.contains("outside the domain"), "{}", out.stderr);

    let out = run(&["eval", "--mean", "avg1", "--set", "{}"]);
    assert_eq!(out.status, EXIT_UNDEFINED);
}

#[test]
fn semantic_error_exits_two() {
    let out = run(&["eval", "--mean", "avg1", "--set", "recip([-1,1])"]);
    assert_eq!(out.status, EXIT_USAGE, "{out:?}");
    assert!(out.stderr.contains("column 1"), "{}", out.stderr);
}

#[test]
fn check_harmonic_interval_infinite_is_a_counterexample() {
    let out = run(&["check", "--mean", "mmu:harmonic", "--property", "interval-infinite"]);
    assert_eq!(out.status, EXIT_FAILED);
    assert!(out.stdout.contains("verdict: counterexample"), "{}", out.stdout);
    assert!(out.stdout.contains("1.33333333334"), "{}", out.stdout);
}

#[test]
fn check_json_is_parseable() {
    let out = run(&["check", "--mean", "mmu:lebesgue", "--property", "internal", "--json"]);
    assert_eq!(out.status, EXIT_OK, "{out:?}");
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "holds-on-catalog");
}

#[test]
fn construct_prints_set_and_certificate() {
    let out = run(&["construct", "--builder", "thin-infinite", "--eps", "1", "--n", "3"]);
    assert_eq!(out.status, EXIT_OK, "{out:?}");
    assert!(out.stdout.contains("\nset: "));
    assert!(out.stdout.ends_with("certificate: verified\n"), "{}", out.stdout);
    let set_line = out.stdout.lines().find_map(|l| l.strip_prefix("set: ")).unwrap();
    let again = run(&["eval", "--mean", "avg1", "--set", &format!("clip({set_line}, 0, 5/4)")]);
    assert_eq!(again.status, EXIT_OK, "{again:?}");
    assert_eq!(again.stdout, "9/8\n");

    let out = run(&["construct", "--builder", "thin-infinite", "--mean", "mmu:harmonic", "--n", "12"]);
    assert_eq!(out.status, EXIT_FAILED);
    assert!(out.stdout.contains("construction-failed"), "{}", out.stdout);
}

#[test]
fn reproduce_is_deterministic_and_fails_one_row() {
    let a = run(&["reproduce"]);
    let b = run(&["reproduce"]);
    assert_eq!(a, b);
    assert_eq!(a.status, EXIT_FAILED);
    let failing: Vec<&str> = a.stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failing.len(), 1, "{}", a.stdout);
    assert!(failing[0].starts_with("FAIL harmonic-interval-infinite:"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_umean");
    let st = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let ok = st(&["eval", "--mean", "mmu:harmonic", "--set", "[1,inf)"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "2\n");

    let usage = st(&["eval", "--mean", "avg1", "--set", "[0,1] u"]);
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));

    let undefined = st(&["eval", "--mean", "avg1", "--set", "[0,inf)"]);
    assert_eq!(undefined.status.code(), Some(EXIT_UNDEFINED));

    let help = st(&["--help"]);
    assert_eq!(help.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&help.stdout).contains("reproduce"));
}
