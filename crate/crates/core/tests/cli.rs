use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pym_entropy::cli::{exit_code, RunReport, CONVERGE_HEADER, EXIT_NUMERICAL};
use pym_entropy::Error;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pym-entropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> RunReport {
    serde_json::from_str(&stdout(o)).unwrap()
}

const SMALL: &str = "a\t7\nb\t3\nc\t2\nd\t1\ne\t1\nf\t1\ng\t1\n";

#[test]
fn balanced_coin_is_ln2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", "a\t5000\nb\t5000\n");
    let r = report(&run(&["estimate", f.to_str().unwrap(), "--estimator", "pym"]));
    assert!((r.mean_nats - 2f64.ln()).abs() < 0.01, "{}", r.mean_nats);
    assert_eq!((r.n, r.k), (10_000, 2));
}

#[test]
fn two_singletons_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", "a\t1\nb\t1\n");
    let o = run(&["estimate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("at least 2"), "{err}");
}

#[test]
fn bits_divide_by_ln2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let r = report(&run(&["estimate", f.to_str().unwrap(), "--units", "bits"]));
    assert!((r.mean - r.mean_nats / 2f64.ln()).abs() < 1e-12);
    assert!((r.std.unwrap() - r.std_nats.unwrap() / 2f64.ln()).abs() < 1e-12);
}

#[test]
fn every_estimator_runs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let p = f.to_str().unwrap();
    for e in ["plugin", "mima", "ansb", "dpm", "pym"] {
        let r = report(&run(&["estimate", p, "--estimator", e]));
        assert!(r.mean_nats.is_finite(), "{e}");
    }
    let r = report(&run(&["estimate", p, "--estimator", "nsb", "--alphabet-size", "20"]));
    assert!(r.mean_nats > 0.0);
    assert_eq!(run(&["estimate", p, "--estimator", "nsb"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", p, "--estimator", "nsb", "--alphabet-size", "3"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", p, "--estimator", "magic"]).status.code(), Some(2));
}

#[test]
fn input_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let counts = write(dir.path(), "c.tsv", "# header comment\nx\t3\ny\t2\nz\t1\nw\t1\n");
    let samples = write(dir.path(), "s.txt", "x\ny\nx\nz\ny\nw\nx\n");
    let mults = write(dir.path(), "m.tsv", "3\t1\n2\t1\n1\t2\n");
    let a = report(&run(&["estimate", counts.to_str().unwrap()]));
    let b = report(&run(&["estimate", samples.to_str().unwrap(), "--format", "samples"]));
    let c = report(&run(&["estimate", mults.to_str().unwrap(), "--format", "multiplicities"]));
    assert_eq!(a.mean_nats, b.mean_nats);
    assert_eq!(a.mean_nats, c.mean_nats);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = bin()
        .args(["estimate", "-", "--estimator", "plugin"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"a\t1\nb\t1\n").unwrap();
    let o = child.wait_with_output().unwrap();
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r.mean_nats - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn malformed_input_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("a\t3\nb\t0\n", "line 2"),
        ("a\t3\nb\t-1\n", "line 2"),
        ("a\t3\n# note\nb\t1.5\n", "line 3"),
        ("a\t3\nb\t1\na\t2\n", "line 3"),
        ("a 3\n", "line 1"),
    ];
    for (i, (text, want)) in cases.iter().enumerate() {
        let f = write(dir.path(), &format!("bad{i}.tsv"), text);
        let o = run(&["estimate", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(want), "{text:?}: {err}");
    }
    assert_eq!(run(&["estimate", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_map_to_exit_4() {
    assert_eq!(exit_code(&Error::Numerical("x".into())), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::TailTruncation { cap: 1, remaining: 0.5 }), EXIT_NUMERICAL);
}

#[test]
fn zero_draws_is_empty_array() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let o = run(&["sample", f.to_str().unwrap(), "--draws", "0"]);
    assert_eq!(stdout(&o).trim(), "[]");
}

#[test]
fn sample_mean_matches_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let p = f.to_str().unwrap();
    let r = report(&run(&["estimate", p]));
    let xs: Vec<f64> = serde_json::from_str(&stdout(&run(&["sample", p, "--draws", "4000", "--seed", "3"]))).unwrap();
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((m - r.mean_nats).abs() < 3.0 * sd / n.sqrt(), "{m} vs {}", r.mean_nats);
    assert!((sd / r.std_nats.unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let out = dir.path().join("r.json");
    let o = run(&["estimate", f.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(stdout(&o).is_empty());
    let r: RunReport = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r.k, 7);
}

/// Key set and values of the report for a fixed dataset. Numbers are compared
/// to 1e-6: the MAP search stops at about that precision, so last-bit changes
/// in the evidence or a different libm move the fitted values slightly.
#[test]
fn report_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.tsv", SMALL);
    let got: Value = serde_json::from_str(&stdout(&run(&["estimate", f.to_str().unwrap(), "--seed", "42"]))).unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden_estimate.json");
    let want: Value = serde_json::from_str(&std::fs::read_to_string(golden_path).unwrap()).unwrap();
    assert_json_close(&got, &want, "");
}

fn assert_json_close(got: &Value, want: &Value, path: &str) {
    match (got, want) {
        (Value::Object(a), Value::Object(b)) => {
            let ka: Vec<_> = a.keys().collect();
            let kb: Vec<_> = b.keys().collect();
            assert_eq!(ka, kb, "keys differ at {path}");
            for (k, v) in a {
                assert_json_close(v, &b[k], &format!("{path}.{k}"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "length differs at {path}");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_json_close(x, y, &format!("{path}[{i}]"));
            }
        }
        (Value::Number(a), Value::Number(b)) => {
            let (x, y) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-6 * (1.0 + y.abs()), "{path}: {x} vs {y}");
        }
        _ => assert_eq!(got, want, "at {path}"),
    }
}

#[test]
fn converge_csv_shape() {
    let o = run(&[
        "converge", "--dist", "uniform:1000", "--sizes", "100,1000,10000", "--estimators", "plugin,pym", "--trials", "3",
        "--seed", "5",
    ]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CONVERGE_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 3 * 2);
    for r in &rows {
        assert_eq!(r.len(), 7);
        let h: f64 = r[5].parse().unwrap();
        assert!((h - 1000f64.ln()).abs() < 1e-12);
    }
    // Plugin is biased low and the bias shrinks with N.
    let plugin_avg = |size: &str| {
        let v: Vec<f64> =
            rows.iter().filter(|r| r[0] == size && r[2] == "plugin").map(|r| r[3].parse().unwrap()).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(plugin_avg("100") < plugin_avg("1000"));
    assert!(plugin_avg("1000") < plugin_avg("10000"));
    assert!(plugin_avg("10000") < 1000f64.ln());

    let again = run(&[
        "converge", "--dist", "uniform:1000", "--sizes", "100,1000,10000", "--estimators", "plugin,pym", "--trials", "3",
        "--seed", "5",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn converge_records_failures_and_continues() {
    let o = run(&["converge", "--dist", "uniform:100000", "--sizes", "3", "--estimators", "plugin,pym", "--trials", "2"]);
    let text = stdout(&o);
    let pym_rows: Vec<&str> = text.lines().filter(|l| l.contains(",pym,")).collect();
    assert_eq!(pym_rows.len(), 2);
    for r in pym_rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!((f[3], f[4], f[6]), ("", "", "3"), "{r}");
    }
}

#[test]
fn converge_py_is_realized_per_seed() {
    let a = run(&["converge", "--dist", "py:0.25:40", "--sizes", "500", "--estimators", "plugin", "--trials", "1", "--seed", "1"]);
    let b = run(&["converge", "--dist", "py:0.25:40", "--sizes", "500", "--estimators", "plugin", "--trials", "1", "--seed", "2"]);
    let truth = |o: &Output| stdout(o).lines().nth(1).unwrap().split(',').nth(5).unwrap().to_string();
    assert_ne!(truth(&a), truth(&b));
}

#[test]
fn bad_distribution_spec_exit_2() {
    assert_eq!(run(&["converge", "--dist", "zipf:2"]).status.code(), Some(2));
    assert_eq!(run(&["converge", "--dist", "uniform:0"]).status.code(), Some(2));
}
