use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn simex() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_simex"));
    c.env_remove("SIMEX_MAX_LP_NONZEROS");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

struct Fixture {
    dir: TempDir,
    bsc: PathBuf,
    id2: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let bsc = write(dir.path(), "bsc01.json", r#"{"matrix": [[0.9, 0.1], [0.1, 0.9]]}"#);
    let id2 = write(
        dir.path(),
        "id2.json",
        r#"{"input": ["a", "b"], "output": ["a", "b"], "matrix": [[1, 0], [0, 1]]}"#,
    );
    Fixture { dir, bsc, id2 }
}

fn run(args: &[&str]) -> Output {
    simex().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn eps_ns_on_identity() {
    let f = fixture();
    let out = run(&["eps-ns", "--channel", p(&f.id2), "--M", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["quantity"], "eps-ns");
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["certificate"]["status"], "optimal");
    for key in ["quantity", "inputs", "value", "certificate", "warnings"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn max_info_is_log_one_point_eight() {
    let f = fixture();
    let v = json(&run(&["max-info", "--channel", p(&f.bsc)]));
    assert!((v["value"].as_f64().unwrap() - 1.8f64.ln()).abs() < 1e-8);
    let bits = json(&run(&["--bits", "max-info", "--channel", p(&f.bsc)]));
    assert!((bits["value"].as_f64().unwrap() - 1.8f64.log2()).abs() < 1e-8);
    assert_eq!(bits["inputs"]["unit"], "bits");
}

#[test]
fn error_exponent_queries() {
    let f = fixture();
    // Between capacity and max-information the exponent is finite and positive.
    let v = json(&run(&["exponent-ee", "--channel", p(&f.bsc), "--rate", "0.5"]));
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert!(v["certificate"]["argmax_alpha"].as_f64().unwrap() > 0.0);
    // Above max-information (ln 1.8 < 0.6) it is infinite, and the record says why.
    let v = json(&run(&["exponent-ee", "--channel", p(&f.bsc), "--rate", "0.6"]));
    assert_eq!(v["value"], "inf");
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    let v = json(&run(&["exponent-sce", "--channel", p(&f.id2), "--rate", "0.3"]));
    assert!((v["value"].as_f64().unwrap() - (2f64.ln() - 0.3)).abs() < 1e-8);
}

#[test]
fn other_queries_succeed() {
    let f = fixture();
    let c = p(&f.bsc);
    let cases: Vec<Vec<&str>> = vec![
        vec!["eps-ns-iid", "--channel", c, "--n", "4", "--rate", "0.3"],
        vec!["eps-ns-iid", "--channel", c, "--n", "3", "--M", "3", "--bruteforce"],
        vec![
            "eps-ns-iid",
            "--channel",
            c,
            "--n",
            "3",
            "--M",
            "3",
            "--formulation",
            "primal",
        ],
        vec!["renyi-mi", "--channel", c, "--alpha", "2", "--input", "0.3,0.7"],
        vec!["capacity", "--channel", c, "--alpha", "0.5"],
        vec!["bounds-ee", "--channel", c, "--rate", "0.5", "--n", "6"],
        vec!["bounds-sce", "--channel", c, "--rate", "0.2", "--n", "6"],
        vec!["sr-sandwich", "--channel", c, "--n", "4", "--M", "3"],
        vec!["sr-sandwich", "--channel", c, "--M", "1", "--M-prime", "2"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = json(&out);
        assert_eq!(v["quantity"], args[0]);
    }
    let v = json(&run(&["bounds-ee", "--channel", c, "--rate", "0.5", "--n", "6"]));
    assert_eq!(v["certificate"]["within_bounds"], true);
    let v = json(&run(&["sr-sandwich", "--channel", c, "--n", "4", "--M", "3"]));
    assert!(v["value"]["lower"].as_f64().unwrap() <= v["value"]["upper"].as_f64().unwrap());
}

#[test]
fn input_errors_exit_three() {
    let f = fixture();
    let bad = write(f.dir.path(), "bad.json", r#"{"matrix": [[0.5, 0.5], [0.9, 0.2]]}"#);
    let out = run(&["max-info", "--channel", p(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
    assert_eq!(
        run(&["max-info", "--channel", "/nonexistent.json"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["capacity", "--channel", p(&f.bsc)]).status.code(), Some(3));
    assert_eq!(
        run(&["exponent-ee", "--channel", p(&f.bsc), "--rate", "-1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn lp_cap_from_environment() {
    let f = fixture();
    let args = ["eps-ns-iid", "--channel", p(&f.bsc), "--n", "6", "--M", "5"];
    let out = simex().args(args).env("SIMEX_MAX_LP_NONZEROS", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let out = simex()
        .args(args)
        .env("SIMEX_MAX_LP_NONZEROS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(simex().args(args).output().unwrap().status.code(), Some(0));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweeps_are_ordered_and_deterministic() {
    let f = fixture();
    let a = f.dir.path().join("a.csv");
    let b = f.dir.path().join("b.csv");
    let base = [
        "sweep",
        "--channel",
        p(&f.bsc),
        "--quantity",
        "bounds-ee",
        "--n",
        "4..20:4",
        "--rate",
        "0.6",
    ];
    let out = simex()
        .args(base)
        .args(["--workers", "1", "-o", p(&a)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    simex()
        .args(base)
        .args(["--workers", "4", "-o", p(&b)])
        .output()
        .unwrap();
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let rows = csv_rows(std::str::from_utf8(&ta).unwrap());
    assert_eq!(
        rows[0].join(","),
        "quantity,n,rate,M,alpha,value,cert_gap,status,warning"
    );
    let exact: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "bounds-ee.exact").collect();
    assert_eq!(exact.len(), 5);
    let ns: Vec<&str> = exact.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(ns, ["4", "8", "12", "16", "20"]);
    // 17 significant digits.
    assert_eq!(rows[1][2], "5.9999999999999998e-1");
}

#[test]
fn capacity_sweep_is_monotone() {
    let f = fixture();
    let out = run(&[
        "sweep",
        "--channel",
        p(&f.bsc),
        "--quantity",
        "capacity",
        "--alpha",
        "0..6:0.25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    let values: Vec<f64> = rows[1..].iter().map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(values.len(), 25);
    assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-8), "{values:?}");
}

#[test]
fn sweep_input_errors() {
    let f = fixture();
    let c = p(&f.bsc);
    assert_eq!(
        run(&["sweep", "--channel", c, "--quantity", "capacity", "--alpha", ""])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["sweep", "--channel", c, "--quantity", "capacity"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--channel",
            c,
            "--quantity",
            "capacity",
            "--alpha",
            "1",
            "--n",
            "3"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--channel",
            c,
            "--quantity",
            "eps-ns-iid",
            "--n",
            "0",
            "--M",
            "2"
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn sweep_reports_partial_failures_per_row() {
    let f = fixture();
    let out = simex()
        .args([
            "sweep",
            "--channel",
            p(&f.bsc),
            "--quantity",
            "eps-ns-iid",
            "--n",
            "1,8",
            "--M",
            "2",
        ])
        .env("SIMEX_MAX_LP_NONZEROS", "40")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows[1][7], "optimal");
    assert_eq!(rows[2][7], "error");
}

#[test]
fn verify_suites() {
    let f = fixture();
    let out = run(&[
        "verify",
        "sandwich",
        "--channel",
        p(&f.bsc),
        "--rate",
        "0.6",
        "--n",
        "4..14",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().last().unwrap().ends_with("0 failed"), "{text}");
    assert!(!text.contains("FAIL"));

    let out = run(&["verify", "definetti", "--n", "6", "--alphabet", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["lhs"].as_f64().unwrap() <= 1.0 + 1e-12);
    }

    assert_eq!(run(&["verify", "oracle"]).status.code(), Some(0));
}

#[test]
fn channel_round_trip() {
    let f = fixture();
    let odd = write(
        f.dir.path(),
        "odd.json",
        r#"{"input": ["x", "y"], "output": ["u", "v", "w"], "matrix": [[0.1, 0.2, 0.7], [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]]}"#,
    );
    let once = f.dir.path().join("once.json");
    let twice = f.dir.path().join("twice.json");
    assert_eq!(
        run(&["channel", "--channel", p(&odd), "-o", p(&once)]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["channel", "--channel", p(&once), "-o", p(&twice)]).status.code(),
        Some(0)
    );
    assert_eq!(std::fs::read(&once).unwrap(), std::fs::read(&twice).unwrap());
    assert_eq!(
        simex::io::read_channel(&once).unwrap(),
        simex::io::read_channel(&odd).unwrap()
    );
}
