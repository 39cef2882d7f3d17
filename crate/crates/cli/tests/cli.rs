use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use discrete_fdr::validate::fixtures::{toy_problem, POISSON_COUNTS, POISSON_MEANS, TOY_TABLES};
use discrete_fdr::{analyze, Config, Direction, Outcome};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discrete-fdr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn toy_csv(dir: &Path, newline: &str) -> PathBuf {
    let mut text = format!("X1,Y1,X2,Y2{newline}");
    for (a, b, c, d) in TOY_TABLES {
        text.push_str(&format!("{a},{b},{c},{d}{newline}"));
    }
    let path = dir.join(format!("toy{}.csv", newline.len()));
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toy_analysis_rejects_two() {
    let dir = TempDir::new().unwrap();
    let input = toy_csv(dir.path(), "\n");
    let out = run(&["analyze", "--input", s(&input)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,raw_p,adjusted_p,rejected");
    assert_eq!(lines.len(), 10);
    let rejected: Vec<&str> = lines[1..]
        .iter()
        .filter(|l| l.ends_with(",true"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(rejected, ["4", "6"]);
}

#[test]
fn json_matches_library_exactly() {
    let dir = TempDir::new().unwrap();
    let input = toy_csv(dir.path(), "\n");
    for (method, direction) in [
        ("dbh", "sd"),
        ("dbh", "su"),
        ("adbh", "su"),
        ("adbh", "sd"),
        ("dbr", "sd"),
    ] {
        let out = run(&[
            "analyze",
            "--input",
            s(&input),
            "--method",
            method,
            "--direction",
            direction,
            "--emit",
            "json",
        ]);
        assert!(out.status.success());
        let parsed: Outcome = serde_json::from_slice(&out.stdout).unwrap();
        let config = match method {
            "dbh" => Config::dbh(if direction == "sd" {
                Direction::StepDown
            } else {
                Direction::StepUp
            }),
            "adbh" => Config::adbh(if direction == "sd" {
                Direction::StepDown
            } else {
                Direction::StepUp
            }),
            _ => Config::dbr(0.05),
        };
        let expected = analyze(&toy_problem(), &config).unwrap();
        assert_eq!(parsed, expected, "{method}-{direction}");
    }
}

#[test]
fn output_is_reproducible_and_line_ending_agnostic() {
    let dir = TempDir::new().unwrap();
    let lf = toy_csv(dir.path(), "\n");
    let crlf = toy_csv(dir.path(), "\r\n");
    let a = run(&["analyze", "--input", s(&lf), "--method", "adbh"]);
    let b = run(&["analyze", "--input", s(&lf), "--method", "adbh"]);
    let c = run(&["analyze", "--input", s(&crlf), "--method", "adbh"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn output_file_with_critical_values_and_manifest() {
    let dir = TempDir::new().unwrap();
    let input = toy_csv(dir.path(), "\n");
    let output = dir.path().join("res.csv");
    let out = run(&[
        "analyze",
        "--input",
        s(&input),
        "--output",
        s(&output),
        "--critical-values",
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&output).unwrap().starts_with("index,"));
    let crit = fs::read_to_string(dir.path().join("res.csv.crit.csv")).unwrap();
    assert_eq!(crit.lines().next(), Some("k,tau_k"));
    assert_eq!(crit.lines().count(), 10);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("res.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["method"], "dbh");
    assert_eq!(manifest["input_sha256"][0].as_str().unwrap().len(), 64);
}

#[test]
fn pvalues_with_supports_reproduce_tables() {
    let dir = TempDir::new().unwrap();
    let problem = toy_problem();
    let mut pv = String::from("p\n");
    let mut sup = String::new();
    for (p, support) in problem.raw_pvalues().iter().zip(problem.supports()) {
        pv.push_str(&format!("{p:?}\n"));
        let atoms: Vec<String> = support.atoms().iter().map(|a| format!("{a:?}")).collect();
        sup.push_str(&atoms.join(" "));
        sup.push('\n');
    }
    let pv_path = dir.path().join("p.csv");
    let sup_path = dir.path().join("s.txt");
    fs::write(&pv_path, pv).unwrap();
    fs::write(&sup_path, sup).unwrap();
    let tables = toy_csv(dir.path(), "\n");
    let from_tables = run(&["analyze", "--input", s(&tables)]);
    let from_pvalues = run(&[
        "analyze",
        "--input",
        s(&pv_path),
        "--format",
        "pvalues",
        "--supports",
        s(&sup_path),
    ]);
    assert!(
        from_pvalues.status.success(),
        "{}",
        String::from_utf8_lossy(&from_pvalues.stderr)
    );
    assert_eq!(from_tables.stdout, from_pvalues.stdout);
}

#[test]
fn poisson_and_hg2011_formats() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("count,lambda0\n");
    for (n, l) in POISSON_COUNTS.iter().zip(POISSON_MEANS) {
        text.push_str(&format!("{n},{l}\n"));
    }
    let pois = dir.path().join("pois.csv");
    fs::write(&pois, text).unwrap();
    let out = run(&["analyze", "--input", s(&pois), "--format", "poisson"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).matches(",true").count(), 3);

    let hg = dir.path().join("hg.csv");
    fs::write(
        &hg,
        "drug_id,amnesia_count,other_adverse_count\nA,30,100\nB,1,400\nC,2,300\n",
    )
    .unwrap();
    let out = run(&["analyze", "--input", s(&hg), "--format", "hg2011"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let input = toy_csv(dir.path(), "\n");
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,3,4\n1,2,x,4\n").unwrap();

    assert_eq!(
        run(&["analyze", "--input", s(&empty)]).status.code(),
        Some(2)
    );
    let out = run(&["analyze", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    assert_eq!(
        run(&["analyze", "--input", s(&input), "--lambda", "0.1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["analyze", "--input", s(&input), "--alpha", "1.5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["analyze", "--bogus"]).status.code(), Some(3));
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        run(&["analyze", "--input", s(&missing)]).status.code(),
        Some(4)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn plotdata_orders_transformations() {
    let dir = TempDir::new().unwrap();
    let input = toy_csv(dir.path(), "\n");
    let out = run(&["plotdata", "--input", s(&input), "--what", "xi"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,xi_plain,xi_sd,xi_su"));
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[2], "{line}");
        rows += 1;
    }
    assert!(rows > 9);

    let out = run(&[
        "plotdata",
        "--input",
        s(&input),
        "--what",
        "critical-values",
        "--methods",
        "dbh-sd,dbr",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 10);
}

#[test]
fn validate_passes_and_detects_mutation() {
    let ok = run(&[
        "validate", "--suite", "oracle", "--reps", "30", "--seed", "7",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = run(&[
        "validate",
        "--suite",
        "oracle",
        "--reps",
        "200",
        "--seed",
        "42",
        "--mutate",
        "su-first-crossing",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bench_and_simulate_run() {
    let out = run(&[
        "bench",
        "--sizes",
        "50",
        "--reps",
        "2",
        "--critical-values",
        "on",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).lines().count() >= 2);

    let out = run(&[
        "simulate",
        "--m",
        "20",
        "--reps",
        "20",
        "--row-totals",
        "5,15",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 3);
    assert_eq!(
        run(&["simulate", "--row-totals", "5"]).status.code(),
        Some(3)
    );
}
