use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyode"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn check(spec: &str, theorem: &str) -> Output {
    run(&[
        "check",
        "--input",
        fixture(spec).to_str().unwrap(),
        "--theorem",
        theorem,
    ])
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let o = check("ex52.json", "T5.5");
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"], "Satisfied");
    let o = check("negative_square.json", "T5.1");
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let first = &r["conditions"][0];
    assert_eq!(first["label"], "1⁰");
    assert_eq!(first["status"], "Violated");
    let o = check("ex53.json", "T3.2");
    assert_eq!(code(&o), 0);
    // no comparison functions in the spec
    let o = check("linear_relax.json", "T3.1");
    assert_eq!(code(&o), 2);
}

#[test]
fn ex51_reports_the_failing_hypotheses() {
    let o = check("ex51.json", "C5.1");
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let c = r["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == "a_0 ≤ 0")
        .unwrap();
    assert_eq!(c["status"], "Violated");
    let t = c["witness_t"].as_f64().unwrap();
    assert!(-(10.0 * t).sin() > 0.0, "witness {t}");
}

#[test]
fn input_errors_exit_3() {
    let o = check("ex51.json", "T9.9");
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown theorem"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 1, "t0": 0, "T": 1, "coefficients": {"0": "sin("}}"#).unwrap();
    let o = run(&["check", "--input", bad.to_str().unwrap(), "--theorem", "T4.1"]);
    assert_eq!(code(&o), 3);
    let o = run(&["check", "--input", "/nonexistent.json", "--theorem", "T4.1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn overrides_reach_the_report() {
    let o = run(&[
        "check",
        "--input",
        fixture("ex52.json").to_str().unwrap(),
        "--theorem",
        "T5.4",
        "--c",
        "0.25",
        "--grid",
        "256",
    ]);
    let r = json(&o);
    assert_eq!(r["params"]["c"], 0.25);
    assert_eq!(r["grid"], 256);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = check("ex52.json", "T4.7");
    let b = check("ex52.json", "T4.7");
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "check",
        "--input",
        fixture("bracket.json").to_str().unwrap(),
        "--theorem",
        "C3.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["theorem"], "C3.2");
}

fn read_csv(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,y"));
    lines
        .map(|l| {
            let (t, y) = l.split_once(',').unwrap();
            (t.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn integrate_matches_tanh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("y.csv");
    let o = run(&[
        "integrate",
        "--input",
        fixture("bracket.json").to_str().unwrap(),
        "--y0",
        "0",
        "--samples",
        "201",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["status"], "ReachedEnd");
    let rows = read_csv(&fs::read_to_string(out).unwrap());
    assert_eq!(rows.len(), 201);
    for (t, y) in rows {
        assert!((y - t.tanh()).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn integrate_reports_escape() {
    let o = run(&[
        "integrate",
        "--input",
        fixture("square.json").to_str().unwrap(),
        "--y0",
        "1",
    ]);
    assert_eq!(code(&o), 2);
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    let t = summary["t_escape"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 1e-3);
}

#[test]
fn integrate_zero_equation_is_constant() {
    let o = run(&[
        "integrate",
        "--input",
        fixture("zero.json").to_str().unwrap(),
        "--y0",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|&(_, y)| y == 3.0));
}

#[test]
fn closed_linear_relaxation() {
    let o = run(&[
        "closed",
        "--input",
        fixture("linear_relax.json").to_str().unwrap(),
        "--bracket",
        "-5",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let g = r["solutions"][0]["gamma_star"].as_f64().unwrap();
    assert!((g - 1.0).abs() < 1e-10);
}

#[test]
fn closed_scan_finds_both_signs_on_ex51() {
    let o = run(&[
        "closed",
        "--input",
        fixture("ex51.json").to_str().unwrap(),
        "--scan",
        "-3",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let g: Vec<f64> = r["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["gamma_star"].as_f64().unwrap())
        .collect();
    assert!(g.len() >= 2);
    assert!(g.iter().any(|&v| v < 0.0) && g.iter().any(|&v| v > 0.0), "{g:?}");
}

#[test]
fn closed_scan_with_no_survivors_exits_2() {
    let o = run(&[
        "closed",
        "--input",
        fixture("escape.json").to_str().unwrap(),
        "--scan",
        "-5",
        "5",
        "--probes",
        "16",
    ]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["solutions"].as_array().unwrap().len(), 0);
    assert_eq!(r["escaped"], 16);
}

#[test]
fn closed_sidecar_and_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.json");
    let o = run(&[
        "closed",
        "--input",
        fixture("ex53.json").to_str().unwrap(),
        "--bracket",
        "-1",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&fs::read_to_string(dir.path().join("closed.csv")).unwrap());
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    assert!((first.1 - last.1).abs() < 1e-8);

    let o = run(&[
        "closed",
        "--input",
        fixture("ex53.json").to_str().unwrap(),
        "--bracket",
        "-1",
        "1",
        "--embed-trajectory",
    ]);
    let r = json(&o);
    assert!(r["solutions"][0]["trajectory"].as_array().unwrap().len() > 2);
}

#[test]
fn closed_bracket_from_theorem() {
    let o = run(&[
        "closed",
        "--input",
        fixture("ex52.json").to_str().unwrap(),
        "--bracket-from",
        "T5.5",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["solutions"][0]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn verify_examples_list_and_run() {
    let o = run(&["verify-examples", "--list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ex51-scan") && text.contains("ex52.json"));
    let o = run(&["verify-examples"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn verify_examples_names_a_tampered_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for entry in fs::read_dir(&src).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let mut m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    let cases: Vec<serde_json::Value> = m["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["kind"] == "check" || c["kind"] == "integrate")
        .cloned()
        .collect();
    m["cases"] = serde_json::Value::Array(cases);
    for c in m["cases"].as_array_mut().unwrap() {
        if c["name"] == "bracket-tanh" {
            c["expect_y_end"] = serde_json::json!(0.5);
        }
    }
    fs::write(dir.path().join("manifest.json"), m.to_string()).unwrap();
    let o = run(&["verify-examples", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bracket-tanh"));
}
