use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trustrisk_core::collector::Normalized;
use trustrisk_core::report::{parse_breakdowns_json, parse_report_csv, GridResult};
use trustrisk_core::Band;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn trustrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustrisk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reference_corpus_reproduces_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = trustrisk(&[
        "assess",
        "--input",
        s(&fixture("reference/corpus.csv")),
        "--histories",
        s(&fixture("reference/histories.csv")),
        "--output",
        s(&report),
        "--assessed-at",
        "2024-03-01T12:00:00Z",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_report_csv(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r.sample, "1");
    assert!((r.publisher_risk - 0.1930).abs() < 1e-4);
    assert!((r.user_risk - 0.6503).abs() < 1e-4);
    assert!((r.final_risk - 0.39103464716105596).abs() < 1e-11);
    assert_eq!(r.final_risk_penalized, r.final_risk);
    assert_eq!(r.band, Band::Moderate);
    assert!(r.segments_defaulted.is_empty());
    let errors = fs::read_to_string(dir.path().join("report.csv.errors.csv")).unwrap();
    assert_eq!(errors, "line,sample,field,message\n");
}

#[test]
fn assess_is_idempotent_without_explicit_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = trustrisk(&[
            "assess",
            "--input",
            s(&fixture("reference/corpus.csv")),
            "--histories",
            s(&fixture("reference/histories.csv")),
            "--output",
            s(&path),
            "--format",
            "json",
        ]);
        assert_eq!(code(&out), 0);
        fs::read(path).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    let parsed = parse_breakdowns_json(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(parsed[0].developer_weight, 1.0 / 2003.0);
}

#[test]
fn all_malformed_rows_fail_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.csv");
    fs::write(
        &corpus,
        "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,Downloads,\
Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,Code Coverage,Context
1,304,W,Z,2018,Java,0.08,3,3.5,1,2,3,1,0.5,0.2
2,304,W,Z,2018,Java,0.08,3,10,1,2,3,1,1.5,0.2
3,304,W,Z,2018,Java,0.08,3,10,1,2,3,1,0.5,0.7
",
    )
    .unwrap();
    let report = dir.path().join("out.csv");
    let out = trustrisk(&["assess", "--input", s(&corpus), "--output", s(&report)]);
    assert_eq!(code(&out), 1);
    let body = fs::read_to_string(&report).unwrap();
    assert_eq!(body.lines().count(), 1, "header only: {body}");
    let errors = fs::read_to_string(dir.path().join("out.csv.errors.csv")).unwrap();
    let lines: Vec<&str> = errors.lines().collect();
    assert_eq!(lines.len(), 4, "{errors}");
    assert!(lines[1].starts_with("2,1,Downloads,"));
    assert!(lines[2].contains("coverage out of range"));
    assert!(lines[3].contains("unknown context"));
}

#[test]
fn partial_failure_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mixed.csv");
    let good = fs::read_to_string(fixture("reference/corpus.csv")).unwrap();
    fs::write(
        &corpus,
        format!("{good}2,1,W,Z,2018,Java,0.1,1,1,1,1,1,1,2.0,0.2\n"),
    )
    .unwrap();
    let report = dir.path().join("out.csv");
    let out = trustrisk(&["assess", "--input", s(&corpus), "--output", s(&report)]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&report).unwrap().lines().count(), 2);
}

#[test]
fn schema_mismatch_is_a_data_failure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.csv");
    fs::write(&corpus, "id,name\n1,x\n").unwrap();
    let out = trustrisk(&[
        "assess",
        "--input",
        s(&corpus),
        "--output",
        s(&dir.path().join("o")),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Sample"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("reference/corpus.csv");
    let report = dir.path().join("o.csv");
    assert_eq!(code(&trustrisk(&["assess", "--input", s(&corpus)])), 2);
    assert_eq!(code(&trustrisk(&["nonsense"])), 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        code(&trustrisk(&[
            "assess",
            "--input",
            s(&missing),
            "--output",
            s(&report)
        ])),
        2
    );
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"band_thresholds": [0.5, 0.4, 0.9]}"#).unwrap();
    let out = trustrisk(&[
        "assess",
        "--input",
        s(&corpus),
        "--config",
        s(&config),
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
    fs::write(&config, r#"{"penalty_treshold": 0.4}"#).unwrap();
    let out = trustrisk(&[
        "assess",
        "--input",
        s(&corpus),
        "--config",
        s(&config),
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 2);
    let out = trustrisk(&["assess", "--input", s(&corpus), "--output", s(&corpus)]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        code(&trustrisk(&[
            "generate",
            "--count",
            "0",
            "--seed",
            "1",
            "--output",
            s(&report)
        ])),
        2
    );
}

#[test]
fn config_file_changes_the_band() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"band_thresholds": [0.1, 0.2, 0.3]}"#).unwrap();
    let report = dir.path().join("o.csv");
    let out = trustrisk(&[
        "assess",
        "--input",
        s(&fixture("reference/corpus.csv")),
        "--histories",
        s(&fixture("reference/histories.csv")),
        "--config",
        s(&config),
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 0);
    let rows = parse_report_csv(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rows[0].band, Band::Critical);
}

#[test]
fn generate_is_deterministic_and_reingests_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = trustrisk(&[
            "generate",
            "--count",
            "500",
            "--seed",
            "42",
            "--output",
            s(p),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 501);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["count"], 500);

    let report = dir.path().join("r.csv");
    let out = trustrisk(&["assess", "--input", s(&a), "--output", s(&report)]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&report).unwrap().lines().count(), 501);
    let errors = fs::read_to_string(dir.path().join("r.csv.errors.csv")).unwrap();
    assert_eq!(errors.lines().count(), 1, "{errors}");
}

#[test]
fn generate_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.csv");
    assert_eq!(
        code(&trustrisk(&[
            "generate",
            "--count",
            "1",
            "--seed",
            "9",
            "--output",
            s(&p)
        ])),
        0
    );
    assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 2);
}

fn grid(spec: &str) -> (i32, Option<GridResult>) {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("grid.csv");
    let out = trustrisk(&[
        "grid",
        "--spec",
        s(&fixture(spec)),
        "--record",
        s(&fixture("reference/inputs.json")),
        "--output",
        s(&out_path),
    ]);
    let parsed = fs::read_to_string(&out_path)
        .ok()
        .map(|t| GridResult::from_csv(&t).unwrap());
    (code(&out), parsed)
}

#[test]
fn grid_developer_weight_is_monotone() {
    let (status, g) = grid("grids/developer_weight.json");
    assert_eq!(status, 0);
    let g = g.unwrap();
    assert!(g.rows() >= 20 && g.cols() >= 20);
    for row in &g.cells {
        assert!(row.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn grid_penalty_grows_with_unresolved_share() {
    let (status, g) = grid("grids/penalty.json");
    assert_eq!(status, 0);
    let g = g.unwrap();
    assert_eq!(g.output, "penalty");
    for row in &g.cells {
        assert!(row.windows(2).all(|w| w[1] >= w[0]), "{row:?}");
    }
}

#[test]
fn grid_single_cell() {
    let (status, g) = grid("grids/single.json");
    assert_eq!(status, 0);
    let g = g.unwrap();
    assert_eq!((g.rows(), g.cols()), (1, 1));
    assert!((g.cells[0][0] - 0.39103464716105596).abs() < 1e-11);
}

#[test]
fn grid_unknown_parameter_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"x":{"parameter":"stars","values":[1]},"y":{"parameter":"forks","values":[1]},"output":"penalty"}"#,
    )
    .unwrap();
    let out = trustrisk(&[
        "grid",
        "--spec",
        s(&spec),
        "--record",
        s(&fixture("reference/inputs.json")),
        "--output",
        s(&dir.path().join("g.csv")),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stars"));
}

#[test]
fn self_test_passes_all_six() {
    let out = trustrisk(&["validate", "--self-test"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        6,
        "{text}"
    );
}

#[test]
fn validate_reports_hard_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.csv");
    let good = fs::read_to_string(fixture("reference/corpus.csv")).unwrap();
    fs::write(
        &corpus,
        format!("{good}2,1,W,Z,2018,Java,0.1,1,1,1,1,1,1,2.0,0.2\n"),
    )
    .unwrap();
    let out = trustrisk(&["validate", "--input", s(&corpus)]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("3,2,Code Coverage,\"coverage out of range: 2 not in [0, 1]\""),
        "{text}"
    );
    let out = trustrisk(&["validate", "--input", s(&fixture("reference/corpus.csv"))]);
    assert_eq!(code(&out), 0);
}

#[test]
fn normalize_matches_golden_records() {
    for (name, context) in [("code_host", "security"), ("package_registry", "other")] {
        let dir = tempfile::tempdir().unwrap();
        let out_path = dir.path().join("n.json");
        let out = trustrisk(&[
            "normalize",
            "--input",
            s(&fixture(&format!("snapshots/{name}.json"))),
            "--context",
            context,
            "--output",
            s(&out_path),
        ]);
        assert_eq!(code(&out), 0);
        let got: Normalized = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
        let want: Normalized = serde_json::from_str(
            &fs::read_to_string(fixture(&format!("snapshots/golden/{name}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn normalize_unknown_context_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustrisk(&[
        "normalize",
        "--input",
        s(&fixture("snapshots/code_host.json")),
        "--context",
        "gaming",
        "--output",
        s(&dir.path().join("n.json")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn snapshot_assess_scores_each_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("s.json");
    let out = trustrisk(&[
        "snapshot-assess",
        "--input",
        s(&fixture("snapshots/code_host.json")),
        s(&fixture("snapshots/package_registry.json")),
        "--context",
        "automation",
        "--format",
        "json",
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let b = parse_breakdowns_json(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(b.len(), 2);
    assert_eq!(b[0].software_id, "example-org/tiny-http");
    assert_eq!(b[0].context_weight, 0.3);
    assert_eq!(b[0].assessed_at.to_rfc3339(), "2024-06-30T12:00:00+00:00");
}

#[test]
fn truncated_snapshot_is_a_data_failure() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("t.json");
    let text = fs::read_to_string(fixture("snapshots/code_host.json")).unwrap();
    fs::write(&snap, &text[..text.len() / 2]).unwrap();
    let out = trustrisk(&[
        "normalize",
        "--input",
        s(&snap),
        "--context",
        "other",
        "--output",
        s(&dir.path().join("n")),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));
}
