use std::path::Path;
use std::process::{Command, Output};

use qcosym_core::fastslow::{ScenarioCase, ScenarioConfig};
use qcosym_core::flow::fixed_step_sample_count;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn qcosym(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcosym"))
        .args(args)
        .current_dir(dir)
        .env_remove("QCOSYM_SEED")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn validate_standard_example_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "v.json", r#"{"scenario": "standard-example"}"#);
    let out = qcosym(&["validate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["points"].as_array().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("overall: pass"));
}

#[test]
fn validate_twisted_example_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "v.json", r#"{"scenario": "twisted-example"}"#);
    let out = qcosym(&["validate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn malformed_config_exits_with_two_and_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        "{\n  \"scenario\": {\"case\": \"case-b\",\n  \"eps\": -}\n}",
    );
    let out = qcosym(&["simulate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let cfg = write_config(
        tmp.path(),
        "neg.json",
        r#"{"scenario": {"case": "case-b", "eps": -0.1}}"#,
    );
    let out = qcosym(&["simulate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));

    let out = qcosym(&["simulate", "--config", "missing.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixed_step_simulation_row_count_and_reproducibility() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{FIXTURES}/case_b_rk4.json");
    let a = qcosym(&["simulate", "--config", &cfg, "--out", "a"], tmp.path());
    let b = qcosym(&["simulate", "--config", &cfg, "--out", "b"], tmp.path());
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(b.status.code(), Some(0));
    let fa = std::fs::read(tmp.path().join("a/trajectory.csv")).unwrap();
    let fb = std::fs::read(tmp.path().join("b/trajectory.csv")).unwrap();
    assert_eq!(fa, fb);
    assert!(!fa.contains(&b'\r'));

    let (header, rows) = read_csv(&tmp.path().join("a/trajectory.csv"));
    assert_eq!(header, ["s", "t", "tau", "q", "p", "Q", "P", "I", "J", "H"]);
    let mut sc = ScenarioConfig::builtin(ScenarioCase::CaseB);
    sc.t_max = 20.0;
    sc.integrator = qcosym_core::IntegratorConfig::rk4(0.01, 20.0);
    sc.integrator.record_every = 7;
    assert_eq!(rows.len(), fixed_step_sample_count(&sc.integrator_config()));
    assert_eq!(rows.last().unwrap()[0], 20.0);
}

#[test]
fn csv_values_round_trip_to_the_requested_precision() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.json",
        r#"{"scenario": {"name": "case-b", "t_max": 5}, "output": {"csv_precision": 7, "dir": "o"}}"#,
    );
    let out = qcosym(&["simulate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let mut sc = ScenarioConfig::builtin(ScenarioCase::CaseB);
    sc.t_max = 5.0;
    let run = qcosym_core::fastslow::run_scenario(&sc).unwrap();
    let (_, rows) = read_csv(&tmp.path().join("o/trajectory.csv"));
    assert_eq!(rows.len(), run.trajectory.len());
    for (row, state) in rows.iter().zip(&run.trajectory.states) {
        for (a, b) in row[1..7].iter().zip(state) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-300));
        }
    }
}

#[test]
fn averaged_run_has_decreasing_slow_momentum() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{FIXTURES}/case_b_averaged.json");
    let out = qcosym(&["average", "--config", &cfg, "--svg"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let dir = tmp.path().join("out/case_b_averaged");
    let (header, rows) = read_csv(&dir.join("trajectory.csv"));
    assert_eq!(header, ["s", "tau", "Q", "P", "I"]);
    assert!(rows.windows(2).all(|w| w[1][3] < w[0][3]));
    assert!(dir.join("trajectory.svg").exists());
}

#[test]
fn seed_environment_variable_moves_the_sample_points() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "v.json",
        r#"{"scenario": {"name": "standard-example", "samples": 2}}"#,
    );
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcosym"));
        cmd.args(["validate", "--config", &cfg])
            .current_dir(tmp.path());
        match seed {
            Some(s) => cmd.env("QCOSYM_SEED", s),
            None => cmd.env_remove("QCOSYM_SEED"),
        };
        let out = cmd.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["points"][0]["point"].clone()
    };
    assert_eq!(run(None), run(Some("0")));
    assert_ne!(run(None), run(Some("17")));
}

#[test]
fn brackets_table_lists_canonical_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "b.json",
        r#"{"scenario": {"structure": "standard", "n": 1, "q": 1, "pairs": [["q1", "p1"], ["z1", "q1"]]}}"#,
    );
    let out = qcosym(&["brackets", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("q1") && lines[1].matches("1.00000000000e0").count() == 4);
    assert!(lines[2].starts_with("z1") && lines[2].matches("0.00000000000e0").count() == 4);

    let cfg = write_config(
        tmp.path(),
        "x.json",
        r#"{"scenario": {"pairs": [["q1", "w"]]}}"#,
    );
    assert_eq!(
        qcosym(&["brackets", "--config", &cfg], tmp.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compare_writes_both_trajectories_and_deviations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"scenario": {"name": "case-b", "eps": 0.5}, "integrator": {"dt": 0.01}, "output": {"dir": "c"}}"#,
    );
    let out = qcosym(&["compare", "--config", &cfg], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["ratio"].as_f64().unwrap().is_finite());
    let dir = tmp.path().join("c");
    for f in [
        "full_eps_0.5.csv",
        "averaged_eps_0.5.csv",
        "full_eps_0.25.csv",
        "averaged_eps_0.25.csv",
    ] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let (header, rows) = read_csv(&dir.join("deviation.csv"));
    assert_eq!(header, ["eps", "s", "dQ", "dP"]);
    assert_eq!(rows.len(), 201 + 401);
}
