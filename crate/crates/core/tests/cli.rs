use std::path::Path;
use std::process::{Command, Output};

fn iwskew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwskew"))
        .args(args)
        .output()
        .unwrap()
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    let o = iwskew(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn oracle_reports_target_risk() {
    let o = iwskew(&["oracle", "--theta", "0.5641896"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let line = stdout
        .lines()
        .find(|l| l.starts_with("target_risk "))
        .unwrap();
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((v - 0.681_690_1).abs() < 1e-6, "{v}");
    assert!(stdout.contains("moment_k3 divergent"), "{stdout}");
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["risk-dist", "--reps", "10", "--sizes", "2", "--seed", "7"];
    run_into(a.path(), &args);
    run_into(b.path(), &args);
    for name in ["riskdist.csv", "riskdist_summary.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    let args = [
        "all",
        "--reps",
        "300",
        "--sizes",
        "2,8",
        "--weight-draws",
        "500",
    ];
    let mut a = args.to_vec();
    a.extend(["--threads", "1"]);
    let mut b = args.to_vec();
    b.extend(["--threads", "4"]);
    run_into(one.path(), &a);
    run_into(four.path(), &b);
    for name in [
        "weights.csv",
        "riskdist.csv",
        "riskdist_summary.csv",
        "modelsel.csv",
        "modelsel_summary.csv",
    ] {
        assert_eq!(read(one.path(), name), read(four.path(), name), "{name}");
    }
}

#[test]
fn invalid_sizes_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = iwskew(&[
        "model-select",
        "--lambda-grid",
        "0:1:0.5",
        "--sizes",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--sizes"));
}

#[test]
fn bad_grid_and_threads_exit_two() {
    assert_eq!(
        iwskew(&["risk-dist", "--lambda-grid", "1:0:0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        iwskew(&["risk-dist", "--threads", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(iwskew(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn golden_model_selection_output() {
    let dir = tempfile::tempdir().unwrap();
    run_into(
        dir.path(),
        &[
            "model-select",
            "--reps",
            "5",
            "--sizes",
            "4",
            "--seed",
            "11",
            "--selection",
            "closed-form",
        ],
    );
    let actual = read(dir.path(), "modelsel.csv");
    let golden = include_str!("golden/modelsel_seed11_n4.csv");
    assert_eq!(actual, golden);
}

#[test]
fn row_counts_and_line_endings() {
    let dir = tempfile::tempdir().unwrap();
    run_into(
        dir.path(),
        &[
            "all",
            "--reps",
            "25",
            "--sizes",
            "2,3,5",
            "--weight-draws",
            "100",
            "--svg",
        ],
    );
    let rd = read(dir.path(), "riskdist.csv");
    assert_eq!(rd.lines().count(), 1 + 25 * 3);
    assert_eq!(read(dir.path(), "weights.csv").lines().count(), 101);
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'), "{}", path.display());
        assert!(text.ends_with('\n'), "{}", path.display());
    }
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "run_meta.json")).unwrap();
    let outputs = meta["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|v| v == "riskdist_hist_n5.svg"));
    assert!(outputs.iter().any(|v| v == "modelsel_box_n2.svg"));
    assert_eq!(meta["config"]["repetitions"], 25);
}
