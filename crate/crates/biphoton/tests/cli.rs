//! End-to-end tests of the `biphoton` binary: flag/file/environment
//! precedence, exit codes, golden CSV schemas, and byte-identical
//! reproduction of sampled reports.

use std::path::Path;
use std::process::{Command, Output};

use biphoton::cli::report::{Report, Rows};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biphoton"));
    // isolate from the ambient environment
    cmd.env_remove("BIPHOTON_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn parse_report(output: &Output) -> Report {
    serde_json::from_str(&stdout_str(output)).expect("valid report json")
}

#[test]
fn analytic_json_has_quarter_probability() {
    let output = run(&[
        "analytic",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0.7853981633974483",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    match &report.rows {
        Rows::Joint(row) => assert!((row.p_pp - 0.25).abs() < 1e-12),
        other => panic!("unexpected rows {other:?}"),
    }
}

#[test]
fn json_reports_roundtrip_byte_identically() {
    let output = run(&[
        "simulate",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0.3",
        "--trials",
        "5000",
        "--seed",
        "123",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_str(&output);
    let report: Report = serde_json::from_str(&text).expect("valid report json");
    assert_eq!(report.to_json(), text);
}

#[test]
fn golden_csv_analytic() {
    let output = run(&[
        "analytic",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0.7853981633974483",
        "--format",
        "csv",
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_str(&output), include_str!("golden/analytic_phi_plus.csv"));
}

#[test]
fn golden_csv_verify_rules() {
    let output = run(&["verify-rules", "--format", "csv"]);
    assert_eq!(output.status.code(), Some(0), "psi discrepancies flag, not fail");
    assert_eq!(stdout_str(&output), include_str!("golden/verify_rules.csv"));
}

#[test]
fn golden_csv_simulate() {
    let output = run(&[
        "simulate",
        "--model",
        "local-circular",
        "--source",
        "circular-pair",
        "--theta-a",
        "0",
        "--theta-b",
        "0",
        "--trials",
        "10000",
        "--seed",
        "7",
        "--format",
        "csv",
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        stdout_str(&output),
        include_str!("golden/simulate_local_circular.csv")
    );
}

#[test]
fn missing_angle_is_a_usage_error() {
    let output = run(&[
        "analytic",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("theta-b"), "stderr: {stderr}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let output = run(&["analytic", "--frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_model_is_a_usage_error() {
    let output = run(&[
        "analytic",
        "--model",
        "pilot-wave",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown model"));
}

#[test]
fn incompatible_model_source_is_a_usage_error() {
    let output = run(&[
        "analytic",
        "--model",
        "local-circular",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn config_file_provides_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(
        &path,
        "model = standard-qm\nsource = phi-plus\ntheta-a = 0.0\ntheta-b = 0.0\ntrials = 1000\nseed = 3\n",
    )
    .unwrap();
    let output = bin()
        .args([
            "simulate",
            "--config",
            path.to_str().unwrap(),
            "--trials",
            "5000",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    assert_eq!(report.meta.trials, Some(5000), "flag beats file");
    assert_eq!(report.meta.seed, Some(3), "file beats default");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "model = standard-qm\nfrobnicate = yes\n").unwrap();
    let output = bin()
        .args([
            "analytic",
            "--config",
            path.to_str().unwrap(),
            "--source",
            "phi-plus",
            "--theta-a",
            "0",
            "--theta-b",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("frobnicate"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let output = run(&[
        "analytic",
        "--config",
        "/definitely/not/here.conf",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn environment_seed_is_the_default_override() {
    let args = [
        "simulate",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0.2",
        "--trials",
        "1000",
        "--format",
        "json",
    ];
    let output = bin().args(args).env("BIPHOTON_SEED", "99").output().unwrap();
    assert_eq!(parse_report(&output).meta.seed, Some(99));

    let output = bin()
        .args(args)
        .args(["--seed", "5"])
        .env("BIPHOTON_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(parse_report(&output).meta.seed, Some(5), "flag beats env");

    let output = bin()
        .args(args)
        .env("BIPHOTON_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn degrees_switch_converts_inputs_but_reports_radians() {
    let output = run(&[
        "analytic",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "45",
        "--degrees",
        "--format",
        "json",
    ]);
    let report = parse_report(&output);
    let theta_b = report.meta.theta_b.unwrap();
    assert!((theta_b - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    match &report.rows {
        Rows::Joint(row) => assert!((row.p_pp - 0.25).abs() < 1e-12),
        other => panic!("unexpected rows {other:?}"),
    }
}

#[test]
fn chsh_local_circular_stays_classical() {
    let output = run(&[
        "chsh",
        "--model",
        "local-circular",
        "--source",
        "circular-pair",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    match &report.rows {
        Rows::Chsh(row) => assert!(row.s.abs() < 1e-12),
        other => panic!("unexpected rows {other:?}"),
    }
    assert!(report.notes.iter().any(|n| n.contains("within the classical bound")));
}

#[test]
fn verify_rules_flags_psi_states_without_failing() {
    let output = run(&["verify-rules", "--format", "json"]);
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    match &report.rows {
        Rows::Rules(rows) => {
            let flags: Vec<(String, bool)> = rows
                .iter()
                .map(|r| (r.state.clone(), r.agrees))
                .collect();
            assert_eq!(
                flags,
                vec![
                    ("phi+".to_string(), true),
                    ("phi-".to_string(), true),
                    ("psi+".to_string(), false),
                    ("psi-".to_string(), false),
                ]
            );
        }
        other => panic!("unexpected rows {other:?}"),
    }
}

#[test]
fn compare_passes_equivalence_and_divergence_checks() {
    let output = run(&[
        "compare",
        "--grid-points",
        "12",
        "--trials",
        "20000",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    assert!(report.all_checks_passed());
}

#[test]
fn experiment_b_empirical_zero_cells_stay_empty() {
    let output = run(&[
        "experiment-b",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--trials",
        "20000",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = parse_report(&output);
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "zero-cells-empty" && c.passed));
}

#[test]
fn sampled_reports_reproduce_across_thread_counts() {
    let args = [
        "simulate",
        "--model",
        "local-circular",
        "--source",
        "circular-pair",
        "--theta-a",
        "0.1",
        "--theta-b",
        "0.9",
        "--trials",
        "50000",
        "--seed",
        "31415",
        "--format",
        "csv",
    ];
    let narrow = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let wide = bin().args(args).env("RAYON_NUM_THREADS", "16").output().unwrap();
    let rerun = bin().args(args).env("RAYON_NUM_THREADS", "16").output().unwrap();
    assert_eq!(narrow.status.code(), Some(0));
    assert_eq!(narrow.stdout, wide.stdout, "thread count leaked into the report");
    assert_eq!(wide.stdout, rerun.stdout, "same seed must reproduce bytes");
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = [
        "analytic",
        "--model",
        "correlated-rule",
        "--source",
        "circular-pair",
        "--theta-a",
        "0",
        "--theta-b",
        "0.5",
        "--format",
        "csv",
    ];
    let to_file = bin()
        .args(args)
        .args(["--output", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = run(&args);
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        stdout_str(&to_stdout)
    );
}

#[test]
fn unwritable_output_path_exits_three() {
    let output = run(&[
        "analytic",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--theta-b",
        "0",
        "--output",
        "/nonexistent-dir/report.csv",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn scan_csv_has_the_documented_header() {
    let output = run(&[
        "scan",
        "--model",
        "standard-qm",
        "--source",
        "phi-plus",
        "--theta-a",
        "0",
        "--grid",
        "0:1.5707963267948966:5",
        "--format",
        "csv",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_str(&output);
    assert!(text.contains("theta_b,p_pp,p_pa,p_ap,p_aa,freq_pp,ci_low,ci_high\n"));
    // analytic-only scans leave the overlay columns empty
    assert!(text.lines().any(|l| l.ends_with(",,,")));
}

#[test]
fn help_exits_zero() {
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout_str(&output).contains("experiment-b"));
}

#[test]
fn golden_files_exist_alongside_this_test() {
    // a guard against renaming the golden directory without updating includes
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    assert!(dir.join("analytic_phi_plus.csv").exists());
    assert!(dir.join("verify_rules.csv").exists());
    assert!(dir.join("simulate_local_circular.csv").exists());
}
