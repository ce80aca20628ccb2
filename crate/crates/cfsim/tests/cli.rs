//! End-to-end tests of the `cfsim` binary: frozen report bytes, config
//! file handling, flag precedence, output routing, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfsim"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("reports are UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("diagnostics are UTF-8")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cfsim-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

// ---------------------------------------------------------------------
// Golden bytes

#[test]
fn simulate_csv_bytes_are_frozen() {
    let out = cfsim(&[
        "simulate",
        "--protocol",
        "ev",
        "--bomb",
        "live",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let expected = "\
protocol,param_bomb,bob_action,light,p_D1,p_D2,p_bomb,outcome_total\n\
ev,live,block,fock,2.5000000000000000e-1,2.5000000000000011e-1,4.9999999999999989e-1,1.0000000000000000e0\n";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn simulate_json_bytes_are_frozen() {
    let out = cfsim(&["simulate", "--protocol", "noh", "--bob", "block"]);
    assert!(out.status.success());
    let expected = concat!(
        "{\n  \"rows\": [\n",
        "    {\"protocol\": \"noh\", \"param_far_station\": \"absorb\", ",
        "\"param_theta\": \"0.7853981633974483\", \"bob_action\": \"block\", ",
        "\"light\": \"fock\", \"p_D1\": 0.2500000000000001, \"p_D2\": 0.25, ",
        "\"p_DB\": 0.4999999999999999, \"outcome_total\": 1.0}\n",
        "  ]\n}\n",
    );
    assert_eq!(stdout(&out), expected);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = [
        "analyze",
        "--protocol",
        "vaidman",
        "--inner-count",
        "2",
        "--format",
        "csv",
    ];
    let first = cfsim(&args);
    let second = cfsim(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_json_parses_and_keeps_sweep_order() {
    let out = cfsim(&[
        "sweep",
        "--protocol",
        "zeno",
        "--bob",
        "block",
        "--sweep-param",
        "cycles",
        "--sweep-values",
        "8,2,4",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let rows = report["rows"].as_array().expect("rows array");
    let order: Vec<&str> = rows
        .iter()
        .map(|row| row["sweep_value"].as_str().unwrap())
        .collect();
    assert_eq!(order, ["8", "2", "4"], "rows follow the requested order");
    assert!(report["summary"]
        .as_array()
        .expect("summary array")
        .iter()
        .any(|line| line["column"] == "p_DA" && line["trend"] == "mixed"));
}

// ---------------------------------------------------------------------
// Config files and flag precedence

#[test]
fn flags_override_the_config_file() {
    let dir = temp_dir("config");
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        "# zeno baseline\nprotocol = zeno\ncycles = 4\nbob = block\nformat = csv\n",
    )
    .unwrap();
    let from_file = cfsim(&["simulate", "--config", path.to_str().unwrap()]);
    let overridden = cfsim(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--cycles",
        "9",
    ]);
    assert!(from_file.status.success() && overridden.status.success());
    assert!(stdout(&from_file).contains("zeno,4,block"));
    assert!(stdout(&overridden).contains("zeno,9,block"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_lands_under_the_output_dir_env() {
    let dir = temp_dir("outdir");
    let out = Command::new(env!("CARGO_BIN_EXE_cfsim"))
        .args([
            "simulate",
            "--protocol",
            "ev",
            "--format",
            "csv",
            "--output",
            "reports/ev.csv",
        ])
        .env("CFSIM_OUTPUT_DIR", &dir)
        .output()
        .expect("binary launches");
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.join("reports/ev.csv")).expect("report file");
    assert!(written.starts_with("protocol,param_bomb,bob_action"));
    std::fs::remove_dir_all(&dir).ok();
}

// ---------------------------------------------------------------------
// Exit codes

#[test]
fn usage_errors_exit_2() {
    let unknown_key = cfsim(&["simulate", "--protocol", "ev", "--set", "warp=9"]);
    assert_eq!(unknown_key.status.code(), Some(2));
    assert!(stderr(&unknown_key).contains("warp"));

    let bad_param = cfsim(&[
        "simulate",
        "--protocol",
        "salih",
        "--outer",
        "0",
        "--inner",
        "2",
    ]);
    assert_eq!(bad_param.status.code(), Some(2));

    let missing_cycles = cfsim(&["simulate", "--protocol", "zeno"]);
    assert_eq!(missing_cycles.status.code(), Some(2));
    assert!(stderr(&missing_cycles).contains("cycles"));

    let sweep_without_param = cfsim(&["sweep", "--protocol", "ev"]);
    assert_eq!(sweep_without_param.status.code(), Some(2));
}

#[test]
fn resource_guard_exits_3() {
    let out = cfsim(&[
        "analyze",
        "--protocol",
        "zeno",
        "--cycles",
        "25",
        "--bob",
        "block",
        "--analyses",
        "histories",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("histories"));
}

#[test]
fn unconverged_tune_exits_4_with_a_report() {
    // Every slot pinned at uniform angles: one evaluation, no freedom,
    // residual 5/64. The report still prints; the exit code tells.
    let mut args = vec!["tune", "--free", "", "--format", "csv"];
    let fixes = [
        "--fix",
        "theta_0=0.7853981633974483",
        "--fix",
        "theta_f=0.7853981633974483",
        "--fix",
        "inner1_entry=0.7853981633974483",
        "--fix",
        "inner1_exit=0.7853981633974483",
        "--fix",
        "inner2_entry=0.7853981633974483",
        "--fix",
        "inner2_exit=0.7853981633974483",
    ];
    args.extend_from_slice(&fixes);
    let out = cfsim(&args);
    assert_eq!(out.status.code(), Some(4));
    let report = stdout(&out);
    assert!(report.contains("converged"));
    assert!(report.contains("false"));
}

#[test]
fn solved_tune_exits_0() {
    let out = cfsim(&["tune", "--seeds", "1.3,0.6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("true"));
}
