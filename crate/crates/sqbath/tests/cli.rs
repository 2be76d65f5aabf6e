//! End-to-end tests of the `sqbath` binary: subcommands, exit codes,
//! output files, and determinism across reruns and thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn sqbath() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sqbath"));
    // Isolate from the ambient environment so tests control parallelism.
    cmd.env_remove("SQBATH_THREADS");
    cmd
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn sqbath");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(cmd: &mut Command) -> (i32, String) {
    let out = cmd.output().expect("spawn sqbath");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Summary text with the (only) volatile line removed.
fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|line| !line.contains("timestamp_unix_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn list_names_every_experiment() {
    let out = run_ok(sqbath().arg("list"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in [
        "steady-sweep",
        "absorption",
        "fluorescence",
        "eigenscan",
        "crossdecay",
        "bloch-demo",
    ] {
        assert!(stdout.contains(name), "list output missing '{name}'");
    }
    assert!(stdout.contains("drive.omega_d"), "defaults missing");
}

#[test]
fn run_by_name_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        sqbath()
            .args(["run", "eigenscan", "--set", "points=3"])
            .args(["--outdir", dir.path().to_str().unwrap()]),
    );

    let csv = std::fs::read_to_string(dir.path().join("eigenscan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# experiment=eigenscan version={}", env!("CARGO_PKG_VERSION"))
    );
    let header = lines.next().unwrap();
    assert!(header.starts_with("omega_over_gamma_up,"), "got: {header}");
    assert_eq!(lines.count(), 3, "one data row per scan point");

    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("eigenscan.summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["experiment"], "eigenscan");
    assert_eq!(summary["spec"]["points"], "3");
    assert!(summary["timestamp_unix_seconds"].is_string());
}

#[test]
fn config_file_reruns_are_byte_identical_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scan.conf");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    std::fs::write(
        &config_path,
        "# small eigenvalue scan\n\
         experiment = eigenscan\n\
         points = 3\n\
         n = 0.2\n\
         drive.omega_d = 7.1   # drive detuning splitting in gamma units\n",
    )
    .unwrap();

    for out in [&out_a, &out_b] {
        run_ok(
            sqbath()
                .args(["run", config_path.to_str().unwrap()])
                .args(["--outdir", out.to_str().unwrap()]),
        );
    }

    let csv_a = std::fs::read(out_a.join("eigenscan.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("eigenscan.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "table bytes must reproduce exactly");

    let sum_a = std::fs::read_to_string(out_a.join("eigenscan.summary.json")).unwrap();
    let sum_b = std::fs::read_to_string(out_b.join("eigenscan.summary.json")).unwrap();
    assert_eq!(strip_timestamp(&sum_a), strip_timestamp(&sum_b));
}

#[test]
fn thread_count_does_not_change_output_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, Option<&str>, Option<&str>); 3] = [
        ("serial", Some("1"), None),
        ("flag", Some("3"), None),
        ("env", None, Some("3")),
    ];
    for (label, flag, env) in cases {
        let out = dir.path().join(label);
        let mut cmd = sqbath();
        cmd.args(["run", "eigenscan", "--set", "points=4"])
            .args(["--outdir", out.to_str().unwrap()]);
        if let Some(n) = flag {
            cmd.args(["--threads", n]);
        }
        if let Some(n) = env {
            cmd.env("SQBATH_THREADS", n);
        }
        run_ok(&mut cmd);
    }
    let reference = std::fs::read(dir.path().join("serial/eigenscan.csv")).unwrap();
    for label in ["flag", "env"] {
        let bytes = std::fs::read(dir.path().join(label).join("eigenscan.csv")).unwrap();
        assert_eq!(bytes, reference, "'{label}' differs from serial run");
    }
}

#[test]
fn unknown_key_fails_with_exit_two_naming_the_key() {
    let (code, stderr) = exit_code(sqbath().args(["run", "eigenscan", "--set", "nonsense=1"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("nonsense"), "stderr: {stderr}");
    assert!(stderr.contains("known keys"), "stderr: {stderr}");
}

#[test]
fn invalid_parameter_value_exits_two() {
    let (code, stderr) = exit_code(sqbath().args(["run", "fluorescence", "--set", "n=-1"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("-1"), "stderr: {stderr}");
}

#[test]
fn validate_checks_without_computing_or_writing() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.conf");
    std::fs::write(&good, "experiment=fluorescence\nn=0.2\n").unwrap();
    let out = run_ok(sqbath().args(["validate", good.to_str().unwrap()]));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(leftovers.len(), 1, "validate must not write outputs");

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "experiment=fluorescence\nn=-0.5\n").unwrap();
    let (code, stderr) = exit_code(sqbath().args(["validate", bad.to_str().unwrap()]));
    assert_eq!(code, 2);
    assert!(stderr.contains("-0.5"), "stderr: {stderr}");

    let (code, stderr) = exit_code(sqbath().args(["validate", "/no/such/file.conf"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot read"), "stderr: {stderr}");
}

#[test]
fn unwritable_output_path_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "plain file\n").unwrap();
    let outdir = blocker.join("sub"); // a path through a regular file
    let (code, stderr) = exit_code(
        sqbath()
            .args(["run", "eigenscan", "--set", "points=3"])
            .args(["--outdir", outdir.to_str().unwrap()]),
    );
    assert_eq!(code, 3, "stderr: {stderr}");
}

#[test]
fn json_lines_format_writes_metadata_then_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        sqbath()
            .args(["run", "eigenscan", "--set", "points=3"])
            .args(["--format", "json-lines"])
            .args(["--outdir", dir.path().to_str().unwrap()]),
    );
    let text = std::fs::read_to_string(dir.path().join("eigenscan.jsonl")).unwrap();
    let mut lines = text.lines();
    let meta: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(meta["experiment"], "eigenscan");
    assert!(meta["columns"].as_array().unwrap().len() >= 8);
    let row: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(
        row.as_array().unwrap().len(),
        meta["columns"].as_array().unwrap().len()
    );
    assert!(Path::new(&dir.path().join("eigenscan.summary.json")).is_file());
}

#[test]
fn seed_flag_selects_the_trajectory_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (label, seed) in [("s1", "7"), ("s1b", "7"), ("s2", "8")] {
        let out = dir.path().join(label);
        run_ok(
            sqbath()
                .args(["run", "bloch-demo"])
                .args(["--set", "n_traj=40", "--set", "t_max=0.2", "--set", "samples=3"])
                .args(["--seed", seed])
                .args(["--outdir", out.to_str().unwrap()]),
        );
        runs.push(std::fs::read(out.join("bloch-demo.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1], "same seed must reproduce bytes");
    assert_ne!(runs[0], runs[2], "different seed must change the ensemble");
}

#[test]
fn help_exits_zero_and_missing_args_exit_two() {
    let (code, _) = exit_code(sqbath().arg("--help"));
    assert_eq!(code, 0);
    let (code, _) = exit_code(sqbath().arg("run"));
    assert_eq!(code, 2);
    let (code, _) = exit_code(sqbath().arg("frobnicate"));
    assert_eq!(code, 2);
}
