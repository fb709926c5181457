//! End-to-end behavior of the `eamine` binary: artifact selection per
//! subcommand, exit codes, and configuration resolution.

use std::collections::BTreeSet;
use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn netinvm_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/netinvm/config.toml")
}

fn eamine<I, S>(args: I) -> Command
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eamine"));
    cmd.args(args);
    cmd
}

fn run_in(out: &Path, subcommand: &str) -> Output {
    let mut cmd = eamine(["--config".as_ref(), netinvm_config().as_os_str()]);
    cmd.arg("--out").arg(out).arg(subcommand);
    cmd.output().unwrap()
}

fn file_names(dir: &Path) -> BTreeSet<String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect()
}

fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run_in(tmp.path(), "run");
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        file_names(tmp.path()),
        names(&[
            "netinvm.archimate.xml",
            "netinvm.dot",
            "netinvm.report.md",
            "netinvm.report.json",
            "netinvm.store.jsonl",
        ])
    );
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.matches("wrote ").count(), 5);
    assert!(stdout.contains("model: "));
    assert!(stdout.contains("finding(s): "));
}

#[test]
fn ingest_writes_the_snapshot_only() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run_in(tmp.path(), "ingest");
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(file_names(tmp.path()), names(&["netinvm.store.jsonl"]));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.matches("ingested ").count(), 5, "one line per source");
}

#[test]
fn build_prints_statistics_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never-created");
    let output = run_in(&out, "build");
    assert_eq!(output.status.code(), Some(0));
    assert!(!out.exists(), "build must not touch disk");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("element(s)"));
    assert!(stdout.contains("dummy element(s)"));
}

#[test]
fn transform_prints_accounting_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never-created");
    let output = run_in(&out, "transform");
    assert_eq!(output.status.code(), Some(0));
    assert!(!out.exists());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("target archimate-3:"));
    assert!(stdout.contains("change log:"));
}

#[test]
fn export_writes_model_and_graph_only() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run_in(tmp.path(), "export");
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        file_names(tmp.path()),
        names(&["netinvm.archimate.xml", "netinvm.dot"])
    );
}

#[test]
fn report_writes_reports_only() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run_in(tmp.path(), "report");
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        file_names(tmp.path()),
        names(&["netinvm.report.md", "netinvm.report.json"])
    );
}

#[test]
fn strict_fails_on_warning_findings_after_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cmd = eamine(["--config".as_ref(), netinvm_config().as_os_str()]);
    cmd.arg("--out").arg(tmp.path()).args(["--strict", "run"]);
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("strict: failing on 7 warning finding(s)"));
    assert_eq!(file_names(tmp.path()).len(), 5, "artifacts land before the verdict");
}

#[test]
fn target_flag_overrides_the_configured_framework() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cmd = eamine(["--config".as_ref(), netinvm_config().as_os_str()]);
    cmd.arg("--out").arg(tmp.path()).args(["--target", "naf-lite", "run"]);
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        file_names(tmp.path()),
        names(&[
            "netinvm.naf-lite.model.json",
            "netinvm.dot",
            "netinvm.report.md",
            "netinvm.report.json",
            "netinvm.store.jsonl",
        ])
    );
}

#[test]
fn unknown_target_is_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cmd = eamine(["--config".as_ref(), netinvm_config().as_os_str()]);
    cmd.arg("--out").arg(tmp.path()).args(["--target", "bogus", "run"]);
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn missing_config_is_fatal() {
    let output = eamine(["--config", "/definitely/absent.toml", "build"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.starts_with("error:"));
    assert!(stderr.contains("cannot load configuration"));
}

#[test]
fn env_var_supplies_the_config_path() {
    let mut cmd = eamine(["build"]);
    cmd.env("EAMINE_CONFIG", netinvm_config());
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn config_flag_beats_the_env_var() {
    let mut cmd = eamine(["--config".as_ref(), netinvm_config().as_os_str()]);
    cmd.arg("build").env("EAMINE_CONFIG", "/definitely/absent.toml");
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}
