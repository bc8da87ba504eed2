use std::path::{Path, PathBuf};
use std::process::Command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(kind: &str, config: &Path, extra: &[&str]) -> (i32, tempfile::TempDir) {
    let out = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_fluctlab"))
        .arg(kind)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out.path())
        .args(extra)
        .output()
        .unwrap();
    (status.status.code().unwrap(), out)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn box_check_passes_and_writes_reports() {
    let (code, out) = run("check-sequence", &configs().join("check-sequence-boxes.json"), &[]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("experiment,item,index,quantity,exact,value,decimal,ci_low,ci_high,samples,seed,verdict"));
    let summary = std::fs::read_to_string(out.path().join("summary.txt")).unwrap();
    assert!(summary.contains("status: all certified checks pass"));
}

#[test]
fn geometric_counterexample_exits_one() {
    let (code, _) = run("counterexample", &configs().join("counterexample-geometric.json"), &[]);
    assert_eq!(code, 1);
}

#[test]
fn empty_n_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"decay-curve","seed":1,
            "system":{"kind":"cyclic","values":["0","1"]},
            "sequence":{"kind":"intervals","horizon":4},
            "gap":{"alpha":"1/4","beta":"3/4"},
            "n_range":[3,1],"samples":10}"#,
    );
    assert_eq!(run("decay-curve", &cfg, &[]).0, 2);
}

#[test]
fn kind_mismatch_is_a_config_error() {
    assert_eq!(run("cover", &configs().join("bound-constants.json"), &[]).0, 2);
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment":"bound-constants","colour":"red"}"#);
    assert_eq!(run("bound-constants", &cfg, &[]).0, 2);
}

#[test]
fn zero_budget_exits_three() {
    let (code, _) = run("decay-curve", &configs().join("decay-curve-bernoulli.json"), &["--budget-seconds", "0"]);
    assert_eq!(code, 3);
}
