use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ader-mp"))
}

#[test]
fn convergence_writes_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let status = bin()
        .args(["convergence", "--scenario", "acoustic-planar", "--order", "1,2", "--cells", "3"])
        .args(["--t-end-override", "0.02", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("scenario,N,n,h,preset"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "scenario = euler-bell\norder = 1\ncells = 2\nt_end_override = 0.01\npreset = uniform-fp64\n").unwrap();
    let out = bin()
        .args(["precision-sweep", "--config"])
        .arg(&cfg)
        .args(["--preset", "uniform-fp32,uniform-fp64/predictor=bf16"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("uniform-fp32"));
    assert!(csv.contains("uniform-fp64/predictor=bf16"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn initial_error_table() {
    let out = bin()
        .args(["initial-error", "--scenario", "elastic-planar", "--order", "3", "--cells", "9", "--formats", "fp32,bf16"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn bad_input_exits_with_config_status() {
    for args in [
        vec!["run", "--scenario", "nope"],
        vec!["run", "--scenario", "acoustic-planar", "--order", "12"],
        vec!["convergence", "--scenario", "acoustic-planar", "--cells", ""],
        vec!["run", "--scenario", "swe-lake", "--lake-eta0", "0.5"],
        vec!["run", "--scenario", "acoustic-planar", "--cfl", "1.5"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(bin().args(["frobnicate"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn run_reports_failure_without_error_status() {
    let out = bin()
        .args(["run", "--scenario", "acoustic-planar", "--order", "5", "--cells", "2", "--preset", "uniform-fp16"])
        .args(["--t-end-override", "0.01"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAILED_NONFINITE"), "{text}");
}
