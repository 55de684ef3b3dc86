//! Exit-code contract of the binary: 0 science pass, 1 science fail,
//! 2 infrastructure error.

use std::process::Command;

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz-lab"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn check_young_reports_growth_conditions() {
    let (code, stdout, _) = run(&["check-young", "--phi", "power:p=2"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("delta2: satisfied"));
    assert!(stdout.contains("nabla2: satisfied"));

    let (code, stdout, _) = run(&["check-young", "--phi", "linear"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("nabla2: not satisfied"));
}

#[test]
fn infra_errors_exit_with_two() {
    let (code, _, stderr) = run(&["check-young", "--phi", "power:p=0.5"]);
    assert_eq!(code, Some(2));
    assert!(stderr.starts_with("error:"));

    // even m rejected by validation
    let (code, _, _) = run(&["modular", "--phi", "power:p=2", "--m", "64"]);
    assert_eq!(code, Some(2));

    let (code, _, _) = run(&["solve", "--m", "65", "--backend", "spectral"]);
    assert_eq!(code, Some(2));

    let (code, _, _) = run(&["theorem-demo", "--direction", "sideways"]);
    assert_eq!(code, Some(2));
}

#[test]
fn scientific_verdicts_drive_the_exit_code() {
    let (code, stdout, _) =
        run(&["modular", "--phi", "power:p=2", "--m", "65", "--seed", "5"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("verdict: pass"));

    // a truncated amplitude range cannot show the required divergence
    let (code, stdout, _) = run(&[
        "theorem-demo",
        "--direction",
        "delta2",
        "--phi",
        "exp",
        "--m",
        "129",
        "--t-list",
        "1,2",
    ]);
    assert_eq!(code, Some(1));
    assert!(stdout.contains("verdict: fail"));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "phi=linear\nm=65\nseed=9\n").unwrap();
    // flag overrides the file's phi; file supplies m and seed
    let (code, stdout, _) = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "check-young",
        "--phi",
        "power:p=3",
    ]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("phi = power:p=3"));
}
