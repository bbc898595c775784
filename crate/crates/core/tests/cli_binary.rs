use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dipole-optics"))
}

const QUARTER_TURN: &str =
    "q = 1\np0 = 1\nkappa = 1\nhbar = 0\ns_i = 0\ns_o = pi/2\nmode = classical-map\nsamples = 3\nray = 1e-3, 0, 0, 0\n";

#[test]
fn run_writes_outputs_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("a.scn");
    std::fs::write(&scn, QUARTER_TURN).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", scn.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("result: PASS"));
    let traj = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with('#'));
    let last = traj.lines().last().unwrap();
    assert!(last.starts_with("0,1.5707963267948966e0,"), "{last}");
    assert!(last.ends_with(",map"));
    assert!(out.join("summary.txt").exists());
    assert!(!out.join("comparison.csv").exists());
}

#[test]
fn quiet_suppresses_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("a.scn");
    std::fs::write(&scn, QUARTER_TURN).unwrap();
    let o = bin()
        .args([
            "run",
            scn.to_str().unwrap(),
            "--quiet",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn out_dir_key_is_used_without_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-key");
    let scn = dir.path().join("a.scn");
    std::fs::write(&scn, format!("{QUARTER_TURN}out_dir = {}\n", target.display())).unwrap();
    let o = bin().args(["run", scn.to_str().unwrap(), "--quiet"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("trajectory.csv").exists());
}

#[test]
fn check_validates_without_running() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.scn");
    std::fs::write(&good, QUARTER_TURN).unwrap();
    assert_eq!(
        bin().args(["check", good.to_str().unwrap()]).status().unwrap().code(),
        Some(0)
    );

    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, QUARTER_TURN.replace("kappa = 1", "kappa = 1\nwidth = 3")).unwrap();
    let o = bin().args(["check", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
}

#[test]
fn missing_file_is_a_configuration_error() {
    let o = bin().args(["run", "/nonexistent/x.scn"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
