use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn groundtrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groundtrack")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path) {
    let out = groundtrack(&["synth", "--seed", "3", "--agents", "4", "--frames", "120", "--out-dir", s(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_homography_is_a_usage_error() {
    let out = groundtrack(&["track", "--dets", "det.txt", "--out", "res.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = groundtrack(&[
        "track",
        "--dets",
        s(&dir.path().join("missing.txt")),
        "--homography",
        s(&dir.path().join("missing_h.txt")),
        "--out",
        s(&dir.path().join("res.txt")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_detections_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    std::fs::write(dir.path().join("det.txt"), "1,-1,oops\n").unwrap();
    let out = groundtrack(&[
        "track",
        "--dets",
        s(&dir.path().join("det.txt")),
        "--homography",
        s(&dir.path().join("homography.txt")),
        "--out",
        s(&dir.path().join("res.txt")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("det.txt:1:"));
}

#[test]
fn eval_of_ground_truth_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let gt = dir.path().join("gt.txt");
    let out = groundtrack(&["eval", "--gt", s(&gt), "--res", s(&gt)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    assert!(text.contains("MOTA 1.0000") && text.contains("IDF1 1.0000"), "{text}");
}

#[test]
fn track_output_is_pinned() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let res = dir.path().join("res.txt");
    let out = groundtrack(&[
        "track",
        "--dets",
        s(&dir.path().join("det.txt")),
        "--homography",
        s(&dir.path().join("homography.txt")),
        "--affines",
        s(&dir.path().join("affines.txt")),
        "--out",
        s(&res),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let digest = Sha256::digest(std::fs::read(&res).unwrap());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, GOLDEN);
}

const GOLDEN: &str = "950089a8052e0b6c3b3feeea54df2c1655735680535c4b9764022acbdbbe4989";

#[test]
fn tune_with_bounds_file() {
    let dir = tempfile::tempdir().unwrap();
    let bounds = dir.path().join("bounds.txt");
    std::fs::write(&bounds, "alpha2 0.1 0.9 0.1\n").unwrap();
    let trace = dir.path().join("trace.csv");
    let out = groundtrack(&["tune", "--bounds", s(&bounds), "--max-iters", "1", "--trace", s(&trace)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("iter,param_vector,value\n0,"));
    assert_eq!(t.lines().count(), 3);
}
