//! End-to-end CLI checks: exit codes, JSON shape, and byte-identical output
//! across repeated runs.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geonorm"))
}

fn write_tmp(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("geonorm-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

const JET: &str = r#"{"omega": "0.61803398874989484820458683436563811772",
  "order": 8, "coeffs": [[2,0,"0.3","-0.1"],[1,1,"0.2","0"],[0,2,"-0.15","0.05"]]}"#;

#[test]
fn verify_rotation_exits_zero() {
    let path = write_tmp("rot.json", r#"{"omega": "0.618033988749894848", "order": 6, "coeffs": []}"#);
    let out = bin()
        .args(["verify", "--input"])
        .arg(&path)
        .args(["--order", "6"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["ok"], serde_json::Value::Bool(true));
}

#[test]
fn malformed_json_exits_one() {
    let path = write_tmp("bad.json", "{\"oops\": ");
    let out = bin()
        .args(["verify", "--input"])
        .arg(&path)
        .args(["--order", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let path = write_tmp("jet.json", JET);
    let run = || {
        bin()
            .args(["admissible", "--input"])
            .arg(&path)
            .args(["--order", "8"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "admissible output must be deterministic");

    let growth_input = write_tmp(
        "series.json",
        r#"{"order": 4, "vars": "zw", "entries": [[1,1,"1","0"],[2,2,"0.25","0"]]}"#,
    );
    let g = bin()
        .args(["growth", "--format", "csv", "--input"])
        .arg(&growth_input)
        .output()
        .unwrap();
    assert!(g.status.success());
    let text = String::from_utf8(g.stdout).unwrap();
    assert!(text.starts_with("n,max_abs,nth_root\n"));
}

#[test]
fn example_siegel_reports_witness() {
    let out = bin()
        .args(["example-siegel", "--seed-cf", "2,1", "--depth", "3", "--p", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ws = parsed["witnesses"].as_array().unwrap();
    assert_eq!(ws.len(), 1);
    assert_eq!(ws[0]["n"], 3);
    assert_eq!(ws[0]["satisfied"], serde_json::Value::Bool(true));
}

#[test]
fn small_divisor_guard_exits_two() {
    // omega extremely close to 1/2 makes |1 - lambda^2| collapse under the
    // guard at 64-bit precision
    let path = write_tmp(
        "resonantish.json",
        r#"{"omega": "0.50000000000000000000000000000001", "order": 6,
            "coeffs": [[2,0,"0.1","0"]]}"#,
    );
    let out = bin()
        .args(["--precision-bits", "64", "verify", "--input"])
        .arg(&path)
        .args(["--order", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn jet_extend_round_trip() {
    // exact 2-jet of shear(a=1, b=1/2, c=2/3, d=2) o rotation(3/5, 4/5):
    // x' = (3x-4y)/5 + (x - y/2)^2, y' = (4x+3y)/5 - 2 (x - y/2)^2
    let path = write_tmp(
        "xyjet.json",
        r#"{"order": 2,
  "x": {"order": 2, "vars": "xy", "entries":
        [[1,0,"3/5","0"],[0,1,"-4/5","0"],[2,0,"1","0"],[1,1,"-1","0"],[0,2,"1/4","0"]]},
  "y": {"order": 2, "vars": "xy", "entries":
        [[1,0,"4/5","0"],[0,1,"3/5","0"],[2,0,"-2","0"],[1,1,"2","0"],[0,2,"-1/2","0"]]}}"#,
    );
    let out = bin()
        .args(["jet-extend", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["jet_reproduced"], serde_json::Value::Bool(true));
}
