//! End-to-end checks of the command-line interface: exit codes, file
//! round-trips, and byte-for-byte determinism under a fixed seed.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ulrich"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn factorize_verify_round_trip() {
    let dir = std::env::temp_dir().join("ulrich-cli-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("conic.json");
    let out = run(&[
        "factorize",
        "--poly",
        "t^2 - y^2 - x*z",
        "--d",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let verify = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));

    // Tamper with one coefficient: the checker pinpoints an entry, exit 2.
    let text = std::fs::read_to_string(&path).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["factors"][0]["entries"][1]["terms"][0]["coeff"][0] =
        serde_json::json!(["7", "1"]);
    let tampered = dir.join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&json).unwrap()).unwrap();
    let verify = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&verify.stdout);
    assert!(stdout.contains("entry ("), "locates the entry: {}", stdout);

    // Truncated file: input error, exit 1.
    let truncated = dir.join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let verify = run(&["verify", truncated.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
}

#[test]
fn degree_one_target_is_a_math_failure() {
    let out = run(&["factorize", "--poly", "x + y", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_rejects_inhomogeneous_branch() {
    let out = run(&[
        "pipeline",
        "--n",
        "2",
        "--k",
        "1",
        "--d",
        "2",
        "--branch",
        "y^2 + x",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_seed_identical_bytes() {
    for args in [
        vec![
            "certify", "--d", "3", "--k", "1",
            "--branch", "y^2*z + x*(x-z)*(x-2*z)",
            "--seed", "21", "--json",
        ],
        vec![
            "decompose", "--poly", "y^2 + x*z", "--d1", "1", "--d2", "1",
            "--seed", "5", "--json",
        ],
        vec![
            "pipeline", "--n", "2", "--k", "2", "--d", "2",
            "--branch", "x^4 - y^4 - z^4", "--seed", "3", "--json",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {:?}", args);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn seed_env_fallback() {
    let with_flag = run(&[
        "decompose", "--poly", "y^2 + x*z", "--d1", "1", "--d2", "1",
        "--seed", "17", "--json",
    ]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_ulrich"))
        .args(["decompose", "--poly", "y^2 + x*z", "--d1", "1", "--d2", "1", "--json"])
        .env("ULRICH_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn ranks_and_ledger_report() {
    let out = run(&["ranks", "--d", "3", "--k", "1", "--json"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["parity"], "odd");
    assert_eq!(json["p"], 3);
    assert_eq!(json["rank_bound"], "6");
    let out = run(&["ledger", "--d", "2", "--r", "1", "--json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["final"][0]["twist"], 0);
    assert_eq!(json["final"][0]["mult"], 4);
    // Chain break is reported as a mathematical failure.
    let out = run(&["ranks", "--d", "13", "--k", "1", "--p", "13"]);
    assert_eq!(out.status.code(), Some(2));
}
