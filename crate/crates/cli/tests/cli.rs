use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn metabel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metabel")).args(args).env_remove("METABEL_TIMEOUT").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "eq"))
        .collect();
    files.sort();
    files
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn word_and_conj() {
    assert_eq!(code(&metabel(&["word", "-n", "2", "a1 A1", ""])), 0);
    assert_eq!(code(&metabel(&["word", "-n", "2", "a1 a2", "a2 a1"])), 1);
    assert_eq!(code(&metabel(&["word", "-n", "2", "a3", ""])), 2);
    let out = metabel(&["--json", "word", "-n", "2", "a1 a2 A1 A2", "1"]);
    assert_eq!(serde_json::from_str::<Value>(&stdout(&out)).unwrap(), serde_json::json!({ "equal": false }));

    assert_eq!(code(&metabel(&["conj", "-n", "2", "a1", "a2 a1 A2"])), 0);
    assert_eq!(code(&metabel(&["conj", "-n", "2", "a1", "a2"])), 1);
    assert_eq!(code(&metabel(&["conj", "-n", "2", "a1 a2 A1 A2", "a2 a1 A2 A1"])), 1);
    let out = metabel(&["conj", "-n", "2", "--max-len", "3", "a1", "a2 a1 A2"]);
    assert!(stdout(&out).contains("conjugator: a2"), "{}", stdout(&out));
}

#[test]
fn fixture_verdicts_follow_file_names() {
    for file in fixtures() {
        let name = file.file_name().unwrap().to_string_lossy().into_owned();
        let want = if name.starts_with("sat_") { 0 } else { 1 };
        for strategy in ["backtracking", "exhaustive"] {
            if name.contains("packing") && strategy == "exhaustive" {
                continue;
            }
            let out = metabel(&["--strategy", strategy, "solve", file.to_str().unwrap()]);
            assert_eq!(code(&out), want, "{name} with {strategy}: {}", stdout(&out));
        }
    }
}

#[test]
fn verify_accepts_what_solve_emits() {
    let dir = tempfile::tempdir().unwrap();
    for file in fixtures() {
        let out = metabel(&["--json", "solve", file.to_str().unwrap()]);
        let record: Value = serde_json::from_str(&stdout(&out)).unwrap();
        let cert_path = dir.path().join("cert.json");
        fs::write(&cert_path, stdout(&out)).unwrap();
        let verify = metabel(&["verify", file.to_str().unwrap(), cert_path.to_str().unwrap()]);
        match record["status"].as_str().unwrap() {
            "sat" => {
                assert_eq!(code(&verify), 0, "{}", file.display());
                // A bare certificate works too.
                fs::write(&cert_path, record["certificate"].to_string()).unwrap();
                assert_eq!(code(&metabel(&["verify", file.to_str().unwrap(), cert_path.to_str().unwrap()])), 0);
            }
            "unsat" => assert_eq!(code(&verify), 2, "unsat records carry no certificate"),
            other => panic!("unexpected status {other}"),
        }
    }
}

#[test]
fn verify_rejects_tampered_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let eq = fixture("sat_opposite_squares.eq");
    fs::write(&cert, r#"{"alphas":[[1,0],[0,0]]}"#).unwrap();
    assert_eq!(code(&metabel(&["verify", &eq, cert.to_str().unwrap()])), 1);
    fs::write(&cert, r#"{"alphas":[[0,0]]}"#).unwrap();
    assert_eq!(code(&metabel(&["verify", &eq, cert.to_str().unwrap()])), 2);
    fs::write(&cert, "not json").unwrap();
    assert_eq!(code(&metabel(&["verify", &eq, cert.to_str().unwrap()])), 2);
}

#[test]
fn solve_json_schema() {
    let out = metabel(&["--json", "solve", &fixture("unsat_commutator.eq")]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!({ "status": "unsat", "certificate": null }));

    let out = metabel(&["--json", "--max-len", "2", "solve", &fixture("sat_three_letters.eq")]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "sat");
    assert_eq!(v["certificate"]["alphas"].as_array().unwrap().len(), 3);
    assert_eq!(v["witness"].as_array().unwrap().len(), 3);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.eq");
    for text in ["", "rank 2\n", "rank 2\na3\n", "rank x\na1\n", "a1\n"] {
        fs::write(&bad, text).unwrap();
        assert_eq!(code(&metabel(&["solve", bad.to_str().unwrap()])), 2, "{text:?}");
    }
    assert_eq!(code(&metabel(&["solve", "/nonexistent.eq"])), 2);
    assert_eq!(code(&metabel(&["--strategy", "greedy", "solve", &fixture("sat_identity.eq")])), 2);
    assert_eq!(code(&metabel(&["frobnicate"])), 2);
}

#[test]
fn timeout_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_metabel"))
        .args(["solve", &fixture("sat_packing_2222.eq")])
        .env("METABEL_TIMEOUT", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("timed out"));
}

#[test]
fn packing_commands() {
    let out = metabel(&["pack", "3", "4"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "none");
    assert!(String::from_utf8_lossy(&out.stderr).contains("unary size 7"));

    let out = metabel(&["--json", "pack", "2", "2", "2", "2"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!({ "box": 4, "offsets": [[0, 0], [2, 0], [0, 2], [2, 2]] }));

    let out = metabel(&["pack", "--ascii", "--file", &fixture("pieces_2222.txt")]);
    assert_eq!(stdout(&out), "CCDD\nCCDD\nAABB\nAABB\n");
    assert_eq!(code(&metabel(&["pack", "-f", &fixture("pieces_3_4.txt")])), 1);
    assert_eq!(code(&metabel(&["pack", "1", "1", "1"])), 2);
    assert_eq!(code(&metabel(&["pack", "0"])), 2);
}

#[test]
fn encode_packing_matches_fixture() {
    let out = metabel(&["encode-packing", "2", "2", "2", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), fs::read_to_string(fixture("sat_packing_2222.eq")).unwrap());
    assert!(stdout(&out).starts_with("# box 4, unary size 8\nrank 2\n"));
    let v: Value = serde_json::from_str(&stdout(&metabel(&["--json", "encode-packing", "3", "4"]))).unwrap();
    assert_eq!(v["unary_size"], 7);
    assert_eq!(v["constants"].as_array().unwrap().len(), 3);
    assert_eq!(code(&metabel(&["encode-packing", "1", "1", "1"])), 2);
}

#[test]
fn bench_prints_tsv() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("sat_opposite_squares.eq"), dir.path().join("a.eq")).unwrap();
    fs::copy(fixture("unsat_commutator.eq"), dir.path().join("b.eq")).unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let out = metabel(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let lines: Vec<Vec<String>> =
        stdout(&out).lines().map(|l| l.split('\t').map(String::from).collect()).collect();
    assert_eq!(lines[0], ["instance", "strategy", "verdict", "millis"]);
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1][..3], ["a", "exhaustive", "sat"]);
    assert_eq!(lines[4][..3], ["b", "backtracking", "unsat"]);
    assert!(lines[1..].iter().all(|l| l[3].parse::<f64>().is_ok()));
}
