//! End-to-end tests of the binary: flag handling, file round-trips, exit
//! codes, error positions, and determinism under thread caps.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    bin()
        .args(args)
        .env("THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).expect("write test file");
}

#[test]
fn sample_is_deterministic_and_roundtrips() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.bg");
    let b = dir.path().join("b.bg");
    let out1 = run(&["sample", "-m", "3", "-n", "3", "--seed", "7", "-o", a.to_str().unwrap()]);
    let out2 = run(&["sample", "-m", "3", "-n", "3", "--seed", "7", "-o", b.to_str().unwrap()]);
    assert_eq!(code(&out1), 0);
    assert_eq!(code(&out2), 0);
    let file_a = std::fs::read(&a).unwrap();
    let file_b = std::fs::read(&b).unwrap();
    assert_eq!(file_a, file_b);
    // The written file parses back into the same sampled graph.
    let parsed: switchlab::BipartiteGraph =
        String::from_utf8(file_a).unwrap().parse().unwrap();
    assert_eq!(parsed, switchlab::sample_graph(3, 3, 7).unwrap());
}

#[test]
fn seed_accepts_hex_and_decimal() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.bg");
    let b = dir.path().join("b.bg");
    run(&["sample", "-m", "4", "-n", "4", "--seed", "0x10", "-o", a.to_str().unwrap()]);
    run(&["sample", "-m", "4", "-n", "4", "--seed", "16", "-o", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let bad = run(&["sample", "-m", "1", "-n", "1", "--seed", "0xZZ", "-o", "x"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn theta_reports_witness_and_exit_code() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one.bg");
    write(&one, "1 1\n1\n");
    let out = run(&["theta", "-k", "1", one.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("side L ; X1: - ; X2: 0"), "{}", stdout(&out));

    // A graph whose columns double every pattern and its complement passes k=1.
    let good = dir.path().join("good.bg");
    write(&good, "4 4\n0011\n1100\n0101\n1010\n");
    let out = run(&["theta", "-k", "1", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("ok"));
}

#[test]
fn classify_through_files_matches_library() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.bg");
    let h = dir.path().join("h.bg");
    let map = dir.path().join("f.map");
    write(&g, "2 2\n10\n00\n");
    write(&h, "2 2\n01\n00\n");
    write(&map, "L: 0->0 1->1\nR: 0->0 1->1\n");
    let out = run(&[
        "classify",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("S_L"), "{}", stdout(&out));
}

#[test]
fn classify_rejects_malformed_inputs_with_positions() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.bg");
    let h = dir.path().join("h.bg");
    let map = dir.path().join("f.map");
    write(&g, "2 2\n10\n0\n"); // short row
    write(&h, "2 2\n01\n00\n");
    write(&map, "L: 0->0 1->1\nR: 0->0 1->1\n");
    let out = run(&[
        "classify",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    write(&g, "2 2\n10\n00\n");
    write(&map, "L: 0->0 1->0\nR: 0->0 1->1\n"); // duplicate image
    let out = run(&[
        "classify",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("duplicate"), "{}", stderr(&out));
}

#[test]
fn decompose_exit_codes_follow_parity() {
    let dir = TempDir::new().unwrap();
    let even = dir.path().join("even.fm");
    let odd = dir.path().join("odd.fm");
    write(&even, "2 2\n11\n00\n");
    write(&odd, "2 2\n10\n00\n");
    let out = run(&["decompose", "--flip", even.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("pattern"), "{}", stdout(&out));
    let out = run(&["decompose", "--flip", odd.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("odd 2x2 block"), "{}", stdout(&out));
}

#[test]
fn analyze_distinguishes_violations_from_bad_usage() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.bg");
    let h = dir.path().join("h.bg");
    let map = dir.path().join("f.map");
    // 4x4 identity pair: blocks of size 3 fit, but m=2 is below the minimum.
    write(&g, "4 4\n1010\n0101\n0011\n1100\n");
    write(&h, "4 4\n1010\n0101\n0011\n1100\n");
    write(
        &map,
        "L: 0->0 1->1 2->2 3->3\nR: 0->0 1->1 2->2 3->3\n",
    );
    let out = run(&[
        "analyze",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
        "-m", "2", "-n", "2",
    ]);
    assert_eq!(code(&out), 2, "block size below 3 is a usage problem");

    let out = run(&[
        "analyze",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
        "-m", "3", "-n", "3",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("final check: pass"), "{}", stdout(&out));

    // Flip a single cell of the target: the map is no longer in the switch
    // class, which is a property violation, not a usage error.
    write(&h, "4 4\n0010\n0101\n0011\n1100\n");
    let out = run(&[
        "analyze",
        "--source", g.to_str().unwrap(),
        "--target", h.to_str().unwrap(),
        "--map", map.to_str().unwrap(),
        "-m", "3", "-n", "3",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("odd 2x2 block"), "{}", stdout(&out));
}

#[test]
fn oracle_sweep_agrees_on_small_sizes() {
    let out = run(&["oracle", "--max-left", "2", "--max-right", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("sides 2x2 : 1024 maps"), "{}", text);
    assert_eq!(text.matches("agreement: yes").count(), 4);
}

#[test]
fn sfbsp_records_are_parseable_json() {
    let out = run(&[
        "--records",
        "sfbsp", "-k", "1", "--sizes", "8,12", "--trials", "30", "--seed", "5",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for (line, total) in lines.iter().zip([8u64, 12]) {
        let v: serde_json::Value = serde_json::from_str(line).expect("valid JSON");
        assert_eq!(v["record"], "sfbsp");
        assert_eq!(v["n_total"], total);
        for key in ["m_left", "n_right", "empirical_rate", "ci95", "analytic_term"] {
            assert!(!v[key].is_null(), "missing {}", key);
        }
    }
}

#[test]
fn thread_cap_does_not_change_bytes() {
    let args = ["sfbsp", "-k", "1", "--sizes", "10,14", "--trials", "50", "--seed", "9"];
    let one = run_with_threads(&args, "1");
    let three = run_with_threads(&args, "3");
    assert_eq!(code(&one), code(&three));
    assert_eq!(stdout(&one), stdout(&three));
    assert_eq!(stderr(&one), stderr(&three));
    let bad = run_with_threads(&args, "zero");
    assert_eq!(code(&bad), 2);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["theta", "-k", "1"]); // missing file
    assert_eq!(code(&out), 2);
    let out = run(&["sample", "-m", "3"]); // missing -n and -o
    assert_eq!(code(&out), 2);
    let out = run(&["nonsense"]);
    assert_eq!(code(&out), 2);
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.bg");
    let out = run(&["theta", "-k", "1", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_echo_goes_to_stderr() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one.bg");
    write(&one, "1 1\n0\n");
    let out = run(&["theta", "-k", "1", one.to_str().unwrap()]);
    assert!(stderr(&out).starts_with("config: command=theta k=1"), "{}", stderr(&out));
    assert!(!stdout(&out).contains("config:"));
}
