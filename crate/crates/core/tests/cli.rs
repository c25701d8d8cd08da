use std::process::Command;

fn instlab(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_instlab")).args(args).output().unwrap();
    let mut text = String::from_utf8(out.stdout).unwrap();
    text.push_str(&String::from_utf8(out.stderr).unwrap());
    (out.status.success(), text)
}

#[test]
fn gen_space_then_verify_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("space.json");
    let path = file.to_str().unwrap();
    assert!(instlab(&["gen-space", "--seed", "1", "--out", path]).0);
    let (ok, text) = instlab(&["verify", "--seed", "1", "--input", path]);
    assert!(ok, "{text}");
    assert!(text.contains("8 vertices, 0 failures"), "{text}");

    // a tampered game fails verification with a nonzero exit
    let json = std::fs::read_to_string(&file).unwrap().replacen("16", "15", 1);
    std::fs::write(&file, json).unwrap();
    assert!(!instlab(&["verify", "--input", path]).0);
}

#[test]
fn gen_space_is_deterministic() {
    let args = ["gen-space", "--features", "3", "--multiplier", "2", "--seed", "42", "--search-order", "seeded"];
    let (a, b) = (instlab(&args), instlab(&args));
    assert!(a.0);
    assert_eq!(a.1, b.1);
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (ok, text) = instlab(&["simulate", "--seed", "2", "--participants", "48", "--platform", "--out-dir", out]);
    assert!(ok, "{text}");
    let trials = format!("{out}/trials.jsonl");
    let prefs = format!("{out}/preferences.jsonl");
    let report = format!("{out}/report");
    let (ok, text) = instlab(&[
        "analyze", "--seed", "2", "--trials", &trials, "--preferences", &prefs, "--resamples", "500", "--out-dir", &report,
    ]);
    assert!(ok, "{text}");
    let csv = std::fs::read_to_string(format!("{report}/cooperation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("label,layer,value,ci_low,ci_high,n"));
}

#[test]
fn walk_reports_absorption_and_unknown_edges() {
    let (ok, text) = instlab(&["walk", "--seed", "0", "--start", "000", "--model", "paper", "--acceptance", "significant"]);
    assert!(ok, "{text}");
    assert_eq!(text.trim(), "000: 000 010 011 -> 011 (2 steps, absorbed)");
    let (_, text) = instlab(&["walk", "--seed", "0", "--start", "000", "--model", "paper", "--acceptance", "majority"]);
    assert!(text.trim().ends_with("unknown edges 101-111 110-111"), "{text}");
    for model in ["lexicographic", "lexicographic:fairness,stability,efficiency"] {
        let (ok, text) = instlab(&["walk", "--seed", "0", "--model", model, "--starts", "all"]);
        assert!(ok);
        assert_eq!(text.lines().count(), 8);
        assert!(text.lines().all(|l| l.contains("-> 111")), "{text}");
    }
}

#[test]
fn analyze_fixture_is_seeded() {
    let a = instlab(&["analyze", "--fixture", "--seed", "5", "--resamples", "300"]);
    let b = instlab(&["analyze", "--fixture", "--seed", "5", "--resamples", "300"]);
    assert!(a.0);
    assert_eq!(a.1, b.1);
    assert!(a.1.contains("\"analyzed_trials\": 3542"));
}

#[test]
fn bad_arguments_fail() {
    assert!(!instlab(&["walk", "--model", "whim"]).0);
    assert!(!instlab(&["analyze"]).0);
    assert!(!instlab(&["serve", "--config", "/nonexistent/instlab.toml"]).0);
}
