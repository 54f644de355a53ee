use std::path::Path;
use std::process::Command;

use pbes_cli::{run_cli, Output};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(args: &[&str]) -> Output {
    run_cli(std::iter::once("pbes").chain(args.iter().copied()))
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn interleaving_is_simulated_by_concurrency() {
    let out = run(&["simulate", "a;b + b;a", "a||b", "--depth", "0"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = json(&out);
    assert_eq!(doc["verdict"], "holds");

    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "w.json", &doc["witness"]);
    let check = run(&["verify-witness", "--witness", &file]);
    assert_eq!(check.code, 0, "{}", check.stdout);
    assert_eq!(json(&check)["valid"], true);

    // Dropping the root pair breaks the witness.
    let mut broken = doc["witness"].clone();
    let pairs = broken["pairs"].as_array_mut().unwrap();
    pairs.retain(|p| !p["config"].as_array().unwrap().is_empty());
    let file = write(dir.path(), "broken.json", &broken);
    let check = run(&["verify-witness", "--witness", &file]);
    assert_eq!(check.code, 1);
    assert_eq!(json(&check)["valid"], false);
}

#[test]
fn concurrency_is_not_simulated_by_interleaving() {
    let out = run(&["simulate", "a||b", "a;b + b;a", "--depth", "0"]);
    assert_eq!(out.code, 1);
    let doc = json(&out);
    assert_eq!(doc["verdict"], "not_found_within_search_space");
    let unmatched = doc["diagnostic"]["unmatched"].as_array().unwrap();
    assert!(unmatched.iter().any(|c| c.as_array().unwrap().len() == 4));
}

#[test]
fn tree_dot_has_weighted_branches() {
    let out = run(&["tree", "a || (b [1/5] c)", "--dot"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("digraph"));
    assert_eq!(out.stdout.matches("[label=\"{").count(), 9);
    assert_eq!(out.stdout.matches("label=\"0.8\"").count(), 2);
    assert_eq!(out.stdout.matches("label=\"0.2\"").count(), 2);
}

#[test]
fn confusion_on_a_bes_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = format!(
        "@{}",
        write(
            dir.path(),
            "confused.json",
            &pbes::figures::confused().to_json()
        )
    );
    let out = run(&["confusion", &file]);
    assert_eq!(out.code, 1);
    assert_eq!(
        json(&out)["counterexample"]["pair"],
        serde_json::json!(["e1", "e2"])
    );

    let file = format!(
        "@{}",
        write(
            dir.path(),
            "clustered.json",
            &pbes::figures::clustered().to_json()
        )
    );
    assert_eq!(run(&["confusion", "--static", &file]).code, 0);
    let clusters = json(&run(&["clusters", &file]));
    assert_eq!(
        clusters["clusters"],
        serde_json::json!([["e1", "e2"], ["e3"], ["e4", "e5"]])
    );
}

#[test]
fn orders() {
    assert_eq!(run(&["leq", "a;b + a;c", "a;(b+c)", "--lang"]).code, 0);
    assert_eq!(run(&["leq", "a;(b+c)", "a;b + a;c", "--lang"]).code, 0);
    assert_eq!(run(&["leq", "a;b", "a||b", "--lang"]).code, 0);
    assert_eq!(run(&["leq", "a||b", "a;b", "--lang"]).code, 1);
    assert_eq!(run(&["leq", "a;b + b;a", "a||b"]).code, 0);
    assert_eq!(run(&["equiv", "a [1/2] b", "b [1/2] a"]).code, 0);
    assert_eq!(run(&["equiv", "a;b", "a||b"]).code, 1);
}

#[test]
fn elaboration_modes() {
    let plain = json(&run(&["elaborate", "a*b", "--depth", "1"]));
    assert!(plain.get("events").is_some());
    let prob = json(&run(&["elaborate", "a*b", "--depth", "1", "--prob"]));
    assert!(prob.get("pi").is_some());
    assert_eq!(run(&["elaborate", "a [1/2] b", "--plain"]).code, 2);
    assert!(json(&run(&["elaborate", "a [1/2] b"])).get("pi").is_some());
}

#[test]
fn usage_and_validation_errors() {
    assert_eq!(run(&["configs", "a*b"]).code, 2);
    assert_eq!(run(&["parse", "a +"]).code, 2);
    assert_eq!(run(&["parse", "a [1] b"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(
        run(&["verify-witness", "--witness", "/nonexistent/w.json"]).code,
        2
    );
    assert_eq!(run(&["simulate", "a"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn axioms_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = serde_json::json!({
        "format": 1, "atoms": ["a", "b"], "alphas": ["1/2"], "depth": 1,
        "axioms": ["plus-comm", "pchoice-comm", "star-unfold"],
    });
    let file = write(dir.path(), "grid.json", &grid);
    let out = run(&["axioms", "--grid", &file]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(json(&out)["pass"], true);
    let bad = write(
        dir.path(),
        "bad.json",
        &serde_json::json!({"atoms": [], "alphas": [], "depth": 0}),
    );
    assert_eq!(run(&["axioms", "--grid", &bad]).code, 2);
}

fn digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// Every subcommand, run twice in separate processes.
#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let confused = format!(
        "@{}",
        write(
            dir.path(),
            "confused.json",
            &pbes::figures::confused().to_json()
        )
    );
    let witness = json(&run(&["simulate", "a;b + b;a", "a||b"]))["witness"].clone();
    let wfile = write(dir.path(), "w.json", &witness);
    let grid = write(
        dir.path(),
        "grid.json",
        &serde_json::json!({"atoms": ["a", "b"], "alphas": ["1/5"], "depth": 1, "axioms": ["pchoice-assoc", "star-induction"]}),
    );
    let m = "a || (b [1/5] c) + a*b";
    let cases: Vec<Vec<&str>> = vec![
        vec!["parse", m],
        vec!["elaborate", m, "--depth", "2"],
        vec!["elaborate", "a;(b+c) || d*e", "--depth", "2", "--plain"],
        vec!["configs", m, "--depth", "2"],
        vec!["lposets", m, "--depth", "2"],
        vec!["pomsets", m, "--depth", "2"],
        vec!["clusters", m, "--depth", "2"],
        vec!["clusters", &confused],
        vec!["confusion", &confused],
        vec!["confusion", m, "--depth", "1", "--static"],
        vec!["tree", m, "--depth", "1"],
        vec!["tree", m, "--depth", "1", "--dot"],
        vec!["leq", "a;b", "a||b", "--lang"],
        vec!["leq", "a;b", "a||b"],
        vec!["simulate", "a;b + b;a", "a||b"],
        vec!["simulate", "a||b", "a;b + b;a"],
        vec!["equiv", "(a [1/2] b) ; c", "a;c [1/2] b;c"],
        vec!["verify-witness", "--witness", &wfile],
        vec!["axioms", "--grid", &grid],
    ];
    let bin = env!("CARGO_BIN_EXE_pbes");
    for args in cases {
        let runs: Vec<_> = (0..2)
            .map(|_| Command::new(bin).args(&args).output().expect("binary runs"))
            .collect();
        assert_eq!(runs[0].status.code(), runs[1].status.code(), "{args:?}");
        assert_ne!(
            runs[0].status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&runs[0].stderr)
        );
        assert!(!runs[0].stdout.is_empty(), "{args:?}");
        assert_eq!(digest(&runs[0].stdout), digest(&runs[1].stdout), "{args:?}");
        assert_eq!(
            run(&args).stdout.as_bytes(),
            &runs[0].stdout[..],
            "{args:?}"
        );
    }
}
