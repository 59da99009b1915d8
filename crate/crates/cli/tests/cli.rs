use std::process::Command;

use apclp_cli::{run, EXIT_EXTERNAL, EXIT_OK, EXIT_SEMANTIC, EXIT_USAGE};

fn example(name: &str) -> String {
    format!("{}/../core/data/examples/{name}.apc", env!("CARGO_MANIFEST_DIR"))
}

fn apclp(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["apclp"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn solve_all_stable_as_json() {
    let path = example("modus_ponens");
    let (code, out, _) = apclp(&["solve", &path, "--all-stable", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let models = v.as_array().unwrap();
    assert_eq!(models.len(), 1);
    assert_eq!(models[0]["atoms"]["p"], "t");
    assert_eq!(models[0]["atoms"]["q"], "t");
}

#[test]
fn solve_preferred_as_text() {
    let path = example("polarity");
    let (code, out, _) = apclp(&["solve", &path]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("Model 1:\n"));
    assert!(out.contains("  male(robin) : t\n"));
    assert!(out.ends_with("2 models\n"));
}

#[test]
fn queries() {
    let path = example("contraposition");
    let (code, out, _) = apclp(&["solve", &path, "--query", "nurse(pete) : f"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("entailed"));

    let path = example("epistemic_blocking");
    let (code, out, _) = apclp(&["solve", &path, "--query", "educated(pete) : t"]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(out.starts_with("not entailed"));
    assert!(out.contains("nurse(pete) : top"));
}

#[test]
fn check_and_ground() {
    let path = example("businessman");
    let (code, out, _) = apclp(&["check", &path]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("ok: "));
    let (code, out, _) = apclp(&["ground", &path]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("rich(pete)"));
}

#[test]
fn translate_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("out.lp");
    let prefs = dir.path().join("prefs.lp");
    let path = example("polarity");
    let (code, _, _) = apclp(&[
        "translate",
        &path,
        "-o",
        lp.to_str().unwrap(),
        "--prefs-file",
        prefs.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let program = std::fs::read_to_string(&lp).unwrap();
    for axiom in apclp::asp::BACKGROUND_AXIOMS {
        assert!(program.contains(axiom));
    }
    assert!(!program.contains("#preference"));
    assert!(std::fs::read_to_string(&prefs).unwrap().contains("#preference"));
}

#[test]
fn oracle_modes() {
    let path = example("businessman");
    let (code, out, _) = apclp(&["oracle", &path, "--mode", "e-consistent"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("3 models\n"));
    let (_, out, _) = apclp(&["oracle", &path, "--mode", "all"]);
    assert!(out.ends_with("7 models\n"));
}

#[test]
fn corpus_commands() {
    let (code, out, _) = apclp(&["corpus", "list"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 14);
    let (code, out, _) = apclp(&["corpus", "run", "jobs"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("jobs:base: matches expected models"));
    let (code, _, err) = apclp(&["corpus", "run", "chess"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown corpus entry"));
}

#[test]
fn usage_errors() {
    let (code, _, err) = apclp(&["solve", "/no/such/file.apc"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
    let (code, _, _) = apclp(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn unsatisfiable_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let unsat = dir.path().join("unsat.apc");
    std::fs::write(&unsat, "p : t.\n:- p : t.\n").unwrap();
    let (code, out, _) = apclp(&["solve", unsat.to_str().unwrap()]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(out.contains("0 models"));

    let bad = dir.path().join("bad.apc");
    std::fs::write(&bad, "p : maybe.\n").unwrap();
    let (code, out, _) = apclp(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(out.contains("bad.apc:1:5: unknown annotation"), "{out}");
    let (code, _, err) = apclp(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(err.contains("bad.apc:1:5"), "{err}");
}

#[test]
fn missing_external_solver() {
    let path = example("modus_ponens");
    let out = Command::new(env!("CARGO_BIN_EXE_apclp"))
        .args(["solve", &path, "--external"])
        .env("APCLP_ASP_SOLVER", "/no/such/solver")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_EXTERNAL));
}
