#![cfg(unix)]

use std::os::unix::fs::PermissionsExt;
use std::path::PathBuf;
use std::time::Duration;

use apclp::asp::{solve_external, translate_ground, AspError, ExternalRunConfig};
use apclp::grounder::ground;
use apclp::parser::parse;

fn script(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("fake-solver");
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn doc() -> apclp::asp::AspDocument {
    let g = ground(&parse("p : t ; q : t.\n#pref s subset { p : top }.\n#lexico (s).").unwrap()).unwrap();
    translate_ground(&g)
}

#[test]
fn keeps_only_optimal_answers() {
    let dir = tempfile::tempdir().unwrap();
    let out = "asprin version 3\nSolving...\nAnswer: 1\ntruth(p,t) truth(p,top) truth(p,f) truth(p,bottom)\n\
               Answer: 2\ntruth(q,t) truth(q,bottom) truth(_choice(q),t)\nOPTIMUM FOUND\n\
               Answer: 3\ntruth(p,t) truth(p,bottom)\nOPTIMUM FOUND *\n";
    let path = script(&dir, &format!("cat <<'EOF'\n{out}EOF\nexit 30"));
    let r = solve_external(&doc(), &ExternalRunConfig::new(path), true).unwrap();
    let texts: Vec<String> = r.models.iter().map(|m| m.to_string()).collect();
    assert_eq!(texts, vec!["p : t\n", "q : t\n"]);
}

#[test]
fn receives_program_and_preference_files() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("args");
    let path = script(&dir, &format!("for a in \"$@\"; do echo \"$a\" >> {}; done", log.display()));
    solve_external(&doc(), &ExternalRunConfig::new(&path), true).unwrap();
    let args = std::fs::read_to_string(&log).unwrap();
    let args: Vec<&str> = args.lines().collect();
    assert_eq!(args.len(), 3);
    assert!(args[0].ends_with("program.lp"));
    assert!(args[1].ends_with("preferences.lp"));
    assert_eq!(args[2], "0");

    std::fs::remove_file(&log).unwrap();
    solve_external(&doc(), &ExternalRunConfig::new(&path), false).unwrap();
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 2);
}

#[test]
fn reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(&dir, "echo boom >&2\nexit 1");
    match solve_external(&doc(), &ExternalRunConfig::new(path), false) {
        Err(AspError::SolverFailed { stderr, .. }) => assert_eq!(stderr, "boom"),
        other => panic!("{other:?}"),
    }

    let missing = ExternalRunConfig::new(dir.path().join("nope"));
    assert!(matches!(solve_external(&doc(), &missing, false), Err(AspError::SolverNotFound(_))));

    let slow = script(&dir, "sleep 5");
    let mut cfg = ExternalRunConfig::new(slow);
    cfg.timeout = Duration::from_millis(200);
    assert!(matches!(solve_external(&doc(), &cfg, false), Err(AspError::Timeout(_))));
}

#[test]
fn rejects_malformed_answers() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(&dir, "printf 'Answer: 1\\ntruth(p,maybe)\\n'");
    assert!(solve_external(&doc(), &ExternalRunConfig::new(path), false).is_err());
}
