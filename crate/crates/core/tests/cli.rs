use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mps")).args(args).output().expect("binary runs")
}

fn problem<'a>(sub: &'a str, state: &'a str, formula: &'a str, cost: &'a str, arena: &'a str) -> Vec<&'a str> {
    vec![sub, "--arena", arena, "--state", state, "--formula", formula, "--cost", cost]
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_disproves_box_on_a1() {
    let arena = fixture("a1.json");
    let out = mps(&problem("check", "q0", "[a]p", "query_count", arena.to_str().unwrap()));
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("verdict: disproved\ncost: 1\n"), "{text}");
}

#[test]
fn check_proves_atom_at_q1() {
    let arena = fixture("a1.json");
    let out = mps(&problem("check", "q1", "p", "depth", arena.to_str().unwrap()));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: proved\ncost: 0\n"));
}

#[test]
fn syntax_error_exits_2() {
    let arena = fixture("a1.json");
    let out = mps(&problem("check", "q0", "(p &", "depth", arena.to_str().unwrap()));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("syntax error"), "{err}");
}

#[test]
fn input_errors_exit_2() {
    let arena = fixture("a1.json");
    let arena = arena.to_str().unwrap();
    for args in [
        problem("check", "q9", "p", "depth", arena),
        problem("check", "q0", "[b]p", "depth", arena),
        problem("check", "q0", "p", "fastest", arena),
        problem("check", "q0", "p", "depth", "/nonexistent/arena.json"),
    ] {
        assert_eq!(mps(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oracle_reports_minima() {
    let arena = fixture("a1.json");
    let arena = arena.to_str().unwrap();

    let out = mps(&problem("oracle", "q0", "[a]p", "query_count", arena));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "holds: false\nmin_proof_cost: inf\nmin_disproof_cost: 1\n");

    let out = mps(&problem("oracle", "q0", "<a>p", "query_count", arena));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "holds: true\nmin_proof_cost: 1\nmin_disproof_cost: inf\n");

    let out = mps(&problem("oracle", "q0", "p & !p", "query_count", arena));
    assert!(stdout(&out).starts_with("holds: false\n"));
}

#[test]
fn weighted_config_is_applied() {
    let arena = fixture("a1.json");
    let cost = format!("weighted:{}", fixture("a1_weights.json").display());
    let out = mps(&problem("check", "q0", "[a]p", &cost, arena.to_str().unwrap()));
    assert_eq!(out.status.code(), Some(1));
    // box weight 3 plus atom weight 2
    assert!(stdout(&out).contains("cost: 5\n"));
}

#[test]
fn verify_with_oracle_agrees() {
    let arena = fixture("a1.json");
    let mut args = problem("check", "q0", "<a>p & [a](p | !p)", "depth", arena.to_str().unwrap());
    args.extend(["--verify", "--oracle"]);
    let out = mps(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("proof check: ok\n") && text.contains("(agrees)"), "{text}");
}

#[test]
fn trace_goes_to_stderr() {
    let arena = fixture("a1.json");
    let mut args = problem("check", "q0", "[a]p", "query_count", arena.to_str().unwrap());
    args.push("--trace");
    let out = mps(&args);
    let trace = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(trace.lines().next(), Some("iter 1 leaf (q0, [a]p) root mpn 2 mdn 1"));
    assert!(!stdout(&out).contains("iter "));
}

#[test]
fn fuzz_zero_cases() {
    let out = mps(&["fuzz", "--cases", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("result: pass"));
}

#[test]
fn fuzz_catches_corrupted_selection() {
    let out = mps(&["fuzz", "--cases", "200", "--corrupt-selection"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("result: FAIL"));
}
