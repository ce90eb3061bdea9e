use std::io::Write;
use std::process::{Command, Output, Stdio};

fn hypergame(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypergame"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hypergame(args, "");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    hypergame(args, "").status.code().unwrap()
}

const H: &str = "(forall G. G -> G)";

#[test]
fn prenex() {
    assert_eq!(ok(&["prenex", "(forall Y.Y) -> (forall Y.Y)"]), "forall Y. (forall Y'. Y') -> Y\n");
    assert_eq!(ok(&["prenex", "X"]), "X\n");
    let bad = hypergame(&["prenex", "X -> (Y"], "");
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("offset"));
}

#[test]
fn graph() {
    assert!(ok(&["graph", "X -> (X -> X) -> X", "--depth", "3"]).starts_with("states: 4, edges: 4\n"));
    assert!(ok(&["graph", "X"]).starts_with("states: 2, edges: 1\n"));
    let dot = ok(&["graph", "forall X. X -> X", "--universe", "Z", "--dot"]);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("1⟨Z⟩"));
}

#[test]
fn traces() {
    let words: Vec<String> = ok(&["traces", "X -> (X -> X) -> X", "--depth", "4"]).lines().map(String::from).collect();
    assert_eq!(words, ["ε", "1", "11", "12", "121"]);
}

#[test]
fn check() {
    assert_eq!(ok(&["check", "forall G. G -> G -> G"]), "terms: 2, strategies: 2, bijection: OK\n");
    assert_eq!(
        ok(&["check", "X -> Y -> X", "--mode", "lambda"]),
        "terms: 1, strategies(live): 2, copycat: 1, bijection: OK\n"
    );
    assert!(ok(&["check", "forall Y. Y"]).starts_with("terms: 0, strategies: 0"));
    assert_eq!(code(&["check", "forall Y. Y", "--mode", "lambda"]), 1);
}

#[test]
fn compile_and_readback_round_trip() {
    let dir = std::env::temp_dir().join(format!("hypergame-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("iota.txt");
    let p = path.to_str().unwrap();
    ok(&["compile", &format!("\\h:{H}. h"), "--out", p]);
    let back = ok(&["readback", &format!("{H} -> {H}"), p]);
    assert!(back.contains("[B0]"), "{back}");
    let listed = ok(&["strategies", "forall G. G -> G -> G", "--depth", "4"]);
    assert!(listed.starts_with("strategies: 2\n"));
    std::fs::write(&path, "1: (0) branch=1 imports=[B0]\n").unwrap();
    assert_eq!(code(&["readback", "forall G. G -> G", p]), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn normalize() {
    let out = ok(&["normalize", "(/\\G. \\g:G. g) [X] "]);
    assert!(out.ends_with("AGREE\n"), "{out}");
    let tau = format!("(\\h:{H}. /\\G. \\g:G. h [G -> G] (\\x:G. x) g) (/\\G. \\g:G. g)");
    assert!(ok(&["normalize", &tau, "--engine", "both"]).ends_with("AGREE\n"));
    assert_eq!(ok(&["normalize", "\\x:X. x", "--engine", "syntax"]), "\\x:X. x\n");
    let tripped = hypergame(&["normalize", &tau, "--budget", "3"], "");
    assert_eq!(tripped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tripped.stderr).contains("1: (0) branch=1"));
    assert_eq!(ok(&["normalize", "--seed", "11"]), ok(&["normalize", "--seed", "11"]));
}

#[test]
fn flag_validation() {
    assert_eq!(code(&["prenex", "X", "--depth", "3"]), 1);
    assert_eq!(code(&["graph", "X", "--engine", "games"]), 1);
    assert_eq!(code(&["normalize"]), 1);
    assert_eq!(code(&["normalize", "\\x:X. x", "--seed", "1"]), 1);
    assert_eq!(code(&["check", "X", "--mode", "sideways"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["normalize", "\\x:X. y"]), 1);
}

#[test]
fn play_identity() {
    let out = hypergame(&["play", "/\\G. \\g:G. g"], "1\n");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no legal O-move"));
    assert!(text.ends_with("1: (0) branch=1 imports=[B0]\n2: (1) branch=1 imports=[]\n"));
}

#[test]
fn play_church_two_with_a_bad_choice() {
    let out = hypergame(&["play", "\\x:X. \\f:X -> X. f (f x)"], "1\n7\n1\n1\n");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("choose a number"));
    let transcript: Vec<&str> = text.lines().rev().take(6).collect::<Vec<_>>().into_iter().rev().collect();
    let pairs: Vec<&str> = transcript.iter().map(|l| l.split(" imports").next().unwrap()).collect();
    assert_eq!(
        pairs,
        ["1: (0) branch=1", "2: (1) branch=2", "3: (2) branch=1", "4: (1) branch=2", "5: (4) branch=1", "6: (1) branch=1"]
    );
}

#[test]
fn play_immediate_eof() {
    let out = hypergame(&["play", "/\\G. \\g:G. g"], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("O> \n"));
}

#[test]
fn play_transcript_round_trips() {
    let path = std::env::temp_dir().join(format!("hypergame-play-{}.txt", std::process::id()));
    let out = hypergame(&["play", "\\x:X. \\f:X -> X. f x", "--out", path.to_str().unwrap()], "1\n1\n");
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let d = hypergame::format::parse_dialogue(&text).unwrap();
    assert_eq!(d.erase(), vec![(0, 1), (1, 2), (2, 1), (1, 1)]);
    std::fs::remove_file(path).unwrap();
}
