use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn write(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn ielc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ielc"))
        .args(args)
        .env_remove("IELC_COLOR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = ielc(&full);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    (o.status.code().unwrap(), v)
}

#[test]
fn check_coreflection() {
    let f = write("coreflection.ielt", "\\x:p. box [] in x\n");
    let o = ielc(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "p -> []p");
}

#[test]
fn check_with_context() {
    let f = write("ctx.ielt", "box [g:p -> q = f, y:p = a] in g y");
    let o = ielc(&["check", "--ctx", "f:[](p -> q), a:[]p", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[]q");
}

#[test]
fn normalize_ill_typed_is_rejected() {
    let f = write("selfapp.ielt", "\\x:p. x x");
    let o = ielc(&["normalize", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("TypeMismatch"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn normalize_trace_and_json() {
    let f = write("iota.ielt", "box [x:p = (box [] in a)] in x");
    let o = ielc(&["normalize", "--ctx", "a:p", "--trace", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Iota"), "{text}");
    assert!(text.trim_end().ends_with(": []p"), "{text}");

    let (code, v) = json(&["normalize", "--ctx", "a:p", "--trace", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["normal_form"], "box [] in a");
    assert_eq!(v["trace"][0]["tag"], "Iota");
    assert!(v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn normalize_budget_exhaustion_exits_1() {
    let f = write("budget.ielt", "(\\x:p. x) ((\\y:p. y) a)");
    let o = ielc(&["normalize", "--ctx", "a:p", "--max-steps", "1", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strategies_agree_on_normal_form() {
    let f = write("strat.ielt", "(\\x:p. <x, x>) ((\\y:p. y) a)");
    let path = f.to_str().unwrap();
    let (_, lo) = json(&["normalize", "--ctx", "a:p", "--strategy", "lo", path]);
    let (_, ri) = json(&["normalize", "--ctx", "a:p", "--strategy", "ri", path]);
    assert_eq!(lo["result"]["normal_form"], ri["result"]["normal_form"]);
}

#[test]
fn countermodel_found_and_not_found() {
    let o = ielc(&["countermodel", "--formula", "[]p -> p", "--max-worlds", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let model = write("cm.kr", &stdout(&o));
    let m = model.to_str().unwrap();
    assert_eq!(ielc(&["validate", m]).status.code(), Some(0));
    let k = ielc(&["kripke", "--model", m, "--formula", "[]p -> p"]);
    assert_eq!(k.status.code(), Some(2));

    let o = ielc(&["countermodel", "--formula", "p -> []p", "--max-worlds", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ielc(&[
        "countermodel",
        "--formula",
        "[]p -> p",
        "--max-worlds",
        "3",
        "--frame",
        "paper-literal",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_model_exits_2() {
    let m = write("bad.kr", "worlds: a b\nle: a <= b\nE: b E a\nval: p @ b\n");
    let (code, v) = json(&["validate", m.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["valid"], false);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
    let k = ielc(&["kripke", "--model", m.to_str().unwrap(), "--formula", "p"]);
    assert_eq!(k.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_1() {
    let f = write("junk.ielf", "p -> -> q");
    let o = ielc(&["parse", "--kind", "formula", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bytes"), "{}", stderr(&o));
    let (code, v) = json(&["parse", "--kind", "formula", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
}

#[test]
fn parse_prints_canonical_form() {
    let f = write("spaced.ielf", "( p->q )  ->  [] p");
    let o = ielc(&["parse", "--kind", "formula", f.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "(p -> q) -> []p");
}

#[test]
fn erase_formula_and_term() {
    let f = write("box.ielf", "[]p");
    let o = ielc(&["erase", "--formula", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(p -> Q) -> Q");
    let t = write("erase.ielt", "\\x:p. box [] in x");
    let o = ielc(&["erase", "--term", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\\k. k x"), "{}", stdout(&o));
}

#[test]
fn translate_round_trip() {
    let t = write("k.ielt", "\\f:[](p -> q). \\a:[]p. box [g:p -> q = f, y:p = a] in g y");
    let o = ielc(&["translate", "--to-hilbert", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let h = write("k.ielh", &stdout(&o));
    let o = ielc(&["translate", "--to-nd", h.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": [](p -> q) -> []p -> []q"), "{}", stdout(&o));
}

#[test]
fn props_witnesses() {
    let r = write("reflect.ielt", "box [] in (\\a:p. a)");
    let o = ielc(&["props", "--reflect", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": p -> p"));

    let d = write("dp2.ielt", "inr[p \\/ (q -> q)] (\\a:q. a)");
    let (code, v) = json(&["props", "--dp", d.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["side"], "Right");
    assert_eq!(v["result"]["formula"], "q -> q");

    let n = write("notdisj.ielt", "\\a:p. a");
    let o = ielc(&["props", "--dp", n.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic() {
    let a = ielc(&["selftest", "--seed", "5", "--count", "15"]);
    let b = ielc(&["selftest", "--seed", "5", "--count", "15"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().all(|l| l.ends_with(" ok")));
}

#[test]
fn color_only_when_asked() {
    let f = write("color.ielt", "\\x:p. x x");
    let plain = ielc(&["check", f.to_str().unwrap()]);
    assert!(!stderr(&plain).contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_ielc"))
        .args(["check", f.to_str().unwrap()])
        .env("IELC_COLOR", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&colored.stderr).contains('\x1b'));
}
