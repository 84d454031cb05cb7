use std::fs;
use std::process::{Command, Output};

fn treeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeval")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn pebble_find_fractional() {
    let out = treeval(&["pebble", "find", "--d", "2", "--h", "3", "--variant", "fractional", "--c", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("cost: 5/2\n"), "{text}");
    assert!(text.contains("witness"));
}

#[test]
fn verify_exhaustive_black() {
    let out = treeval(&["verify", "--d", "2", "--h", "2", "--k", "2", "--compiler", "black", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "64/64 inputs OK");
}

#[test]
fn missing_instance_is_usage_error() {
    let out = treeval(&["eval", "--instance", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(treeval(&["pebble", "find", "--d", "2"]).status.code(), Some(2));
    assert_eq!(treeval(&["pebble", "find", "--d", "2", "--h", "3", "--variant", "purple"]).status.code(), Some(2));
    assert_eq!(treeval(&["compile", "--compiler", "logsave", "--k", "2", "--m", "5"]).status.code(), Some(2));
}

#[test]
fn thrifty_violation_exits_one() {
    let out = treeval(&["thrifty", "--d", "2", "--h", "3", "--k", "2", "--compiler", "logsave", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not thrifty"));
    let ok = treeval(&["thrifty", "--d", "2", "--h", "2", "--k", "2", "--compiler", "fractional"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn invalid_sequence_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "incw 4 1\nfinish 1\n").unwrap();
    let out = treeval(&["pebble", "verify", "--d", "2", "--h", "3", "--sequence", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compile_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("bp.json");
    let dot = dir.path().join("bp.dot");
    let p = json.to_str().unwrap();
    let out = treeval(&["compile", "--d", "2", "--h", "2", "--k", "3", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("states: 16"));
    let out = treeval(&["export-dot", "--program", p, "--out", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = treeval(&["verify", "--program", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn json_eval_and_instance_file() {
    let out = treeval(&["--json", "eval", "--d", "2", "--h", "3", "--k", "3", "--seed", "5", "--single"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], v["node_values"][0]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    fs::write(
        &path,
        r#"{"d":2,"h":2,"k":2,"leaves":[2,1],"tables":{"1":[1,2,2,1]}}"#,
    )
    .unwrap();
    let out = treeval(&["--json", "eval", "--instance", path.to_str().unwrap(), "--kind", "boolean"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 0);
}

#[test]
fn pebble_show_strategy() {
    let out = treeval(&["pebble", "show", "--d", "2", "--h", "4", "--variant", "whiteslide", "--strategy", "whiteslide"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("valid whiteslide pebbling, cost 8/3"));
}

#[test]
fn search_lp_over_skeleton() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.txt");
    let out = treeval(&["pebble", "find", "--d", "2", "--h", "3", "--variant", "fractional", "--c", "2"]);
    let witness: String = stdout(&out).lines().skip(3).map(|l| format!("{l}\n")).collect();
    fs::write(&path, witness).unwrap();
    let out = treeval(&["search", "--graph", "tree", "--d", "2", "--h", "3", "--lp", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let cost = text.lines().next().unwrap().rsplit(' ').next().unwrap();
    assert_eq!(cost, "5/2", "{text}");
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let run = || {
        let o = treeval(&["report", "--out", out.to_str().unwrap(), "--k-max", "5", "--h-max", "3"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        fs::read_to_string(out.join("pebbling.csv")).unwrap() + &fs::read_to_string(out.join("exponents.csv")).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.contains("2,3,fractional,2,5/2,5/2,true"));
}
