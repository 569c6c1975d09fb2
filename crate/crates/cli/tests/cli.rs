use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kempkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kempkit")).args(args).env_remove("KEMPKIT_CAP").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn analyze_reports_prime_coset_pair() {
    let o = kempkit(&["analyze", "--group", "Z5", "--a", "0,1,2", "--b", "0,1,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("condition (I) holds"), "{text}");
    assert!(text.contains("SP4"), "{text}");
    assert!(text.contains("unique sum c = 4"), "{text}");

    let o = kempkit(&["--format", "json", "analyze", "--group", "Z5", "--a", "0,1,2", "--b", "0,1,3"]);
    let v = json(&o);
    assert_eq!(v["certificate"]["schema"], "kcert/1");
    assert_eq!(v["certificate"]["pair"]["tag"], "SP4");
    assert_eq!(v["certificate"]["pair"]["unique_sum"], serde_json::json!([4]));
}

#[test]
fn analyze_whole_group_progressions() {
    let o = kempkit(&["--format", "json", "analyze", "--group", "Z4", "--a", "0,1", "--b", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["certificate"]["subgroup"], serde_json::json!([[0], [1], [2], [3]]));
    assert_eq!(v["certificate"]["pair"]["tag"], "SP1");
}

#[test]
fn analyze_without_condition_i() {
    let o = kempkit(&["analyze", "--group", "Z5", "--a", "0,1", "--b", "0,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("condition (I) fails: |A+B|=4"), "{}", stdout(&o));
}

#[test]
fn analyze_flags_the_prime_sp4_gap() {
    let args = ["analyze", "--group", "Z6", "--a", "0,3,4", "--b", "0,2,3,4"];
    let o = kempkit(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("ALARM"));
    let mut any = args.to_vec();
    any.push("--sp4-any-order");
    let o = kempkit(&any);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SP4"));
}

#[test]
fn kappa_and_hyper_atom() {
    let o = kempkit(&["--format", "json", "kappa", "--group", "Z6", "--set", "0,2,3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["kappa"], 2);
    assert_eq!(v["separable"], true);
    assert!(!v["atoms"].as_array().unwrap().is_empty());

    let o = kempkit(&["kappa", "--group", "Z3", "--set", "0,1,2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("not 1-separable") && text.contains("kappa_1 = |G|-2k+1 = 2"), "{text}");

    let o = kempkit(&["--format", "json", "hyperatom", "--group", "Z6", "--set", "0,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["hyper_atom"], serde_json::json!([[0], [3]]));
    assert_eq!(v["quotient_order"], 3);
    let shape = v["quotient_shape"].as_str().unwrap();
    assert!(shape == "arithmetic-progression" || shape == "both", "{shape}");
}

#[test]
fn precondition_messages() {
    let o = kempkit(&["hyperatom", "--group", "Z6", "--set", "0,1,2,3,4,5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not 1-separable"));
    let o = kempkit(&["kappa", "--group", "Z6", "--set", "0,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not generate"), "{}", stderr(&o));
}

#[test]
fn dichotomy_outcomes() {
    let o = kempkit(&["--format", "json", "dichotomy", "--group", "Z7", "--a", "0,1,3", "--b", "1,2,3,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pair"]["tag"], "SP3");
    let o = kempkit(&["dichotomy", "--group", "Z5", "--a", "0,1", "--b", "0,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(kempkit(&["bogus"]).status.code(), Some(1));
    assert_eq!(kempkit(&["--jobs", "0", "kappa", "--group", "Z5", "--set", "0,1"]).status.code(), Some(1));
    let o = kempkit(&["analyze", "--group", "Z5", "--a", "0,1,x", "--b", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("position 4"), "{}", stderr(&o));
    assert_eq!(kempkit(&["analyze", "--group", "Q5", "--a", "0", "--b", "0"]).status.code(), Some(1));
    assert_eq!(kempkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn cap_comes_from_the_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_kempkit"))
            .args(["kappa", "--group", "Z5", "--set", "0,1"])
            .env("KEMPKIT_CAP", cap)
            .output()
            .unwrap()
    };
    let o = run("4");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cap 4"));
    assert_eq!(run("5").status.code(), Some(0));
    assert_eq!(run("nope").status.code(), Some(1));
}

#[test]
fn certificate_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = kempkit(&[
        "analyze",
        "--group",
        "Z2xZ4",
        "--a",
        "(0,0),(0,1),(0,2)",
        "--b",
        "(0,0),(0,1)",
        "--out",
        path_str(&cert),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = kempkit(&["verify", "--input", path_str(&cert)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK");

    let original: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let tamper = |edit: &dyn Fn(&mut Value)| {
        let mut v = original.clone();
        edit(&mut v);
        let p = dir.path().join("tampered.json");
        std::fs::write(&p, v.to_string()).unwrap();
        kempkit(&["verify", "--input", path_str(&p)])
    };
    let o = tamper(&|v| v["a1"] = serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("REJECTED"));
    let o = tamper(&|v| v["subgroup"] = serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(o.status.code(), Some(2));
    let o = tamper(&|v| v["pair"]["difference"] = serde_json::json!([1, 0]));
    assert_eq!(o.status.code(), Some(2));
    let o = tamper(&|v| v["quotient_element"] = serde_json::json!([1, 0]));
    assert_eq!(o.status.code(), Some(2));

    // A whole analysis report is accepted as input too.
    let report = dir.path().join("report.json");
    let o = kempkit(&["--format", "json", "analyze", "--group", "Z5", "--a", "0,1,2", "--b", "0,1,3"]);
    std::fs::write(&report, &o.stdout).unwrap();
    assert_eq!(kempkit(&["verify", "--input", path_str(&report)]).status.code(), Some(0));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(kempkit(&["verify", "--input", path_str(&garbage)]).status.code(), Some(1));
}

#[test]
fn census_writes_jsonl_and_reports_alarms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.jsonl");
    let o = kempkit(&["census", "--max-order", "6", "--jobs", "4", "--out", path_str(&out)]);
    // Prime-order SP4 leaves 720 pairs with condition (I) uncertified.
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("720 alarms"), "{}", stdout(&o));
    let lines = std::fs::read_to_string(&out).unwrap();
    assert_eq!(lines.lines().count(), 4797);
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["condition_i"], true);

    let clean = dir.path().join("clean.jsonl");
    let o = kempkit(&[
        "--format",
        "json",
        "census",
        "--max-order",
        "6",
        "--jobs",
        "4",
        "--sp4-any-order",
        "--out",
        path_str(&clean),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "census/1");
    assert_eq!(v["alarms"], 0);
    assert_eq!(v["certified"], 4797);
}

#[test]
fn sampled_census_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let args = [
            "census",
            "--max-order",
            "9",
            "--mode",
            "sample",
            "--samples",
            "150",
            "--seed",
            "7",
            "--all-pairs",
            "--sp4-any-order",
            "--jobs",
            jobs,
            "--out",
            path_str(&p),
        ];
        assert_eq!(kempkit(&args).status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    let a = run("a.jsonl", "1");
    assert_eq!(a, run("b.jsonl", "1"));
    assert_eq!(a, run("c.jsonl", "3"));
    assert!(!a.is_empty());
}

#[test]
fn oracle_exit_codes() {
    let o = kempkit(&["oracle", "kneser", "--group", "Z6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS kneser"));
    let o = kempkit(&["oracle", "kemperman", "--group", "Z6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kemperman"));
    assert_eq!(kempkit(&["oracle", "kemperman", "--group", "Z6", "--sp4-any-order"]).status.code(), Some(0));
    let o = kempkit(&["--format", "json", "oracle", "vosper", "--group", "Z7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 3);
    assert_eq!(kempkit(&["oracle", "vosper", "--group", "Z6"]).status.code(), Some(1));
    assert_eq!(kempkit(&["oracle", "isoperimetry", "--group", "Z2xZ4"]).status.code(), Some(0));
}
