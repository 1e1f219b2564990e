use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sgo_core::cli::hasse_edges;
use sgo_core::superroots::{box_weights, decompose, is_relevant, leq, SuperWeight};

fn sgo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgo")).args(args).env_remove("SGO_PRECISION").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sgo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn enumerate_zero_box() {
    let v = json(&sgo(&["enumerate", "--M", "1", "--N", "2", "--box", "0"]));
    assert_eq!(v["schema"], "sgo/1");
    assert_eq!(v["count"], 1);
    assert_eq!(v["weights"][0]["relevant"], true);
    assert_eq!(v["weights"][0]["weight"]["theta"], serde_json::json!([0, 0]));
}

#[test]
fn enumerate_relevant_count_matches_scan() {
    let v = json(&sgo(&["enumerate", "--M", "1", "--N", "3", "--box", "1"]));
    let scan = box_weights(1, 3, 1).unwrap().iter().filter(|w| is_relevant(w)).count();
    assert_eq!(v["relevant_count"].as_u64().unwrap() as usize, scan);
    for e in v["weights"].as_array().unwrap() {
        assert!(e["relevant"] == false || e["hw_dominant"] == true);
    }
}

#[test]
fn enumerate_text_format() {
    let out = sgo(&["enumerate", "--M", "1", "--N", "2", "--box", "0", "--format", "text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("relevant=true") && s.contains("# 1 orbit indices, 1 relevant"));
}

#[test]
fn closure_of_zero_box_is_one_node() {
    let s = String::from_utf8(sgo(&["closure", "--M", "1", "--N", "2", "--box", "0"]).stdout).unwrap();
    assert_eq!(s.matches("label=").count(), 1);
    assert!(!s.contains("->"));
}

#[test]
fn closure_edges_are_the_brute_force_reduction() {
    let s = String::from_utf8(sgo(&["closure", "--M", "1", "--N", "2", "--box", "1"]).stdout).unwrap();
    let ws: Vec<SuperWeight> = box_weights(1, 2, 1).unwrap().into_iter().filter(is_relevant).collect();
    let mut covers = 0;
    for a in &ws {
        for b in &ws {
            let lt = |x: &SuperWeight, y: &SuperWeight| x != y && leq(x, y).unwrap();
            if lt(a, b) && !ws.iter().any(|c| lt(a, c) && lt(c, b)) {
                covers += 1;
                let d = decompose(b, a).unwrap().unwrap();
                assert!(d.is_nonnegative());
            }
        }
    }
    assert_eq!(s.matches("->").count(), covers);
    assert_eq!(hasse_edges(&ws).unwrap().len(), covers);
    assert_eq!(s, String::from_utf8(sgo(&["closure", "--M", "1", "--N", "2", "--box", "1"]).stdout).unwrap());
}

#[test]
fn roots_command() {
    let v = json(&sgo(&["roots", "--M", "1", "--N", "3"]));
    assert_eq!(v["simple_roots"][2]["parity"], "Even");
    assert_eq!(v["composite_gl_n"][1], serde_json::json!([0, 0, 1]));
}

#[test]
fn classify_and_semi_infinite_from_files() {
    let m = scratch("m.json", r#"{"n": 2, "precision": "inf", "entries": [[[[1,1,1]], []], [[[0,1,1]], [[1,1,1]]]]}"#);
    let v = json(&sgo(&["classify", "--matrix", m.to_str().unwrap(), "--M", "1", "--N", "2"]));
    assert_eq!((v["lambda"].clone(), v["theta"].clone()), (serde_json::json!([1]), serde_json::json!([0, 1])));
    let p = scratch(
        "p.json",
        r#"{"grM": {"n": 1, "precision": "inf", "entries": [[[[-1,1,1]]]]},
            "grN": {"n": 2, "precision": "inf", "entries": [[[[0,1,1]], []], [[[0,1,1]], [[1,1,1]]]]}}"#,
    );
    let v = json(&sgo(&["semi-infinite", "--matrix", p.to_str().unwrap(), "--M", "1", "--N", "2"]));
    assert_eq!((v["lambda"].clone(), v["theta"].clone()), (serde_json::json!([1]), serde_json::json!([0, 1])));
    let g = scratch("g.json", r#"{"n": 1, "precision": "inf", "entries": [[[[-2,1,1]]]]}"#);
    let v = json(&sgo(&["semi-infinite", "--matrix", g.to_str().unwrap(), "--M", "1", "--N", "2", "--component", "grM"]));
    assert_eq!((v["lambda"].clone(), v["theta"].clone()), (serde_json::json!([2]), serde_json::json!([0, 0])));
}

#[test]
fn precision_exhaustion_exits_3() {
    let m = scratch("z.json", r#"{"n": 2, "precision": 0, "entries": [[[], []], [[], []]]}"#);
    assert_eq!(sgo(&["classify", "--matrix", m.to_str().unwrap(), "--M", "1", "--N", "2"]).status.code(), Some(3));
}

#[test]
fn bad_input_exits_2() {
    let m = scratch("bad.json", r#"{"n": 2, "precision": "sometimes", "entries": []}"#);
    assert_eq!(sgo(&["classify", "--matrix", m.to_str().unwrap(), "--M", "1", "--N", "2"]).status.code(), Some(2));
    assert_eq!(sgo(&["enumerate", "--M", "2", "--N", "2"]).status.code(), Some(2));
    assert_eq!(sgo(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn precision_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_sgo"))
        .args(["verify", "config", "--M", "1", "--N", "2", "--samples", "1"])
        .env("SGO_PRECISION", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zastava_bound_command() {
    let wo = scratch("wo.json", r#"{"lambda":[0],"theta":[-1,1],"theta_prime":[]}"#);
    let ws = scratch("ws.json", r#"{"lambda":[0],"theta":[0,0],"theta_prime":[]}"#);
    let v = json(&sgo(&["zastava-bound", "--wO", wo.to_str().unwrap(), "--wS", ws.to_str().unwrap()]));
    assert_eq!((v["bound"].as_i64(), v["zastava_dim"].as_i64(), v["dichotomy"].as_str()), (Some(1), Some(2), Some("even")));
    assert_eq!(sgo(&["zastava-bound", "--wO", ws.to_str().unwrap(), "--wS", wo.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_exponents_command() {
    let d = scratch(
        "d.json",
        r#"{"points": {"x1": {"lambda":[-1],"theta":[1,0],"theta_prime":[]}, "c": {"lambda":[0],"theta":[1,0],"theta_prime":[]}}}"#,
    );
    let v = json(&sgo(&["config-exponents", "--divisor", d.to_str().unwrap()]));
    assert_eq!(v["exponents"], serde_json::json!({"c": 1, "x1": 0}));
    assert_eq!(v["open_stratum"], true);
}

#[test]
fn verify_semi_infinite_suite_exits_0() {
    let out = sgo(&["verify", "prop81", "--M", "1", "--N", "3", "--samples", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema"], "sgo.suite-report/1");
}

#[test]
fn unknown_suite_exits_2() {
    assert_eq!(sgo(&["verify", "nonsense", "--M", "1", "--N", "3"]).status.code(), Some(2));
}

#[test]
fn verify_output_is_reproducible() {
    let a = scratch("a.json", "");
    let args = |p: &str| vec!["verify", "relevance", "--M", "1", "--N", "3", "--box", "1", "--json", p].into_iter().map(String::from).collect::<Vec<_>>();
    let run = |p: &PathBuf| Command::new(env!("CARGO_BIN_EXE_sgo")).args(args(p.to_str().unwrap())).output().unwrap();
    assert!(run(&a).status.success());
    let first = std::fs::read(&a).unwrap();
    assert!(run(&a).status.success());
    assert_eq!(first, std::fs::read(&a).unwrap());
    let stdout = sgo(&["verify", "relevance", "--M", "1", "--N", "3", "--box", "1"]).stdout;
    assert_eq!(first, stdout);
}
