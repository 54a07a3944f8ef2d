use std::process::{Command, Output};

use serde_json::Value;

fn locdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locdiv")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = locdiv(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn numbers(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Number(n) => out.push(n.to_string()),
        Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
        Value::Object(o) => o.values().for_each(|x| numbers(x, out)),
        _ => {}
    }
}

#[test]
fn family_h1loc_has_class_of_order_p() {
    let v = json(&["h1loc", "--p", "5", "--n", "3", "--family", "n3-j-eq-m"]);
    assert_eq!(v["cohomology"]["h1loc"], serde_json::json!([5]));
    assert_eq!(v["certificate"]["class_order"], 5);
    assert_eq!(v["certificate"]["valid"], true);
}

#[test]
fn lower_unipotent_group() {
    let v = json(&["analyze", "--gens", "[[[1,0],[5,1]]]", "--p", "5", "--n", "2"]);
    assert_eq!(v["group_order"], 5);
    assert_eq!(v["triangularity"], "lower");
    assert_eq!(v["cohomology"]["h1loc"], serde_json::json!([]));
    let notes = v["preconditions"]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("G1 is trivial")));
    assert!(v["profile"].is_null());
}

#[test]
fn trivial_group() {
    let v = json(&["h1loc", "--gens", "[]", "--p", "5", "--n", "2"]);
    assert_eq!(v["group_order"], 1);
    assert_eq!(v["cohomology"]["h1loc"], serde_json::json!([]));
    assert_eq!(v["cohomology"]["h1"], serde_json::json!([]));
}

#[test]
fn report_roundtrips_through_file_input() {
    let v = json(&["family", "j-lt-m", "--p", "5", "--n", "4"]);
    let dir = std::env::temp_dir().join(format!("locdiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let w = json(&["h1loc", "--file", path.to_str().unwrap()]);
    assert_eq!(v["cohomology"], w["cohomology"]);
    assert_eq!(v["group_order"], w["group_order"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let args = ["analyze", "--p", "5", "--n", "3", "--family", "n3-j-gt-m"];
    let v = json(&args);
    let mut expected = Vec::new();
    numbers(&v, &mut expected);
    let mut text_args = args.to_vec();
    text_args.extend(["--output", "text"]);
    let out = locdiv(&text_args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // Field names such as `g1_order` contribute digits too, so only containment is checked.
    let found: std::collections::HashSet<&str> =
        text.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).collect();
    for x in &expected {
        assert!(found.contains(x.as_str()), "missing {x}");
    }
}

#[test]
fn oracle_backend_matches() {
    let gens = "[[[1,0],[5,1]],[[6,0],[0,6]],[[1,0],[0,7]]]";
    let a = json(&["h1loc", "--gens", gens, "--p", "5", "--n", "2"]);
    let b = json(&["h1loc", "--gens", gens, "--p", "5", "--n", "2", "--oracle"]);
    for k in ["z1", "b1", "h1", "z1loc", "h1loc"] {
        assert_eq!(a["cohomology"][k], b["cohomology"][k], "{k}");
    }
    assert_eq!(b["cohomology"]["backend"], "oracle");
}

#[test]
fn isogeny_levels() {
    let v = json(&["isogeny", "--family", "j-ge-m-eq", "--p", "5", "--n", "5", "--i", "4"]);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 5);
    let upper: Vec<bool> = levels.iter().map(|l| l["upper"].as_bool().unwrap()).collect();
    assert_eq!(upper, [true, true, true, true, false]);
}

#[test]
fn search_and_small_grid() {
    let v = json(&["search", "--p", "5", "--n", "2", "--shape", "upper"]);
    assert_eq!(v["hits"], serde_json::json!([]));
    let g = json(&["grid", "--primes", "5", "--exponents", "2", "--no-families"]);
    assert_eq!(g["violations"], serde_json::json!([]));
    assert!(g["predicate_true"].as_u64().unwrap() > 0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| locdiv(args).status.code();
    assert_eq!(code(&["analyze", "--gens", "[[[1,0],[5", "--p", "5", "--n", "2"]), Some(1));
    assert_eq!(code(&["analyze", "--gens", "[[[25,0],[0,1]]]", "--p", "5", "--n", "2"]), Some(1));
    assert_eq!(code(&["analyze", "--gens", "[[[5,0],[0,1]]]", "--p", "5", "--n", "2"]), Some(1));
    assert_eq!(code(&["analyze", "--gens", "[]", "--p", "6", "--n", "2"]), Some(1));
    assert_eq!(code(&["analyze", "--gens", "[]"]), Some(1));
    assert_eq!(code(&["analyze", "--gens", "[]", "--p", "5", "--n", "2", "--family", "j-lt-m"]), Some(1));
    assert_eq!(code(&["family", "j-lt-m", "--p", "5", "--n", "2"]), Some(1));
    assert_eq!(code(&["family", "sideways", "--p", "5", "--n", "4"]), Some(1));
    assert_eq!(code(&["analyze", "--file", "/nonexistent/group.json"]), Some(1));
    assert_eq!(code(&["search", "--p", "5", "--n", "1", "--shape", "lower"]), Some(1));
    assert_eq!(code(&["grid", "--primes", "4", "--exponents", "2"]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["family", "j-lt-m", "--p", "5", "--n", "4", "--cap", "100"]), Some(2));
    assert_eq!(code(&["h1loc", "--family", "j-lt-m", "--p", "5", "--n", "4", "--oracle"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}
