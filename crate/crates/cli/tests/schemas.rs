use jsonschema::JSONSchema;
use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn schema(command: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{command}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn check(args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("r");
    let out = Command::new(env!("CARGO_BIN_EXE_paircorr"))
        .args(args)
        .args(["--out", prefix.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.code().unwrap() != 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let s = schema(printed["command"].as_str().unwrap());
    for doc in [&printed, &written] {
        if let Err(errors) = s.validate(doc) {
            let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
            panic!("{args:?}: {msgs:?}");
        }
    }
}

#[test]
fn every_command_matches_its_schema() {
    check(&["gaps", "--n", "5000"]);
    check(&["paircorr", "--n", "2000"]);
    check(&["paircorr", "--n", "2000", "--bin", "0.25"]);
    check(&["smoothed", "--n", "200,400"]);
    check(&["dual-check", "--k", "100,1000", "--y", "1000,10000"]);
    check(&["count", "rs", "--m-hi", "40"]);
    check(&["count", "rs", "--m-hi", "1024", "--exponent", "1e-9"]);
    check(&["count", "cz", "--m", "64", "--h1", "4", "--h2", "8"]);
    check(&["count", "b1", "--k", "200", "--y1", "1000", "--y2", "1000", "--alpha", "3"]);
    check(&["optimize", "--grid-n", "64", "--refine", "1"]);
    check(&["holder"]);
}

#[test]
fn schemas_reject_missing_keys() {
    let s = schema("optimize");
    let doc = serde_json::json!({
        "command": "optimize", "status": "ok", "params": {}, "kappa": ["12/43", "24/43"],
        "violations": [], "timing_ms": 1.0
    });
    assert!(!s.is_valid(&doc));
    let s = schema("holder");
    let bad = serde_json::json!({
        "command": "holder", "status": "ok", "params": {},
        "rows": [{"k": 2, "theta_k": "0.333", "decimal": "0.333333333333"}],
        "violations": [], "timing_ms": 1.0
    });
    assert!(!s.is_valid(&bad));
}
