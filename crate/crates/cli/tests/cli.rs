use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ultratree");

fn s3(bc: &str) -> Value {
    json!({"points": ["a", "b", "c"], "distances": [["a", "b", "1/2"], ["a", "c", "1/2"], ["b", "c", bc]]})
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, value: &Value) -> PathBuf {
        self.raw(name, &value.to_string())
    }

    fn raw(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }
}

fn run(args: &[&str], input: &Path) -> Output {
    Command::new(BIN).args(args).arg("--input").arg(input).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn end_map(dir: &Dir, name: &str, target: Value, map: Value) -> PathBuf {
    dir.file(name, &json!({"source": s3("1/4"), "target": target, "map": map}))
}

fn identity() -> Value {
    json!({"a": "a", "b": "b", "c": "c"})
}

#[test]
fn validate_reports_and_exit_codes() {
    let dir = Dir::new();
    let good = run(&["validate"], &dir.file("s3.json", &s3("1/4")));
    assert_eq!(code(&good), 0);
    assert_eq!(stdout_json(&good)["ok"], json!(true));

    let broken = json!({"points": ["a", "b", "c"], "distances": [["a", "b", "1/2"], ["a", "c", "1/4"], ["b", "c", "1/8"]]});
    let bad = run(&["validate"], &dir.file("bad.json", &broken));
    assert_eq!(code(&bad), 1);
    let v = stdout_json(&bad);
    let triple = &v["violations"][0];
    assert_eq!(triple["kind"], json!("strong_triangle"));
    assert_eq!((triple["x"].as_str(), triple["via"].as_str(), triple["y"].as_str()), (Some("a"), Some("c"), Some("b")));

    assert_eq!(code(&run(&["validate"], &dir.raw("junk.json", "{\"points\": ["))), 2);
    assert_eq!(code(&run(&["validate"], &dir.raw("other.json", "{\"colour\": 3}"))), 2);
    assert_eq!(code(&run(&["validate"], &dir.0.path().join("missing.json"))), 2);
}

#[test]
fn to_tree_matches_the_fixture_and_round_trips() {
    let dir = Dir::new();
    let out = run(&["to-tree", "--roundtrip"], &dir.file("s3.json", &s3("1/4")));
    assert_eq!(code(&out), 0);
    let tree = stdout_json(&out);
    let levels: Vec<&str> = tree["nodes"].as_array().unwrap().iter().map(|n| n["level"].as_str().unwrap()).collect();
    assert_eq!(levels, ["1", "1/2", "1/4", "1/4", "1/8", "1/8"]);
    let labels: Vec<&str> = tree["nodes"].as_array().unwrap().iter().filter_map(|n| n["label"].as_str()).collect();
    assert_eq!(labels, ["a", "b", "c"]);
    assert_eq!(tree["leaves"].as_object().unwrap().len(), 3);

    let tree_path = dir.file("tree.json", &tree);
    let ends = run(&["ends", "--roundtrip"], &tree_path);
    assert_eq!(code(&ends), 0);
    assert_eq!(stdout_json(&ends), s3("1/4"));

    let rt = run(&["roundtrip"], &tree_path);
    assert_eq!(code(&rt), 0);
    assert_eq!(stdout_json(&rt)["ok"], json!(true));
}

#[test]
fn dot_output() {
    let dir = Dir::new();
    let space = dir.file("s3.json", &s3("1/4"));
    for args in [&["to-tree", "--dot"][..], &["export-dot"][..]] {
        let out = run(args, &space);
        assert_eq!(code(&out), 0);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("digraph"), "{text}");
        assert!(text.contains("n0 [label=\"0\\nu=1\\nt=0.0000\"]"), "{text}");
        assert!(text.contains("4 b\\nu=1/8"), "{text}");
        assert_eq!(text.matches("arrowhead=normal").count(), 3);
    }
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = Dir::new();
    let space = dir.file("s3.json", &s3("1/4"));
    let target = dir.0.path().join("out.json");
    let out = Command::new(BIN).args(["to-tree", "--output"]).arg(&target).arg("--input").arg(&space).output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read(&target).unwrap(), run(&["to-tree"], &space).stdout);
}

#[test]
fn induce_s3_fixture() {
    let dir = Dir::new();
    let f = end_map(&dir, "f.json", s3("1/2"), identity());
    let out = run(&["induce", "--samples", "500"], &f);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["majorant"], json!([["0", "0"], ["1/4", "1/2"], ["1", "1"]]));
    assert_eq!(v["checks"]["lipschitz"]["ok"], json!(true));
    assert_eq!(v["checks"]["proper"]["ok"], json!(true));
    assert_eq!(v["checks"]["bornologous"]["ok"], json!(true));
    assert_eq!(v["checks"]["recovers_end_map"], json!(true));
}

#[test]
fn induce_identity_and_constant_maps() {
    let dir = Dir::new();
    let id = run(&["induce"], &end_map(&dir, "id.json", s3("1/4"), identity()));
    assert_eq!(code(&id), 0);
    assert_eq!(stdout_json(&id)["majorant"], json!([["0", "0"], ["1", "1"]]));

    let constant = json!({"a": "a", "b": "a", "c": "a"});
    let out = run(&["induce"], &end_map(&dir, "const.json", s3("1/4"), constant));
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["majorant"], json!([["0", "0"], ["1", "1"]]));
    assert_eq!(v["checks"]["proper"]["ok"], json!(true));
}

#[test]
fn checks_on_maps() {
    let dir = Dir::new();
    let f = end_map(&dir, "f.json", s3("1/2"), identity());
    for kind in ["lipschitz", "proper", "coarse"] {
        let out = run(&["check", kind, "--samples", "300", "--seed", "7"], &f);
        assert_eq!(code(&out), 0, "{kind}");
        assert_eq!(stdout_json(&out)["ok"], json!(true), "{kind}");
    }

    let same = run(&["check", "equiv", "--other", f.to_str().unwrap()], &f);
    assert_eq!(code(&same), 0);
    assert_eq!(stdout_json(&same)["equivalent"], json!(true));

    let g = end_map(&dir, "g.json", s3("1/2"), json!({"a": "a", "b": "c", "c": "c"}));
    let differ = run(&["check", "equiv", "--other", g.to_str().unwrap()], &f);
    assert_eq!(code(&differ), 1);
    assert_eq!(stdout_json(&differ)["equivalent"], json!(false));

    assert_eq!(code(&run(&["check", "equiv"], &f)), 2);
}

#[test]
fn non_proper_reparametrization_fails_the_proper_check() {
    let dir = Dir::new();
    let tree = stdout_json(&run(&["to-tree"], &dir.file("s3.json", &s3("1/4"))));
    let leaves: Vec<String> = tree["leaves"].as_object().unwrap().keys().cloned().collect();
    let sigma: serde_json::Map<String, Value> = leaves.iter().map(|l| (l.clone(), json!(l.parse::<u64>().unwrap()))).collect();
    let flat: serde_json::Map<String, Value> =
        leaves.iter().map(|l| (l.clone(), json!([["0", "1/2"], ["1/2", "1/2"], ["1", "1"]]))).collect();
    let m = dir.file("m.json", &json!({"source": tree, "target": tree, "sigma": sigma, "reparam": flat}));
    let out = run(&["check", "proper"], &m);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["ok"], json!(false));
}

#[test]
fn homotopy_between_equal_maps_is_constant() {
    let dir = Dir::new();
    let f = end_map(&dir, "f.json", s3("1/2"), identity());
    let out = run(&["homotopy-eval", "--other", f.to_str().unwrap(), "--point", "b@1/8", "--t", "0.25"], &f);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["point"]["level"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["start"]["level"], json!("1/4"));

    let outside = run(&["homotopy-eval", "--other", f.to_str().unwrap(), "--point", "b@1/8", "--t", "2"], &f);
    assert_eq!(code(&outside), 2);
    let unknown = run(&["homotopy-eval", "--other", f.to_str().unwrap(), "--point", "zz@1/8"], &f);
    assert_ne!(code(&unknown), 0);
}

#[test]
fn prune_and_isometry() {
    let dir = Dir::new();
    let with_tip = json!({
        "nodes": [
            {"id": 0, "level": "1", "children": [1]},
            {"id": 1, "level": "1/2", "children": [2, 3]},
            {"id": 2, "level": "1/4", "children": [], "label": "x"},
            {"id": 3, "level": "1/4", "children": [4, 5]},
            {"id": 4, "level": "1/8", "children": [], "label": "y"},
            {"id": 5, "level": "1/8", "children": []}
        ],
        "leaves": {"2": "RAY", "4": "RAY", "5": "TIP"}
    });
    let pruned = run(&["prune"], &dir.file("tip.json", &with_tip));
    assert_eq!(code(&pruned), 0);
    let p = stdout_json(&pruned);
    assert!(p["leaves"].as_object().unwrap().values().all(|k| k == "RAY"));
    assert_eq!(p["leaves"].as_object().unwrap().len(), 2);

    let space = dir.file("s3.json", &s3("1/4"));
    let a = dir.file("a.json", &stdout_json(&run(&["to-tree"], &space)));
    let renamed = json!({"points": ["p", "q", "r"], "distances": [["q", "r", "1/2"], ["q", "p", "1/2"], ["r", "p", "1/4"]]});
    let b = dir.file("b.json", &stdout_json(&run(&["to-tree"], &dir.file("renamed.json", &renamed))));
    let yes = run(&["isometry", "--other", b.to_str().unwrap()], &a);
    assert_eq!(code(&yes), 0);
    assert_eq!(stdout_json(&yes)["isometric"], json!(true));

    let c = dir.file("c.json", &stdout_json(&run(&["to-tree"], &dir.file("s3c.json", &s3("1/2")))));
    let no = run(&["isometry", "--other", c.to_str().unwrap()], &a);
    assert_eq!(code(&no), 1);
    assert_eq!(stdout_json(&no)["correspondence"], Value::Null);
}

fn binary(k: u32) -> Value {
    let mut vertices = vec!["v".to_string()];
    let mut edges = Vec::new();
    let mut frontier = vec!["v".to_string()];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &frontier {
            for side in ["0", "1"] {
                let w = format!("{v}{side}");
                vertices.push(w.clone());
                edges.push(json!([v, w]));
                next.push(w);
            }
        }
        frontier = next;
    }
    json!({"vertices": vertices, "edges": edges, "rays": frontier})
}

#[test]
fn freudenthal_pipeline() {
    let dir = Dir::new();
    let finite = json!({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["a", "c"]]});
    let out = run(&["freudenthal"], &dir.file("finite.json", &finite));
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["end_count"], json!(0));
    assert_eq!(v["compact"], json!(true));

    let decorated = json!({"vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["b", "c"], ["b", "d"]], "rays": ["c"]});
    assert_eq!(stdout_json(&run(&["freudenthal"], &dir.file("ray.json", &decorated)))["end_count"], json!(1));

    for k in 0..4 {
        let out = run(&["freudenthal"], &dir.file(&format!("b{k}.json"), &binary(k)));
        assert_eq!(stdout_json(&out)["end_count"], json!(1 << k));
    }

    let b2 = dir.file("b2.json", &binary(2));
    let four_rays = json!({"vertices": ["x"], "edges": [], "rays": ["x", "x", "x", "x"]});
    let same = run(&["freudenthal", "--other", dir.file("four.json", &four_rays).to_str().unwrap()], &b2);
    assert_eq!(code(&same), 0);
    let differ = run(&["freudenthal", "--other", dir.file("b1.json", &binary(1)).to_str().unwrap()], &b2);
    assert_eq!(code(&differ), 1);

    let cyclic = json!({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"], ["c", "a"]]});
    assert_eq!(code(&run(&["freudenthal"], &dir.file("cyclic.json", &cyclic))), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = Dir::new();
    let f = end_map(&dir, "f.json", s3("1/2"), identity());
    let first = run(&["induce", "--seed", "3", "--samples", "200"], &f);
    let second = run(&["induce", "--seed", "3", "--samples", "200"], &f);
    assert_eq!(first.stdout, second.stdout);
    let b3 = dir.file("b3.json", &binary(3));
    assert_eq!(run(&["freudenthal"], &b3).stdout, run(&["freudenthal"], &b3).stdout);
}

#[test]
fn wrong_input_kind_is_an_input_error() {
    let dir = Dir::new();
    let space = dir.file("s3.json", &s3("1/4"));
    assert_eq!(code(&run(&["ends"], &space)), 2);
    assert_eq!(code(&run(&["induce"], &space)), 2);
    assert_eq!(code(&run(&["freudenthal"], &space)), 2);
}
