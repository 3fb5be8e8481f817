use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use asmsym::schema::{ConfigurationFile, GraphFile};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asmsym")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn pathway_shorthand_and_klein_rows() {
    let v = json(&["pathways", "--group", "klein4"]);
    let counts: Vec<(u64, &str)> = v["rows"].as_array().unwrap().iter().map(|r| (r["m"].as_u64().unwrap(), r["n"].as_str().unwrap())).collect();
    assert_eq!(counts, [(1, "4"), (2, "3"), (4, "4")]);
    assert_eq!(v["total"], "11");
    let rows = json(&["trees", "count", "--group", "klein4", "-N", "3"]);
    assert_eq!(rows["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["trees", "count", "--group", "trivial:1", "-N", "4"]).status.code(), Some(0));
    assert_eq!(run(&["assembly", "acg", "--config", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["trees", "count", "--group", "nonsense", "-N", "4"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let settings = dir.path().join("s.json");
    std::fs::write(&settings, r#"{"caps": {"paths": 1}}"#).unwrap();
    let six = data("six_spheres.json");
    let out = run(&[
        "--settings",
        settings.to_str().unwrap(),
        "atlas",
        "zigzag",
        "--config",
        six.to_str().unwrap(),
        "--edges",
        "0..3",
        "--from",
        "e2n1",
        "--to",
        "e2n2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("TRUNCATED"));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"spheres": [], "colour": "a"}"#).unwrap();
    let out = run(&["assembly", "waut", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    let settings = dir.path().join("s.json");
    std::fs::write(&settings, r#"{"treads": 4}"#).unwrap();
    let out = run(&["--settings", settings.to_str().unwrap(), "group", "subgroups", "--group", "klein4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn octahedron_graph() {
    let octa = data("octahedron.json");
    let v = json(&["assembly", "acg", "--config", octa.to_str().unwrap()]);
    assert_eq!(v["edges"].as_array().unwrap().len(), 12);
    assert_eq!(v["dimension"], 18);
}

#[test]
fn cayley_commands() {
    let k4e = data("k4_minus_edge.json");
    let v = json(&["cayley", "check", "--graph", k4e.to_str().unwrap(), "--nonedges", "0-2"]);
    assert_eq!(v["convexifiable"], false);
    let legs = data("triangle_legs.json");
    let v = json(&["cayley", "polytope", "--graph", legs.to_str().unwrap(), "--nonedges", "0-2"]);
    assert_eq!(v["ineqs"].as_array().unwrap().len(), 3);
    assert_eq!(v["vars"], serde_json::json!(["0-2"]));
}

#[test]
fn outputs_are_deterministic_and_dot_renders() {
    let six = data("six_spheres.json");
    let args = ["atlas", "build", "--config", six.to_str().unwrap(), "--edges", "0..6"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_asmsym")).args(args).env("ASMSYM_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, threaded.stdout);
    let mut dot_args = args.to_vec();
    dot_args.extend(["--format", "dot"]);
    let dot = String::from_utf8(run(&dot_args).stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"e0n1\" -> \"e1n1\""), "{dot}");
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["group", "subgroups", "--group", "cyclic:4", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.records().count(), 3);
}

#[test]
fn input_files_round_trip() {
    for name in ["six_spheres.json", "octahedron.json"] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let file: ConfigurationFile = serde_json::from_str(&text).unwrap();
        let config = file.to_configuration().unwrap();
        let back = ConfigurationFile::from_configuration(&config);
        let again: ConfigurationFile = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(again, back);
    }
    for name in ["k4_minus_edge.json", "triangle_legs.json"] {
        let file: GraphFile = serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        let back = GraphFile::from_graph(&file.to_graph().unwrap());
        assert_eq!(back.edges, file.edges);
    }
}

#[test]
fn every_json_report_reparses() {
    let six = data("six_spheres.json");
    let octa = data("octahedron.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["trees", "enumerate", "--leaves", "4"],
        vec!["group", "mobius", "--group", "symmetric:3"],
        vec!["assembly", "waut", "--config", octa.to_str().unwrap()],
        vec!["assembly", "congruence", "--config", octa.to_str().unwrap()],
        vec!["atlas", "forest", "--config", six.to_str().unwrap(), "--edges", "0..3", "--from", "e0n1", "--to", "e3n1"],
        vec!["atlas", "coarse-paths", "--config", six.to_str().unwrap(), "--edges", "0..3", "--from", "e0n1", "--to", "e3n1"],
    ];
    for args in cases {
        let v = json(&args);
        assert!(v.get("truncated").is_some(), "{args:?}");
    }
}
