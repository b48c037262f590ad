use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use posetahedra::app::CliError;
use posetahedra::formats::{parse_polytope, PolytopeJson};
use posetahedra_core::geometry::{realize_poset_associahedron, GeometryError, RealizeOptions};
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(format!("{}.json", name)).display().to_string()
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_posetahedra"));
    c.env_remove("POSETAHEDRA_MAX_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(root().join("schemas").join(format!("{}.schema.json", name))).unwrap();
    jsonschema::JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(&v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{} schema rejects output: {:?}", schema_name, msgs);
}

#[test]
fn f_vectors_print_plainly() {
    assert_eq!(stdout(&run(&["assoc", "faces", &corpus("chain4"), "--fvector"])), "5 5 1\n");
    assert_eq!(stdout(&run(&["cyclo", "faces", &corpus("cclaw3"), "--fvector"])), "8 8 1\n");
    assert_eq!(stdout(&run(&["assoc", "faces", &corpus("claw3"), "--fvector", "--hvector"])), "6 6 1\n1 4 1\n");
    assert_eq!(stdout(&run(&["assoc", "faces", &corpus("chain5"), "--flag-check"])), "flag\n");
    assert_eq!(
        stdout(&run(&["assoc", "faces", &corpus("h6"), "--flag-check"])),
        "not flag: [[1,2],[3,4],[5,6]]\n"
    );
}

#[test]
fn outputs_are_byte_stable() {
    let cmds: Vec<Vec<String>> = vec![
        vec!["assoc".into(), "realize".into(), corpus("w5")],
        vec!["assoc".into(), "realize".into(), corpus("w5"), "--format".into(), "off".into()],
        vec!["cyclo".into(), "realize".into(), corpus("cchain3")],
        vec!["assoc".into(), "faces".into(), corpus("n4")],
        vec!["cyclo".into(), "faces".into(), corpus("cclaw3")],
        vec!["tubes".into(), corpus("w5"), "--max-tubings".into()],
        vec!["compact".into(), "demo-ratios".into()],
        vec!["compact".into(), "synthesize".into(), corpus("w5"), "--tubing".into(), "[[2,4],[2,3,4]]".into()],
    ];
    for c in cmds {
        let a = stdout(&bin().args(&c).output().unwrap());
        let b = stdout(&bin().args(&c).output().unwrap());
        assert_eq!(a, b, "{:?}", c);
        assert!(!a.is_empty());
    }
}

#[test]
fn outputs_match_schemas() {
    for (name, _) in posetahedra::corpus::POSETS {
        assert_valid("poset", &std::fs::read_to_string(corpus(name)).unwrap());
    }
    for (name, _) in posetahedra::corpus::AFFINE_POSETS {
        assert_valid("affine_poset", &std::fs::read_to_string(corpus(name)).unwrap());
    }
    for p in ["chain4", "w5", "claw4"] {
        assert_valid("polytope", &stdout(&run(&["assoc", "realize", &corpus(p)])));
        assert_valid("faces", &stdout(&run(&["assoc", "faces", &corpus(p)])));
        assert_valid("tubes", &stdout(&run(&["tubes", &corpus(p)])));
        assert_valid("tubes", &stdout(&run(&["tubes", &corpus(p), "--max-tubings"])));
    }
    for a in ["cchain3", "cclaw3"] {
        assert_valid("polytope", &stdout(&run(&["cyclo", "realize", &corpus(a)])));
        assert_valid("faces", &stdout(&run(&["cyclo", "faces", &corpus(a)])));
    }
    let point = stdout(&run(&["compact", "synthesize", &corpus("n4"), "--tubing", "[[2,4]]"]));
    assert_valid("config_point", &point);
    assert_valid("ratio_demo", &stdout(&run(&["compact", "demo-ratios", "--targets", "0,1,inf"])));
}

#[test]
fn schemas_reject_malformed_documents() {
    let s = schema("config_point");
    assert!(!s.is_valid(&serde_json::json!({"tubes": {"1,2": ["1/2", "0.5"]}})));
    assert!(!s.is_valid(&serde_json::json!({"tubes": {"1,2": ["1/0", "1/2"]}})));
    assert!(s.is_valid(&serde_json::json!({"tubes": {"1,2": ["-1/2", "1/2"]}})));
    assert!(!schema("poset").is_valid(&serde_json::json!({"covers": [[1, 2, 3]]})));
}

#[test]
fn polytope_json_round_trips_exactly() {
    for name in ["chain4", "claw3", "w5", "diamond4"] {
        let text = stdout(&run(&["assoc", "realize", &corpus(name)]));
        let back = parse_polytope(&text).unwrap();
        let p = posetahedra::corpus::poset(name).unwrap();
        let r = realize_poset_associahedron(&p, &RealizeOptions::default()).unwrap();
        assert_eq!(&back, r.primal(), "{}", name);
        back.certify().unwrap();
        let again = posetahedra::formats::to_json_pretty(&PolytopeJson::of(&back, &r.realization.melt_log));
        assert_eq!(again, text);
    }
}

#[test]
fn off_export() {
    let off = stdout(&run(&["assoc", "realize", &corpus("chain4"), "--format", "off", "--precision", "3"]));
    let lines: Vec<&str> = off.lines().collect();
    assert_eq!(lines[0], "OFF");
    assert!(lines[1].starts_with("# approximate") && lines[1].contains("3 digits"));
    assert_eq!(lines[2], "5 1 0");
    assert!(lines[3].split(' ').all(|x| x.split_once('.').unwrap().1.len() == 3));
    assert!(lines[8].starts_with("5 "));

    let off = stdout(&run(&["assoc", "realize", &corpus("w5"), "--format", "off"]));
    let lines: Vec<&str> = off.lines().collect();
    let counts: Vec<usize> = lines[2].split(' ').map(|x| x.parse().unwrap()).collect();
    // a simple 3-polytope with 11 facets has 18 vertices and 27 edges
    assert_eq!(counts, [18, 11, 27]);
    assert!(lines[3].split(' ').all(|x| x.split_once('.').unwrap().1.len() == 12));

    let off = stdout(&run(&["assoc", "realize", &corpus("chain6"), "--format", "off"]));
    assert!(off.starts_with("nOFF\n# approximate"));
    assert_eq!(off.lines().nth(2), Some("4"));
}

#[test]
fn realize_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pentagon.json");
    let o = run(&["assoc", "realize", &corpus("chain4"), "--out", out.to_str().unwrap()]);
    assert!(stdout(&o).contains("5 vertices, 5 facets"));
    let poly = parse_polytope(&std::fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(poly.vertices.len(), 5);
}

#[test]
fn reads_standard_input() {
    let text = std::fs::read_to_string(corpus("chain4")).unwrap();
    assert_eq!(stdout(&run_stdin(&["assoc", "faces", "-", "--fvector"], &text)), "5 5 1\n");
    let o = run_stdin(&["poset", "validate", "-"], "{\"covers\": [[1, 3], [1, 2], [2, 3]]}");
    assert_eq!(stdout(&o), "{\"valid\":true,\"elements\":[1,2,3],\"covers\":[[1,2],[2,3]]}\n");
}

#[test]
fn exit_codes() {
    let bad = run_stdin(&["poset", "validate", "-"], "{\"covers\": [[1, 2], [2, 1]]}");
    assert_eq!(bad.status.code(), Some(1));
    let malformed = run_stdin(&["tubes", "-"], "{\"edges\": []}");
    assert_eq!(malformed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("hint:"));
    assert_eq!(run(&["assoc", "faces", &corpus("chain4"), "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["tubes", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let capped = bin()
        .args(["assoc", "realize", &corpus("w5")])
        .env("POSETAHEDRA_MAX_BITS", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("bits"));

    assert_eq!(CliError::from(GeometryError::Mismatch("x".into())).code(), 2);
    assert_eq!(CliError::from(GeometryError::Certification("x".into())).code(), 2);
}

#[test]
fn compact_commands_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let point = stdout(&run(&["compact", "synthesize", &corpus("w5"), "--tubing", "[[2,4],[2,3,4]]"]));
    let pf = dir.path().join("p.json");
    std::fs::write(&pf, &point).unwrap();
    let verified = stdout(&run(&["compact", "verify", pf.to_str().unwrap()]));
    assert_eq!(verified, "{\"coherent\":true,\"tubing\":[[2,4],[2,3,4]]}\n");

    let tmax: Value = serde_json::from_str(&stdout(&run(&["compact", "tmax", pf.to_str().unwrap(), "--tube", "2,4"]))).unwrap();
    assert!(tmax["t_max"].is_string());

    let y = stdout(&run(&["compact", "expand", pf.to_str().unwrap(), "--tube", "2,4", "--t", "1/5"]));
    let yf = dir.path().join("y.json");
    std::fs::write(&yf, &y).unwrap();
    let yv: Value = serde_json::from_str(&y).unwrap();
    assert_eq!(yv["tubing"], serde_json::json!([[2, 3, 4]]));

    let back = stdout(&run(&["compact", "collapse", yf.to_str().unwrap(), "--tube", "2,4", "--parent", "2,3,4"]));
    let mut bv: Value = serde_json::from_str(&back).unwrap();
    assert_eq!(bv["t"], "1/5");
    bv.as_object_mut().unwrap().remove("t");
    assert_eq!(bv, serde_json::from_str::<Value>(&point).unwrap());

    // The point alone, given the poset separately.
    let mut bare: Value = serde_json::from_str(&point).unwrap();
    bare.as_object_mut().unwrap().remove("covers");
    let bf = dir.path().join("bare.json");
    std::fs::write(&bf, bare.to_string()).unwrap();
    assert_eq!(run(&["compact", "verify", bf.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(stdout(&run(&["compact", "verify", bf.to_str().unwrap(), "--poset", &corpus("w5")])), verified);
}

#[test]
fn incoherent_points_are_rejected() {
    let point = stdout(&run(&["compact", "synthesize", &corpus("w5"), "--tubing", "[]"]));
    let mut v: Value = serde_json::from_str(&point).unwrap();
    assert_ne!(v["tubes"]["1,2,3"], serde_json::json!(["-1/3", "1/6", "1/6"]));
    v["tubes"]["1,2,3"] = serde_json::json!(["-1/3", "1/6", "1/6"]);
    let o = run_stdin(&["compact", "verify", "-"], &v.to_string());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not coherent"));
}

#[test]
fn ratio_demo_values_are_exact() {
    let v: Value = serde_json::from_str(&stdout(&run(&["compact", "demo-ratios", "--targets", "0,1"]))).unwrap();
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 2);
    let ts: Vec<&str> = curves[0]["samples"].as_array().unwrap().iter().map(|s| s["t"].as_str().unwrap()).collect();
    assert_eq!(ts, ["1/100", "1/1000", "1/10000", "1/100000", "1/1000000"]);
    assert_eq!(curves[1]["samples"][4]["ratio"], "1/1");
    assert_eq!(v["limit"]["tubing"], serde_json::json!([[2, 4]]));
}

#[test]
fn tubes_listing() {
    let t = stdout(&run(&["tubes", &corpus("chain4"), "--proper"]));
    assert_eq!(t, "[[1,2],[2,3],[3,4],[1,2,3],[2,3,4]]\n");
    let all: Value = serde_json::from_str(&stdout(&run(&["tubes", &corpus("chain4")]))).unwrap();
    assert_eq!(all.as_array().unwrap().len(), 10);
    let m: Value = serde_json::from_str(&stdout(&run(&["tubes", &corpus("n4"), "--max-tubings"]))).unwrap();
    assert_eq!(m.as_array().unwrap().len(), 5);
}
