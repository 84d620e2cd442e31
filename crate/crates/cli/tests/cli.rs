use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn epat(args: &[&str], envs: &[(&str, &str)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_epat"));
    cmd.args(args).env_remove("EPAT_BUDGET");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Out {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const F6: &str = r#"{"worlds":[1,2,3,4,5,6],"agents":2,"partitions":[[[1,3,5],[2,4,6]],[[1,4],[2,5],[3,6]]]}"#;
const F2: &str = r#"{"worlds":["w0","w1","w2","w3"],"agents":2,
  "partitions":[[["w0","w1"],["w2","w3"]],[["w0","w2"],["w1","w3"]]]}"#;
const S5: &str = r#"{"locals":[["x1","x2"],["y1","y2","y3","y4","y5"]],
  "states":[["x1","y1"],["x1","y2"],["x2","y3"],["x2","y4"],["x2","y5"]]}"#;
const SQUARE: &str = r#"{"locals":[["a0","a1"],["b0","b1"]],
  "states":[["a0","b0"],["a0","b1"],["a1","b0"],["a1","b1"]]}"#;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn demo_appendix_reports_both_betti_vectors() {
    let o = epat(&["demo", "appendix"], &[]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("nerve betti: (1,2)\n"));
    assert!(o.stdout.contains("vietoris betti: (1,2,0)\n"));
    assert!(o.stdout.contains("equal"));
    let j = epat(&["--json", "demo", "appendix"], &[]);
    let v: Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(v["ok"], Value::Bool(true));
    assert_eq!(v["dowker"]["vietoris"]["betti"], serde_json::json!([1, 2, 0]));
}

#[test]
fn unreachable_states_exit_one() {
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "s5.json", S5);
    let o = epat(&["sgs", "reach", s(&g), "--from", "x1,y1", "--to", "x2,y3"], &[]);
    assert_eq!(o.code, 1);
    assert_eq!(o.stdout.trim(), "unreachable");
    let o = epat(&["sgs", "reach", s(&g), "--from", "x2,y3", "--to", r#"["x2","y5"]"#], &[]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("reachable in 1 steps"));
}

#[test]
fn overlapping_blocks_are_input_errors() {
    let d = TempDir::new().unwrap();
    let f = write(
        d.path(),
        "bad.json",
        r#"{"worlds":[1,2,3],"agents":1,"partitions":[[[1,2],[2,3]]]}"#,
    );
    let o = epat(&["frame", "check", s(&f)], &[]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("world 2 lies in listed blocks 0 and 1"), "{}", o.stderr);
    let missing = epat(&["frame", "check", s(&d.path().join("nope.json"))], &[]);
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("cannot read"));
    assert_eq!(epat(&["frame", "frobnicate"], &[]).code, 2);
}

#[test]
fn checked_files_round_trip() {
    let d = TempDir::new().unwrap();
    let cases = [
        ("frame", write(d.path(), "f.json", F6), "frame"),
        ("sgs", write(d.path(), "g.json", S5), "sgs"),
    ];
    for (noun, path, key) in cases {
        let first: Value = serde_json::from_str(&epat(&["--json", noun, "check", s(&path)], &[]).stdout).unwrap();
        let again = write(d.path(), &format!("{noun}2.json"), &first[key].to_string());
        let second: Value = serde_json::from_str(&epat(&["--json", noun, "check", s(&again)], &[]).stdout).unwrap();
        assert_eq!(first[key], second[key]);
    }
    let f = write(d.path(), "f2.json", F2);
    let atlas = epat(&["atlas", "subdivide", s(&f)], &[]);
    assert_eq!(atlas.code, 0);
    let a = write(d.path(), "a.json", &atlas.stdout);
    let checked: Value = serde_json::from_str(&epat(&["--json", "atlas", "check", s(&a)], &[]).stdout).unwrap();
    let original: Value = serde_json::from_str(&atlas.stdout).unwrap();
    assert_eq!(checked["atlas"], original);
}

#[test]
fn reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f2.json", F2);
    let args = ["--json", "paths", "pathobject", "--frame", s(&f), "--subdivided", "--window", "0:1"];
    let a = epat(&args, &[]);
    let b = epat(&args, &[]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let text = epat(&args[1..], &[]);
    assert!(text.stdout.starts_with("12 curves, 7 framings"), "{}", text.stdout);
}

#[test]
fn relation_pipeline() {
    let d = TempDir::new().unwrap();
    let r = write(
        d.path(),
        "r.json",
        r#"{"x":["a","b","c"],"y":[1,2,3],"pairs":[["a",1],["a",2],["b",2],["b",3],["c",3],["c",1]]}"#,
    );
    let k = epat(&["complex", "nerve", s(&r)], &[]);
    assert_eq!(k.code, 0);
    let kf = write(d.path(), "k.json", &k.stdout);
    let b = epat(&["complex", "betti", s(&kf)], &[]);
    assert!(b.stdout.contains("betti (1,1)"), "{}", b.stdout);
    let dw = epat(&["complex", "dowker", s(&r)], &[]);
    assert_eq!(dw.code, 0);
    let dot = epat(&["complex", "dot", s(&kf)], &[]);
    assert_eq!(dot.stdout.matches(" -- ").count(), 3);
}

#[test]
fn budget_env_var_caps_faces() {
    let d = TempDir::new().unwrap();
    let k = write(d.path(), "k.json", r#"{"maximal_faces":[[0,1,2,3,4,5]]}"#);
    assert_eq!(epat(&["complex", "betti", s(&k)], &[]).code, 0);
    let o = epat(&["complex", "betti", s(&k)], &[("EPAT_BUDGET", "10")]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("budget exceeded"), "{}", o.stderr);
    // an explicit flag wins over the environment
    let o = epat(&["complex", "betti", s(&k), "--max-faces", "63"], &[("EPAT_BUDGET", "10")]);
    assert_eq!(o.code, 0);
}

#[test]
fn logic_commands() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f6.json", F6);
    let v = write(d.path(), "v.json", r#"{"p":[1,2]}"#);
    let o = epat(&["logic", "valid", "--frame", s(&f), "--formula", "M1.p -> p"], &[]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("counterexample at world"));
    let o = epat(&["logic", "valid", "--frame", s(&f), "--formula", "p -> K1.M1.p"], &[]);
    assert_eq!((o.code, o.stdout.trim()), (0, "valid"));
    let o = epat(&["logic", "eval", "--frame", s(&f), "--valuation", s(&v), "--formula", "M1.p"], &[]);
    assert_eq!(o.stdout.trim(), "{1, 2, 3, 4, 5, 6}");
    let o = epat(&["logic", "eval", "--frame", s(&f), "--valuation", s(&v), "--formula", "K2.p", "--world", "5"], &[]);
    assert_eq!(o.stdout.trim(), "false");
    let o = epat(&["logic", "eval", "--frame", s(&f), "--formula", "K1.(p"], &[]);
    assert_eq!(o.code, 2);
}

#[test]
fn atlas_map_separates_morphism_notions() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f2.json", F2);
    let a = write(d.path(), "a.json", &epat(&["atlas", "from-frame", s(&f)], &[]).stdout);
    let swap = write(d.path(), "swap.json", r#"[["w0","w0"],["w1","w2"],["w2","w1"],["w3","w3"]]"#);
    let o = epat(&["atlas", "weakmap", "--source", s(&a), "--target", s(&a), "--map", s(&swap)], &[]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let bad = write(d.path(), "bad.json", r#"[["w0","w0"],["w1","w3"],["w2","w2"],["w3","w3"]]"#);
    let o = epat(&["atlas", "weakmap", "--source", s(&a), "--target", s(&a), "--map", s(&bad)], &[]);
    assert_eq!(o.code, 1);
    let line = epat(&["atlas", "line", "--from", "-1", "--to", "1"], &[]);
    assert_eq!(line.code, 0);
    assert!(line.stdout.contains("\"-inf\""));
}

#[test]
fn curve_commands() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "f2.json", F2);
    let step = write(d.path(), "step.json", r#"{"window_start":0,"values":["w0","w1"]}"#);
    let o = epat(&["paths", "check-curve", s(&step), "--frame", s(&f), "--based-at", "w0"], &[]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("based at w0: yes"));
    let jump = write(d.path(), "jump.json", r#"{"window_start":0,"values":["w0","w3"]}"#);
    assert_eq!(epat(&["paths", "check-curve", s(&jump), "--frame", s(&f)], &[]).code, 1);

    let o = epat(&["paths", "framings", s(&step), "--frame", s(&f), "--subdivided"], &[]);
    assert!(o.stdout.starts_with("4 framings"), "{}", o.stdout);
    let o = epat(&["paths", "idle", s(&step), "--frame", s(&f)], &[]);
    assert!(o.stdout.contains("idle (minimal witnesses): {2}"));

    let c0 = write(d.path(), "c0.json", r#"{"window_start":0,"values":["w0"]}"#);
    let c1 = write(d.path(), "c1.json", r#"{"window_start":0,"values":["w1"]}"#);
    let b1 = write(d.path(), "b1.json", r#"{"window_start":0,"values":[[1]]}"#);
    let b12 = write(d.path(), "b12.json", r#"{"window_start":0,"values":[[1,2]]}"#);
    let eq = |b: &Path| epat(&["paths", "equiv", s(&c0), s(&c1), "--framing", s(b), "--frame", s(&f), "--subdivided"], &[]).code;
    assert_eq!(eq(&b1), 0);
    assert_eq!(eq(&b12), 1);

    let g = write(d.path(), "sq.json", SQUARE);
    let run = write(d.path(), "run.json", r#"[["a0","b0"],["a1","b1"]]"#);
    let o = epat(&["--json", "paths", "run2curve", "--sgs", s(&g), "--run", s(&run)], &[]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["window_start"], 2);
    assert_eq!(v["values"], serde_json::json!([["a0", "b0"], ["a1", "b0"], ["a1", "b1"]]));
    let g5 = write(d.path(), "s5.json", S5);
    let run5 = write(d.path(), "run5.json", r#"[["x1","y1"],["x2","y3"]]"#);
    let o = epat(&["paths", "run2curve", "--sgs", s(&g5), "--run", s(&run5)], &[]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("missing"));
}
