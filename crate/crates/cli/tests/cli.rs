use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CNOT: &str = "# CNOT up to a scalar\n(Z(1,2,0) * id) ; (id * X(2,1,0))\n";

fn zxtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zxtk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn entries(m: &Value) -> Vec<(f64, f64)> {
    m["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c[0].as_f64().unwrap(), c[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn run_cnot_on_one_zero() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "cnot.zxd", CNOT);
    let v = json(&zxtk(&["run", s(&f), "--input", "10"]));
    assert_eq!(v["machine"], "pure");
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    let c = terms[0]["coeff"][0].as_f64().unwrap();
    assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    let toks: Vec<_> = terms[0]["tokens"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            (
                t["edge"].as_str().unwrap().to_string(),
                t["dir"].clone(),
                t["bits"][0].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        toks,
        vec![
            ("b1".to_string(), Value::from("down"), 1),
            ("b2".to_string(), Value::from("down"), 1)
        ]
    );
}

#[test]
fn extract_agrees_with_interp() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "cnot.zxd", CNOT);
    let i = json(&zxtk(&["interp", s(&f)]));
    for edge in [None, Some("a1"), Some("e2"), Some("b2")] {
        let mut args = vec!["extract", s(&f)];
        if let Some(e) = edge {
            args.extend(["--seed-edge", e]);
        }
        let x = json(&zxtk(&args));
        assert_eq!(
            (x["rows"].clone(), x["cols"].clone()),
            (i["rows"].clone(), i["cols"].clone())
        );
        for (a, b) in entries(&x).iter().zip(entries(&i)) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }
}

#[test]
fn output_flag_writes_a_file() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "h.zxd", "H");
    let out = dir.path().join("h.mat.json");
    let r = zxtk(&["interp", s(&f), "-o", s(&out)]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"], 2);
}

#[test]
fn trace_then_replay() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "cnot.zxd", CNOT);
    let t = dir.path().join("cnot.trace.jsonl");
    let r = zxtk(&[
        "trace",
        s(&f),
        "--input",
        "11",
        "--scheduler",
        "random",
        "--seed",
        "3",
        "-o",
        s(&t),
    ]);
    assert!(r.status.success());
    let text = fs::read_to_string(&t).unwrap();
    assert!(text.lines().count() > 3);
    let replayed = json(&zxtk(&["trace", s(&f), "--input", "11", "--replay", s(&t)]));
    let direct = json(&zxtk(&["run", s(&f), "--input", "11"]));
    assert_eq!(replayed, direct);

    let broken: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let b = file(&dir, "broken.trace.jsonl", &broken);
    let r = zxtk(&["trace", s(&f), "--input", "11", "--replay", s(&b)]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn run_writes_the_trace_alongside() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "cnot.zxd", CNOT);
    let t = dir.path().join("run.trace.jsonl");
    let r = zxtk(&["run", s(&f), "--input", "01", "--trace", s(&t)]);
    assert!(r.status.success());
    assert!(fs::read_to_string(&t)
        .unwrap()
        .lines()
        .all(|l| l.contains("\"digest\"")));
}

#[test]
fn state_file_as_input() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "h.zxd", "H ; H");
    let st = file(
        &dir,
        "in.state.json",
        r#"{"machine":"pure","terms":[{"coeff":[0.6,0.0],"tokens":[{"bits":[0],"dir":"down","edge":"a1"}]},{"coeff":[0.8,0.0],"tokens":[{"bits":[1],"dir":"down","edge":"a1"}]}]}"#,
    );
    let v = json(&zxtk(&["run", s(&f), "--input", s(&st)]));
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!((terms[0]["coeff"][0].as_f64().unwrap() - 0.6).abs() < 1e-12);
}

#[test]
fn ground_diagrams() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "m.zxd", "Z(1,2,0) ; (id * ground)");
    let x = json(&zxtk(&["extract", s(&f)]));
    let i = json(&zxtk(&["interp", s(&f), "--cpm"]));
    assert_eq!(x["rows"], 4);
    for (a, b) in entries(&x).iter().zip(entries(&i)) {
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    }
    let v = json(&zxtk(&["run", s(&f), "--input", "10"]));
    assert_eq!(v["machine"], "ground");
    assert_eq!(v["terms"].as_array().unwrap().len(), 0);
    let v = json(&zxtk(&["run", s(&f), "--input", "1"]));
    assert_eq!(
        v["terms"][0]["tokens"][0]["bits"],
        serde_json::json!([1, 1])
    );
    // without --cpm the plain interpretation refuses grounds
    assert_eq!(zxtk(&["interp", s(&f)]).status.code(), Some(2));
}

#[test]
fn cpm_writes_a_pure_diagram() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "g.zxd", "H ; ground");
    let out = dir.path().join("g.zxj");
    assert!(zxtk(&["cpm", s(&f), "-o", s(&out)]).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let kinds: Vec<_> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["kind"].clone())
        .collect();
    assert!(!kinds.contains(&Value::from("ground")));
    assert_eq!(v["inputs"].as_array().unwrap().len(), 2);
    // the written document reads back
    assert!(zxtk(&["interp", s(&out)]).status.success());
}

#[test]
fn check_suites_report() {
    let r = zxtk(&[
        "check",
        "--suite",
        "oracle,confluence",
        "--trials",
        "10",
        "--seed",
        "2",
        "--schedulers",
        "3",
        "--jobs",
        "1",
        "--json",
    ]);
    let v = json(&r);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["suite"], "oracle");
    assert_eq!(reports[1]["failed"], 0);

    let dir = TempDir::new().unwrap();
    let f = file(&dir, "cnot.zxd", CNOT);
    let r = zxtk(&[
        "check",
        s(&f),
        "--suite",
        "oracle,invariants",
        "--trials",
        "4",
    ]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("invariants"));
}

#[test]
fn check_is_deterministic() {
    let args = [
        "check",
        "--suite",
        "simulation",
        "--trials",
        "8",
        "--seed",
        "5",
        "--json",
    ];
    let mut a = json(&zxtk(&args));
    let mut b = json(&zxtk(&args));
    for v in [&mut a, &mut b] {
        v[0]["trials"]
            .as_array_mut()
            .unwrap()
            .iter_mut()
            .for_each(|t| t["steps"] = Value::Null);
    }
    assert_eq!(a, b);
}

#[test]
fn bench_spider() {
    let v = json(&zxtk(&["bench", "--family", "spider", "--size", "10"]));
    assert_eq!(v["terms"], 2);
    assert_eq!(v["tokens_per_term"], serde_json::json!([20, 20]));
    assert_eq!(v["dense_rows"], 1024);
    assert_eq!(v["dense_cols"], 1024);
    let v = json(&zxtk(&[
        "bench",
        "--family",
        "cnot-chain",
        "--size",
        "4",
        "--strategy",
        "slice",
    ]));
    assert_eq!(v["strategy"], "slice-order");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.zxd", "cup ; H");
    let r = zxtk(&["interp", s(&bad)]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("cannot compose"));
    assert_eq!(zxtk(&["interp", "missing.zxd"]).status.code(), Some(2));
    assert_eq!(
        zxtk(&["interp", s(&file(&dir, "x.txt", "H"))])
            .status
            .code(),
        Some(2)
    );

    let f = file(&dir, "cnot.zxd", CNOT);
    assert_eq!(zxtk(&["run", s(&f), "--input", "1"]).status.code(), Some(2));
    assert_eq!(
        zxtk(&["run", s(&f), "--input", "1x"]).status.code(),
        Some(2)
    );
}

#[test]
fn unbalanced_seed_needs_force_and_trips_the_fuse() {
    let dir = TempDir::new().unwrap();
    // a green loop hanging off a wire
    let f = file(&dir, "loop.zxd", "Z(1,3,0) ; (id * cup)");
    let st = file(
        &dir,
        "seed.state.json",
        r#"{"machine":"pure","terms":[{"coeff":[1.0,0.0],"tokens":[{"bits":[0],"dir":"down","edge":"e1"}]}]}"#,
    );
    let r = zxtk(&["run", s(&f), "--input", s(&st)]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("cycle-balanced"));
    let r = Command::new(env!("CARGO_BIN_EXE_zxtk"))
        .args(["run", s(&f), "--input", s(&st), "--force"])
        .env("ZXTK_FUSE", "50")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("50 steps"));
}

#[test]
fn termination_on_a_fixed_diagram_needs_a_cycle() {
    let dir = TempDir::new().unwrap();
    let cnot = file(&dir, "cnot.zxd", CNOT);
    let r = zxtk(&["check", s(&cnot), "--suite", "termination", "--trials", "3"]);
    assert_eq!(r.status.code(), Some(2));
    let looped = file(&dir, "loop.zxd", "Z(1,3,0) ; (id * cup)");
    let r = zxtk(&[
        "check",
        s(&looped),
        "--suite",
        "termination",
        "--trials",
        "3",
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stdout)
    );
}
