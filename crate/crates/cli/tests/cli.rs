use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

use contrax::harness::{Gen, GenConfig};
use contrax::linalg::Field;
use contrax::model::{factor_ar, Flavor};
use contrax::retract::{trick1, Morphism};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contrax"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("contrax-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn put(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn small() -> GenConfig {
    GenConfig::new(Field::prime(5).unwrap(), (-1, 2), 3).with_seed(4)
}

#[test]
fn check_disk_contraction() {
    let out = run(&["check", &fixture("disk_contraction.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn trick2_output_checks_as_contraction() {
    let dir = scratch("trick2");
    let mut sdr = Gen::new(&small()).sdr().0.to_json();
    sdr["kind"] = json!("sdr");
    let input = put(&dir, "sdr.json", &sdr);
    assert_eq!(run(&["check", &input]).status.code(), Some(0));
    sdr["kind"] = json!("contraction");
    let as_contraction = put(&dir, "claimed.json", &sdr);
    assert_eq!(run(&["check", &as_contraction]).status.code(), Some(1));

    let out = dir.join("c.json");
    let o = out.to_string_lossy();
    assert_eq!(run(&["trick2", &input, "-o", &o]).status.code(), Some(0));
    assert_eq!(run(&["check", &o]).status.code(), Some(0));
}

#[test]
fn trick1_and_trick3_pipeline() {
    let dir = scratch("tricks");
    let mut g = Gen::new(&small());
    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let f = g.chain_map(&s1, &s2);
    let pre = Morphism {
        src: c1.ar.clone(),
        tgt: c2.ar.clone(),
        f: f.clone(),
    };
    let input = put(&dir, "pre.json", &pre.to_json());
    let o = dir.join("ar.json").to_string_lossy().into_owned();
    assert_eq!(run(&["trick1", &input, "-o", &o]).status.code(), Some(0));
    assert_eq!(run(&["check", &o]).status.code(), Some(0));

    let fh = trick1(&f, &c1.ar, &c2.ar).unwrap();
    let m = Morphism { src: c1, tgt: c2, f: fh.f };
    let input = put(&dir, "ar-between-contractions.json", &m.to_json());
    let o = dir.join("contr.json").to_string_lossy().into_owned();
    assert_eq!(run(&["trick3", &input, "-o", &o]).status.code(), Some(0));
    assert_eq!(run(&["check", &o]).status.code(), Some(0));
}

#[test]
fn emitted_json_reparses() {
    let dir = scratch("roundtrip");
    let o = dir.join("c.json").to_string_lossy().into_owned();
    assert_eq!(run(&["trick2", &fixture("disk_contraction.json"), "-o", &o]).status.code(), Some(0));
    let a: Value = serde_json::from_str(&fs::read_to_string(&o).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&fs::read_to_string(fixture("disk_contraction.json")).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn factor_and_lift() {
    let dir = scratch("factor");
    let mut g = Gen::new(&small());
    let (x, y) = (g.complex(), g.complex());
    let alpha = g.chain_map(&x, &y);
    let input = put(
        &dir,
        "alpha.json",
        &json!({"kind": "chain-map", "src": alpha.src().to_json(), "tgt": alpha.tgt().to_json(), "map": alpha.to_json()}),
    );
    for flavor in ["c-fw", "cw-f"] {
        let o = dir.join(format!("{flavor}.json")).to_string_lossy().into_owned();
        let out = run(&["factor", &input, "--category", "coch", "--flavor", flavor, "--emit-cells", "-o", &o]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_str(&fs::read_to_string(&o).unwrap()).unwrap();
        assert!(v.get("cells").is_some());
        let left = put(&dir, "left.json", &v["left"]);
        assert_eq!(run(&["check", &left]).status.code(), Some(0));
    }

    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let f = trick1(&g.chain_map(&s1, &s2), &c1.ar, &c2.ar).unwrap();
    let fac = factor_ar(&f, Flavor::CFw).unwrap();
    let square = json!({
        "kind": "ar-square",
        "i": fac.left.to_json(),
        "f": fac.left.to_json(),
        "p": fac.right.to_json(),
        "g": fac.right.to_json(),
    });
    let input = put(&dir, "square.json", &square);
    let out = run(&["lift", &input, "--category", "ar"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn path_and_retract() {
    let dir = scratch("path");
    let mut g = Gen::new(&small());
    let b = g.complex();
    let input = put(&dir, "b.json", &b.complex.to_json());
    let out = run(&["path", &input]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let object = put(&dir, "object.json", &v["object"]);
    assert_eq!(run(&["check", &object]).status.code(), Some(0));

    let (inj, _, _) = g.injection();
    let input = put(
        &dir,
        "g.json",
        &json!({"src": inj.src().to_json(), "tgt": inj.tgt().to_json(), "map": inj.to_json()}),
    );
    assert_eq!(run(&["retract", &input]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{\"kind\": ").unwrap();
    let out = run(&["check", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":1:"));

    let mut d: Value = serde_json::from_str(&fs::read_to_string(fixture("disk_contraction.json")).unwrap()).unwrap();
    d["N"]["diff"]["0"]["entries"] = json!([2]);
    let broken = put(&dir, "broken.json", &d);
    assert_eq!(run(&["check", &broken]).status.code(), Some(1));

    assert_eq!(run(&["check", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--campaign", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run(&["fuzz", "--campaign", "mutant-trick3", "--trials", "20", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fuzz_is_deterministic() {
    let args = ["fuzz", "--campaign", "tricks", "--trials", "20", "--seed", "9", "--support", "-2,2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(run(&seq).stdout, a.stdout);

    let args = ["fuzz", "--campaign", "mutant-generator", "--trials", "10", "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fuzz_tricks_example() {
    let out = run(&["fuzz", "--campaign", "tricks", "--trials", "200", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failures"], json!([]));
    assert_eq!(v["trials"], json!(200));
}
