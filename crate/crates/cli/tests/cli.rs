use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use albert_core::composition::{CompositionAlgebra, TripleMap};
use albert_core::json::{self, Document, Validation};
use albert_core::Ring;
use serde_json::Value;

fn albert(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_albert")).args(args).current_dir(dir).env_remove("ALBERT_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn load(path: &Path) -> Document {
    json::from_json(&fs::read_to_string(path).unwrap(), Validation::Full).unwrap()
}

fn dir_entries(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn construct_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["construct", "h3", "--ring", "Fp:7", "--gamma", "1,1,1", "--out", "h3.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(fs::read(dir.path().join("h3.json")).unwrap(), fs::read(golden("h3_f7.json")).unwrap());
    match load(&dir.path().join("h3.json")) {
        Document::Cubic(a) => assert_eq!(a.rank(), 27),
        d => panic!("{}", d.type_name()),
    }
    let o = albert(&["construct", "zorn", "--ring", "Z", "--out", "zorn.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("zorn.json")).unwrap(), fs::read(golden("zorn_z.json")).unwrap());
}

#[test]
fn failed_construction_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["construct", "h3", "--ring", "Fp:7", "--gamma", "1,0,1", "--out", "bad.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a unit"));
    assert!(dir_entries(dir.path()).is_empty());
}

#[test]
fn every_kind_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra) in [("zorn", vec![]), ("para", vec![]), ("composition", vec!["--gamma", "1,2,3"]), ("hermitian", vec!["--gamma", "1,2,3"]), ("h3", vec![])] {
        let out = format!("{kind}.json");
        let mut args = vec!["construct", kind, "--ring", "Fp:11", "--out", &out];
        args.extend(extra);
        let o = albert(&args, dir.path());
        assert_eq!(code(&o), 0, "{kind}: {o:?}");
        let doc = load(&dir.path().join(&out));
        assert_eq!(json::to_json(&doc), fs::read_to_string(dir.path().join(&out)).unwrap());
    }
    // hermitian from an explicit composition file
    let o = albert(&["construct", "hermitian", "--ring", "Fp:11", "--composition", "composition.json", "--out", "h.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["check", "--suite", "jordan", "--ring", "Fp:11", "--samples", "200", "--seed", "7"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));

    let o = albert(&["check", "--suite", "nope", "--ring", "Fp:7"], dir.path());
    assert_eq!(code(&o), 2);
    let o = albert(&["check", "--suite", "zorn", "--ring", "Fp:6"], dir.path());
    assert_eq!(code(&o), 2);

    // the Zorn algebra is not a para-octonion algebra
    let o = albert(&["check", "--suite", "para", "--algebra", golden("zorn_z.json").to_str().unwrap(), "--samples", "5"], dir.path());
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));

    let o = albert(&["check", "--suite", "cns", "--algebra", golden("zorn_z.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn exhaustive_zorn_check_over_f2() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["check", "--suite", "zorn", "--ring", "Fp:2", "--samples", "10", "--json", "r.json"], dir.path());
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let exhaustive = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "exhaustive_multiplicativity").unwrap();
    assert_eq!(exhaustive["passed"], 65_536);
    assert_eq!(r["verdict"], "pass");
}

#[test]
fn frames_over_z_note_the_lift() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["check", "--suite", "frames", "--ring", "Z", "--samples", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("fraction field of Z"));
}

#[test]
fn json_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &str| {
        let mut v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(p)).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    for f in ["a.json", "b.json"] {
        let o = albert(&["check", "--suite", "isotope", "--ring", "Q", "--samples", "2", "--seed", "5", "--json", f], dir.path());
        assert_eq!(code(&o), 0, "{}", stdout(&o));
    }
    assert_eq!(strip("a.json"), strip("b.json"));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_albert"))
        .args(["check", "--suite", "cns", "--ring", "Fp:7", "--samples", "3", "--json", "r.json"])
        .env("ALBERT_SEED", "1234")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["seed"], 1234);
}

#[test]
fn mutate_reports_the_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["check", "--suite", "zorn", "--ring", "Fp:7", "--samples", "10", "--mutate", "--json", "m.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(r["checks"][0]["name"], "negative_control");
    assert!(r["checks"][0]["counterexample"]["inputs"].is_object());
    assert!(r["mutated"].as_array().unwrap().iter().any(|c| c["status"] == "fail"));
}

#[test]
fn isotope_at_one_is_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let h3: Value = serde_json::from_str(&fs::read_to_string(golden("h3_f7.json")).unwrap()).unwrap();
    let one = serde_json::json!({"type": "element", "ring": "Fp:7", "coords": h3["basepoint"]});
    fs::write(dir.path().join("one.json"), one.to_string()).unwrap();
    let o = albert(&["isotope", "--algebra", golden("h3_f7.json").to_str().unwrap(), "--p", "one.json", "--out", "iso.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(fs::read(dir.path().join("iso.json")).unwrap(), fs::read(golden("h3_f7.json")).unwrap());
}

#[test]
fn isotope_normalizes_and_rejects_singular_points() {
    let dir = tempfile::tempdir().unwrap();
    let mut coords = vec!["0"; 27];
    coords[0] = "2";
    coords[1] = "1";
    coords[2] = "1";
    coords[4] = "3";
    fs::write(dir.path().join("p.json"), serde_json::json!({"type": "element", "ring": "Fp:7", "coords": coords}).to_string()).unwrap();
    let h3 = golden("h3_f7.json");
    let o = albert(&["isotope", "--algebra", h3.to_str().unwrap(), "--p", "p.json", "--normalize", "--out", "iso.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    match load(&dir.path().join("iso.json")) {
        Document::Cubic(a) => assert!(a.adjoint_map().post().is_some()),
        d => panic!("{}", d.type_name()),
    }
    let zero = serde_json::json!({"type": "element", "ring": "Fp:7", "coords": vec!["0"; 27]});
    fs::write(dir.path().join("zero.json"), zero.to_string()).unwrap();
    let o = albert(&["isotope", "--algebra", h3.to_str().unwrap(), "--p", "zero.json", "--out", "bad.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("bad.json").exists());
}

#[test]
fn deform_at_the_distinguished_frame() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["deform", "--algebra", golden("h3_f7.json").to_str().unwrap(), "--out", "m.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    let Document::CompositionOfForms(me) = load(&dir.path().join("m.json")) else { panic!() };
    let f7 = Ring::prime_field(7).unwrap();
    let m = CompositionAlgebra::zorn(f7).unwrap().para().unwrap().composition_of();
    assert!(TripleMap::identity(f7, 8).is_morphism(&me, &m));
}

#[test]
fn octonionify_round_trip_and_missing_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["construct", "composition", "--ring", "Fp:7", "--gamma", "1,2,3", "--out", "m.json"], dir.path());
    assert_eq!(code(&o), 0);
    let o = albert(&["octonionify", "--composition", "m.json", "--out", "c.json", "--iso-out", "f.json", "--para-iso-out", "g.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    let Document::CompositionAlgebra(c) = load(&dir.path().join("c.json")) else { panic!() };
    let Document::CompositionOfForms(m) = load(&dir.path().join("m.json")) else { panic!() };
    let Document::Triple(f) = load(&dir.path().join("f.json")) else { panic!() };
    let Document::Triple(g) = load(&dir.path().join("g.json")) else { panic!() };
    assert!(f.is_morphism(&m, &c.composition_of()));
    assert!(g.is_morphism(&m, &c.para().unwrap().composition_of()));

    let o = albert(&["octonionify", "--composition", "m.json", "--cap", "0", "--out", "none.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("norm-one"));
    assert!(!dir.path().join("none.json").exists());
}

#[test]
fn transport_with_found_and_supplied_automorphisms() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = golden("h3_f7.json");
    let o = albert(&["transport", "--algebra", h3.to_str().unwrap(), "--seed", "3", "--out", "t.json", "--frame-out", "c.json", "--phi-out", "phi.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    let o = albert(&["transport", "--algebra", h3.to_str().unwrap(), "--phi", "phi.json", "--out", "t2.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(fs::read(dir.path().join("t.json")).unwrap(), fs::read(dir.path().join("t2.json")).unwrap());
    let o = albert(&["deform", "--algebra", h3.to_str().unwrap(), "--frame", "c.json", "--out", "mc.json"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    let o = albert(&["deform", "--algebra", h3.to_str().unwrap(), "--out", "me.json"], dir.path());
    assert_eq!(code(&o), 0);
    let Document::Triple(t) = load(&dir.path().join("t.json")) else { panic!() };
    let Document::CompositionOfForms(me) = load(&dir.path().join("me.json")) else { panic!() };
    let Document::CompositionOfForms(mc) = load(&dir.path().join("mc.json")) else { panic!() };
    assert!(t.is_morphism(&me, &mc));
}

#[test]
fn info_describes_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = albert(&["info", golden("h3_f7.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rank: 27"));
    let o = albert(&["info"], dir.path());
    assert!(stdout(&o).contains("octonionify"));
    let o = albert(&["info", "missing.json"], dir.path());
    assert_eq!(code(&o), 2);
}
