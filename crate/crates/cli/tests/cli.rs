use std::path::{Path, PathBuf};
use std::process::Command;

use coble::field::PrimeField;
use coble::orbits8::{normal_form, transport, OrbitLabel};
use coble::session::{write_json, TrivectorFile};
use serde_json::Value;

fn dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("coble-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_coble"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap(), text)
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stamp_ok(v: &Value, q: u64, seed: u64) {
    assert_eq!(v["prime"], q);
    assert_eq!(v["seed"], seed);
    assert!(v["version"].is_string());
}

#[test]
fn gen_is_deterministic_and_feeds_cubic() {
    let (a, b) = (dir("gen-a"), dir("gen-b"));
    assert_eq!(run(&a, &["gen", "--seed", "2"]).0, 0);
    assert_eq!(run(&b, &["gen", "--seed", "2"]).0, 0);
    let read = |d: &Path| std::fs::read(d.join("omega.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    stamp_ok(&json(a.join("omega.json")), 7, 2);
    let log = json(a.join("gen_log.json"));
    stamp_ok(&log, 7, 2);
    assert_eq!(log["passed"], true);

    let omega = a.join("omega.json");
    let (code, text) = run(&a, &["cubic", "--seed", "2", "--input", omega.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let cubic = json(a.join("cubic.json"));
    stamp_ok(&cubic, 7, 2);
    assert_eq!(cubic["form"]["degree"], 3);
    assert_eq!(cubic["odd"].as_array().unwrap().len(), 9);
    assert_eq!(cubic["interpolation"]["kernel_dim"], 1);
}

#[test]
fn unsuitable_input_fails_verification_without_crashing() {
    let d = dir("bad");
    let bad = d.join("bad.json");
    std::fs::write(&bad, r#"{"prime": 7, "dim": 9, "coeffs": [{"idx": [0, 1, 2], "val": 1}]}"#).unwrap();
    let (code, text) = run(&d, &["verify", "--checks", "1,10", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 1, "{text}");
    let report = json(d.join("report.json"));
    assert_eq!(report["all_hard_passed"], false);
    assert!(report["inputs"][0]["error"].as_str().unwrap().contains("rank8"));
    assert_eq!(run(&d, &["cubic", "--input", bad.to_str().unwrap()]).0, 1);
}

#[test]
fn usage_errors_exit_with_two() {
    let d = dir("usage");
    assert_eq!(run(&d, &["verify", "--checks", "99"]).0, 2);
    assert_eq!(run(&d, &["scan", "--prime", "17"]).0, 2);
    assert_eq!(run(&d, &["cubic", "--input", "/nonexistent/omega.json"]).0, 2);
    assert_eq!(run(&d, &["report"]).0, 2);
    assert_eq!(run(&d, &["bogus"]).0, 2);
}

#[test]
fn repeated_verification_gives_the_same_report() {
    let d = dir("repeat");
    let mut reports = Vec::new();
    for _ in 0..2 {
        let (code, text) = run(&d, &["verify", "--checks", "1,2,10", "--seed", "1"]);
        assert_eq!(code, 0, "{text}");
        reports.push(std::fs::read_to_string(d.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let r = json(d.join("report.json"));
    assert_eq!(r["config"]["seed"], 1);
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
    stamp_ok(&json(d.join("timings.json")), 7, 1);
}

#[test]
fn scan_group_and_report() {
    let d = dir("scan");
    let (code, text) = run(&d, &["scan", "--points", "2"]);
    assert_eq!(code, 0, "{text}");
    let scan = json(d.join("scan.json"));
    stamp_ok(&scan, 7, 0);
    for key in ["q", "predicate", "count", "points", "millis", "census"] {
        assert!(scan.get(key).is_some(), "{key}");
    }
    assert_eq!(scan["curves"].as_array().unwrap().len(), 2);
    let (code, text) = run(&d, &["group", "--trials", "20"]);
    assert_eq!(code, 0, "{text}");
    let group = json(d.join("group.json"));
    stamp_ok(&group, 7, 0);
    assert_eq!(group["order"], scan["count"]);

    let (code, _) = run(&d, &["report"]);
    assert_eq!(code, 0);
    let merged = json(d.join("merged.json"));
    assert_eq!(merged["verdicts"]["scan"], true);
    assert_eq!(merged["verdicts"]["group"], true);
    // a failed artifact makes the merge fail
    assert_eq!(run(&d, &["cubic", "--points", "3"]).0, 1);
    assert_eq!(run(&d, &["report"]).0, 1);
}

#[test]
fn classify_recognises_a_transported_normal_form() {
    let d = dir("classify");
    let f = PrimeField::new(7).unwrap();
    let y = transport(&f, &normal_form(&f, OrbitLabel::Y4).unwrap(), 11);
    let path = d.join("y.json");
    write_json(&path, &TrivectorFile::new(&f, &y.y, None)).unwrap();
    let (code, text) = run(&d, &["classify", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let v = json(d.join("classify.json"));
    assert_eq!(v["targets"][0]["label"], "Y4");
    assert_eq!(v["separates"], true);
    assert!(d.join("fingerprints.json").exists());
    let omega = d.join("omega9.json");
    assert_eq!(run(&d, &["gen"]).0, 0);
    std::fs::rename(d.join("omega.json"), &omega).unwrap();
    assert_eq!(run(&d, &["classify", "--input", omega.to_str().unwrap()]).0, 2);
}

/// The sextic is written once and checked by a later verification.
#[test]
fn persisted_sextic_is_checked_not_recomputed() {
    let d = dir("sextic");
    let (code, text) = run(&d, &["sextic", "--seed", "1"]);
    assert_eq!(code, 0, "{text}");
    let s = json(d.join("sextic.json"));
    stamp_ok(&s, s["prime"].as_u64().unwrap(), 1);
    assert_eq!(s["form"]["degree"], 6);
    let before = std::fs::read(d.join("sextic.json")).unwrap();
    let (code, text) = run(&d, &["verify", "--checks", "8", "--seed", "1"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("reusing"));
    let r = json(d.join("report.json"));
    assert_eq!(r["checks"][0]["evidence"]["loaded_from_file"], true);
    assert_eq!(std::fs::read(d.join("sextic.json")).unwrap(), before);
}
