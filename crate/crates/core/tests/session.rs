use coble::exterior::Trivector;
use coble::field::PrimeField;
use coble::pfaffloci::coble_cubic;
use coble::pfaffloci::rank_at;
use coble::session::{
    generate, read_json, suitability_gate, suitability_gate_with, write_json, CoeffEntry, RunConfig, SessionError,
    SexticFile, Status, Suite, TrivectorFile, RANK_SAMPLES,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn decomposable(f: &PrimeField) -> Trivector {
    Trivector::from_entries(f, 9, &[([0, 1, 2], 1)]).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("coble-session-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn decomposable_trivector_fails_the_gate() {
    let f = PrimeField::new(7).unwrap();
    let s = suitability_gate(&f, &decomposable(&f), 0);
    assert!(!s.report.passed);
    assert_eq!(s.report.diagnostic.as_deref(), Some("rank8"));
    assert_eq!(s.report.checks.len(), 1);
}

#[test]
fn generated_trivector_passes_with_its_surface_count() {
    let g = generate(7, 0).unwrap();
    let r = &g.screened.report;
    assert!(r.passed && r.diagnostic.is_none());
    let n = r.a_count.unwrap();
    assert!(n > 0);
    assert_eq!(g.screened.pool.as_ref().unwrap().len(), n);
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["rank8", "divisibility", "strata", "points", "chord", "split"]);
    assert!(g.attempts.last().unwrap().passed);
}

#[test]
fn generated_trivector_is_generic() {
    let g = generate(7, 5).unwrap();
    let f = g.field;
    assert!(coble_cubic(&f, &g.omega).is_ok());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rank8 = (0..RANK_SAMPLES)
        .filter(|_| rank_at(&f, &g.omega, &f.random_vector(9, &mut rng)) == 8)
        .count();
    // rank 6 has density about 1/q
    assert!(rank8 as f64 >= (1.0 - 3.0 / 7.0) * RANK_SAMPLES as f64, "{rank8}");
}

#[test]
fn failing_only_the_chord_sample_gives_the_chord_diagnostic() {
    let g = generate(7, 0).unwrap();
    let s = suitability_gate_with(&g.field, &g.omega, 0, &mut |_, _, _, _| Err("refused".into()));
    assert!(!s.report.passed);
    assert_eq!(s.report.diagnostic.as_deref(), Some("chord"));
    let (last, before) = s.report.checks.split_last().unwrap();
    assert!(!last.passed && before.iter().all(|c| c.passed));
}

#[test]
fn generation_is_deterministic() {
    let a = generate(7, 3).unwrap();
    let b = generate(7, 3).unwrap();
    let fa = TrivectorFile::new(&a.field, &a.omega, Some(3));
    let fb = TrivectorFile::new(&b.field, &b.omega, Some(3));
    assert_eq!(serde_json::to_string(&fa).unwrap(), serde_json::to_string(&fb).unwrap());
    assert_eq!(a.attempts, b.attempts);
    assert_ne!(generate(7, 4).unwrap().omega, a.omega);
}

#[test]
fn trivector_file_round_trip() {
    let f = PrimeField::new(11).unwrap();
    let w = Trivector::random(&f, 9, &mut ChaCha8Rng::seed_from_u64(2));
    let file = TrivectorFile::new(&f, &w, Some(2));
    assert_eq!(file.coeffs.len(), w.nonzero_entries().count());
    assert!(file.coeffs.windows(2).all(|p| p[0].idx < p[1].idx));
    let path = tmp("omega.json");
    write_json(&path, &file).unwrap();
    let back: TrivectorFile = read_json(&path).unwrap();
    assert_eq!(back, file);
    let (g, w2) = back.to_trivector().unwrap();
    assert_eq!((g, w2), (f, w));
    // the exact keys of the format
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["prime"], 11);
    assert_eq!(v["dim"], 9);
    assert!(v["coeffs"][0]["idx"].is_array() && v["coeffs"][0]["val"].is_u64());
}

#[test]
fn minimal_trivector_file_without_seed_parses() {
    let text = r#"{"prime": 7, "dim": 9, "coeffs": [{"idx": [0, 1, 2], "val": 3}]}"#;
    let file: TrivectorFile = serde_json::from_str(text).unwrap();
    let (f, w) = file.to_trivector().unwrap();
    assert_eq!(w.get(&f, 1, 0, 2), f.neg(3));
}

#[test]
fn malformed_trivector_files_are_rejected() {
    let base = TrivectorFile {
        prime: 7,
        dim: 9,
        coeffs: vec![CoeffEntry { idx: [0, 1, 2], val: 1 }],
        seed: None,
        version: None,
    };
    let bad = |edit: &dyn Fn(&mut TrivectorFile)| {
        let mut f = base.clone();
        edit(&mut f);
        f.to_trivector()
    };
    assert!(bad(&|_| {}).is_ok());
    assert!(matches!(bad(&|f| f.coeffs[0].idx = [1, 0, 2]), Err(SessionError::InvalidFile(_))));
    assert!(matches!(bad(&|f| f.coeffs[0].idx = [0, 1, 9]), Err(SessionError::InvalidFile(_))));
    assert!(matches!(bad(&|f| f.coeffs[0].val = 7), Err(SessionError::InvalidFile(_))));
    assert!(matches!(bad(&|f| f.coeffs.push(f.coeffs[0].clone())), Err(SessionError::InvalidFile(_))));
    assert!(matches!(bad(&|f| f.dim = 7), Err(SessionError::InvalidFile(_))));
    assert!(matches!(bad(&|f| f.prime = 9), Err(SessionError::Field(_))));
    assert!(matches!(read_json::<TrivectorFile>(&tmp("missing.json")), Err(SessionError::Io { .. })));
}

#[test]
fn unsuitable_input_is_reported_without_crashing() {
    let f = PrimeField::new(7).unwrap();
    let mut suite = Suite::new(RunConfig::new("verify", 7, 0)).with_input(f, decomposable(&f));
    let gate = suite.screen_input().unwrap();
    assert_eq!(gate.diagnostic.as_deref(), Some("rank8"));
    let (r, _) = suite.run_one(1);
    assert_eq!(r.status, Status::Fail);
    assert!(r.evidence["error"].as_str().unwrap().contains("rank8"));
    let report = suite.report();
    assert!(!report.all_hard_passed);
    assert!(report.inputs[0].error.is_some());
}

#[test]
fn repeated_runs_give_identical_reports() {
    let run = || {
        let mut s = Suite::new(RunConfig::new("verify", 7, 2));
        for id in [1, 2, 9, 10] {
            s.run_one(id);
        }
        s.report()
    };
    let (a, b) = (run(), run());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.all_hard_passed, "{:?}", a.checks);
}

/// The sextic computed in one run is checked by a later run without being
/// recomputed.
#[test]
fn persisted_sextic_is_reused() {
    let mut first = Suite::new(RunConfig::new("sextic", 23, 1));
    let (r, _) = first.run_one(8);
    assert_eq!(r.status, Status::Pass, "{}", r.evidence);
    let path = tmp("sextic.json");
    write_json(&path, &first.sextic_artifact().unwrap()).unwrap();
    let file: SexticFile = read_json(&path).unwrap();
    assert_eq!(file.form.degree(), 6);
    let mut second = Suite::new(RunConfig::new("verify", 7, 1)).with_sextic(file);
    let (r2, t2) = second.run_one(8);
    assert_eq!(r2.status, Status::Pass, "{}", r2.evidence);
    assert_eq!(r2.evidence["loaded_from_file"], true);
    assert_eq!(r2.evidence["nonzero_coefficients"], r.evidence["nonzero_coefficients"]);
    assert!(second.timings().setup.iter().all(|t| !t.name.starts_with("sextic ladder")));
    assert!(t2.millis < 60_000);
}

/// A trivector whose surface splits over F_11: some C_P and C_Q share a
/// component, which the gate reports before any chord goes wrong.
#[test]
fn split_surface_is_rejected() {
    let f = PrimeField::new(11).unwrap();
    let w = Trivector::random(&f, 9, &mut ChaCha8Rng::seed_from_u64(0));
    let s = suitability_gate(&f, &w, 0);
    assert_eq!(s.report.diagnostic.as_deref(), Some("split"), "{:?}", s.report.checks);
    let last = s.report.checks.last().unwrap();
    assert!(last.evidence["shared_dim"].as_u64().unwrap() > 2);
}
