use std::collections::BTreeMap;
use std::path::Path;

use coble::chords::{ChordError, GroupContext};
use coble::dualside::{calibrate, sextic_interpolate};
use coble::exterior::Trivector;
use coble::orbits8::{fingerprint, label_of, normal_form, transport, FingerprintDb, OrbitLabel};
use coble::pfaffloci::{coble_cubic, cubic_by_interpolation};
use coble::scanner::{curve_points, enumerate_a, rank_census};
use coble::session::{
    generate, read_json, sextic_ladder, stream, write_json, CubicFile, LadderStep, ScanFile, SessionError,
    SexticFile, Status, Suite, TrivectorFile, CRITERIA, VERSION,
};
use serde_json::{json, Value};

use crate::input::{config, load, read_input, stamped, Loaded};
use crate::{CliError, Common, VerifyArgs};

type Outcome = Result<bool, CliError>;

const CLASSIFY_STREAM: u64 = 0xc1a5;

fn write(c: &Common, name: &str, value: &impl serde::Serialize) -> Result<(), CliError> {
    let path = c.out.join(name);
    write_json(&path, value)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn verdict(name: &str, passed: bool, evidence: &Value) {
    println!("{name}: {} {evidence}", if passed { "PASS" } else { "FAIL" });
}

/// Prints the gate outcome; false when the trivector is unsuitable.
fn gate_ok(l: &Loaded) -> bool {
    let r = &l.gate;
    let ev = json!({ "q": r.q, "a_count": r.a_count, "diagnostic": r.diagnostic, "origin": l.origin, "attempts": l.attempts.len() });
    verdict("gate", r.passed, &ev);
    r.passed
}

pub fn gen(c: &Common) -> Outcome {
    if read_input(c)?.is_some() {
        return Err(CliError::Usage("gen draws its own trivector; drop --input".into()));
    }
    let q = c.prime.unwrap_or(7);
    let g = match generate(q, c.seed) {
        Ok(g) => g,
        Err(e @ SessionError::SuitabilityExhausted { .. }) => {
            let log = stamped(q, c.seed, json!({ "passed": false, "error": e.to_string() }));
            write(c, "gen_log.json", &log)?;
            verdict("gen", false, &json!({ "error": e.to_string() }));
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    write(c, "omega.json", &TrivectorFile::new(&g.field, &g.omega, Some(c.seed)))?;
    let log = stamped(
        q,
        c.seed,
        json!({ "passed": true, "attempts": g.attempts, "gate": g.screened.report }),
    );
    write(c, "gen_log.json", &log)?;
    verdict("gen", true, &json!({ "attempts": g.attempts.len(), "a_count": g.screened.report.a_count }));
    Ok(true)
}

pub fn cubic(c: &Common) -> Outcome {
    let l = load(c, 7)?;
    if !gate_ok(&l) {
        return Ok(false);
    }
    let (f, w) = (&l.field, &l.omega);
    let cubic = coble_cubic(f, w).map_err(SessionError::from)?;
    let pts = l.pool.as_ref().map(|p| p.points()).unwrap_or_default();
    let used = &pts[..pts.len().min(c.points.unwrap_or(40))];
    let interp = match cubic_by_interpolation(f, used) {
        Ok(form) => json!({ "points": used.len(), "kernel_dim": 1, "proportional": form.ratio_to(&cubic.form).is_some() }),
        Err(e) => json!({ "points": used.len(), "error": e.to_string(), "proportional": false }),
    };
    let passed = interp["proportional"] == true;
    verdict("uniqueness", passed, &interp);
    let file = CubicFile {
        prime: l.q(),
        seed: c.seed,
        version: VERSION.into(),
        form: cubic.form,
        odd: cubic.odd,
    };
    let mut out = serde_json::to_value(&file).map_err(SessionError::from)?;
    out["interpolation"] = interp;
    out["passed"] = json!(passed);
    write(c, "cubic.json", &out)?;
    Ok(passed)
}

pub fn sextic(c: &Common) -> Outcome {
    let (f, w, form, ladder, pool) = if c.input != "random" || c.prime.is_some() {
        let l = load(c, 23)?;
        if !gate_ok(&l) {
            return Ok(false);
        }
        let form = sextic_interpolate(&l.field, &l.omega, c.seed).map_err(SessionError::from)?;
        let step = LadderStep {
            prime: l.q(),
            outcome: "kernel of dimension 1".into(),
        };
        (l.field, l.omega, form, vec![step], l.pool)
    } else {
        let run = sextic_ladder(c.seed)?;
        let g = run.generated;
        (g.field, g.omega, run.form, run.ladder, g.screened.pool)
    };
    let calibration = match (c.trials, pool) {
        (Some(trials), Some(pool)) => {
            let mut ctx = GroupContext::new(&f, &w, pool, c.seed).map_err(SessionError::from)?;
            Some(calibrate(&form, &mut ctx, c.points.unwrap_or(10), trials).map_err(SessionError::from)?)
        }
        _ => None,
    };
    let file = SexticFile {
        prime: f.modulus(),
        seed: c.seed,
        version: VERSION.into(),
        omega: TrivectorFile::new(&f, &w, Some(c.seed)),
        ladder,
        form,
        calibration,
    };
    write(c, "sextic.json", &file)?;
    let mut suite = Suite::new(config("sextic", c, f.modulus())).with_sextic(file);
    let (r, _) = suite.run_one(8);
    let passed = r.status == Status::Pass;
    verdict("sextic", passed, &r.evidence);
    write(c, "sextic_check.json", &stamped(f.modulus(), c.seed, json!({ "passed": passed, "check": r })))?;
    Ok(passed)
}

pub fn scan(c: &Common) -> Outcome {
    let l = load(c, 7)?;
    // an unsuitable input is still scanned, the census says why
    gate_ok(&l);
    let (f, w) = (&l.field, &l.omega);
    let report = enumerate_a(f, w).map_err(SessionError::from)?;
    let cubic = coble_cubic(f, w).map_err(SessionError::from)?;
    let census = rank_census(f, w, &cubic.form).map_err(SessionError::from)?;
    let q = l.q() as f64;
    let n = report.count as f64;
    let mut checks = BTreeMap::new();
    checks.insert("no_rank_le_2", census.counts[0] + census.counts[1] == 0);
    checks.insert("census_matches_scan", census.counts[2] as usize == report.count);
    checks.insert("count_window", report.count > 0 && (n / (q * q) - 1.0).abs() <= 10.0 / q.sqrt());
    let mut curves = Vec::new();
    for p in report.points.iter().take(c.points.unwrap_or(0)) {
        let cp = curve_points(f, w, p.coords()).map_err(SessionError::from)?;
        let ok = (cp.count as f64 - (q + 1.0)).abs() <= 4.0 * q.sqrt() && cp.points.contains(p);
        curves.push(json!({ "point": p, "count": cp.count, "in_window": ok }));
    }
    checks.insert("curve_windows", curves.iter().all(|v| v["in_window"] == true));
    let passed = checks.values().all(|&b| b);
    verdict("scan", passed, &json!({ "a_count": report.count, "census": census.counts, "checks": checks }));
    let file = ScanFile {
        seed: c.seed,
        version: VERSION.into(),
        report,
    };
    let mut out = serde_json::to_value(&file).map_err(SessionError::from)?;
    out["prime"] = json!(l.q());
    out["census"] = json!(census);
    out["curves"] = json!(curves);
    out["checks"] = json!(checks);
    out["passed"] = json!(passed);
    write(c, "scan.json", &out)?;
    Ok(passed)
}

pub fn group(c: &Common) -> Outcome {
    let l = load(c, 7)?;
    if !gate_ok(&l) {
        return Ok(false);
    }
    let q = l.q();
    let pool = l.pool.clone().expect("a passed gate keeps its points");
    let complete = pool.complete;
    let mut g = GroupContext::new(&l.field, &l.omega, pool, c.seed).map_err(SessionError::from)?;
    let trials = c.trials.unwrap_or(100);
    let (e, k) = (g.identity.clone(), g.chord_constant.clone());
    let mut fails = BTreeMap::<&str, u64>::new();
    let mut count = |key: &'static str, ok: Result<bool, ChordError>| {
        if !ok.unwrap_or(false) {
            *fails.entry(key).or_default() += 1;
        }
    };
    for _ in 0..trials {
        let (x, y, z) = (g.sample(), g.sample(), g.sample());
        count("identity", g.add(&x, &e).map(|s| s == x));
        count("commutativity", (|| Ok(g.add(&x, &y)? == g.add(&y, &x)?))());
        count("associativity", (|| {
            let xy = g.add(&x, &y)?;
            let yz = g.add(&y, &z)?;
            Ok(g.add(&xy, &z)? == g.add(&x, &yz)?)
        })());
        count("chord_constant", (|| {
            let r = g.third(&x, &y)?;
            Ok(x == y || g.sum3(&x, &y, &r)? == k)
        })());
    }
    // the group order is known only from a full scan
    let order = complete.then(|| g.pool().len() as i64);
    if let Some(n) = order {
        for _ in 0..trials.min(20) {
            let x = g.sample();
            count("lagrange", g.scalar_mul(n, &x).map(|y| y == e));
        }
    }
    let passed = fails.is_empty() && g.stats.failed == 0;
    let ev = json!({
        "trials": trials,
        "order": order,
        "identity": e,
        "chord_constant": k,
        "failures": fails,
        "chord_stats": g.stats,
    });
    verdict("group", passed, &ev);
    let mut out = stamped(q, c.seed, ev);
    out["passed"] = json!(passed);
    write(c, "group.json", &out)?;
    Ok(passed)
}

/// Fingerprints of the normal forms, cached in the output directory.
fn fingerprint_db(c: &Common, f: &coble::field::PrimeField) -> Result<FingerprintDb, CliError> {
    let path = c.out.join("fingerprints.json");
    let mut db = if path.exists() {
        let v: Value = read_json(&path)?;
        serde_json::from_value(v["db"].clone()).map_err(SessionError::from)?
    } else {
        FingerprintDb::default()
    };
    let before = db.entries.len();
    db.extend(f).map_err(SessionError::from)?;
    if db.entries.len() != before || !path.exists() {
        write(c, "fingerprints.json", &stamped(f.modulus(), c.seed, json!({ "db": db })))?;
    }
    Ok(db)
}

pub fn classify(c: &Common) -> Outcome {
    let mut targets: Vec<(String, Trivector, Option<OrbitLabel>)> = Vec::new();
    let f = match read_input(c)? {
        Some((f, y)) => {
            if y.dim() != 8 {
                return Err(CliError::Usage(format!("classify needs 8 variables, got {}", y.dim())));
            }
            targets.push((c.input.clone(), y, None));
            f
        }
        None => {
            // transported normal forms and one random tensor
            let f = coble::field::PrimeField::new(c.prime.unwrap_or(7)).map_err(SessionError::from)?;
            for label in [OrbitLabel::Y3, OrbitLabel::Y4, OrbitLabel::Y6] {
                let y = transport(&f, &normal_form(&f, label).map_err(SessionError::from)?, c.seed);
                targets.push((format!("transported {label}"), y.y, Some(label)));
            }
            let y = Trivector::random(&f, 8, &mut stream(c.seed, CLASSIFY_STREAM));
            targets.push(("random".into(), y, None));
            f
        }
    };
    let db = fingerprint_db(c, &f)?;
    let separates = db.separates(f.modulus());
    let mut rows = Vec::new();
    let mut passed = separates;
    for (source, y, expected) in &targets {
        let fp = fingerprint(&f, y).map_err(SessionError::from)?;
        let label = label_of(&db, &fp);
        let ok = expected.is_none_or(|e| e == label);
        passed &= ok;
        let row = json!({ "source": source, "label": label, "expected": expected, "fingerprint": fp.counts });
        verdict(&format!("classify {source}"), ok, &row);
        rows.push(row);
    }
    let out = stamped(
        f.modulus(),
        c.seed,
        json!({ "separates": separates, "targets": rows, "passed": passed }),
    );
    write(c, "classify.json", &out)?;
    Ok(passed)
}

pub fn verify(v: &VerifyArgs) -> Outcome {
    let c = &v.common;
    let mut suite = Suite::new(config("verify", c, c.prime.unwrap_or(7)));
    if let Some((f, w)) = read_input(c)? {
        suite = suite.with_input(f, w);
    }
    let sextic_path = c.out.join("sextic.json");
    let reuse = sextic_path.exists();
    if reuse {
        suite = suite.with_sextic(read_json::<SexticFile>(&sextic_path)?);
        println!("reusing {}", sextic_path.display());
    }
    if let Some(gate) = suite.screen_input() {
        verdict("input gate", gate.passed, &json!({ "q": gate.q, "diagnostic": gate.diagnostic }));
    }
    let ids: Vec<u32> = if v.checks.is_empty() {
        CRITERIA.iter().map(|k| k.id).collect()
    } else {
        v.checks.clone()
    };
    for id in &ids {
        if !CRITERIA.iter().any(|k| k.id == *id) {
            return Err(CliError::Usage(format!("no criterion {id}")));
        }
    }
    for id in ids {
        let (r, t) = suite.run_one(id);
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Recorded => "RECORDED",
        };
        println!("criterion {id} {}: {tag} ({} ms)", r.name, t.millis);
    }
    let report = suite.report();
    write(c, "report.json", &report)?;
    write(
        c,
        "timings.json",
        &stamped(report.config.prime, c.seed, json!({ "timings": suite.timings() })),
    )?;
    if !reuse {
        if let Some(s) = suite.sextic_artifact() {
            write(c, "sextic.json", &s)?;
        }
    }
    println!("digest {}", report.digest);
    println!("all hard checks passed: {}", report.all_hard_passed);
    Ok(report.all_hard_passed)
}

const ARTIFACTS: [&str; 11] = [
    "omega",
    "gen_log",
    "cubic",
    "sextic",
    "sextic_check",
    "scan",
    "group",
    "classify",
    "report",
    "timings",
    "fingerprints",
];

/// Pass or fail recorded in an artifact, if it carries one.
fn recorded_verdict(name: &str, v: &Value) -> Option<bool> {
    match name {
        "report" => v["all_hard_passed"].as_bool(),
        _ => v["passed"].as_bool(),
    }
}

pub fn report(c: &Common) -> Outcome {
    let mut artifacts = serde_json::Map::new();
    let mut verdicts = BTreeMap::new();
    for name in ARTIFACTS {
        let path = c.out.join(format!("{name}.json"));
        if !Path::new(&path).exists() {
            continue;
        }
        let v: Value = read_json(&path)?;
        if let Some(b) = recorded_verdict(name, &v) {
            verdicts.insert(name, b);
        }
        artifacts.insert(name.into(), v);
    }
    if artifacts.is_empty() {
        return Err(CliError::Usage(format!("no artifacts in {}", c.out.display())));
    }
    let passed = verdicts.values().all(|&b| b);
    for (name, b) in &verdicts {
        println!("{name}: {}", if *b { "PASS" } else { "FAIL" });
    }
    let merged = json!({
        "version": VERSION,
        "seed": c.seed,
        "artifacts": artifacts,
        "verdicts": verdicts,
        "passed": passed,
    });
    write(c, "merged.json", &merged)?;
    Ok(passed)
}
