use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::files::LadderStep;
use super::{stream, SessionError};
use crate::chords::{third_point, PointPool};
use crate::dualside::{sextic_interpolate, DualError, SEXTIC_LADDER};
use crate::exterior::Trivector;
use crate::field::PrimeField;
use crate::pfaffloci::{coble_cubic, kernel5, rank_at, HomogeneousForm, ProjPoint};
use crate::scanner::{enumerate_a, FULL_SCAN_MAX_Q};

pub const GEN_ATTEMPTS: u32 = 32;
pub const RANK_SAMPLES: usize = 200;
/// Pool size grown by chords when A is too large to scan.
const POOL_TARGET: usize = 150;
/// Pool points whose pairs are searched for a shared kernel plane.
const SPLIT_POINTS: usize = 60;
const CHORD_DRAWS: usize = 3;

const GATE_STREAM: u64 = 0x6a7e;
const GEN_STREAM: u64 = 0x6e00;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateCheck {
    pub name: String,
    pub passed: bool,
    pub evidence: Value,
}

/// Outcome of the gate: checks in order, stopping at the first failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub q: u32,
    pub passed: bool,
    pub diagnostic: Option<String>,
    pub a_count: Option<usize>,
    pub checks: Vec<GateCheck>,
}

/// The gate report with the points of A it found, reused by later stages.
#[derive(Clone, Debug)]
pub struct Screened {
    pub report: GateReport,
    pub pool: Option<PointPool>,
}

pub type ChordProbe<'a> = dyn FnMut(&PrimeField, &Trivector, &PointPool, &mut ChaCha8Rng) -> Result<Value, String> + 'a;

pub fn suitability_gate(f: &PrimeField, omega: &Trivector, seed: u64) -> Screened {
    suitability_gate_with(f, omega, seed, &mut chord_sample)
}

/// The gate with a replaceable chord stage.
pub fn suitability_gate_with(f: &PrimeField, omega: &Trivector, seed: u64, chord: &mut ChordProbe) -> Screened {
    let mut rng = stream(seed, GATE_STREAM);
    let q = f.modulus();
    let mut report = GateReport {
        q,
        passed: false,
        diagnostic: None,
        a_count: None,
        checks: Vec::new(),
    };
    let mut pool = None;
    let push = |report: &mut GateReport, name: &str, r: Result<Value, Value>| {
        let passed = r.is_ok();
        let evidence = r.unwrap_or_else(|e| e);
        report.checks.push(GateCheck {
            name: name.into(),
            passed,
            evidence,
        });
        if !passed {
            report.diagnostic = Some(name.into());
        }
        passed
    };

    if omega.dim() != 9 {
        push(&mut report, "dim", Err(json!({ "dim": omega.dim() })));
        return Screened { report, pool };
    }

    let rank8 = (0..RANK_SAMPLES)
        .filter(|_| {
            let p = loop {
                let v = f.random_vector(9, &mut rng);
                if v.iter().any(|&c| c != 0) {
                    break v;
                }
            };
            rank_at(f, omega, &p) == 8
        })
        .count();
    let threshold = 1.0 - 3.0 / q as f64;
    let ev = json!({ "samples": RANK_SAMPLES, "rank8": rank8, "threshold": threshold });
    if !push(&mut report, "rank8", ok_if(rank8 as f64 >= threshold * RANK_SAMPLES as f64, ev)) {
        return Screened { report, pool };
    }

    let cubic = coble_cubic(f, omega);
    let ev = match &cubic {
        Ok(c) => Ok(json!({ "odd_signs": c.odd.iter().filter(|&&o| o).count() })),
        Err(e) => Err(json!({ "error": e.to_string() })),
    };
    if !push(&mut report, "divisibility", ev) {
        return Screened { report, pool };
    }

    if q <= FULL_SCAN_MAX_Q {
        let scan = match enumerate_a(f, omega) {
            Ok(s) => s,
            Err(e) => {
                push(&mut report, "strata", Err(json!({ "error": e.to_string() })));
                return Screened { report, pool };
            }
        };
        let low = scan.points.iter().filter(|p| rank_at(f, omega, p.coords()) <= 2).count();
        report.a_count = Some(scan.count);
        let ev = json!({ "a_count": scan.count, "rank_le_2": low });
        if !push(&mut report, "strata", ok_if(scan.count > 0 && low == 0, ev)) {
            return Screened { report, pool };
        }
        pool = Some(PointPool::from_points(scan.points, true));
    } else {
        push(&mut report, "strata", Ok(json!({ "skipped": "A is not scanned above q = 13" })));
        pool = PointPool::grow(f, omega, POOL_TARGET, &mut rng).ok();
    }

    let found = pool.as_ref().map_or(0, |p| p.len());
    if !push(&mut report, "points", ok_if(found >= 3, json!({ "pool": found }))) {
        return Screened { report, pool };
    }
    let pts = pool.as_ref().expect("pool of at least three points");

    let ev = chord(f, omega, pts, &mut rng).map_err(|e| json!({ "error": e }));
    if !push(&mut report, "chord", ev) {
        return Screened { report, pool };
    }

    let ev = split_check(f, omega, pts);
    if !push(&mut report, "split", ev) {
        return Screened { report, pool };
    }
    report.passed = true;
    Screened { report, pool }
}

fn ok_if(cond: bool, ev: Value) -> Result<Value, Value> {
    if cond {
        Ok(ev)
    } else {
        Err(ev)
    }
}

fn zero_pair(f: &PrimeField, omega: &Trivector, a: &ProjPoint, b: &ProjPoint) -> bool {
    omega
        .double_contract(f, a.coords(), b.coords())
        .is_ok_and(|v| v.iter().all(|&c| c == 0))
}

/// The constructive chord on a random pair with nonzero contraction, with a
/// couple of redraws for pairs that happen to be degenerate.
fn chord_sample(f: &PrimeField, omega: &Trivector, pool: &PointPool, rng: &mut ChaCha8Rng) -> Result<Value, String> {
    let pts = pool.points();
    let mut last = String::from("no pair with nonzero contraction");
    let mut draws = 0;
    for _ in 0..64 * CHORD_DRAWS {
        let (a, b) = (pts.choose(rng).unwrap(), pts.choose(rng).unwrap());
        if a == b || zero_pair(f, omega, a, b) {
            continue;
        }
        draws += 1;
        match third_point(f, omega, a.coords(), b.coords(), rng) {
            Ok(t) => return Ok(json!({ "draws": draws, "strict": t.strict })),
            Err(e) => last = e.to_string(),
        }
        if draws == CHORD_DRAWS {
            break;
        }
    }
    Err(last)
}

/// Pairs with zero contraction whose kernels share a projective plane: C_P and
/// C_Q then have a common component and chords stop being unique.
fn split_check(f: &PrimeField, omega: &Trivector, pool: &PointPool) -> Result<Value, Value> {
    let pts = &pool.points()[..pool.len().min(SPLIT_POINTS)];
    let kernels: Vec<_> = pts.iter().map(|p| kernel5(f, omega, p.coords())).collect();
    let mut zero_pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if !zero_pair(f, omega, &pts[i], &pts[j]) {
                continue;
            }
            zero_pairs += 1;
            if let (Ok(a), Ok(b)) = (&kernels[i], &kernels[j]) {
                let d = a.intersect(b).dim();
                if d > 2 {
                    return Err(json!({ "pair": [pts[i], pts[j]], "shared_dim": d }));
                }
            }
        }
    }
    Ok(json!({ "points": pts.len(), "zero_pairs": zero_pairs }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenAttempt {
    pub attempt: u32,
    pub passed: bool,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub field: PrimeField,
    pub omega: Trivector,
    pub screened: Screened,
    pub attempts: Vec<GenAttempt>,
}

/// Attempt `k` of the seeded generator.
fn candidate(f: &PrimeField, seed: u64, k: u32) -> Trivector {
    Trivector::random(f, 9, &mut stream(seed, GEN_STREAM + k as u64))
}

/// Random trivectors from the seed until one passes the gate.
pub fn generate(q: u32, seed: u64) -> Result<Generated, SessionError> {
    let f = PrimeField::new(q)?;
    let mut attempts = Vec::new();
    for k in 0..GEN_ATTEMPTS {
        let omega = candidate(&f, seed, k);
        let screened = suitability_gate(&f, &omega, seed.wrapping_add(k as u64));
        attempts.push(GenAttempt {
            attempt: k,
            passed: screened.report.passed,
            diagnostic: screened.report.diagnostic.clone(),
        });
        if screened.report.passed {
            return Ok(Generated {
                field: f,
                omega,
                screened,
                attempts,
            });
        }
    }
    Err(SessionError::SuitabilityExhausted {
        q,
        attempts: GEN_ATTEMPTS,
    })
}

#[derive(Clone, Debug)]
pub struct SexticRun {
    pub generated: Generated,
    pub form: HomogeneousForm,
    pub ladder: Vec<LadderStep>,
}

/// The sextic at the first prime of the ladder where interpolation gives a
/// one-dimensional kernel; ω is regenerated from the seed at each prime.
pub fn sextic_ladder(seed: u64) -> Result<SexticRun, SessionError> {
    let mut ladder = Vec::new();
    for q in SEXTIC_LADDER {
        let generated = match generate(q, seed) {
            Ok(g) => g,
            Err(e @ SessionError::SuitabilityExhausted { .. }) => {
                ladder.push(LadderStep {
                    prime: q,
                    outcome: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        match sextic_interpolate(&generated.field, &generated.omega, seed) {
            Ok(form) => {
                ladder.push(LadderStep {
                    prime: q,
                    outcome: "kernel of dimension 1".into(),
                });
                return Ok(SexticRun {
                    generated,
                    form,
                    ladder,
                });
            }
            Err(e @ (DualError::KernelNotOneDim(_) | DualError::TooFewPoints(_))) => ladder.push(LadderStep {
                prime: q,
                outcome: e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    Err(SessionError::LadderExhausted)
}
