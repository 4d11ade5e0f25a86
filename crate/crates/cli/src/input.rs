use std::path::Path;

use coble::chords::PointPool;
use coble::exterior::Trivector;
use coble::field::PrimeField;
use coble::session::{generate, read_json, suitability_gate, GateReport, GenAttempt, RunConfig, TrivectorFile};
use serde_json::{json, Value};

use crate::{CliError, Common};

/// A trivector in nine variables with its gate outcome.
pub struct Loaded {
    pub field: PrimeField,
    pub omega: Trivector,
    pub origin: String,
    pub gate: GateReport,
    pub attempts: Vec<GenAttempt>,
    pub pool: Option<PointPool>,
}

impl Loaded {
    pub fn q(&self) -> u32 {
        self.field.modulus()
    }
}

/// Reads `--input` if given; checks it against `--prime` when both are set.
pub fn read_input(c: &Common) -> Result<Option<(PrimeField, Trivector)>, CliError> {
    if c.input == "random" {
        return Ok(None);
    }
    let file: TrivectorFile = read_json(Path::new(&c.input))?;
    let (f, w) = file.to_trivector()?;
    if let Some(q) = c.prime.filter(|&q| q != f.modulus()) {
        return Err(CliError::Usage(format!("--prime {q} but {} is over F_{}", c.input, f.modulus())));
    }
    Ok(Some((f, w)))
}

/// The input trivector or a generated one at `default_q`, gated either way.
pub fn load(c: &Common, default_q: u32) -> Result<Loaded, CliError> {
    match read_input(c)? {
        Some((f, w)) => {
            if w.dim() != 9 {
                return Err(CliError::Usage(format!("expected a trivector in 9 variables, got {}", w.dim())));
            }
            let s = suitability_gate(&f, &w, c.seed);
            Ok(Loaded {
                field: f,
                omega: w,
                origin: c.input.clone(),
                gate: s.report,
                attempts: Vec::new(),
                pool: s.pool,
            })
        }
        None => {
            let g = generate(c.prime.unwrap_or(default_q), c.seed)?;
            Ok(Loaded {
                field: g.field,
                omega: g.omega,
                origin: "random".into(),
                gate: g.screened.report,
                attempts: g.attempts,
                pool: g.screened.pool,
            })
        }
    }
}

pub fn config(command: &str, c: &Common, q: u32) -> RunConfig {
    RunConfig {
        command: command.into(),
        prime: q,
        seed: c.seed,
        input: c.input.clone(),
        out: Some(c.out.display().to_string()),
        points: c.points,
        trials: c.trials,
    }
}

/// `fields` with the prime, seed and tool version added.
pub fn stamped(q: u32, seed: u64, fields: Value) -> Value {
    let mut v = json!({ "prime": q, "seed": seed, "version": coble::session::VERSION });
    if let (Some(m), Value::Object(extra)) = (v.as_object_mut(), fields) {
        m.extend(extra);
    }
    v
}
