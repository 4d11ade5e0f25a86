//! Run plumbing: artifact files, the suitability gate, seeded generation and
//! the verification suite shared by the command line and the bindings.

mod files;
mod gate;
mod suite;

pub use files::{read_json, write_json, CoeffEntry, CubicFile, LadderStep, ScanFile, SexticFile, TrivectorFile};
pub use gate::{
    generate, sextic_ladder, suitability_gate, suitability_gate_with, GateCheck, GateReport, GenAttempt, Generated,
    Screened, SexticRun, GEN_ATTEMPTS, RANK_SAMPLES,
};
pub use suite::{
    CheckResult, Criterion, RunConfig, RunReport, Status, Suite, Timing, Timings, CRITERIA,
};

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chords::ChordError;
use crate::dualside::DualError;
use crate::exterior::ExteriorError;
use crate::field::FieldError;
use crate::orbits8::OrbitError;
use crate::pfaffloci::LociError;
use crate::scanner::ScanError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid file: {0}")]
    InvalidFile(String),
    #[error("no suitable trivector at q = {q} after {attempts} attempts")]
    SuitabilityExhausted { q: u32, attempts: u32 },
    #[error("sextic interpolation failed at every prime of the ladder")]
    LadderExhausted,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Loci(#[from] LociError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

impl SessionError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        SessionError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Independent stream `tag` of the run seed.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}
