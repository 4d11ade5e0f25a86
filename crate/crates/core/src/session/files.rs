//! JSON artifacts. Every file carries the prime, the seed it came from and the
//! tool version.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{SessionError, VERSION};
use crate::dualside::Calibration;
use crate::exterior::Trivector;
use crate::field::PrimeField;
use crate::pfaffloci::HomogeneousForm;
use crate::scanner::ScanReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub idx: [usize; 3],
    pub val: u32,
}

/// A trivector on strictly increasing index triples; absent triples are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivectorFile {
    pub prime: u32,
    pub dim: usize,
    pub coeffs: Vec<CoeffEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
}

impl TrivectorFile {
    pub fn new(f: &PrimeField, omega: &Trivector, seed: Option<u64>) -> Self {
        TrivectorFile {
            prime: f.modulus(),
            dim: omega.dim(),
            coeffs: omega
                .nonzero_entries()
                .map(|(idx, val)| CoeffEntry { idx, val })
                .collect(),
            seed,
            version: Some(VERSION.to_string()),
        }
    }

    /// Checks the table and builds the trivector. Entries may come in any order
    /// but each triple at most once.
    pub fn to_trivector(&self) -> Result<(PrimeField, Trivector), SessionError> {
        let f = PrimeField::new(self.prime)?;
        if !(self.dim == 8 || self.dim == 9) {
            return Err(SessionError::InvalidFile(format!("dim {} is not 8 or 9", self.dim)));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::with_capacity(self.coeffs.len());
        for CoeffEntry { idx: [i, j, k], val } in &self.coeffs {
            if !(i < j && j < k && *k < self.dim) {
                return Err(SessionError::InvalidFile(format!("index triple [{i},{j},{k}]")));
            }
            if *val >= self.prime {
                return Err(SessionError::InvalidFile(format!("value {val} is not a residue mod {}", self.prime)));
            }
            if !seen.insert([*i, *j, *k]) {
                return Err(SessionError::InvalidFile(format!("triple [{i},{j},{k}] appears twice")));
            }
            entries.push(([*i, *j, *k], *val));
        }
        Ok((f, Trivector::from_entries(&f, self.dim, &entries)?))
    }
}

/// The Pfaffian cubic with the signs of its nine identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicFile {
    pub prime: u32,
    pub seed: u64,
    pub version: String,
    pub form: HomogeneousForm,
    pub odd: Vec<bool>,
}

/// One rung of the sextic prime ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderStep {
    pub prime: u32,
    pub outcome: String,
}

/// The sextic together with the trivector it belongs to, so that later runs
/// can check it without recomputing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SexticFile {
    pub prime: u32,
    pub seed: u64,
    pub version: String,
    pub omega: TrivectorFile,
    pub ladder: Vec<LadderStep>,
    pub form: HomogeneousForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFile {
    pub seed: u64,
    pub version: String,
    #[serde(flatten)]
    pub report: ScanReport,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SessionError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| SessionError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| SessionError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, SessionError> {
    let text = fs::read_to_string(path).map_err(|e| SessionError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
