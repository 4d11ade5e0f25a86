//! The affine model in Λ³F⁸: printed normal forms of the orbits Y₃, Y₄, Y₆,
//! their Kempf flags, rank-census fingerprints and the 3:1 flag enumeration.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{in_sum_of_spans, wedge_space, ExteriorError, Subspace, Trivector};
use crate::field::{Matrix, PrimeField};
use crate::scanner::for_each_point;

/// Largest q for which the P⁷ census is run.
pub const FINGERPRINT_MAX_Q: u32 = 11;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("no printed normal form for {0}")]
    UnknownLabel(String),
    #[error("q = {0} is too large for the fingerprint census")]
    FieldTooLarge(u32),
    #[error("tensor is not in the flag's wedge-space sum")]
    MembershipFailed,
    #[error("expected a trivector in 8 variables, got {0}")]
    WrongDimension(usize),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitLabel {
    Generic,
    Y3,
    Y4,
    Y6,
    Unknown,
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for OrbitLabel {
    type Err = OrbitError;
    fn from_str(s: &str) -> Result<Self, OrbitError> {
        match s.to_ascii_uppercase().as_str() {
            "GENERIC" => Ok(OrbitLabel::Generic),
            "Y3" => Ok(OrbitLabel::Y3),
            "Y4" => Ok(OrbitLabel::Y4),
            "Y6" => Ok(OrbitLabel::Y6),
            _ => Err(OrbitError::UnknownLabel(s.to_string())),
        }
    }
}

/// A trivector in eight variables, labelled when its orbit is known by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trivector8 {
    pub y: Trivector,
    pub label: Option<OrbitLabel>,
}

impl Trivector8 {
    pub fn new(y: Trivector) -> Result<Self, OrbitError> {
        if y.dim() != 8 {
            return Err(OrbitError::WrongDimension(y.dim()));
        }
        Ok(Trivector8 { y, label: None })
    }
}

const Y3_TERMS: [[usize; 3]; 5] = [[1, 2, 3], [4, 5, 6], [1, 4, 7], [2, 6, 8], [3, 5, 8]];
const Y4_TERMS: [[usize; 3]; 6] = [[4, 5, 6], [1, 4, 7], [2, 5, 7], [2, 6, 8], [3, 5, 8], [3, 6, 7]];
const Y6_TERMS: [[usize; 3]; 5] = [[4, 5, 6], [1, 4, 7], [2, 5, 7], [2, 6, 8], [3, 5, 8]];

/// Sum of v_ijk with 1-based indices, as in the printed formulas.
fn from_terms(f: &PrimeField, terms: &[[usize; 3]]) -> Trivector {
    let entries: Vec<([usize; 3], u32)> = terms.iter().map(|t| ([t[0] - 1, t[1] - 1, t[2] - 1], 1)).collect();
    Trivector::from_entries(f, 8, &entries).expect("increasing indices below 8")
}

pub fn normal_form(f: &PrimeField, label: OrbitLabel) -> Result<Trivector8, OrbitError> {
    let terms: &[[usize; 3]] = match label {
        OrbitLabel::Y3 => &Y3_TERMS,
        OrbitLabel::Y4 => &Y4_TERMS,
        OrbitLabel::Y6 => &Y6_TERMS,
        other => return Err(OrbitError::UnknownLabel(other.to_string())),
    };
    Ok(Trivector8 {
        y: from_terms(f, terms),
        label: Some(label),
    })
}

/// Seeded random invertible 8×8 matrix.
pub fn transport_matrix(f: &PrimeField, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = Matrix::random(*f, 8, 8, &mut rng);
        if g.rank() == 8 {
            return g;
        }
    }
}

/// y pushed forward by `transport_matrix(seed)`; the label is kept.
pub fn transport(f: &PrimeField, y: &Trivector8, seed: u64) -> Trivector8 {
    let g = transport_matrix(f, seed);
    Trivector8 {
        y: y.y.transform(f, &g),
        label: y.label,
    }
}

/// Counts of rank(φ⌟y) = 0, 2, 4, 6, 8 over the points φ of P⁷(F_q).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub q: u32,
    pub counts: [u64; 5],
}

impl Fingerprint {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn l1(&self, other: &Fingerprint) -> u64 {
        self.counts.iter().zip(&other.counts).map(|(a, b)| a.abs_diff(*b)).sum()
    }
}

pub fn fingerprint(f: &PrimeField, y: &Trivector) -> Result<Fingerprint, OrbitError> {
    if y.dim() != 8 {
        return Err(OrbitError::WrongDimension(y.dim()));
    }
    if f.modulus() > FINGERPRINT_MAX_Q {
        return Err(OrbitError::FieldTooLarge(f.modulus()));
    }
    let mut counts = [0u64; 5];
    for_each_point(f, 8, |phi| {
        let r = y.skew_matrix(f, phi).expect("dimension checked").rank();
        counts[r / 2] += 1;
    });
    Ok(Fingerprint {
        q: f.modulus(),
        counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbEntry {
    pub q: u32,
    pub label: OrbitLabel,
    pub fingerprint: Fingerprint,
}

/// Fingerprints of the normal forms, keyed by (q, label).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintDb {
    pub entries: Vec<DbEntry>,
}

impl FingerprintDb {
    pub fn build(f: &PrimeField) -> Result<Self, OrbitError> {
        let mut db = FingerprintDb::default();
        db.extend(f)?;
        Ok(db)
    }

    /// Adds the entries for another field.
    pub fn extend(&mut self, f: &PrimeField) -> Result<(), OrbitError> {
        for label in [OrbitLabel::Y3, OrbitLabel::Y4, OrbitLabel::Y6] {
            if self.get(f.modulus(), label).is_some() {
                continue;
            }
            let fingerprint = fingerprint(f, &normal_form(f, label)?.y)?;
            self.entries.push(DbEntry {
                q: f.modulus(),
                label,
                fingerprint,
            });
        }
        Ok(())
    }

    pub fn get(&self, q: u32, label: OrbitLabel) -> Option<&Fingerprint> {
        self.entries.iter().find(|e| e.q == q && e.label == label).map(|e| &e.fingerprint)
    }

    /// Whether every pair of labels at q has distinct fingerprints.
    pub fn separates(&self, q: u32) -> bool {
        let fps: Vec<&Fingerprint> = self.entries.iter().filter(|e| e.q == q).map(|e| &e.fingerprint).collect();
        fps.iter().enumerate().all(|(i, a)| fps[i + 1..].iter().all(|b| a != b))
    }
}

/// The nearest database entry in L1 distance when it matches exactly;
/// otherwise Generic when the census has the generic shape, else Unknown.
pub fn classify8(db: &FingerprintDb, f: &PrimeField, y: &Trivector) -> Result<OrbitLabel, OrbitError> {
    Ok(label_of(db, &fingerprint(f, y)?))
}

/// The label `classify8` gives to a tensor with this fingerprint.
pub fn label_of(db: &FingerprintDb, fp: &Fingerprint) -> OrbitLabel {
    let nearest = db
        .entries
        .iter()
        .filter(|e| e.q == fp.q)
        .min_by_key(|e| e.fingerprint.l1(fp));
    if let Some(e) = nearest {
        if e.fingerprint == *fp {
            return e.label;
        }
    }
    if generic_shape(fp) {
        OrbitLabel::Generic
    } else {
        OrbitLabel::Unknown
    }
}

/// A general tensor has no φ with φ⌟y of rank ≤ 2.
fn generic_shape(fp: &Fingerprint) -> bool {
    fp.counts[0] == 0 && fp.counts[1] == 0
}

/// Rows of the table of finite Kempf collapsings: the flag type and the
/// bundle whose total space maps onto the orbit closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KempfRow {
    /// Λ²U₅∧V₈ over Gr(5, V₈).
    Y1,
    /// U₁∧Λ²V₈ + Λ²U₄∧V₈ over F(1,4).
    Y3,
    /// Λ³U₅ + U₂∧U₅∧V₈ over F(2,5).
    Y4Resolution,
    /// Λ²U₄∧V₈ + Λ³U₆ over F(4,6).
    Y4Triple,
    /// U₂∧(U₄∧V₈ + U₅∧U₆) + Λ³U₅ over F(2,4,5,6).
    Y4Nested,
    /// U₁∧(U₄∧V₈ + Λ²U₆) + U₃∧(U₃∧U₇ + U₄∧U₆) over F(1,3,4,6,7).
    Y6,
    /// U₂∧(U₂∧V₈ + U₅∧U₇) + Λ³U₅ over F(2,5,7).
    Y8,
    /// U₂∧Λ²V₈ over Gr(2, V₈).
    Y8Prime,
}

impl KempfRow {
    pub fn dims(self) -> &'static [usize] {
        match self {
            KempfRow::Y1 => &[5],
            KempfRow::Y3 => &[1, 4],
            KempfRow::Y4Resolution => &[2, 5],
            KempfRow::Y4Triple => &[4, 6],
            KempfRow::Y4Nested => &[2, 4, 5, 6],
            KempfRow::Y6 => &[1, 3, 4, 6, 7],
            KempfRow::Y8 => &[2, 5, 7],
            KempfRow::Y8Prime => &[2],
        }
    }

    /// Wedge spaces summing to the fiber over the flag `m` (members in
    /// increasing dimension).
    pub fn spaces(self, m: &[Subspace]) -> Result<Vec<Subspace>, OrbitError> {
        if m.len() != self.dims().len() || m.iter().zip(self.dims()).any(|(s, &d)| s.dim() != d) {
            return Err(ExteriorError::NotNested.into());
        }
        let v = Subspace::full(m[0].field(), m[0].ambient());
        let w = |a: &Subspace, b: &Subspace, c: &Subspace| wedge_space(a, b, c);
        Ok(match self {
            KempfRow::Y1 => vec![w(&m[0], &m[0], &v)?],
            KempfRow::Y3 => vec![w(&m[0], &v, &v)?, w(&m[1], &m[1], &v)?],
            KempfRow::Y4Resolution => vec![w(&m[1], &m[1], &m[1])?, w(&m[0], &m[1], &v)?],
            KempfRow::Y4Triple => vec![w(&m[0], &m[0], &v)?, w(&m[1], &m[1], &m[1])?],
            KempfRow::Y4Nested => vec![w(&m[0], &m[1], &v)?, w(&m[0], &m[2], &m[3])?, w(&m[2], &m[2], &m[2])?],
            KempfRow::Y6 => vec![
                w(&m[0], &m[2], &v)?,
                w(&m[0], &m[3], &m[3])?,
                w(&m[1], &m[1], &m[4])?,
                w(&m[1], &m[2], &m[3])?,
            ],
            KempfRow::Y8 => vec![w(&m[0], &m[0], &v)?, w(&m[0], &m[1], &m[2])?, w(&m[1], &m[1], &m[1])?],
            KempfRow::Y8Prime => vec![w(&m[0], &v, &v)?],
        })
    }

    /// Exact membership of y in the fiber over the flag.
    pub fn contains(self, y: &Trivector, m: &[Subspace]) -> Result<bool, OrbitError> {
        Ok(in_sum_of_spans(y, &self.spaces(m)?))
    }
}

/// ⟨v_i : i ∈ idx⟩ with 1-based indices; vectors given as (index, coefficient) lists.
fn span_of(f: &PrimeField, vecs: &[&[(usize, i64)]]) -> Subspace {
    let vs: Vec<Vec<u32>> = vecs
        .iter()
        .map(|v| {
            let mut out = vec![0u32; 8];
            for &(i, c) in v.iter() {
                out[i - 1] = f.from_i64(c);
            }
            out
        })
        .collect();
    Subspace::span(*f, 8, &vs)
}

fn basis_span(f: &PrimeField, idx: &[usize]) -> Subspace {
    let vecs: Vec<Vec<(usize, i64)>> = idx.iter().map(|&i| vec![(i, 1)]).collect();
    let refs: Vec<&[(usize, i64)]> = vecs.iter().map(|v| v.as_slice()).collect();
    span_of(f, &refs)
}

/// The two printed flags of the Y₃ row through y₃.
pub fn y3_flags(f: &PrimeField) -> [Vec<Subspace>; 2] {
    [
        vec![basis_span(f, &[1]), basis_span(f, &[1, 5, 6, 8])],
        vec![basis_span(f, &[4]), basis_span(f, &[2, 3, 4, 8])],
    ]
}

/// The unique resolution flag V₂ ⊂ V₅ through y₄.
pub fn y4_resolution_flag(f: &PrimeField) -> Vec<Subspace> {
    vec![basis_span(f, &[7, 8]), basis_span(f, &[4, 5, 6, 7, 8])]
}

/// The three printed flags U₄ ⊂ U₆ through y₄.
pub fn y4_triple_flags(f: &PrimeField) -> [Vec<Subspace>; 3] {
    [
        vec![basis_span(f, &[5, 6, 7, 8]), basis_span(f, &[1, 4, 5, 6, 7, 8])],
        vec![
            span_of(f, &[&[(4, 1)], &[(5, 1), (6, -1)], &[(7, 1)], &[(8, 1)]]),
            span_of(f, &[&[(2, 1), (3, 1)], &[(4, 1)], &[(5, 1)], &[(6, 1)], &[(7, 1)], &[(8, 1)]]),
        ],
        vec![
            span_of(f, &[&[(4, 1)], &[(5, 1), (6, 1)], &[(7, 1)], &[(8, 1)]]),
            span_of(f, &[&[(2, 1), (3, -1)], &[(4, 1)], &[(5, 1)], &[(6, 1)], &[(7, 1)], &[(8, 1)]]),
        ],
    ]
}

/// The unique flag of the Y₆ row through the Y₆ representative.
pub fn y6_flag(f: &PrimeField) -> Vec<Subspace> {
    vec![
        basis_span(f, &[8]),
        basis_span(f, &[4, 7, 8]),
        basis_span(f, &[4, 5, 7, 8]),
        basis_span(f, &[2, 4, 5, 6, 7, 8]),
        basis_span(f, &[1, 2, 4, 5, 6, 7, 8]),
    ]
}

/// All U₄ ⊂ U₆ with y ∈ Λ²U₄∧V₈ + Λ³U₆, given the resolution flag V₂ ⊂ V₅ of y.
///
/// Every such flag has V₂ ⊂ U₄ ⊂ V₅ ⊂ U₆. For U₆ = V₅ + ⟨c⟩ the contractions
/// of y with U₆^⊥ lie in V₂∧V₅, and U₆ works exactly when their images in
/// V₂ ⊗ V₅/V₂ span a plane; then U₄ is V₂ plus that plane.
pub fn y4_three_flags(
    f: &PrimeField,
    y: &Trivector,
    v2: &Subspace,
    v5: &Subspace,
) -> Result<Vec<(Subspace, Subspace)>, OrbitError> {
    let resolution = [v2.clone(), v5.clone()];
    if y.dim() != 8 || !KempfRow::Y4Resolution.contains(y, &resolution)? {
        return Err(OrbitError::MembershipFailed);
    }
    let b5 = v5.extend_basis(v2.basis())?;
    let b8 = Subspace::full(*f, 8).extend_basis(&b5)?;
    let inv = Matrix::from_columns(*f, 8, &b8).inverse().map_err(|_| ExteriorError::Singular)?;
    let yb = y.transform(f, &inv);
    let combine = |coeffs: &[u32], vecs: &[Vec<u32>]| {
        let mut out = vec![0u32; 8];
        for (c, v) in coeffs.iter().zip(vecs) {
            f.axpy(*c, v, &mut out);
        }
        out
    };
    let mut out = Vec::new();
    let mut err = None;
    for_each_point(f, 3, |c| {
        let perp = Subspace::span(*f, 3, &[c]).annihilator();
        let mut images = Vec::with_capacity(4);
        for eta in perp.basis() {
            for a in 0..2 {
                images.push(
                    (0..3)
                        .map(|i| (0..3).fold(0, |acc, k| f.mul_add(eta[k], yb.get(f, a, 2 + i, 5 + k), acc)))
                        .collect::<Vec<u32>>(),
                );
            }
        }
        let img = Subspace::span(*f, 3, &images);
        if img.dim() != 2 {
            return;
        }
        let lifted: Vec<Vec<u32>> = img.basis().iter().map(|v| combine(v, &b8[2..5])).collect();
        let u4 = v2.sum(&Subspace::span(*f, 8, &lifted));
        let u6 = v5.sum(&Subspace::span(*f, 8, &[combine(c, &b8[5..8])]));
        match KempfRow::Y4Triple.contains(y, &[u4.clone(), u6.clone()]) {
            Ok(true) => out.push((u4, u6)),
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(out)
}
