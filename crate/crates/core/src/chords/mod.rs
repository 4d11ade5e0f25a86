//! Chords of A: for P, Q on A the unique third point R with
//! [ω(P,Q,·)] = [ω(P,R,·)] = [ω(Q,R,·)], and the group law it induces.

mod frame;
mod group;

pub use frame::ChordFrame;
pub use group::{GroupContext, PointPool};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{ExteriorError, Multivector, Subspace, Trivector};
use crate::field::{Matrix, PrimeField};
use crate::pfaffloci::{rank_at, tangent_plane, LociError, ProjPoint};
use crate::scanner::{for_each_point, ScanError, CURVE_SCAN_MAX_Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordError {
    #[error("degenerate chord: {0}")]
    DegenerateChord(String),
    #[error("oracle found {0} candidate third points")]
    NotUnique(usize),
    #[error("q = {0} is too large for the oracle scan")]
    FieldTooLarge(u32),
    #[error("point pool is too small: {0}")]
    PoolTooSmall(usize),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Loci(#[from] LociError),
    #[error(transparent)]
    Scan(#[from] ScanError),
}

/// Three points of A sharing the contraction line [v₁].
///
/// Over a small field the third point R of a chord can fall on C_P or C_Q, in
/// which case ω(P,R,·) or ω(Q,R,·) vanishes instead of spanning [v₁]; such
/// triples are kept and marked with `strict = false`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordTriple {
    pub p: ProjPoint,
    pub q: ProjPoint,
    pub r: ProjPoint,
    pub v1: ProjPoint,
    pub strict: bool,
}

impl ChordTriple {
    /// The three pairwise contractions ω(P,Q,·), ω(P,R,·), ω(Q,R,·).
    pub fn contractions(&self, f: &PrimeField, omega: &Trivector) -> [Vec<u32>; 3] {
        let c = |a: &ProjPoint, b: &ProjPoint| omega.double_contract(f, a.coords(), b.coords()).unwrap();
        [c(&self.p, &self.q), c(&self.p, &self.r), c(&self.q, &self.r)]
    }

    /// Exact check: all points on A, P ≠ Q, every pairwise contraction lies in
    /// the line [v₁], at most one of them vanishes, and `strict` records whether
    /// none vanishes.
    pub fn verify(&self, f: &PrimeField, omega: &Trivector) -> bool {
        let pts = [&self.p, &self.q, &self.r];
        if pts.iter().any(|x| rank_at(f, omega, x.coords()) > 4) || self.p == self.q {
            return false;
        }
        let line = Subspace::span(*f, omega.dim(), &[self.v1.coords()]);
        let cs = self.contractions(f, omega);
        let zeros = cs.iter().filter(|v| v.iter().all(|&c| c == 0)).count();
        cs.iter().all(|v| line.contains(v)) && zeros <= 2 && (zeros == 0) == self.strict
    }
}

fn finish(f: &PrimeField, omega: &Trivector, frame: &ChordFrame, r: &[u32]) -> Result<ChordTriple, ChordError> {
    let n = omega.dim();
    let deg = |m: &str| ChordError::DegenerateChord(m.to_string());
    if rank_at(f, omega, r) > 4 {
        return Err(deg("third point is off A"));
    }
    let rp = ProjPoint::new(f, r).ok_or_else(|| deg("zero third point"))?;
    let (pp, qp) = (ProjPoint::new(f, &frame.p).unwrap(), ProjPoint::new(f, &frame.q).unwrap());
    // R = P happens exactly when Q is the tangent point of P
    if rp != pp && rp != qp && Matrix::from_rows(*f, n, &[&frame.p[..], &frame.q[..], r]).rank() < 3 {
        return Err(deg("third point lies on the line PQ"));
    }
    let zero = |x: &[u32]| omega.double_contract(f, x, r).map(|v| v.iter().all(|&c| c == 0));
    let (zp, zq) = (zero(&frame.p)?, zero(&frame.q)?);
    let triple = ChordTriple {
        p: pp,
        q: qp,
        r: rp,
        v1: ProjPoint::new(f, &frame.v1).unwrap(),
        strict: !zp && !zq,
    };
    if !triple.verify(f, omega) {
        return Err(deg("contraction lines differ"));
    }
    Ok(triple)
}

/// Constructive third point: solve v₁∧σ₀∧τ(R) = 0 for R vanishing on U₅.
pub fn third_point<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    rng: &mut R,
) -> Result<ChordTriple, ChordError> {
    let frame = ChordFrame::new(f, omega, p, q, rng)?;
    let r = third_from_frame(f, omega, &frame)?;
    finish(f, omega, &frame, &r)
}

/// Steps after the frame: in the basis (v_P, v_Q, u, u', v₁, v, w, v', w'),
/// σ₀ is read from the u∧u' block and τ(R) is the Λ²U₅ part of ω(R,·,·).
pub fn third_from_frame(f: &PrimeField, omega: &Trivector, frame: &ChordFrame) -> Result<Vec<u32>, ChordError> {
    let n = omega.dim();
    let inv = frame
        .basis
        .inverse()
        .map_err(|_| ChordError::DegenerateChord("frame basis singular".into()))?;
    let wb = omega.transform(f, &inv);
    let sigma0: Vec<u32> = (4..n).map(|k| wb.get(f, 2, 3, k)).collect();
    if sigma0[1..].iter().all(|&x| x == 0) {
        return Err(ChordError::DegenerateChord("σ₀ is proportional to v₁".into()));
    }
    let mut e0 = vec![0u32; 5];
    e0[0] = 1;
    let v1s0 = Multivector::from_vector(&e0).wedge(f, &Multivector::from_vector(&sigma0))?;
    let mut cols = Vec::with_capacity(4);
    for i in 0..4 {
        let coeffs: Vec<u32> = crate::exterior::basis::masks(5, 2)
            .iter()
            .map(|&m| {
                let a = m.trailing_zeros() as usize;
                let b = 15 - m.leading_zeros() as usize;
                wb.get(f, i, 4 + a, 4 + b)
            })
            .collect();
        let tau = Multivector::from_coeffs(5, 2, coeffs)?;
        cols.push(v1s0.wedge(f, &tau)?.into_coeffs());
    }
    let m = Matrix::from_columns(*f, 5, &cols);
    let ker = m.kernel_basis();
    if ker.len() != 1 {
        return Err(ChordError::DegenerateChord(format!("kernel of dimension {}", ker.len())));
    }
    let mut rb = vec![0u32; n];
    rb[..4].copy_from_slice(&ker[0]);
    Ok(inv.vec_mul(&rb))
}

/// Scan oracle: the third point is the A-point among covectors vanishing on U₅
/// other than P and Q, or P or Q itself when the chord is tangent there. In
/// degenerate chords U₅ depends on the lifts, so an empty scan is retried.
pub fn third_point_oracle<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    rng: &mut R,
) -> Result<ChordTriple, ChordError> {
    if f.modulus() > CURVE_SCAN_MAX_Q {
        return Err(ChordError::FieldTooLarge(f.modulus()));
    }
    let mut last = ChordError::NotUnique(0);
    for _ in 0..ORACLE_FRAME_DRAWS {
        let frame = ChordFrame::new(f, omega, p, q, rng)?;
        match oracle_scan(f, omega, &frame) {
            Err(ChordError::NotUnique(0)) => last = ChordError::NotUnique(0),
            r => return r,
        }
    }
    Err(last)
}

const ORACLE_FRAME_DRAWS: usize = 4;

fn oracle_scan(f: &PrimeField, omega: &Trivector, frame: &ChordFrame) -> Result<ChordTriple, ChordError> {
    let (p, q) = (&frame.p[..], &frame.q[..]);
    let duals = frame.dual_u4()?;
    let n = omega.dim();
    let pp = ProjPoint::new(f, p).unwrap();
    let qq = ProjPoint::new(f, q).unwrap();
    let (mut found, mut both_zero) = (Vec::new(), Vec::new());
    for_each_point(f, 4, |x| {
        let mut r = vec![0u32; n];
        for (c, d) in x.iter().zip(&duals) {
            f.axpy(*c, d, &mut r);
        }
        if rank_at(f, omega, &r) <= 4 {
            let rp = ProjPoint::new(f, &r).unwrap();
            // points of C_P ∩ C_Q also contain U₅ but have zero contraction with both
            let nonzero = |x: &[u32]| omega.double_contract(f, x, &r).unwrap().iter().any(|&c| c != 0);
            if rp != pp && rp != qq {
                if nonzero(p) || nonzero(q) {
                    found.push(rp);
                } else {
                    both_zero.push(rp);
                }
            }
        }
    });
    if found.is_empty() {
        // R = P exactly when H(v₁) meets A in 2C_P + C_Q, so H(v₁) contains the
        // tangent plane at P
        let tangent = |x: &[u32]| {
            tangent_plane(f, omega, x).is_ok_and(|t| t.basis().iter().all(|b| f.dot(b, &frame.v1) == 0))
        };
        found = match (tangent(p), tangent(q)) {
            (true, false) => vec![pp],
            (false, true) => vec![qq],
            // both are singular on H(v₁) ∩ A when R lies on C_P ∩ C_Q, and so is R
            (true, true) => both_zero.into_iter().filter(|y| tangent(y.coords())).collect(),
            (false, false) => vec![],
        };
    }
    if found.len() != 1 {
        return Err(ChordError::NotUnique(found.len()));
    }
    finish(f, omega, frame, found[0].coords())
}

/// Candidate third points of a chord with ω(P,Q,·) = 0, i.e. Q on C_P. The
/// hyperplane cutting C_P ∪ C_Q ∪ C_R has its covector ℓ killing
/// ker M(p) + ker M(q), so R lies in {r : M(p)r, M(q)r ∈ Ann}, a small space
/// through P and Q that is scanned for the other points of A. Usually exactly
/// one survives. None means R is P or Q; several happen when the kernels meet
/// in a plane and the admissible hyperplanes form a pencil.
pub fn zero_contraction_candidates(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
) -> Result<Vec<ChordTriple>, ChordError> {
    let n = omega.dim();
    let deg = |m: &str| ChordError::DegenerateChord(m.to_string());
    if omega.double_contract(f, p, q)?.iter().any(|&c| c != 0) {
        return Err(deg("contraction is not zero"));
    }
    let pp = ProjPoint::new(f, p).ok_or_else(|| deg("zero point"))?;
    let qp = ProjPoint::new(f, q).ok_or_else(|| deg("zero point"))?;
    if pp == qp {
        return Err(deg("coincident points"));
    }
    let mp = omega.skew_matrix(f, p)?.to_matrix();
    let mq = omega.skew_matrix(f, q)?.to_matrix();
    let kp = Subspace::span(*f, n, &mp.kernel_basis());
    let kq = Subspace::span(*f, n, &mq.kernel_basis());
    let ann = kp.sum(&kq).annihilator();
    if ann.dim() == 0 {
        return Err(deg("kernels of P and Q span everything"));
    }
    // unknowns (r, a, b) with M(p)r = Σ aᵢℓᵢ and M(q)r = Σ bᵢℓᵢ
    let d = ann.dim();
    let mut sys = Matrix::zeros(*f, 2 * n, n + 2 * d);
    for i in 0..n {
        for j in 0..n {
            sys.set(i, j, mp.get(i, j));
            sys.set(n + i, j, mq.get(i, j));
        }
        for (t, l) in ann.basis().iter().enumerate() {
            sys.set(i, n + t, f.neg(l[i]));
            sys.set(n + i, n + d + t, f.neg(l[i]));
        }
    }
    let w: Vec<Vec<u32>> = sys.kernel_basis().into_iter().map(|v| v[..n].to_vec()).collect();
    let w = Subspace::span(*f, n, &w);
    let mut found = Vec::new();
    for_each_point(f, w.dim(), |x| {
        let mut z = vec![0u32; n];
        for (c, b) in x.iter().zip(w.basis()) {
            f.axpy(*c, b, &mut z);
        }
        if rank_at(f, omega, &z) > 4 {
            return;
        }
        let zp = ProjPoint::new(f, &z).unwrap();
        let a = omega.double_contract(f, p, &z).unwrap();
        let b = omega.double_contract(f, q, &z).unwrap();
        let (za, zb) = (a.iter().all(|&c| c == 0), b.iter().all(|&c| c == 0));
        if zp == pp || zp == qp || (za && zb) {
            return;
        }
        if za || zb || f.same_line(&a, &b) {
            let line = if za { b } else { a };
            found.push(ChordTriple {
                p: pp.clone(),
                q: qp.clone(),
                r: zp,
                v1: ProjPoint::new(f, &line).unwrap(),
                strict: false,
            });
        }
    });
    Ok(found)
}

/// The unique candidate of [`zero_contraction_candidates`], if there is one.
pub fn third_point_zero_contraction(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
) -> Result<ChordTriple, ChordError> {
    let mut found = zero_contraction_candidates(f, omega, p, q)?;
    if found.len() != 1 {
        return Err(ChordError::NotUnique(found.len()));
    }
    Ok(found.pop().unwrap())
}
