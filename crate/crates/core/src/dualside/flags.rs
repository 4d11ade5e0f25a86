use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sigma_image, DualError};
use crate::chords::ChordFrame;
use crate::exterior::{in_sum_of_spans, wedge_space, ExteriorError, Flag, Subspace, Trivector};
use crate::field::{Matrix, PrimeField};
use crate::pfaffloci::ProjPoint;
use crate::scanner::for_each_point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlagModel {
    Z,
    T,
    X,
}

impl FlagModel {
    /// Dimensions of the flag members in V₉.
    pub fn dims(self) -> &'static [usize] {
        match self {
            FlagModel::Z => &[1, 3, 6],
            FlagModel::T => &[1, 5, 7],
            FlagModel::X => &[1, 3, 5, 6, 7],
        }
    }
}

/// A flag in V₉ together with the certificate that ω lies in the model's sum
/// of wedge spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlag {
    pub model: FlagModel,
    pub flag: Flag,
}

impl ModelFlag {
    /// Builds and certifies; fails unless the membership holds exactly.
    pub fn certify(f: &PrimeField, omega: &Trivector, model: FlagModel, members: Vec<Subspace>) -> Result<Self, DualError> {
        let flag = Flag::new(members).map_err(|_| DualError::NotNested)?;
        if flag.dims() != model.dims() {
            return Err(DualError::NotNested);
        }
        let mf = ModelFlag { model, flag };
        if !mf.verify_membership(f, omega)? {
            return Err(DualError::MembershipFailed(model));
        }
        Ok(mf)
    }

    pub fn member(&self, d: usize) -> &Subspace {
        self.flag.of_dim(d).expect("flag dimension fixed by the model")
    }

    pub fn verify_membership(&self, f: &PrimeField, omega: &Trivector) -> Result<bool, DualError> {
        let spaces = model_spaces(f, omega.dim(), self.model, self.flag.members())?;
        Ok(in_sum_of_spans(omega, &spaces))
    }
}

/// The wedge spaces whose sum ω must lie in, for members listed in increasing
/// dimension. A zero first member (affine models) drops its term.
pub fn model_spaces(f: &PrimeField, n: usize, model: FlagModel, m: &[Subspace]) -> Result<Vec<Subspace>, ExteriorError> {
    let full = Subspace::full(*f, n);
    let mut out = Vec::new();
    if m[0].dim() > 0 {
        out.push(wedge_space(&m[0], &full, &full)?);
    }
    match model {
        FlagModel::T => {
            out.push(wedge_space(&m[1], &m[1], &full)?);
            out.push(wedge_space(&m[2], &m[2], &m[2])?);
        }
        FlagModel::Z => {
            out.push(wedge_space(&m[1], &m[2], &full)?);
            out.push(wedge_space(&m[2], &m[2], &m[2])?);
        }
        FlagModel::X => {
            out.push(wedge_space(&m[1], &m[2], &full)?);
            out.push(wedge_space(&m[1], &m[3], &m[4])?);
            out.push(wedge_space(&m[3], &m[3], &m[3])?);
        }
    }
    Ok(out)
}

/// (V₁, V₅, V₇) = (contraction line, U₅, P∩Q) from the chord frame of (P, Q).
pub fn t_flag<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    rng: &mut R,
) -> Result<ModelFlag, DualError> {
    sigma_image(f, omega, p, q)?;
    let frame = ChordFrame::new(f, omega, p, q, rng)?;
    t_from_frame(f, omega, &frame)
}

fn t_from_frame(f: &PrimeField, omega: &Trivector, frame: &ChordFrame) -> Result<ModelFlag, DualError> {
    let v1 = Subspace::span(*f, omega.dim(), &[&frame.v1]);
    ModelFlag::certify(f, omega, FlagModel::T, vec![v1, frame.u5.clone(), frame.v7.clone()])
}

/// The Z-flag of a chord triple and the T-flags of its pairs (P,Q), (P,R), (Q,R).
fn z_with_t<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    r: &[u32],
    rng: &mut R,
) -> Result<(ModelFlag, [ModelFlag; 3]), DualError> {
    let n = omega.dim();
    let ts = [
        t_flag(f, omega, p, q, rng)?,
        t_flag(f, omega, p, r, rng)?,
        t_flag(f, omega, q, r, rng)?,
    ];
    let v3 = ts[0].member(5).intersect(ts[1].member(5)).intersect(ts[2].member(5));
    if v3.dim() != 3 {
        return Err(DualError::BadIntersection(v3.dim()));
    }
    let v6 = Subspace::span(*f, n, &[p, q, r]).annihilator();
    let v1 = ts[0].member(1).clone();
    let z = ModelFlag::certify(f, omega, FlagModel::Z, vec![v1, v3, v6])?;
    Ok((z, ts))
}

/// (V₁, V₃, V₆): V₆ = P∩Q∩R and V₃ the common part of the three U₅ spaces.
pub fn z_flag<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    r: &[u32],
    rng: &mut R,
) -> Result<ModelFlag, DualError> {
    Ok(z_with_t(f, omega, p, q, r, rng)?.0)
}

/// The Z-flag of (P,Q,R) refined by (V₅, V₇) of the pair (P,Q).
pub fn x_flag<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    p: &[u32],
    q: &[u32],
    r: &[u32],
    rng: &mut R,
) -> Result<ModelFlag, DualError> {
    let (z, ts) = z_with_t(f, omega, p, q, r, rng)?;
    let m = z.flag.members();
    let members = vec![
        m[0].clone(),
        m[1].clone(),
        ts[0].member(5).clone(),
        m[2].clone(),
        ts[0].member(7).clone(),
    ];
    ModelFlag::certify(f, omega, FlagModel::X, members)
}

type Slices = Vec<[[u32; 3]; 3]>;

/// Basis adapted to V₁ ⊂ V₃ ⊂ V₆ ⊂ V, its inverse, and the two 3×3 slices
/// M_a[i][j] = ω(b_a, b_i, b_j) for b_a, b_i, b_j completing V₁, V₃, V₆.
fn adapted_tensor(
    f: &PrimeField,
    omega: &Trivector,
    v1: &Subspace,
    v3: &Subspace,
    v6: &Subspace,
) -> Result<(Vec<Vec<u32>>, Matrix, Slices), DualError> {
    let n = omega.dim();
    let d1 = v1.dim();
    if v3.dim() != d1 + 2 || v6.dim() != d1 + 5 || n != d1 + 8 {
        return Err(DualError::NotNested);
    }
    let b3 = v3.extend_basis(v1.basis())?;
    let b6 = v6.extend_basis(&b3)?;
    let b9 = Subspace::full(*f, n).extend_basis(&b6)?;
    let basis = Matrix::from_columns(*f, n, &b9);
    let inv = basis.inverse().map_err(|_| ExteriorError::Singular)?;
    let wb = omega.transform(f, &inv);
    let mats = (0..2)
        .map(|a| {
            let mut m = [[0u32; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = wb.get(f, d1 + a, d1 + 2 + i, d1 + 5 + j);
                }
            }
            m
        })
        .collect();
    Ok((b9, inv, mats))
}

/// The length-three subscheme of A attached to a Z-flag: hyperplanes
/// η ⊃ V₆ where the map (V₃/V₁)^∨ → V₆/V₃ induced by ι_η ω drops rank.
/// For the Z-flag of a chord triple these are P, Q and R.
pub fn hilb3_points(f: &PrimeField, omega: &Trivector, zf: &ModelFlag) -> Result<Vec<ProjPoint>, DualError> {
    let m = zf.flag.members();
    let d1 = m[0].dim();
    let n = omega.dim();
    let (_, inv, mats) = adapted_tensor(f, omega, &m[0], &m[1], &m[2])?;
    let mut out = Vec::new();
    for_each_point(f, 3, |eta| {
        let cols: Vec<Vec<u32>> = mats
            .iter()
            .map(|m| (0..3).map(|i| (0..3).fold(0, |acc, j| f.mul_add(m[i][j], eta[j], acc))).collect())
            .collect();
        if Subspace::span(*f, 3, &cols).dim() <= 1 {
            let mut cov = vec![0u32; n];
            for (j, &e) in eta.iter().enumerate() {
                f.axpy(e, inv.row(d1 + 5 + j), &mut cov);
            }
            out.extend(ProjPoint::new(f, &cov));
        }
    });
    out.sort();
    Ok(out)
}

/// A refinement (V₅, V₇) of a Z-type flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPair {
    pub v5: Subspace,
    pub v7: Subspace,
}

/// All (V₅, V₇) with V₃ ⊂ V₅ ⊂ V₆ ⊂ V₇ completing (V₁, V₃, V₆) to an X-type flag.
pub fn triple_cover_enumerate(f: &PrimeField, omega: &Trivector, zf: &ModelFlag) -> Result<Vec<CoverPair>, DualError> {
    let m = zf.flag.members();
    cover_pairs(f, omega, &m[0], &m[1], &m[2])
}

/// Works for any ambient dimension with dim V₃/V₁ = 2, dim V₆/V₃ = 3 and
/// codim V₆ = 3, so V₁ = 0 gives the affine model in dimension 8.
///
/// In a basis adapted to the flag, the V₃∧V₆∧V₉ part of ω is a tensor M_a
/// (a over V₃/V₁) of 3×3 matrices V₆/V₃ × V₉/V₆. With V₅/V₃ = ker λ and
/// V₇/V₆ = ⟨m⟩ the pair works exactly when every M_a lies in
/// ker λ⊗(V₉/V₆) + (V₆/V₃)⊗m, i.e. λᵀM_a ∈ ⟨m⟩ for both a.
/// Candidates found this way are certified exactly.
pub fn cover_pairs(
    f: &PrimeField,
    omega: &Trivector,
    v1: &Subspace,
    v3: &Subspace,
    v6: &Subspace,
) -> Result<Vec<CoverPair>, DualError> {
    let n = omega.dim();
    let d1 = v1.dim();
    let (b9, _, mats) = adapted_tensor(f, omega, v1, v3, v6)?;
    let combine = |coeffs: &[u32], vecs: &[Vec<u32>]| {
        let mut out = vec![0u32; n];
        for (c, v) in coeffs.iter().zip(vecs) {
            f.axpy(*c, v, &mut out);
        }
        out
    };
    let mid = &b9[d1 + 2..d1 + 5];
    let top = &b9[d1 + 5..d1 + 8];
    let mut cands: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for_each_point(f, 3, |lam| {
        let rows: Vec<Vec<u32>> = mats
            .iter()
            .map(|m| (0..3).map(|j| (0..3).fold(0, |acc, i| f.mul_add(lam[i], m[i][j], acc))).collect())
            .collect();
        let s = Subspace::span(*f, 3, &rows);
        match s.dim() {
            0 => for_each_point(f, 3, |mm| cands.push((lam.to_vec(), mm.to_vec()))),
            1 => cands.push((lam.to_vec(), s.basis()[0].clone())),
            _ => {}
        }
    });
    let mut out = Vec::new();
    for (lam, mm) in cands {
        let plane: Vec<Vec<u32>> = Subspace::span(*f, 3, &[lam]).annihilator().basis().iter().map(|l| combine(l, mid)).collect();
        let v5 = v3.sum(&Subspace::span(*f, n, &plane));
        let v7 = v6.sum(&Subspace::span(*f, n, &[combine(&mm, top)]));
        let members = [v1.clone(), v3.clone(), v5.clone(), v6.clone(), v7.clone()];
        let spaces = model_spaces(f, n, FlagModel::X, &members)?;
        if in_sum_of_spans(omega, &spaces) {
            out.push(CoverPair { v5, v7 });
        }
    }
    Ok(out)
}
