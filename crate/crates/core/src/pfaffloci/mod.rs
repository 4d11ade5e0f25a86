//! The stratification of P(V₉^∨) by the rank of p ↦ ω(p,·,·): the surface A
//! where the rank is at most four, the Pfaffian cubic where it is at most six,
//! kernel 5-spaces, supports and tangent spaces.

mod form;

pub use form::{HomogeneousForm, MonomialTable};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{ExteriorError, Subspace, Trivector};
use crate::field::{Matrix, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LociError {
    #[error("principal 8x8 sub-Pfaffian {0} is not divisible by its coordinate")]
    NotDivisible(usize),
    #[error("rank {0} exceeds 4")]
    RankTooHigh(usize),
    #[error("tangent space has dimension {0}, expected 3")]
    SingularSurfacePoint(usize),
    #[error("interpolation kernel has dimension {0}, expected 1")]
    KernelNotOneDim(usize),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Point of a projective space, normalized so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint(Vec<u32>);

impl ProjPoint {
    /// Normalizes a nonzero vector; `None` for the zero vector.
    pub fn new(f: &PrimeField, v: &[u32]) -> Option<Self> {
        f.normalize(v).map(ProjPoint)
    }

    /// Wraps coordinates that are already normalized.
    pub fn from_normalized(v: Vec<u32>) -> Self {
        debug_assert!(v.iter().find(|&&x| x != 0) == Some(&1));
        ProjPoint(v)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.0
    }
}

impl AsRef<[u32]> for ProjPoint {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

/// The alternating matrix M(x) with linear-form entries M[i][j] = ω(x, e_i, e_j).
pub fn symbolic_matrix(f: &PrimeField, omega: &Trivector) -> Vec<Vec<HomogeneousForm>> {
    let n = omega.dim();
    let mut m = vec![vec![HomogeneousForm::zero(*f, n, 1); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let c: Vec<u32> = (0..n).map(|a| omega.get(f, a, i, j)).collect();
            m[i][j] = HomogeneousForm::linear(*f, &c);
        }
    }
    m
}

/// Symbolic Pfaffians of principal submatrices, memoized by index mask.
pub struct SymbolicPfaffians<'a> {
    m: &'a [Vec<HomogeneousForm>],
    memo: HashMap<u16, HomogeneousForm>,
    field: PrimeField,
}

impl<'a> SymbolicPfaffians<'a> {
    pub fn new(f: &PrimeField, m: &'a [Vec<HomogeneousForm>]) -> Self {
        SymbolicPfaffians {
            m,
            memo: HashMap::new(),
            field: *f,
        }
    }

    pub fn get(&mut self, mask: u16) -> HomogeneousForm {
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let n = self.m.len();
        let out = if mask == 0 {
            HomogeneousForm::constant(self.field, n, 1)
        } else {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let mut acc = HomogeneousForm::zero(self.field, n, mask.count_ones() as usize / 2);
            let mut t = 0;
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                let sub = self.get(rest & !(1 << j));
                let term = self.m[i][j].mul(&sub);
                acc = if t % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                t += 1;
            }
            acc
        };
        self.memo.insert(mask, out.clone());
        out
    }
}

/// The Pfaffian cubic of ω together with the divisibility certificate.
#[derive(Clone, Debug)]
pub struct CobleCubic {
    /// C normalized so its first nonzero coefficient is 1.
    pub form: HomogeneousForm,
    /// C as the exact quotient Pf_0 / x_0.
    pub raw: HomogeneousForm,
    /// `odd[i]` when Pf_i = −C_raw · x_i.
    pub odd: Vec<bool>,
    /// The principal 8×8 sub-Pfaffians Pf_i (index i removed), degree-4 forms.
    pub sub_pfaffians: Vec<HomogeneousForm>,
}

/// Extracts the cubic C with Pf_i(p) = ±C(p)·p_i and checks all nine identities
/// coefficient-wise.
pub fn coble_cubic(f: &PrimeField, omega: &Trivector) -> Result<CobleCubic, LociError> {
    let n = omega.dim();
    let m = symbolic_matrix(f, omega);
    let mut pf = SymbolicPfaffians::new(f, &m);
    let all = ((1u32 << n) - 1) as u16;
    let subs: Vec<HomogeneousForm> = (0..n).map(|i| pf.get(all & !(1 << i))).collect();
    let raw = subs[0].divide_by_variable(0).ok_or(LociError::NotDivisible(0))?;
    if raw.is_zero() {
        return Err(LociError::NotDivisible(0));
    }
    let mut odd = vec![false; n];
    for (i, s) in subs.iter().enumerate() {
        let xi = HomogeneousForm::variable(*f, n, i);
        let prod = raw.mul(&xi);
        if *s == prod {
            odd[i] = false;
        } else if *s == prod.scale(f.neg(1)) {
            odd[i] = true;
        } else {
            return Err(LociError::NotDivisible(i));
        }
    }
    Ok(CobleCubic {
        form: raw.normalized(),
        raw,
        odd,
        sub_pfaffians: subs,
    })
}

pub fn rank_at(f: &PrimeField, omega: &Trivector, p: &[u32]) -> usize {
    omega.skew_matrix(f, p).expect("dimension").rank()
}

pub fn on_abelian(f: &PrimeField, omega: &Trivector, p: &[u32]) -> bool {
    rank_at(f, omega, p) <= 4
}

/// ker M(p) on covectors; 5-dimensional on A.
pub fn kernel5(f: &PrimeField, omega: &Trivector, p: &[u32]) -> Result<Subspace, LociError> {
    let m = omega.skew_matrix(f, p)?;
    let r = m.rank();
    if r > 4 {
        return Err(LociError::RankTooHigh(r));
    }
    Ok(Subspace::span(*f, omega.dim(), &m.kernel()))
}

/// The image of M(p), spanned by all ω(p, q, ·); 4-dimensional on A.
pub fn p4_of(f: &PrimeField, omega: &Trivector, p: &[u32]) -> Result<Subspace, LociError> {
    let m = omega.skew_matrix(f, p)?;
    let mm = m.to_matrix();
    let r = mm.rank();
    if r > 4 {
        return Err(LociError::RankTooHigh(r));
    }
    Ok(Subspace::span(*f, omega.dim(), &mm.row_vectors()))
}

/// The 84 principal 6×6 sub-Pfaffians of M(x) (cubics) with their gradients.
pub struct SurfaceEquations {
    pub masks: Vec<u16>,
    pub cubics: Vec<HomogeneousForm>,
    pub gradients: Vec<Vec<HomogeneousForm>>,
}

impl SurfaceEquations {
    pub fn new(f: &PrimeField, omega: &Trivector) -> Self {
        let n = omega.dim();
        let m = symbolic_matrix(f, omega);
        let mut pf = SymbolicPfaffians::new(f, &m);
        let masks: Vec<u16> = crate::exterior::basis::masks(n, 6).to_vec();
        let cubics: Vec<HomogeneousForm> = masks.iter().map(|&s| pf.get(s)).collect();
        let gradients = cubics.iter().map(|c| c.gradient()).collect();
        SurfaceEquations { masks, cubics, gradients }
    }

    /// Jacobian of the 84 cubics at p.
    pub fn jacobian(&self, p: &[u32]) -> Matrix {
        let f = self.cubics[0].field();
        let n = p.len();
        let rows: Vec<Vec<u32>> = self
            .gradients
            .iter()
            .map(|g| g.iter().map(|d| d.eval(p)).collect())
            .collect();
        Matrix::from_rows(f, n, &rows)
    }
}

/// Affine tangent cone of A at p: kernel of the Jacobian of the sub-Pfaffian system.
pub fn tangent_a(f: &PrimeField, omega: &Trivector, eqs: &SurfaceEquations, p: &[u32]) -> Result<Subspace, LociError> {
    let r = rank_at(f, omega, p);
    if r > 4 {
        return Err(LociError::RankTooHigh(r));
    }
    let ker = eqs.jacobian(p).kernel_basis();
    if ker.len() != 3 {
        return Err(LociError::SingularSurfacePoint(ker.len()));
    }
    Ok(Subspace::span(*f, p.len(), &ker))
}

/// The same tangent cone from the rank-four structure alone: t is tangent when
/// ω(t,·,·) vanishes on ker M(p), which is ten linear conditions.
pub fn tangent_plane(f: &PrimeField, omega: &Trivector, p: &[u32]) -> Result<Subspace, LociError> {
    let ker = omega.skew_matrix(f, p)?.kernel();
    if ker.len() != 5 {
        return Err(LociError::RankTooHigh(p.len() - ker.len()));
    }
    let mut rows = Vec::with_capacity(10);
    for a in 0..5 {
        for b in a + 1..5 {
            rows.push(omega.double_contract(f, &ker[a], &ker[b])?);
        }
    }
    let sol = Matrix::from_rows(*f, p.len(), &rows).kernel_basis();
    if sol.len() != 3 {
        return Err(LociError::SingularSurfacePoint(sol.len()));
    }
    Ok(Subspace::span(*f, p.len(), &sol))
}

/// Rows imposing F(p) = 0 and ∂_a F(p) = 0 on a degree-d form F in `p.len()` variables.
pub fn singular_conditions(f: &PrimeField, degree: usize, p: &[u32]) -> Vec<Vec<u32>> {
    let n = p.len();
    let table = MonomialTable::get(n, degree);
    let mut rows = vec![table.values(f, p)];
    let lower = MonomialTable::get(n, degree - 1).values(f, p);
    let lower_table = MonomialTable::get(n, degree - 1);
    for a in 0..n {
        let mut row = vec![0u32; table.len()];
        let mut e = vec![0u8; n];
        for (idx, ex) in table.exponents.iter().enumerate() {
            if ex[a] == 0 {
                continue;
            }
            e.copy_from_slice(ex);
            e[a] -= 1;
            let j = lower_table.index_of(&e).unwrap();
            row[idx] = f.mul(ex[a] as u32 % f.modulus(), lower[j]);
        }
        rows.push(row);
    }
    rows
}

/// The unique cubic singular at all given points, normalized.
pub fn cubic_by_interpolation(f: &PrimeField, points: &[ProjPoint]) -> Result<HomogeneousForm, LociError> {
    let n = points.first().map_or(9, |p| p.coords().len());
    let mut rows = Vec::new();
    for p in points {
        rows.extend(singular_conditions(f, 3, p.coords()));
    }
    let ncols = MonomialTable::get(n, 3).len();
    let ker = if rows.is_empty() {
        vec![vec![0; ncols]; ncols]
    } else {
        Matrix::from_rows(*f, ncols, &rows).kernel_basis()
    };
    if ker.len() != 1 {
        return Err(LociError::KernelNotOneDim(ker.len()));
    }
    Ok(HomogeneousForm::from_coeffs(*f, n, 3, ker[0].clone()).unwrap().normalized())
}
