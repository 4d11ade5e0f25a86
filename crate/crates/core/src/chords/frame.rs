use rand::Rng;

use super::ChordError;
use crate::exterior::{Multivector, Subspace, Trivector};
use crate::field::{Matrix, PrimeField};

/// The adapted data attached to a pair of points P, Q of A:
/// ω = v_P∧v_Q∧v₁ + v_P∧(v₁∧u + v∧w) + v_Q∧(v₁∧u' + v'∧w') + σ
/// with every vector written in the original coordinates of V₉.
#[derive(Clone, Debug)]
pub struct ChordFrame {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub v1: Vec<u32>,
    pub v_p: Vec<u32>,
    pub v_q: Vec<u32>,
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub w: Vec<u32>,
    pub u2: Vec<u32>,
    pub v2: Vec<u32>,
    pub w2: Vec<u32>,
    pub v7: Subspace,
    pub u5: Subspace,
    /// Columns v_P, v_Q, u, u', v₁, v, w, v', w'.
    pub basis: Matrix,
}

const MAX_FRAME_DRAWS: usize = 8;

/// Failures that depend on the choice of lifts v_P, v_Q or of the auxiliary u.
const RETRYABLE: [&str; 4] = [
    "frame vectors are dependent",
    "two-form does not have rank four",
    "U₅ is not five-dimensional",
    "no admissible auxiliary vector",
];

fn degenerate(msg: &str) -> ChordError {
    ChordError::DegenerateChord(msg.to_string())
}

fn two_form(n: usize, entry: impl Fn(usize, usize) -> u32) -> Multivector {
    let coeffs: Vec<u32> = crate::exterior::basis::masks(n, 2)
        .iter()
        .map(|&m| {
            let i = m.trailing_zeros() as usize;
            let j = 15 - (m.leading_zeros() as usize);
            entry(i, j)
        })
        .collect();
    Multivector::from_coeffs(n, 2, coeffs).expect("size")
}

/// Alternating matrix of a 2-form (entry (i,j) is the e_i∧e_j coefficient).
fn as_matrix(f: &PrimeField, a: &Multivector) -> Matrix {
    let n = a.dim();
    let mut m = Matrix::zeros(*f, n, n);
    for (idx, &mask) in crate::exterior::basis::masks(n, 2).iter().enumerate() {
        let i = mask.trailing_zeros() as usize;
        let j = 15 - (mask.leading_zeros() as usize);
        let c = a.coeffs()[idx];
        m.set(i, j, c);
        m.set(j, i, f.neg(c));
    }
    m
}

fn vec_mv(v: &[u32]) -> Multivector {
    Multivector::from_vector(v)
}

/// Writes α = v₁∧u + v∧w for a rank-4 two-form α whose support contains v₁.
fn split_two_form<R: Rng + ?Sized>(
    f: &PrimeField,
    alpha: &Multivector,
    v1: &[u32],
    rng: &mut R,
) -> Result<(Vec<u32>, Vec<u32>, Vec<u32>), ChordError> {
    let n = alpha.dim();
    let am = as_matrix(f, alpha);
    let support = Subspace::span(*f, n, &am.row_vectors());
    if support.dim() != 4 {
        return Err(degenerate("two-form does not have rank four"));
    }
    if !support.contains(v1) {
        return Err(degenerate("contraction line outside the support"));
    }
    let aa = alpha.wedge(f, alpha)?;
    let v1m = vec_mv(v1);
    for _ in 0..8 {
        let coeffs: Vec<u32> = (0..4).map(|_| f.random(rng)).collect();
        let mut u0 = vec![0u32; n];
        for (c, b) in coeffs.iter().zip(support.basis()) {
            f.axpy(*c, b, &mut u0);
        }
        let v1u = v1m.wedge(f, &vec_mv(&u0))?;
        let m = v1u.wedge(f, alpha)?;
        let Some(pos) = m.coeffs().iter().position(|&c| c != 0) else { continue };
        // α∧α + 2t·v₁∧u₀∧α = 0 inside the line Λ⁴L
        let t = f.neg(f.div(aa.coeffs()[pos], f.mul(2, m.coeffs()[pos])).unwrap());
        let check = aa.add(f, &m.scale(f, f.mul(2, t)));
        if !check.is_zero() {
            return Err(degenerate("α∧α and v₁∧u∧α are not proportional"));
        }
        let gamma = alpha.add(f, &v1u.scale(f, t));
        let gm = as_matrix(f, &gamma);
        let gs = Subspace::span(*f, n, &gm.row_vectors());
        if gs.dim() != 2 {
            return Err(degenerate("residual two-form is not decomposable"));
        }
        let v = gs.basis()[0].clone();
        let mut w = gs.basis()[1].clone();
        let vw = vec_mv(&v).wedge(f, &vec_mv(&w))?;
        let pos = vw.coeffs().iter().position(|&c| c != 0).expect("independent");
        let lambda = f.div(gamma.coeffs()[pos], vw.coeffs()[pos]).unwrap();
        w = f.scale(lambda, &w);
        let u = f.scale(f.neg(t), &u0);
        // α = v₁∧u + v∧w exactly
        let re = v1m.wedge(f, &vec_mv(&u))?.add(f, &vec_mv(&v).wedge(f, &vec_mv(&w))?);
        if &re != alpha {
            return Err(degenerate("split does not reassemble"));
        }
        return Ok((u, v, w));
    }
    Err(degenerate("no admissible auxiliary vector"))
}

impl ChordFrame {
    pub fn new<R: Rng + ?Sized>(
        f: &PrimeField,
        omega: &Trivector,
        p: &[u32],
        q: &[u32],
        rng: &mut R,
    ) -> Result<Self, ChordError> {
        let n = omega.dim();
        let pq = Matrix::from_rows(*f, n, &[p, q]);
        if pq.rank() < 2 {
            return Err(degenerate("coincident points"));
        }
        let v1 = omega.double_contract(f, p, q)?;
        if v1.iter().all(|&x| x == 0) {
            return Err(degenerate("zero contraction"));
        }
        let sol = pq
            .solve(&Matrix::identity(*f, 2))
            .map_err(|_| degenerate("cannot separate the hyperplanes"))?;
        let v7 = Subspace::span(*f, n, &sol.kernel);
        let mut last = degenerate("no frame attempt");
        for _ in 0..MAX_FRAME_DRAWS {
            // v_P and v_Q are only defined modulo V₇; a random shift keeps the
            // adapted basis away from accidental dependencies.
            let mut v_p = sol.particular.column(0);
            let mut v_q = sol.particular.column(1);
            for b in v7.basis() {
                f.axpy(f.random(rng), b, &mut v_p);
                f.axpy(f.random(rng), b, &mut v_q);
            }
            match Self::with_lifts(f, omega, p, q, &v1, v_p, v_q, &v7, rng) {
                Err(ChordError::DegenerateChord(m)) if RETRYABLE.contains(&m.as_str()) => last = degenerate(&m),
                other => return other,
            }
        }
        Err(last)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_lifts<R: Rng + ?Sized>(
        f: &PrimeField,
        omega: &Trivector,
        p: &[u32],
        q: &[u32],
        v1: &[u32],
        v_p: Vec<u32>,
        v_q: Vec<u32>,
        v7: &Subspace,
        rng: &mut R,
    ) -> Result<Self, ChordError> {
        let n = omega.dim();
        let v1 = v1.to_vec();

        let mut cols = vec![v_p.clone(), v_q.clone()];
        cols.extend(v7.basis().iter().cloned());
        let b0 = Matrix::from_columns(*f, n, &cols);
        let b0_inv = b0.inverse().map_err(|_| degenerate("adapted basis is singular"))?;
        let w0 = omega.transform(f, &b0_inv);

        let v1_new: Vec<u32> = (0..n).map(|k| w0.get(f, 0, 1, k)).collect();
        if v1_new != b0_inv.mul_vec(&v1) {
            return Err(degenerate("block v₁ differs from the contraction"));
        }
        let restrict = |lead: usize| two_form(n, |j, k| if j >= 2 { w0.get(f, lead, j, k) } else { 0 });
        let alpha = restrict(0);
        let beta = restrict(1);
        let (u, v, w) = split_two_form(f, &alpha, &v1_new, rng)?;
        let (u2, v2, w2) = split_two_form(f, &beta, &v1_new, rng)?;

        // reassemble ω in the adapted coordinates
        let e = |i: usize| {
            let mut x = vec![0u32; n];
            x[i] = 1;
            vec_mv(&x)
        };
        let mut sigma = Trivector::zero(n);
        for ([i, j, k], c) in w0.nonzero_entries() {
            if i >= 2 {
                sigma.add_entry(f, i, j, k, c);
            }
        }
        let a_form = vec_mv(&v1_new).wedge(f, &vec_mv(&u))?.add(f, &vec_mv(&v).wedge(f, &vec_mv(&w))?);
        let b_form = vec_mv(&v1_new).wedge(f, &vec_mv(&u2))?.add(f, &vec_mv(&v2).wedge(f, &vec_mv(&w2))?);
        let total = e(0)
            .wedge(f, &e(1))?
            .wedge(f, &vec_mv(&v1_new))?
            .add(f, &e(0).wedge(f, &a_form)?)
            .add(f, &e(1).wedge(f, &b_form)?)
            .add(f, &sigma.to_multivector());
        if total.coeffs() != w0.coeffs() {
            return Err(degenerate("reassembly mismatch"));
        }

        let back = |x: &[u32]| b0.mul_vec(x);
        let (u, v, w, u2, v2, w2) = (back(&u), back(&v), back(&w), back(&u2), back(&v2), back(&w2));
        let u5 = Subspace::span(*f, n, &[&v1, &v, &w, &v2, &w2]);
        if u5.dim() != 5 {
            return Err(degenerate("U₅ is not five-dimensional"));
        }
        let basis = Matrix::from_columns(*f, n, &[&v_p, &v_q, &u, &u2, &v1, &v, &w, &v2, &w2]);
        if basis.rank() != n {
            return Err(degenerate("frame vectors are dependent"));
        }
        Ok(ChordFrame {
            p: p.to_vec(),
            q: q.to_vec(),
            v1,
            v_p,
            v_q,
            u,
            v,
            w,
            u2,
            v2,
            w2,
            v7: v7.clone(),
            u5,
            basis,
        })
    }

    /// Covectors vanishing on U₅, as combinations of the duals of v_P, v_Q, u, u'.
    pub fn dual_u4(&self) -> Result<Vec<Vec<u32>>, ChordError> {
        let inv = self.basis.inverse().map_err(|_| degenerate("frame basis singular"))?;
        Ok((0..4).map(|i| inv.row(i).to_vec()).collect())
    }
}
