use rand::Rng;

use super::basis::{binomial, triple_index};
use super::{ExteriorError, Multivector, SkewMatrix};
use crate::field::{Matrix, PrimeField};

/// Alternating 3-form on F_q^n, stored on increasing triples in lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trivector {
    n: usize,
    coeffs: Vec<u32>,
}

/// 3×3 determinant of the rows `i, j, k` of the column vectors `u, v, w`.
fn minor3(f: &PrimeField, u: &[u32], v: &[u32], w: &[u32], i: usize, j: usize, k: usize) -> u32 {
    let q = f.modulus() as u64;
    let t = |a: u32, b: u32, c: u32| a as u64 * b as u64 % q * c as u64 % q;
    let pos = t(u[i], v[j], w[k]) + t(u[j], v[k], w[i]) + t(u[k], v[i], w[j]);
    let neg = t(u[k], v[j], w[i]) + t(u[i], v[k], w[j]) + t(u[j], v[i], w[k]);
    ((pos + 3 * q - neg) % q) as u32
}

impl Trivector {
    pub fn zero(n: usize) -> Self {
        Trivector {
            n,
            coeffs: vec![0; binomial(n, 3)],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<u32>) -> Result<Self, ExteriorError> {
        if coeffs.len() != binomial(n, 3) {
            return Err(ExteriorError::DimensionMismatch(format!(
                "{} coefficients for a trivector in {n} variables",
                coeffs.len()
            )));
        }
        Ok(Trivector { n, coeffs })
    }

    /// Sum of `val * e_i∧e_j∧e_k` over the given entries (indices in any order).
    pub fn from_entries(f: &PrimeField, n: usize, entries: &[([usize; 3], u32)]) -> Result<Self, ExteriorError> {
        let mut t = Self::zero(n);
        for &(idx, v) in entries {
            if idx.iter().any(|&i| i >= n) {
                return Err(ExteriorError::DimensionMismatch(format!("index {idx:?} out of range")));
            }
            t.add_entry(f, idx[0], idx[1], idx[2], v);
        }
        Ok(t)
    }

    pub fn random<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> Self {
        Trivector {
            n,
            coeffs: f.random_vector(binomial(n, 3), rng),
        }
    }

    /// u∧v∧w for vectors of F^n.
    pub fn wedge3(f: &PrimeField, u: &[u32], v: &[u32], w: &[u32]) -> Self {
        let n = u.len();
        let mut out = Self::zero(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    out.coeffs[idx] = minor3(f, u, v, w, i, j, k);
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = ([usize; 3], u32)> + '_ {
        let mut out = Vec::new();
        let mut idx = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in j + 1..self.n {
                    if self.coeffs[idx] != 0 {
                        out.push(([i, j, k], self.coeffs[idx]));
                    }
                    idx += 1;
                }
            }
        }
        out.into_iter()
    }

    /// Antisymmetric coefficient ω(e_i, e_j, e_k) for any index order.
    pub fn get(&self, f: &PrimeField, i: usize, j: usize, k: usize) -> u32 {
        if i == j || j == k || i == k {
            return 0;
        }
        let (s, odd) = sort3(i, j, k);
        let v = self.coeffs[triple_index(self.n, s[0], s[1], s[2])];
        if odd {
            f.neg(v)
        } else {
            v
        }
    }

    /// Adds `v * e_i∧e_j∧e_k`.
    pub fn add_entry(&mut self, f: &PrimeField, i: usize, j: usize, k: usize, v: u32) {
        if i == j || j == k || i == k {
            return;
        }
        let (s, odd) = sort3(i, j, k);
        let v = if odd { f.neg(v) } else { v };
        let slot = &mut self.coeffs[triple_index(self.n, s[0], s[1], s[2])];
        *slot = f.add(*slot, v);
    }

    pub fn add(&self, f: &PrimeField, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Trivector {
            n: self.n,
            coeffs: f.add_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn sub(&self, f: &PrimeField, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Trivector {
            n: self.n,
            coeffs: f.sub_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> Self {
        Trivector {
            n: self.n,
            coeffs: f.scale(c, &self.coeffs),
        }
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::from_coeffs(self.n, 3, self.coeffs.clone()).expect("sizes agree")
    }

    pub fn from_multivector(m: &Multivector) -> Result<Self, ExteriorError> {
        if m.degree() != 3 {
            return Err(ExteriorError::DimensionMismatch(format!("degree {} is not 3", m.degree())));
        }
        Self::from_coeffs(m.dim(), m.coeffs().to_vec())
    }

    fn check_len(&self, v: &[u32]) -> Result<(), ExteriorError> {
        if v.len() != self.n {
            return Err(ExteriorError::DimensionMismatch(format!(
                "covector of length {} against a trivector in {} variables",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// M(p)[i][j] = ω(p, e_i, e_j): the 2-form ι_p ω as an alternating matrix.
    pub fn skew_matrix(&self, f: &PrimeField, p: &[u32]) -> Result<SkewMatrix, ExteriorError> {
        self.check_len(p)?;
        let n = self.n;
        let q = f.modulus() as u64;
        let mut acc = vec![0u64; n * n];
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let w = self.coeffs[idx] as u64;
                    idx += 1;
                    if w == 0 {
                        continue;
                    }
                    // ι_p(e_a∧e_b∧e_c) = p_a e_bc − p_b e_ac + p_c e_ab
                    acc[b * n + c] += w * p[a] as u64 % q;
                    acc[a * n + c] += (q - w * p[b] as u64 % q) % q;
                    acc[a * n + b] += w * p[c] as u64 % q;
                }
            }
        }
        let mut data = vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = (acc[i * n + j] % q) as u32;
                data[i * n + j] = v;
                data[j * n + i] = f.neg(v);
            }
        }
        Ok(SkewMatrix::from_data_unchecked(*f, n, data))
    }

    /// ι_q ι_p ω, the vector ω(p, q, ·).
    pub fn double_contract(&self, f: &PrimeField, p: &[u32], q: &[u32]) -> Result<Vec<u32>, ExteriorError> {
        self.check_len(q)?;
        let m = self.skew_matrix(f, p)?;
        // v_k = Σ_i q_i M[i][k]
        Ok(m.to_matrix().vec_mul(q))
    }

    /// Full pairing ω(a, b, c) against three covectors.
    pub fn eval(&self, f: &PrimeField, a: &[u32], b: &[u32], c: &[u32]) -> Result<u32, ExteriorError> {
        let v = self.double_contract(f, a, b)?;
        self.check_len(c)?;
        Ok(f.dot(&v, c))
    }

    /// Pushforward along the linear map `g` (an n'×n matrix acting on vectors).
    pub fn transform(&self, f: &PrimeField, g: &Matrix) -> Trivector {
        assert_eq!(g.cols(), self.n);
        let n = self.n;
        let m = g.rows();
        let q = f.modulus() as u64;
        // dense antisymmetric tensor, then transform one slot at a time
        let mut t = vec![0u64; n * n * n];
        for ([i, j, k], v) in self.nonzero_entries() {
            let v = v as u64;
            let nv = q - v;
            for (a, b, c, s) in [
                (i, j, k, v),
                (j, k, i, v),
                (k, i, j, v),
                (j, i, k, nv),
                (i, k, j, nv),
                (k, j, i, nv),
            ] {
                t[(a * n + b) * n + c] = s;
            }
        }
        let slot = |t: &[u64], d0: usize, d1: usize, d2: usize, mul_axis: usize, rows: usize| -> Vec<u64> {
            // contract along `mul_axis` with g (rows x n)
            let dims = [d0, d1, d2];
            let mut out_dims = dims;
            out_dims[mul_axis] = rows;
            let mut out = vec![0u64; out_dims[0] * out_dims[1] * out_dims[2]];
            for x in 0..d0 {
                for y in 0..d1 {
                    for z in 0..d2 {
                        let val = t[(x * d1 + y) * d2 + z];
                        if val == 0 {
                            continue;
                        }
                        let src = [x, y, z][mul_axis];
                        for r in 0..rows {
                            let gv = g.get(r, src) as u64;
                            if gv == 0 {
                                continue;
                            }
                            let mut o = [x, y, z];
                            o[mul_axis] = r;
                            let pos = (o[0] * out_dims[1] + o[1]) * out_dims[2] + o[2];
                            out[pos] = (out[pos] + gv * val) % q;
                        }
                    }
                }
            }
            out
        };
        let t1 = slot(&t, n, n, n, 0, m);
        let t2 = slot(&t1, m, n, n, 1, m);
        let t3 = slot(&t2, m, m, n, 2, m);
        let mut out = Trivector::zero(m);
        let mut idx = 0;
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    out.coeffs[idx] = t3[(a * m + b) * m + c] as u32;
                    idx += 1;
                }
            }
        }
        out
    }

    /// Coordinates of ω in the basis given by the columns of `basis`.
    pub fn in_basis(&self, f: &PrimeField, basis: &Matrix) -> Result<Trivector, ExteriorError> {
        let inv = basis.inverse().map_err(|_| ExteriorError::Singular)?;
        Ok(self.transform(f, &inv))
    }
}

fn sort3(i: usize, j: usize, k: usize) -> ([usize; 3], bool) {
    let mut s = [i, j, k];
    let mut odd = false;
    for a in 0..3 {
        for b in 0..2 - a {
            if s[b] > s[b + 1] {
                s.swap(b, b + 1);
                odd = !odd;
            }
        }
    }
    (s, odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn double_contract_anchor() {
        let f = PrimeField::new(7).unwrap();
        let w = Trivector::from_entries(&f, 9, &[([0, 1, 2], 1)]).unwrap();
        let mut p = vec![0; 9];
        let mut q = vec![0; 9];
        p[0] = 1;
        q[1] = 1;
        let mut e3 = vec![0; 9];
        e3[2] = 1;
        assert_eq!(w.double_contract(&f, &p, &q).unwrap(), e3);
    }

    #[test]
    fn matches_multivector_contraction() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let w = Trivector::random(&f, 9, &mut rng);
            let p = f.random_vector(9, &mut rng);
            let q = f.random_vector(9, &mut rng);
            let m = w.to_multivector().contract(&f, &p).unwrap().contract(&f, &q).unwrap();
            assert_eq!(m.coeffs(), &w.double_contract(&f, &p, &q).unwrap()[..]);
        }
    }

    #[test]
    fn transform_matches_wedge_of_images() {
        let f = PrimeField::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Matrix::random(f, 9, 9, &mut rng);
        let u = f.random_vector(9, &mut rng);
        let v = f.random_vector(9, &mut rng);
        let w = f.random_vector(9, &mut rng);
        let lhs = Trivector::wedge3(&f, &u, &v, &w).transform(&f, &g);
        let rhs = Trivector::wedge3(&f, &g.mul_vec(&u), &g.mul_vec(&v), &g.mul_vec(&w));
        assert_eq!(lhs, rhs);
    }
}
