use super::ExteriorError;
use crate::field::{Matrix, PrimeField};

/// Alternating n×n matrix over F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatrix {
    field: PrimeField,
    n: usize,
    data: Vec<u32>,
}

impl SkewMatrix {
    pub fn new(field: PrimeField, n: usize, data: Vec<u32>) -> Result<Self, ExteriorError> {
        if data.len() != n * n {
            return Err(ExteriorError::DimensionMismatch(format!("{} entries for {n}x{n}", data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != 0 {
                return Err(ExteriorError::NotAlternating);
            }
            for j in i + 1..n {
                if data[j * n + i] != field.neg(data[i * n + j]) {
                    return Err(ExteriorError::NotAlternating);
                }
            }
        }
        Ok(SkewMatrix { field, n, data })
    }

    pub(crate) fn from_data_unchecked(field: PrimeField, n: usize, data: Vec<u32>) -> Self {
        SkewMatrix { field, n, data }
    }

    /// Builds the matrix from its strict upper triangle.
    pub fn from_upper(field: PrimeField, n: usize, upper: impl Fn(usize, usize) -> u32) -> Self {
        let mut data = vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = upper(i, j) % field.modulus();
                data[i * n + j] = v;
                data[j * n + i] = field.neg(v);
            }
        }
        SkewMatrix { field, n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.field, self.n, self.n, self.data.clone()).expect("square")
    }

    pub fn rank(&self) -> usize {
        self.to_matrix().rank()
    }

    /// Covectors φ with M φ = 0.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        self.to_matrix().kernel_basis()
    }

    /// Pfaffian of the principal submatrix on the index set `mask`.
    pub fn pfaffian_on(&self, mask: u16) -> Result<u32, ExteriorError> {
        if mask.count_ones() % 2 == 1 {
            return Err(ExteriorError::OddSize(mask.count_ones() as usize));
        }
        if mask >> self.n != 0 {
            return Err(ExteriorError::DimensionMismatch(format!("index set {mask:#b} out of range")));
        }
        Ok(self.pf_rec(mask))
    }

    pub fn pfaffian(&self) -> Result<u32, ExteriorError> {
        self.pfaffian_on(((1u32 << self.n) - 1) as u16)
    }

    // First-row expansion: Pf = Σ_t (−1)^t M[i][j_t] Pf(rest), t counting from 0.
    fn pf_rec(&self, mask: u16) -> u32 {
        if mask == 0 {
            return 1;
        }
        let f = &self.field;
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut acc = 0u32;
        let mut t = 0;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let m = self.get(i, j);
            if m != 0 {
                let sub = self.pf_rec(rest & !(1 << j));
                let term = f.mul(m, sub);
                acc = if t % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
            }
            t += 1;
        }
        acc
    }
}
