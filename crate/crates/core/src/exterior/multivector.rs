use super::basis::{indices, mask_index, masks, merge_sign};
use super::ExteriorError;
use crate::field::PrimeField;

/// Homogeneous element of Λ^k(F_q^n), dense in the lex basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multivector {
    n: usize,
    k: usize,
    coeffs: Vec<u32>,
}

impl Multivector {
    pub fn zero(n: usize, k: usize) -> Self {
        Multivector {
            n,
            k,
            coeffs: vec![0; masks(n, k).len()],
        }
    }

    /// A vector of F_q^n as a 1-multivector.
    pub fn from_vector(v: &[u32]) -> Self {
        Multivector {
            n: v.len(),
            k: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<u32>) -> Result<Self, ExteriorError> {
        if coeffs.len() != masks(n, k).len() {
            return Err(ExteriorError::DimensionMismatch(format!(
                "{} coefficients for Λ^{k}(F^{n})",
                coeffs.len()
            )));
        }
        Ok(Multivector { n, k, coeffs })
    }

    /// The basis element e_{i1}∧…∧e_{ik} for sorted distinct indices.
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        let mut m = Self::zero(n, idx.len());
        let mask = idx.iter().fold(0u16, |acc, &i| acc | 1 << i);
        assert_eq!(mask.count_ones() as usize, idx.len(), "repeated index");
        m.coeffs[mask_index(n, mask)] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    pub fn coeff(&self, mask: u16) -> u32 {
        self.coeffs[mask_index(self.n, mask)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, f: &PrimeField, other: &Self) -> Self {
        assert_eq!((self.n, self.k), (other.n, other.k));
        Multivector {
            n: self.n,
            k: self.k,
            coeffs: f.add_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> Self {
        Multivector {
            n: self.n,
            k: self.k,
            coeffs: f.scale(c, &self.coeffs),
        }
    }

    pub fn wedge(&self, f: &PrimeField, other: &Self) -> Result<Self, ExteriorError> {
        if self.n != other.n {
            return Err(ExteriorError::DimensionMismatch(format!(
                "wedge of Λ(F^{}) and Λ(F^{})",
                self.n, other.n
            )));
        }
        let n = self.n;
        let mut out = Self::zero(n, self.k + other.k);
        if self.k + other.k > n {
            return Ok(out);
        }
        let ma = masks(n, self.k);
        let mb = masks(n, other.k);
        for (ia, &a) in ma.iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0 {
                continue;
            }
            for (ib, &b) in mb.iter().enumerate() {
                let cb = other.coeffs[ib];
                if cb == 0 || a & b != 0 {
                    continue;
                }
                let mut v = f.mul(ca, cb);
                if merge_sign(a, b) {
                    v = f.neg(v);
                }
                let slot = &mut out.coeffs[mask_index(n, a | b)];
                *slot = f.add(*slot, v);
            }
        }
        Ok(out)
    }

    /// Interior product with a covector; the j-th factor (0-based) carries sign (−1)^j.
    pub fn contract(&self, f: &PrimeField, phi: &[u32]) -> Result<Self, ExteriorError> {
        if phi.len() != self.n {
            return Err(ExteriorError::DimensionMismatch(format!(
                "covector of length {} against Λ(F^{})",
                phi.len(),
                self.n
            )));
        }
        let n = self.n;
        if self.k == 0 {
            return Ok(Self::zero(n, 0));
        }
        let mut out = Self::zero(n, self.k - 1);
        for (idx, &m) in masks(n, self.k).iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0 {
                continue;
            }
            for (pos, i) in indices(m).enumerate() {
                if phi[i] == 0 {
                    continue;
                }
                let mut v = f.mul(c, phi[i]);
                if pos % 2 == 1 {
                    v = f.neg(v);
                }
                let slot = &mut out.coeffs[mask_index(n, m & !(1 << i))];
                *slot = f.add(*slot, v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_sign_anchors() {
        let f = PrimeField::new(7).unwrap();
        let e123 = Multivector::basis(9, &[0, 1, 2]);
        let mut phi = vec![0u32; 9];
        phi[0] = 1;
        assert_eq!(e123.contract(&f, &phi).unwrap(), Multivector::basis(9, &[1, 2]));
        phi[0] = 0;
        phi[3] = 1;
        assert!(e123.contract(&f, &phi).unwrap().is_zero());
        phi[3] = 0;
        phi[1] = 1;
        let r = e123.contract(&f, &phi).unwrap();
        assert_eq!(r, Multivector::basis(9, &[0, 2]).scale(&f, 6));
    }

    #[test]
    fn wedge_basic() {
        let f = PrimeField::new(7).unwrap();
        let e1 = Multivector::basis(4, &[1]);
        let e0 = Multivector::basis(4, &[0]);
        assert_eq!(e1.wedge(&f, &e0).unwrap(), Multivector::basis(4, &[0, 1]).scale(&f, 6));
        assert!(e1.wedge(&f, &e1).unwrap().is_zero());
    }
}
