use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::field::{Matrix, PrimeField};

/// Exponent vectors of all degree-d monomials in `nvars` variables, in
/// descending lex order (x_0^d first).
#[derive(Debug)]
pub struct MonomialTable {
    pub nvars: usize,
    pub degree: usize,
    pub exponents: Vec<Vec<u8>>,
    index: HashMap<u64, usize>,
}

fn pack(e: &[u8]) -> u64 {
    e.iter().fold(0u64, |acc, &x| acc << 4 | x as u64)
}

impl MonomialTable {
    fn build(nvars: usize, degree: usize) -> Self {
        fn rec(nvars: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if cur.len() + 1 == nvars {
                cur.push(left as u8);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e as u8);
                rec(nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut exponents = Vec::new();
        if nvars == 0 {
            if degree == 0 {
                exponents.push(Vec::new());
            }
        } else {
            rec(nvars, degree, &mut Vec::new(), &mut exponents);
        }
        let index = exponents.iter().enumerate().map(|(i, e)| (pack(e), i)).collect();
        MonomialTable {
            nvars,
            degree,
            exponents,
            index,
        }
    }

    /// Shared table for (nvars, degree).
    pub fn get(nvars: usize, degree: usize) -> Arc<MonomialTable> {
        assert!(nvars <= 16 && degree < 16, "monomial table out of range");
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonomialTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("monomial cache poisoned");
        guard
            .entry((nvars, degree))
            .or_insert_with(|| Arc::new(MonomialTable::build(nvars, degree)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.index.get(&pack(e)).copied()
    }

    /// Values of every monomial at `x`, in table order.
    pub fn values(&self, f: &PrimeField, x: &[u32]) -> Vec<u32> {
        let d = self.degree;
        let powers: Vec<Vec<u32>> = x
            .iter()
            .map(|&xi| {
                let mut p = vec![1u32; d + 1];
                for k in 1..=d {
                    p[k] = f.mul(p[k - 1], xi);
                }
                p
            })
            .collect();
        self.exponents
            .iter()
            .map(|e| {
                let mut v = 1u32;
                for (a, &ea) in e.iter().enumerate() {
                    if ea > 0 {
                        v = f.mul(v, powers[a][ea as usize]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Homogeneous polynomial of fixed degree with a dense coefficient table.
#[derive(Clone, Debug)]
pub struct HomogeneousForm {
    field: PrimeField,
    table: Arc<MonomialTable>,
    coeffs: Vec<u32>,
}

impl PartialEq for HomogeneousForm {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.table.nvars == other.table.nvars
            && self.table.degree == other.table.degree
            && self.coeffs == other.coeffs
    }
}
impl Eq for HomogeneousForm {}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    prime: u32,
    nvars: usize,
    degree: usize,
    coeffs: Vec<u32>,
}

impl Serialize for HomogeneousForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FormRepr {
            prime: self.field.modulus(),
            nvars: self.table.nvars,
            degree: self.table.degree,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FormRepr::deserialize(d)?;
        let field = PrimeField::new(r.prime).map_err(D::Error::custom)?;
        HomogeneousForm::from_coeffs(field, r.nvars, r.degree, r.coeffs).ok_or_else(|| D::Error::custom("coefficient count"))
    }
}

impl HomogeneousForm {
    pub fn zero(field: PrimeField, nvars: usize, degree: usize) -> Self {
        let table = MonomialTable::get(nvars, degree);
        let coeffs = vec![0; table.len()];
        HomogeneousForm { field, table, coeffs }
    }

    pub fn from_coeffs(field: PrimeField, nvars: usize, degree: usize, coeffs: Vec<u32>) -> Option<Self> {
        let table = MonomialTable::get(nvars, degree);
        if coeffs.len() != table.len() {
            return None;
        }
        let q = field.modulus();
        Some(HomogeneousForm {
            field,
            table,
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
        })
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u32) -> Self {
        let mut f = Self::zero(field, nvars, 0);
        f.coeffs[0] = c % field.modulus();
        f
    }

    /// The linear form Σ c_i x_i.
    pub fn linear(field: PrimeField, c: &[u32]) -> Self {
        let mut f = Self::zero(field, c.len(), 1);
        for (i, &ci) in c.iter().enumerate() {
            let mut e = vec![0u8; c.len()];
            e[i] = 1;
            let idx = f.table.index_of(&e).unwrap();
            f.coeffs[idx] = ci % field.modulus();
        }
        f
    }

    pub fn variable(field: PrimeField, nvars: usize, i: usize) -> Self {
        let mut c = vec![0; nvars];
        c[i] = 1;
        Self::linear(field, &c)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn nvars(&self) -> usize {
        self.table.nvars
    }
    pub fn degree(&self) -> usize {
        self.table.degree
    }
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }
    pub fn table(&self) -> &MonomialTable {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn coeff(&self, e: &[u8]) -> u32 {
        self.table.index_of(e).map_or(0, |i| self.coeffs[i])
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nvars(), self.degree()), (other.nvars(), other.degree()));
        HomogeneousForm {
            field: self.field,
            table: self.table.clone(),
            coeffs: self.field.add_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nvars(), self.degree()), (other.nvars(), other.degree()));
        HomogeneousForm {
            field: self.field,
            table: self.table.clone(),
            coeffs: self.field.sub_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, c: u32) -> Self {
        HomogeneousForm {
            field: self.field,
            table: self.table.clone(),
            coeffs: self.field.scale(c, &self.coeffs),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars());
        let f = self.field;
        let n = self.nvars();
        let mut out = Self::zero(f, n, self.degree() + other.degree());
        let q = f.modulus() as u64;
        let mut acc = vec![0u64; out.coeffs.len()];
        let mut e = vec![0u8; n];
        for (ia, ea) in self.table.exponents.iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0 {
                continue;
            }
            for (ib, eb) in other.table.exponents.iter().enumerate() {
                let cb = other.coeffs[ib];
                if cb == 0 {
                    continue;
                }
                for k in 0..n {
                    e[k] = ea[k] + eb[k];
                }
                let idx = out.table.index_of(&e).unwrap();
                acc[idx] = (acc[idx] + ca as u64 * cb as u64) % q;
            }
        }
        out.coeffs = acc.into_iter().map(|x| x as u32).collect();
        out
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        assert_eq!(x.len(), self.nvars());
        let vals = self.table.values(&self.field, x);
        self.field.dot(&vals, &self.coeffs)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let f = self.field;
        let n = self.nvars();
        let d = self.degree();
        assert!(d > 0, "derivative of a constant form");
        let mut out = Self::zero(f, n, d - 1);
        let mut e = vec![0u8; n];
        for (idx, ex) in self.table.exponents.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0 || ex[i] == 0 {
                continue;
            }
            e.copy_from_slice(ex);
            e[i] -= 1;
            let j = out.table.index_of(&e).unwrap();
            out.coeffs[j] = f.mul_add(c, ex[i] as u32 % f.modulus(), out.coeffs[j]);
        }
        out
    }

    pub fn gradient(&self) -> Vec<HomogeneousForm> {
        (0..self.nvars()).map(|i| self.derivative(i)).collect()
    }

    /// Exact quotient by the variable x_i, if every monomial contains it.
    pub fn divide_by_variable(&self, i: usize) -> Option<Self> {
        let n = self.nvars();
        let d = self.degree();
        if d == 0 {
            return None;
        }
        let mut out = Self::zero(self.field, n, d - 1);
        let mut e = vec![0u8; n];
        for (idx, ex) in self.table.exponents.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0 {
                continue;
            }
            if ex[i] == 0 {
                return None;
            }
            e.copy_from_slice(ex);
            e[i] -= 1;
            let j = out.table.index_of(&e).unwrap();
            out.coeffs[j] = c;
        }
        Some(out)
    }

    /// First nonzero coefficient in table order.
    pub fn leading_coeff(&self) -> Option<u32> {
        self.coeffs.iter().copied().find(|&c| c != 0)
    }

    /// Rescaled so the first nonzero coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.leading_coeff() {
            Some(c) => self.scale(self.field.inv(c).unwrap()),
            None => self.clone(),
        }
    }

    /// Scalar λ with self = λ·other, when the forms are proportional and other ≠ 0.
    pub fn ratio_to(&self, other: &Self) -> Option<u32> {
        if self.nvars() != other.nvars() || self.degree() != other.degree() {
            return None;
        }
        let pos = other.coeffs.iter().position(|&c| c != 0)?;
        let f = self.field;
        let lambda = f.div(self.coeffs[pos], other.coeffs[pos]).ok()?;
        (other.scale(lambda) == *self).then_some(lambda)
    }

    /// The form x ↦ F(L x) for an nvars×k matrix L, as a form in k variables.
    pub fn compose_linear(&self, l: &Matrix) -> Self {
        assert_eq!(l.rows(), self.nvars());
        let f = self.field;
        let k = l.cols();
        let lin: Vec<HomogeneousForm> = (0..self.nvars()).map(|a| Self::linear(f, l.row(a))).collect();
        let d = self.degree();
        // powers of each substituted linear form
        let mut powers: Vec<Vec<HomogeneousForm>> = Vec::with_capacity(lin.len());
        for li in &lin {
            let mut p = vec![Self::constant(f, k, 1)];
            for e in 1..=d {
                let next = p[e - 1].mul(li);
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = Self::zero(f, k, d);
        for (idx, ex) in self.table.exponents.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0 {
                continue;
            }
            let mut term = Self::constant(f, k, c);
            for (a, &ea) in ex.iter().enumerate() {
                if ea > 0 {
                    term = term.mul(&powers[a][ea as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Writes F = Σ_j g_j · x_last^j and returns (g_0, …, g_d) as forms in the
    /// first nvars−1 variables.
    pub fn split_last(&self) -> Vec<HomogeneousForm> {
        let n = self.nvars();
        let d = self.degree();
        let f = self.field;
        let mut parts: Vec<HomogeneousForm> = (0..=d).map(|j| Self::zero(f, n - 1, d - j)).collect();
        for (idx, ex) in self.table.exponents.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0 {
                continue;
            }
            let j = ex[n - 1] as usize;
            let pos = parts[j].table.index_of(&ex[..n - 1]).unwrap();
            parts[j].coeffs[pos] = c;
        }
        parts
    }
}
