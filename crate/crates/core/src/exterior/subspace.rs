use serde::{Deserialize, Serialize};

use super::basis::binomial;
use super::{ExteriorError, Trivector};
use crate::field::{Matrix, PrimeField};

/// Linear subspace of F_q^n kept as a reduced echelon basis, so equality of
/// subspaces is equality of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    field: PrimeField,
    n: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Subspace {
            field,
            n,
            pivots: Vec::new(),
            basis: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, n: usize) -> Self {
        Self::span(field, n, &Matrix::identity(field, n).row_vectors())
    }

    pub fn span<V: AsRef<[u32]>>(field: PrimeField, n: usize, vectors: &[V]) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, n);
        }
        let ech = Matrix::from_rows(field, n, vectors).rref();
        Subspace {
            field,
            n,
            pivots: ech.pivots,
            basis: ech.rows,
        }
    }

    /// Span of standard basis vectors e_i for the listed indices.
    pub fn coordinate(field: PrimeField, n: usize, idx: &[usize]) -> Self {
        let vecs: Vec<Vec<u32>> = idx
            .iter()
            .map(|&i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        Self::span(field, n, &vecs)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` after clearing its pivot entries; zero iff `v` lies in the space.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = r[pc];
            if c != 0 {
                f.axpy(f.neg(c), row, &mut r);
            }
        }
        r
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.n, "ambient mismatch");
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.dim() <= self.dim() && other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.n, other.n);
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::span(self.field, self.n, &rows)
    }

    pub fn sum_all<'a>(field: PrimeField, n: usize, spaces: impl IntoIterator<Item = &'a Subspace>) -> Subspace {
        let mut rows = Vec::new();
        for s in spaces {
            rows.extend(s.basis.iter().cloned());
        }
        Self::span(field, n, &rows)
    }

    /// Covectors vanishing on the space (as a subspace of the dual, same coordinates).
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Self::full(self.field, self.n);
        }
        let ker = Matrix::from_rows(self.field, self.n, &self.basis).kernel_basis();
        Self::span(self.field, self.n, &ker)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Standard basis vectors completing the space to the whole ambient space.
    pub fn complement_basis(&self) -> Vec<Vec<u32>> {
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.n)
            .filter(|&c| !is_pivot[c])
            .map(|c| {
                let mut v = vec![0; self.n];
                v[c] = 1;
                v
            })
            .collect()
    }

    /// A basis of `self` whose first vectors are the given independent vectors of `self`.
    pub fn extend_basis(&self, start: &[Vec<u32>]) -> Result<Vec<Vec<u32>>, ExteriorError> {
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut acc = Subspace::zero(self.field, self.n);
        for v in start.iter().chain(self.basis.iter()) {
            if !self.contains(v) {
                return Err(ExteriorError::NotNested);
            }
            if !acc.contains(v) {
                acc = acc.sum(&Subspace::span(self.field, self.n, &[v]));
                out.push(v.clone());
            }
        }
        if out.len() < start.len() {
            return Err(ExteriorError::DimensionMismatch("starting vectors are dependent".into()));
        }
        Ok(out)
    }

    /// Image under a linear map given as an m×n matrix.
    pub fn image(&self, g: &Matrix) -> Subspace {
        let vecs: Vec<Vec<u32>> = self.basis.iter().map(|v| g.mul_vec(v)).collect();
        Self::span(self.field, g.rows(), &vecs)
    }
}

/// Nested chain of subspaces of strictly increasing dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flag {
    members: Vec<Subspace>,
}

impl Flag {
    pub fn new(members: Vec<Subspace>) -> Result<Self, ExteriorError> {
        for w in members.windows(2) {
            if w[0].dim() >= w[1].dim() || !w[1].contains_space(&w[0]) {
                return Err(ExteriorError::NotNested);
            }
        }
        Ok(Flag { members })
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn dims(&self) -> Vec<usize> {
        self.members.iter().map(Subspace::dim).collect()
    }

    /// Member of the given dimension, if present.
    pub fn of_dim(&self, d: usize) -> Option<&Subspace> {
        self.members.iter().find(|s| s.dim() == d)
    }
}

/// The span of all a∧b∧c with a ∈ S_a, b ∈ S_b, c ∈ S_c for nested S_a ⊆ S_b ⊆ S_c,
/// as a subspace of the C(n,3)-dimensional coefficient space.
pub fn wedge_space(sa: &Subspace, sb: &Subspace, sc: &Subspace) -> Result<Subspace, ExteriorError> {
    if !(sb.contains_space(sa) && sc.contains_space(sb)) {
        return Err(ExteriorError::NotNested);
    }
    let f = sa.field();
    let n = sa.ambient();
    let ba = sa.basis().to_vec();
    let bb = sb.extend_basis(&ba)?;
    let bc = sc.extend_basis(&bb)?;
    let (da, db, dc) = (sa.dim(), sb.dim(), sc.dim());
    let mut gens = Vec::new();
    for i in 0..da {
        for j in i + 1..db {
            for k in j + 1..dc {
                gens.push(Trivector::wedge3(&f, &bc[i], &bc[j], &bc[k]).coeffs().to_vec());
            }
        }
    }
    Ok(Subspace::span(f, binomial(n, 3), &gens))
}

/// Whether `m` lies in the sum of the given subspaces of Λ³.
pub fn in_sum_of_spans(m: &Trivector, spaces: &[Subspace]) -> bool {
    let Some(first) = spaces.first() else {
        return m.is_zero();
    };
    let total = Subspace::sum_all(first.field(), first.ambient(), spaces);
    total.contains(m.coeffs())
}
