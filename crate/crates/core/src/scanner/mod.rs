//! Exhaustive scans of projective spaces P(W) ⊂ P(V₉^∨) for points of A and
//! related loci. Candidate points are first tested against a few cubics that
//! vanish on the target (evaluated by finite differences along lines in the
//! last coordinate); survivors get an exact rank test.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{basis::masks, Trivector};
use crate::field::{Matrix, PrimeField};
use crate::pfaffloci::{kernel5, rank_at, symbolic_matrix, HomogeneousForm, LociError, MonomialTable, ProjPoint, SymbolicPfaffians};

/// Largest modulus for a full scan of P⁸.
pub const FULL_SCAN_MAX_Q: u32 = 13;
/// Largest modulus for scans of the P⁴'s cut by kernel spaces.
pub const CURVE_SCAN_MAX_Q: u32 = 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("q = {q} is above the scan limit {limit}")]
    FieldTooLarge { q: u32, limit: u32 },
    #[error(transparent)]
    Loci(#[from] LociError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub q: u32,
    pub predicate: String,
    pub count: usize,
    pub points: Vec<ProjPoint>,
    pub millis: u64,
}

impl ScanReport {
    /// Compares everything except wall time.
    pub fn same_result(&self, other: &ScanReport) -> bool {
        self.q == other.q && self.predicate == other.predicate && self.count == other.count && self.points == other.points
    }
}

/// A cubic restricted to P(W), split as g0 + g1·t + g2·t² + g3·t³ in the last
/// coordinate t, with each g_j flattened against the monomials of the prefix.
#[derive(Clone, Debug)]
pub struct LineCubic {
    /// coefficient vectors of g_0..g_3 over monomials of degree 3, 2, 1, 0
    parts: [Vec<u32>; 4],
}

/// Monomial values of degrees 0..=3 of a prefix vector, each computed as a
/// parent monomial times one variable.
struct PrefixMonomials {
    vals: [Vec<u32>; 4],
    recipe: [Vec<(usize, usize)>; 4],
}

impl PrefixMonomials {
    fn new(tables: &[std::sync::Arc<MonomialTable>; 4]) -> Self {
        let recipe = std::array::from_fn(|d| {
            if d == 0 {
                return Vec::new();
            }
            tables[d]
                .exponents
                .iter()
                .map(|e| {
                    let a = e.iter().position(|&x| x > 0).unwrap();
                    let mut parent = e.clone();
                    parent[a] -= 1;
                    (tables[d - 1].index_of(&parent).unwrap(), a)
                })
                .collect()
        });
        PrefixMonomials {
            vals: std::array::from_fn(|d| vec![if d == 0 { 1 } else { 0 }; tables[d].len()]),
            recipe,
        }
    }

    fn fill(&mut self, f: &PrimeField, x: &[u32]) {
        for d in 1..4 {
            let (lo, hi) = self.vals.split_at_mut(d);
            let prev = &lo[d - 1];
            for (slot, &(parent, a)) in hi[0].iter_mut().zip(&self.recipe[d]) {
                *slot = f.mul(prev[parent], x[a]);
            }
        }
    }
}

impl LineCubic {
    /// `form` is a cubic in the k coordinates of P(W).
    pub fn new(form: &HomogeneousForm) -> Self {
        assert_eq!(form.degree(), 3);
        let split = form.split_last();
        LineCubic {
            parts: std::array::from_fn(|j| split[j].coeffs().to_vec()),
        }
    }

    /// g_0..g_3 evaluated at the prefix whose monomials are given.
    fn coefficients(&self, f: &PrimeField, mons: &PrefixMonomials) -> [u32; 4] {
        std::array::from_fn(|j| f.dot(&self.parts[j], &mons.vals[3 - j]))
    }

    /// Values at t = 0, 1, …, q−1 by forward differences.
    pub fn line_values_from(f: &PrimeField, g: [u32; 4]) -> Vec<u32> {
        let q = f.modulus();
        let mut v = g[0];
        let mut d1 = f.add(f.add(g[1], g[2]), g[3]);
        let mut d2 = f.add(f.mul(2, g[2]), f.mul(6, g[3]));
        let d3 = f.mul(6, g[3]);
        let mut out = Vec::with_capacity(q as usize);
        for _ in 0..q {
            out.push(v);
            v = f.add(v, d1);
            d1 = f.add(d1, d2);
            d2 = f.add(d2, d3);
        }
        out
    }
}

/// Scan plan for P(W) where W is spanned by the given k covectors.
pub struct SubspaceScan<'a> {
    field: PrimeField,
    basis: Matrix,
    filters: Vec<LineCubic>,
    accept: &'a (dyn Fn(&[u32]) -> bool + Sync),
    tables: [std::sync::Arc<MonomialTable>; 4],
}

impl<'a> SubspaceScan<'a> {
    /// `filters` are cubics in the ambient coordinates vanishing on every
    /// accepted point; `accept` is the exact predicate on ambient coordinates.
    pub fn new(
        f: &PrimeField,
        basis_vectors: &[Vec<u32>],
        filters: &[HomogeneousForm],
        accept: &'a (dyn Fn(&[u32]) -> bool + Sync),
    ) -> Self {
        let k = basis_vectors.len();
        assert!(k >= 2, "scan needs at least a line");
        let n = basis_vectors[0].len();
        let basis = Matrix::from_columns(*f, n, basis_vectors);
        let filters = filters.iter().map(|c| LineCubic::new(&c.compose_linear(&basis))).collect();
        SubspaceScan {
            field: *f,
            basis,
            filters,
            accept,
            tables: std::array::from_fn(|d| MonomialTable::get(k - 1, d)),
        }
    }

    fn k(&self) -> usize {
        self.basis.cols()
    }

    /// Work units: (leading position s, range of tail indices).
    fn tasks(&self) -> Vec<(usize, u64, u64)> {
        let q = self.field.modulus() as u64;
        let m = self.k() - 1;
        let mut out = Vec::new();
        for s in 0..m {
            let tail = q.pow((m - s - 1) as u32);
            let chunk = (tail / 64).max(1).min(1 << 16).max(tail.min(4096));
            let mut lo = 0;
            while lo < tail {
                let hi = (lo + chunk).min(tail);
                out.push((s, lo, hi));
                lo = hi;
            }
        }
        out
    }

    fn run_task(&self, (s, lo, hi): (usize, u64, u64), limit: Option<usize>) -> Vec<ProjPoint> {
        let f = &self.field;
        let q = f.modulus();
        let m = self.k() - 1;
        let mut prefix = vec![0u32; m];
        prefix[s] = 1;
        // decode lo into the tail digits (last coordinate fastest)
        let mut x = lo;
        for pos in (s + 1..m).rev() {
            prefix[pos] = (x % q as u64) as u32;
            x /= q as u64;
        }
        let mut mons = PrefixMonomials::new(&self.tables);
        let mut found = Vec::new();
        let mut full = vec![0u32; m + 1];
        let mut values: Vec<Vec<u32>> = Vec::with_capacity(self.filters.len());
        for _ in lo..hi {
            mons.fill(f, &prefix);
            values.clear();
            for lc in &self.filters {
                values.push(LineCubic::line_values_from(f, lc.coefficients(f, &mons)));
            }
            for t in 0..q as usize {
                if values.iter().all(|v| v[t] == 0) {
                    full[..m].copy_from_slice(&prefix);
                    full[m] = t as u32;
                    let amb = self.basis.mul_vec(&full);
                    if (self.accept)(&amb) {
                        found.push(ProjPoint::new(f, &amb).expect("nonzero"));
                        if limit.is_some_and(|l| found.len() >= l) {
                            return found;
                        }
                    }
                }
            }
            // odometer over the tail
            let mut pos = m;
            while pos > s + 1 {
                pos -= 1;
                prefix[pos] += 1;
                if prefix[pos] < q {
                    break;
                }
                prefix[pos] = 0;
            }
        }
        found
    }

    /// The point with zero prefix, i.e. the last basis vector.
    fn last_point(&self) -> Option<ProjPoint> {
        let amb = self.basis.column(self.k() - 1);
        (self.accept)(&amb).then(|| ProjPoint::new(&self.field, &amb).unwrap())
    }

    /// All accepted points, sorted.
    pub fn run(&self) -> Vec<ProjPoint> {
        let tasks = self.tasks();
        let parts: Vec<Vec<ProjPoint>> = tasks.into_par_iter().map(|t| self.run_task(t, None)).collect();
        let mut pts: Vec<ProjPoint> = parts.into_iter().flatten().collect();
        pts.extend(self.last_point());
        pts.sort();
        pts
    }

    /// The first accepted point in enumeration order, scanning sequentially.
    pub fn first(&self) -> Option<ProjPoint> {
        for t in self.tasks() {
            if let Some(p) = self.run_task(t, Some(1)).into_iter().next() {
                return Some(p);
            }
        }
        self.last_point()
    }
}

/// A few principal 6×6 sub-Pfaffians of M(x): cubics vanishing on A.
pub fn prefilter_cubics(f: &PrimeField, omega: &Trivector, count: usize) -> Vec<HomogeneousForm> {
    let m = symbolic_matrix(f, omega);
    let mut pf = SymbolicPfaffians::new(f, &m);
    let all = masks(omega.dim(), 6);
    // spread the choice over the index sets
    let step = (all.len() / count.max(1)).max(1);
    (0..count).map(|i| pf.get(all[(i * step) % all.len()])).collect()
}

fn check_q(f: &PrimeField, limit: u32) -> Result<(), ScanError> {
    if f.modulus() > limit {
        return Err(ScanError::FieldTooLarge { q: f.modulus(), limit });
    }
    Ok(())
}

fn identity_basis(n: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect()
}

/// Every point of A(F_q) = {p : rank M(p) ≤ 4}.
pub fn enumerate_a(f: &PrimeField, omega: &Trivector) -> Result<ScanReport, ScanError> {
    check_q(f, FULL_SCAN_MAX_Q)?;
    let start = Instant::now();
    let filters = prefilter_cubics(f, omega, 3);
    let accept = |x: &[u32]| rank_at(f, omega, x) <= 4;
    let pts = SubspaceScan::new(f, &identity_basis(omega.dim()), &filters, &accept).run();
    Ok(ScanReport {
        q: f.modulus(),
        predicate: "rank<=4".into(),
        count: pts.len(),
        points: pts,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Reference scan without prefilter, testing every point by exact rank.
pub fn enumerate_a_reference(f: &PrimeField, omega: &Trivector) -> Result<Vec<ProjPoint>, ScanError> {
    check_q(f, FULL_SCAN_MAX_Q)?;
    let mut pts = Vec::new();
    for_each_point(f, omega.dim(), |x| {
        if rank_at(f, omega, x) <= 4 {
            pts.push(ProjPoint::from_normalized(x.to_vec()));
        }
    });
    pts.sort();
    Ok(pts)
}

/// Visits every normalized point of P^{n−1}(F_q).
pub fn for_each_point(f: &PrimeField, n: usize, mut visit: impl FnMut(&[u32])) {
    let q = f.modulus();
    for s in 0..n {
        let mut x = vec![0u32; n];
        x[s] = 1;
        loop {
            visit(&x);
            let mut pos = n;
            let mut carry = true;
            while carry && pos > s + 1 {
                pos -= 1;
                x[pos] += 1;
                if x[pos] == q {
                    x[pos] = 0;
                } else {
                    carry = false;
                }
            }
            if carry {
                break;
            }
        }
    }
}

/// A ∩ P(ker M(P)): the points of the curve C_P.
pub fn curve_points(f: &PrimeField, omega: &Trivector, p: &[u32]) -> Result<ScanReport, ScanError> {
    check_q(f, CURVE_SCAN_MAX_Q)?;
    let start = Instant::now();
    let k = kernel5(f, omega, p)?;
    let filters = prefilter_cubics(f, omega, 3);
    let accept = |x: &[u32]| rank_at(f, omega, x) <= 4;
    let pts = SubspaceScan::new(f, k.basis(), &filters, &accept).run();
    Ok(ScanReport {
        q: f.modulus(),
        predicate: "rank<=4 in ker M(P)".into(),
        count: pts.len(),
        points: pts,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Points of a known A-point list lying on the hyperplane {p : p(v) = 0}.
pub fn hyperplane_section(f: &PrimeField, a_points: &[ProjPoint], v: &[u32]) -> Result<ScanReport, ScanError> {
    check_q(f, FULL_SCAN_MAX_Q)?;
    let start = Instant::now();
    let pts: Vec<ProjPoint> = a_points.iter().filter(|p| f.dot(p.coords(), v) == 0).cloned().collect();
    Ok(ScanReport {
        q: f.modulus(),
        predicate: "rank<=4 and p(v)=0".into(),
        count: pts.len(),
        points: pts,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Counts of points by rank of M(p), indexed by rank/2 (ranks 0,2,4,6,8).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCensus {
    pub q: u32,
    pub counts: [u64; 5],
}

impl RankCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Exhaustive rank census over P⁸(F_q). Rank ≤ 6 is exactly the zero set of the
/// Pfaffian cubic, which drives the prefilter.
pub fn rank_census(f: &PrimeField, omega: &Trivector, cubic: &HomogeneousForm) -> Result<RankCensus, ScanError> {
    check_q(f, FULL_SCAN_MAX_Q)?;
    let n = omega.dim();
    let accept = |_: &[u32]| true;
    let on_cubic = SubspaceScan::new(f, &identity_basis(n), std::slice::from_ref(cubic), &accept).run();
    let q = f.modulus() as u64;
    let total = (q.pow(n as u32) - 1) / (q - 1);
    let mut counts = [0u64; 5];
    for p in &on_cubic {
        counts[rank_at(f, omega, p.coords()) / 2] += 1;
    }
    counts[4] += total - on_cubic.len() as u64;
    Ok(RankCensus { q: f.modulus(), counts })
}

/// Scans random k-dimensional subspaces until one contains a point of A.
/// Each attempt draws a fresh subspace from `rng`; returns the first hit.
pub fn random_section_point<R: Rng + ?Sized>(
    f: &PrimeField,
    omega: &Trivector,
    k: usize,
    attempts: usize,
    rng: &mut R,
) -> Option<ProjPoint> {
    let filters = prefilter_cubics(f, omega, 3);
    let accept = |x: &[u32]| rank_at(f, omega, x) <= 4;
    for _ in 0..attempts {
        let basis: Vec<Vec<u32>> = (0..k).map(|_| f.random_vector(omega.dim(), rng)).collect();
        if Matrix::from_rows(*f, omega.dim(), &basis).rank() < k {
            continue;
        }
        if let Some(p) = SubspaceScan::new(f, &basis, &filters, &accept).first() {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_visitor_counts() {
        let f = PrimeField::new(5).unwrap();
        let mut c = 0;
        let mut seen = std::collections::HashSet::new();
        for_each_point(&f, 3, |x| {
            c += 1;
            assert!(seen.insert(x.to_vec()));
        });
        assert_eq!(c, 31);
    }

    #[test]
    fn finite_differences_match_direct() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g: [u32; 4] = std::array::from_fn(|_| f.random(&mut rng));
        let vals = LineCubic::line_values_from(&f, g);
        for t in 0..11u32 {
            let direct = f.add(f.add(g[0], f.mul(g[1], t)), f.add(f.mul(g[2], f.mul(t, t)), f.mul(g[3], f.pow(t, 3))));
            assert_eq!(vals[t as usize], direct);
        }
    }

    #[test]
    fn scan_of_plane_counts_all() {
        let f = PrimeField::new(7).unwrap();
        let accept = |_: &[u32]| true;
        let zero = HomogeneousForm::zero(f, 4, 3);
        let basis = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1]];
        let pts = SubspaceScan::new(&f, &basis, &[zero], &accept).run();
        assert_eq!(pts.len(), 57);
    }
}
