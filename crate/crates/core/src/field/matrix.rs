use super::{FieldError, PrimeField};

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Row echelon form: `rows` holds one normalized row per pivot (pivot entry 1),
/// `pivots[i]` is the pivot column of row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub cols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<u32>>,
    pub reduced: bool,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// One kernel vector per free column, by back substitution.
    pub fn kernel_vectors(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        let q = field.modulus() as u64;
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut x = vec![0u32; self.cols];
                x[f] = 1;
                for (row, &pc) in self.rows.iter().zip(&self.pivots).rev() {
                    let mut acc = 0u64;
                    for k in pc + 1..self.cols {
                        if x[k] != 0 && row[k] != 0 {
                            acc = (acc + row[k] as u64 * x[k] as u64) % q;
                        }
                    }
                    x[pc] = field.neg(acc as u32);
                }
                x
            })
            .collect()
    }
}

/// Particular solution of `M X = B` together with the kernel of `M`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Matrix,
    pub kernel: Vec<Vec<u32>>,
}

/// Storage lane for lazily reduced elimination. Entries grow by at most
/// `(q-1)^2` per pivot step and are reduced only when read or when the
/// overflow budget runs out.
trait Lane: Copy + Send + Sync {
    fn lift(x: u32) -> Self;
    fn reduce(self, q: u32) -> u32;
    fn fma(self, m: u32, b: u32) -> Self;
    fn budget(q: u32) -> u64;
}

impl Lane for u32 {
    #[inline(always)]
    fn lift(x: u32) -> Self {
        x
    }
    #[inline(always)]
    fn reduce(self, q: u32) -> u32 {
        self % q
    }
    #[inline(always)]
    fn fma(self, m: u32, b: u32) -> Self {
        self.wrapping_add(m.wrapping_mul(b))
    }
    fn budget(q: u32) -> u64 {
        let step = (q as u64 - 1) * (q as u64 - 1);
        (u32::MAX as u64 - q as u64) / step
    }
}

impl Lane for u64 {
    #[inline(always)]
    fn lift(x: u32) -> Self {
        x as u64
    }
    #[inline(always)]
    fn reduce(self, q: u32) -> u32 {
        (self % q as u64) as u32
    }
    #[inline(always)]
    fn fma(self, m: u32, b: u32) -> Self {
        self + m as u64 * b as u64
    }
    fn budget(q: u32) -> u64 {
        let step = (q as u64 - 1) * (q as u64 - 1);
        (u64::MAX - q as u64) / step
    }
}

#[inline(always)]
fn axpy_lane<L: Lane>(dst: &mut [L], m: u32, src: &[u32]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = d.fma(m, s);
    }
}

/// Forward elimination with first-nonzero pivoting in column order.
fn forward_lazy<L: Lane>(field: &PrimeField, rows: usize, cols: usize, src: &[u32]) -> Echelon {
    let q = field.modulus();
    let budget = L::budget(q);
    let mut data: Vec<L> = src.iter().map(|&x| L::lift(x)).collect();
    let mut pivots = Vec::new();
    let mut out_rows: Vec<Vec<u32>> = Vec::new();
    let mut r = 0usize;
    let mut steps = 0u64;
    let mut pivot_row = vec![0u32; cols];
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut found = None;
        for i in r..rows {
            let v = data[i * cols + c].reduce(q);
            data[i * cols + c] = L::lift(v);
            if v != 0 {
                found = Some(i);
                break;
            }
        }
        let Some(p) = found else { continue };
        if p != r {
            let (a, b) = data.split_at_mut(p * cols);
            a[r * cols..(r + 1) * cols].swap_with_slice(&mut b[..cols]);
        }
        let lead = data[r * cols + c].reduce(q);
        let inv = field.inv(lead).expect("nonzero pivot");
        for k in c..cols {
            let v = field.mul(data[r * cols + k].reduce(q), inv);
            pivot_row[k] = v;
        }
        let tail = &pivot_row[c + 1..];
        for i in r + 1..rows {
            let a = data[i * cols + c].reduce(q);
            if a != 0 {
                let row = &mut data[i * cols + c + 1..(i + 1) * cols];
                axpy_lane(row, q - a, tail);
            }
            data[i * cols + c] = L::lift(0);
        }
        let mut stored = vec![0u32; cols];
        stored[c..].copy_from_slice(&pivot_row[c..]);
        out_rows.push(stored);
        pivots.push(c);
        r += 1;
        steps += 1;
        if steps >= budget {
            for x in data[r * cols..].iter_mut() {
                *x = L::lift(x.reduce(q));
            }
            steps = 0;
        }
    }
    Echelon {
        cols,
        pivots,
        rows: out_rows,
        reduced: false,
    }
}

/// Clears entries above every pivot of an echelon form.
fn back_substitute<L: Lane>(field: &PrimeField, ech: Echelon) -> Echelon {
    let q = field.modulus();
    let budget = L::budget(q);
    let cols = ech.cols;
    let mut rows: Vec<Vec<L>> = ech
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| L::lift(x)).collect())
        .collect();
    let mut steps = 0u64;
    let mut piv = vec![0u32; cols];
    for i in (0..rows.len()).rev() {
        let pc = ech.pivots[i];
        for k in pc..cols {
            piv[k] = rows[i][k].reduce(q);
        }
        for (k, slot) in rows[i].iter_mut().enumerate().skip(pc) {
            *slot = L::lift(piv[k]);
        }
        for row in rows[..i].iter_mut() {
            let a = row[pc].reduce(q);
            if a != 0 {
                axpy_lane(&mut row[pc + 1..], q - a, &piv[pc + 1..]);
            }
            row[pc] = L::lift(0);
        }
        steps += 1;
        if steps >= budget {
            for row in rows[..i].iter_mut() {
                for x in row.iter_mut() {
                    *x = L::lift(x.reduce(q));
                }
            }
            steps = 0;
        }
    }
    Echelon {
        cols,
        pivots: ech.pivots,
        rows: rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.reduce(q)).collect())
            .collect(),
        reduced: true,
    }
}

fn narrow_lane(field: &PrimeField) -> bool {
    field.modulus() < (1 << 16) && u32::budget(field.modulus()) >= 1
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.modulus();
        Ok(Matrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|x| x % q).collect(),
        })
    }

    /// Builds a matrix from row vectors of equal length `cols`.
    pub fn from_rows<R: AsRef<[u32]>>(field: PrimeField, cols: usize, rows: &[R]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let q = field.modulus();
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "row length");
            data.extend(r.iter().map(|&x| x % q));
        }
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns<R: AsRef<[u32]>>(field: PrimeField, rows: usize, columns: &[R]) -> Self {
        Self::from_rows(field, rows, columns).transpose()
    }

    pub fn random<R: rand::Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix { field, rows, cols, data }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.modulus();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, FieldError> {
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.field.modulus() as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b as u64) % q;
                }
            }
            for j in 0..other.cols {
                out.data[i * other.cols + j] = acc[j] as u32;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0u32; self.cols];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                self.field.axpy(c, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Row echelon form (pivots normalized to 1, entries above pivots untouched).
    pub fn echelon(&self) -> Echelon {
        if narrow_lane(&self.field) {
            forward_lazy::<u32>(&self.field, self.rows, self.cols, &self.data)
        } else {
            forward_lazy::<u64>(&self.field, self.rows, self.cols, &self.data)
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Echelon {
        let ech = self.echelon();
        if narrow_lane(&self.field) {
            back_substitute::<u32>(&self.field, ech)
        } else {
            back_substitute::<u64>(&self.field, ech)
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Kernel `{x : M x = 0}` as a list of vectors in reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let raw = self.echelon().kernel_vectors(&self.field);
        if raw.is_empty() {
            return raw;
        }
        Matrix::from_rows(self.field, self.cols, &raw).rref().rows
    }

    /// Solves `M X = B`; returns a particular solution (free variables set to
    /// zero) and a kernel basis of `M`.
    pub fn solve(&self, b: &Matrix) -> Result<Solution, FieldError> {
        if b.rows != self.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "system has {} rows, right-hand side {}",
                self.rows, b.rows
            )));
        }
        let aug = self.hstack(b);
        let ech = aug.rref();
        if ech.pivots.iter().any(|&p| p >= self.cols) {
            return Err(FieldError::Inconsistent);
        }
        let mut particular = Matrix::zeros(self.field, self.cols, b.cols);
        for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
            for j in 0..b.cols {
                particular.data[pc * b.cols + j] = row[self.cols + j];
            }
        }
        Ok(Solution {
            particular,
            kernel: self.kernel_basis(),
        })
    }

    pub fn inverse(&self) -> Result<Matrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let sol = self.solve(&Matrix::identity(self.field, self.rows))?;
        if !sol.kernel.is_empty() {
            return Err(FieldError::Inconsistent);
        }
        Ok(sol.particular)
    }

    pub fn determinant(&self) -> u32 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let f = self.field;
        let mut a = self.data.clone();
        let mut det = 1u32;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| a[i * n + c] != 0) else {
                return 0;
            };
            if p != c {
                for k in 0..n {
                    a.swap(p * n + k, c * n + k);
                }
                det = f.neg(det);
            }
            let lead = a[c * n + c];
            det = f.mul(det, lead);
            let inv = f.inv(lead).unwrap();
            for i in c + 1..n {
                let m = f.mul(a[i * n + c], inv);
                if m == 0 {
                    continue;
                }
                for k in c..n {
                    let v = f.mul(m, a[c * n + k]);
                    a[i * n + k] = f.sub(a[i * n + k], v);
                }
            }
        }
        det
    }
}
