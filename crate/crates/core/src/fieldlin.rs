//! Dense exact linear algebra over a prime field F_p.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A prime field F_p. Elements are stored as residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u32,
}

impl Field {
    pub const F2: Field = Field { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p > 65_521 || !is_prime(p) {
            return Err(Error::Config(format!("field characteristic {p} is not a supported prime")));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn elem(self, v: i64) -> FieldElem {
        FieldElem { value: v.rem_euclid(self.p as i64) as u32 }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        // Fermat: a^(p-2)
        let mut base = a as u64;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        let m = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u32
    }

    /// `(-1)^n` as a field element.
    #[inline]
    pub fn sign(self, n: i32) -> u32 {
        if n.rem_euclid(2) == 0 {
            1
        } else {
            self.p - 1
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue class mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    pub value: u32,
}

/// Row-major dense matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows; entries are reduced mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Mat::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.elem(v).value);
            }
        }
        m
    }

    pub fn from_columns(field: Field, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Mat::zeros(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn column_vector(field: Field, v: &[u32]) -> Self {
        Mat { field, rows: v.len(), cols: 1, data: v.to_vec() }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.p);
        self.data[r * self.cols + c] = v;
    }
    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: u32) {
        let i = r * self.cols + c;
        self.data[i] = self.field.add(self.data[i], v);
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in product {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let f = self.field;
        let p = f.p as u64;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        if self.cols == 0 {
            return out;
        }
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (x, &b) in acc.iter_mut().zip(row) {
                    *x += a * b as u64;
                }
                if k % 1024 == 1023 {
                    acc.iter_mut().for_each(|x| *x %= p);
                }
            }
            for c in 0..other.cols {
                out.data[r * other.cols + c] = (acc[c] % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                (row.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: u32) -> Mat {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Mat { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Mat {
        self.scale(self.field.neg(1))
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        m.paste(0, 0, self);
        m.paste(self.rows, self.cols, other);
        m
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Mat) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let mut m = Mat::zeros(self.field, rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows, idx.len());
        for (j, &c) in idx.iter().enumerate() {
            for r in 0..self.rows {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col));
            if inv != 1 {
                for c in col..self.cols {
                    let v = self.get(row, c);
                    self.set(row, c, f.mul(v, inv));
                }
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                    self.data[r * self.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate on the smaller orientation
        if self.rows > self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// Columns form a basis of the kernel.
    pub fn nullspace(&self) -> Mat {
        let (r, piv) = self.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut out = Mat::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, 1);
            for (i, &pc) in piv.iter().enumerate() {
                out.set(pc, k, f.neg(r.get(i, fc)));
            }
        }
        out
    }

    /// Indices of a maximal set of independent columns (greedy, left to right).
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().1
    }

    /// A basis (as columns) of the column space.
    pub fn column_basis(&self) -> Mat {
        let idx = self.independent_columns();
        self.select_columns(&idx)
    }

    /// Solves `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Mat::column_vector(self.field, b));
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in piv.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// Solves `self * X = B` column by column.
    pub fn solve_matrix(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(b.rows, self.rows);
        if b.cols == 0 {
            return Some(Mat::zeros(self.field, self.cols, 0));
        }
        let aug = self.hstack(b);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(i, self.cols + j));
            }
        }
        Some(x)
    }
}

/// Whether `v` lies in the column span of `basis`.
pub fn in_span(basis: &Mat, v: &[u32]) -> Result<bool> {
    if basis.rows() != v.len() {
        return Err(Error::Shape(format!("in_span: basis has {} rows, vector has {}", basis.rows(), v.len())));
    }
    if v.iter().all(|&x| x == 0) {
        return Ok(true);
    }
    Ok(basis.solve(v).is_some())
}

/// Columns completing a basis of `span(w)` to one of `span(v)`: coset representatives of
/// `span(v) / span(w)`.
pub fn quotient_reps(v: &Mat, w: &Mat) -> Result<Mat> {
    if v.rows() != w.rows() {
        return Err(Error::Shape(format!("quotient_reps: {} vs {} rows", v.rows(), w.rows())));
    }
    let wb = w.column_basis();
    let stacked = wb.hstack(v);
    let piv = stacked.independent_columns();
    if piv.iter().take_while(|&&c| c < wb.cols()).count() != wb.cols() {
        unreachable!("column basis is independent");
    }
    let extra: Vec<usize> = piv.iter().filter(|&&c| c >= wb.cols()).copied().collect();
    // every column of w must lie in span(v)
    if stacked.rank() != v.rank() {
        return Err(Error::Shape("quotient_reps: W is not contained in V".into()));
    }
    Ok(stacked.select_columns(&extra))
}

/// Dimension of `span(a) ∩ span(b)`.
pub fn intersection_dim(a: &Mat, b: &Mat) -> usize {
    a.rank() + b.rank() - a.hstack(b).rank()
}

/// A basis of `span(a) ∩ span(b)` as columns.
pub fn intersection(a: &Mat, b: &Mat) -> Mat {
    let ab = a.column_basis();
    let bb = b.column_basis();
    // [ab | -bb] (x; y) = 0  ->  ab x lies in both
    let k = ab.hstack(&bb.neg()).nullspace();
    let x = k.submatrix(0..ab.cols(), 0..k.cols());
    ab.mul(&x).column_basis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Field {
        Field::F2
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::zeros(f2(), 0, 0).rank(), 0);
        assert_eq!(Mat::identity(f2(), 3).rank(), 3);
        assert_eq!(Mat::from_rows(f2(), &[vec![1, 1], vec![1, 1]]).rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(Mat::identity(f2(), 4).nullspace().cols(), 0);
        assert_eq!(Mat::zeros(f2(), 2, 3).nullspace().cols(), 3);
        let n = Mat::from_rows(f2(), &[vec![1, 1]]).nullspace();
        assert_eq!(n.cols(), 1);
        assert_eq!(n.column(0), vec![1, 1]);
    }

    #[test]
    fn span_and_quotient() {
        let id = Mat::identity(f2(), 3);
        assert!(in_span(&id, &[1, 0, 1]).unwrap());
        let empty = Mat::zeros(f2(), 3, 0);
        assert!(!in_span(&empty, &[0, 1, 0]).unwrap());
        assert!(in_span(&empty, &[0, 0, 0]).unwrap());
        assert!(in_span(&id, &[1, 0]).is_err());

        let v = Mat::identity(f2(), 2);
        let w = Mat::from_rows(f2(), &[vec![1], vec![1]]);
        let q = quotient_reps(&v, &w).unwrap();
        assert_eq!(q.cols(), 1);
        // rep-agnostic: the representative must not lie in span(w)
        assert!(!in_span(&w, &q.column(0)).unwrap());
        assert_eq!(w.hstack(&q).rank(), 2);
    }

    #[test]
    fn quotient_rejects_non_subspace() {
        let v = Mat::from_rows(f2(), &[vec![1], vec![0]]);
        let w = Mat::from_rows(f2(), &[vec![0], vec![1]]);
        assert!(quotient_reps(&v, &w).is_err());
    }

    #[test]
    fn inverse_mod_p() {
        let f = Field::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert!(Field::new(9).is_err());
        assert!(Field::new(1).is_err());
    }

    #[test]
    fn intersection_of_planes() {
        let f = f2();
        let a = Mat::from_rows(f, &[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let b = Mat::from_rows(f, &[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let i = intersection(&a, &b);
        assert_eq!(i.cols(), 1);
        assert_eq!(i.column(0), vec![0, 1, 0]);
        assert_eq!(intersection_dim(&a, &b), 1);
    }

    fn arb_mat(p: u32) -> impl Strategy<Value = Mat> {
        (0usize..7, 0usize..7).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(0..p, r * c).prop_map(move |d| {
                let f = Field::new(p).unwrap();
                let mut m = Mat::zeros(f, r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, d[i * c + j]);
                    }
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_mat(2)) {
            let n = m.nullspace();
            prop_assert_eq!(m.rank() + n.cols(), m.cols());
            prop_assert!(m.mul(&n).is_zero());
            prop_assert_eq!(n.rank(), n.cols());
        }

        #[test]
        fn rank_nullity_mod_5(m in arb_mat(5)) {
            let n = m.nullspace();
            prop_assert_eq!(m.rank() + n.cols(), m.cols());
            prop_assert!(m.mul(&n).is_zero());
        }

        #[test]
        fn solve_by_substitution(m in arb_mat(3), seed in proptest::collection::vec(0u32..3, 7)) {
            let x: Vec<u32> = seed[..m.cols()].to_vec();
            let b = m.mul_vec(&x);
            let sol = m.solve(&b).expect("consistent system");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }
    }
}
