//! Dense exact linear algebra over F_p.
//!
//! Everything is row-oriented: subspaces are row spaces, and elimination picks
//! the first nonzero entry of each column as pivot, so results are
//! reproducible bit for bit.
//!
//! The hot loop is [`Echelon::reduce_into`], which accumulates `v -= c * row`
//! in `u64` and only reduces modulo p when an entry is about to be read or the
//! accumulator could overflow.

use crate::error::{Error, Result};
use crate::field::FieldSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Mat {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of equal length; entries are reduced mod p.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows_width(field, cols, rows)
    }

    pub fn from_rows_width(field: FieldSpec, cols: usize, rows: &[Vec<u32>]) -> Self {
        let p = field.characteristic();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| x % p));
        }
        Mat { field, rows: rows.len(), cols, data }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.characteristic();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let f = self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        let bound = lazy_bound(f);
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            let mut pending = 0;
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                if pending == bound {
                    reduce_all(f, &mut acc);
                    pending = 0;
                }
                axpy(&mut acc, a as u64, other.row(k));
                pending += 1;
            }
            let p = f.characteristic() as u64;
            for (j, a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (a % p) as u32;
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |s, (&a, &b)| f.add(s, f.mul(a, b))))
            .collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + k] = self.get(i, j);
            }
        }
        out
    }

    /// Reduced row echelon form (zero rows dropped) and its pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut e = Echelon::new(self.field, self.cols);
        for i in 0..self.rows {
            e.insert(self.row(i));
        }
        let (rows, pivots) = e.into_rref();
        (Mat::from_rows_width(self.field, self.cols, &rows), pivots)
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.field, self.cols);
        for i in 0..self.rows {
            e.insert(self.row(i));
        }
        e.rank()
    }

    /// `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let f = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(r.get(i, free));
            }
            basis.push(v);
        }
        Subspace::span(f, self.cols, &basis)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let f = self.field;
        let mut aug = Mat::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Mat::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = r.get(i, n + j);
            }
        }
        Some(inv)
    }
}

/// Number of `u64` multiply-adds of size at most `(p-1)^2` that fit on top of
/// an already reduced value without overflow.
#[inline]
pub(crate) fn lazy_bound(f: FieldSpec) -> usize {
    let p = f.characteristic() as u64;
    let sq = (p - 1).max(1) * (p - 1).max(1);
    (((u64::MAX - p) / sq) as usize).clamp(1, 1 << 20)
}

#[inline]
pub(crate) fn reduce_all(f: FieldSpec, acc: &mut [u64]) {
    let p = f.characteristic() as u64;
    for a in acc.iter_mut() {
        *a %= p;
    }
}

#[inline]
pub(crate) fn axpy(acc: &mut [u64], c: u64, row: &[u32]) {
    for (a, &r) in acc.iter_mut().zip(row) {
        *a += c * r as u64;
    }
}

/// Incrementally built row echelon form.
///
/// Stored rows are normalized (pivot entry 1) and each row's first nonzero
/// column is its pivot. They are not reduced against later pivots until
/// [`Echelon::into_rref`].
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    width: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    row_of_col: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(field: FieldSpec, width: usize) -> Self {
        Echelon { field, width, rows: Vec::new(), pivots: Vec::new(), row_of_col: vec![None; width] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.row_of_col[col].is_some()
    }

    /// Reduces `v` against the stored rows; on return `v` is zero in every
    /// pivot column and congruent to the input modulo the row space.
    pub fn reduce_into(&self, v: &mut [u32]) {
        self.reduce_from(v, 0);
    }

    /// As [`Echelon::reduce_into`], assuming `v` vanishes before column `start`.
    fn reduce_from(&self, v: &mut [u32], start: usize) {
        debug_assert_eq!(v.len(), self.width);
        let f = self.field;
        let p = f.characteristic() as u64;
        let bound = lazy_bound(f);
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let mut pending = 0usize;
        for c in start..self.width {
            let Some(r) = self.row_of_col[c] else { continue };
            let coef = acc[c] % p;
            acc[c] = coef;
            if coef == 0 {
                continue;
            }
            if pending == bound {
                reduce_all(f, &mut acc[c..]);
                pending = 0;
            }
            let row = &self.rows[r];
            axpy(&mut acc[c..], p - coef, &row[c..]);
            pending += 1;
        }
        for (x, a) in v.iter_mut().zip(&acc) {
            *x = (a % p) as u32;
        }
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce_into(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the row space. Returns true if the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let p = self.field.characteristic();
        let mut w: Vec<u32> = v.iter().map(|&x| x % p).collect();
        let Some(start) = w.iter().position(|&x| x != 0) else { return false };
        self.reduce_from(&mut w, start);
        self.push_reduced(w)
    }

    fn push_reduced(&mut self, mut w: Vec<u32>) -> bool {
        let Some(c) = w.iter().position(|&x| x != 0) else { return false };
        let f = self.field;
        let inv = f.inv(w[c]);
        if inv != 1 {
            for x in w[c..].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        self.row_of_col[c] = Some(self.rows.len());
        self.rows.push(w);
        self.pivots.push(c);
        true
    }

    /// The stored (normalized, not fully reduced) row whose pivot is `col`.
    pub fn row_for_pivot(&self, col: usize) -> Option<&[u32]> {
        self.row_of_col[col].map(|r| self.rows[r].as_slice())
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut p = self.pivots.clone();
        p.sort_unstable();
        p
    }

    /// Fully reduced rows sorted by pivot column, with the pivot columns.
    pub fn into_rref(self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let f = self.field;
        let p = f.characteristic() as u64;
        let bound = lazy_bound(f);
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&i| self.pivots[i]);
        let pivots: Vec<usize> = order.iter().map(|&i| self.pivots[i]).collect();
        let mut rows: Vec<Option<Vec<u32>>> = self.rows.into_iter().map(Some).collect();
        let mut done: Vec<Vec<u32>> = vec![Vec::new(); order.len()];
        // Process from the last pivot backwards: every row used for
        // elimination is already fully reduced, hence zero in all other pivot
        // columns, so the coefficients read from the original row stay valid.
        for k in (0..order.len()).rev() {
            let row = rows[order[k]].take().unwrap();
            let c0 = pivots[k];
            let mut acc: Vec<u64> = row.iter().map(|&x| x as u64).collect();
            let mut pending = 0;
            for (kk, &c) in pivots.iter().enumerate().skip(k + 1) {
                let coef = row[c] as u64;
                if coef == 0 {
                    continue;
                }
                if pending == bound {
                    reduce_all(f, &mut acc[c0..]);
                    pending = 0;
                }
                axpy(&mut acc[c..], p - coef, &done[kk][c..]);
                pending += 1;
            }
            done[k] = acc.iter().map(|a| (a % p) as u32).collect();
        }
        (done, pivots)
    }
}

/// A linear subspace of F_p^n, stored as a basis in reduced row echelon form.
/// Two spans of the same space have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Mat::zeros(field, 0, ambient_dim), pivots: Vec::new() }
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::identity(field, ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span(field: FieldSpec, ambient_dim: usize, vectors: &[Vec<u32>]) -> Self {
        let mut e = Echelon::new(field, ambient_dim);
        for v in vectors {
            assert_eq!(v.len(), ambient_dim, "vector length differs from ambient dimension");
            e.insert(v);
        }
        Subspace::from_echelon(e)
    }

    pub fn from_echelon(e: Echelon) -> Self {
        let field = e.field;
        let width = e.width;
        let (rows, pivots) = e.into_rref();
        Subspace { ambient_dim: width, basis: Mat::from_rows_width(field, width, &rows), pivots }
    }

    /// Row space of `m`.
    pub fn row_space(m: &Mat) -> Self {
        let (basis, pivots) = m.rref();
        Subspace { ambient_dim: m.cols(), basis, pivots }
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.field(), self.ambient_dim);
        for (i, &c) in self.pivots.iter().enumerate() {
            e.row_of_col[c] = Some(i);
            e.rows.push(self.basis.row(i).to_vec());
            e.pivots.push(c);
        }
        e
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::Dimension(format!(
                "ambient dimensions {} and {} differ",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        self.echelon().contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        let e = self.echelon();
        (0..other.dim()).all(|i| e.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut e = self.echelon();
        for i in 0..other.dim() {
            e.insert(other.basis.row(i));
        }
        Ok(Subspace::from_echelon(e))
    }

    /// Intersection via the left kernel of the stacked bases: a relation
    /// `a A = b B` yields the common vector `a A`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let f = self.field();
        let stacked = self.basis.vstack(&other.basis);
        let rel = stacked.transpose().kernel();
        let a = self.dim();
        let vectors: Vec<Vec<u32>> = (0..rel.dim())
            .map(|k| {
                let coeffs = &rel.basis.row(k)[..a];
                let mut v = vec![0u32; self.ambient_dim];
                for (i, &c) in coeffs.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for (x, &b) in v.iter_mut().zip(self.basis.row(i)) {
                        *x = f.add(*x, f.mul(c, b));
                    }
                }
                v
            })
            .collect();
        Ok(Subspace::span(f, self.ambient_dim, &vectors))
    }

    /// `v` minus its component along the basis: zero in every pivot column.
    pub fn residual(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient_dim);
        let f = self.field();
        let p = f.characteristic() as u64;
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let bound = lazy_bound(f);
        let mut pending = 0;
        for (i, &c) in self.pivots.iter().enumerate() {
            let coef = v[c];
            if coef == 0 {
                continue;
            }
            if pending == bound {
                reduce_all(f, &mut acc);
                pending = 0;
            }
            axpy(&mut acc, p - coef as u64, self.basis.row(i));
            pending += 1;
        }
        acc.iter().map(|&x| (x % p) as u32).collect()
    }

    /// `dim self - dim sub`, requiring `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize> {
        self.check_ambient(sub)?;
        if !self.contains_subspace(sub) {
            return Err(Error::Precondition("quotient_dim: subspace is not contained".into()));
        }
        Ok(self.dim() - sub.dim())
    }
}
