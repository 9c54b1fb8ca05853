//! Row-compressed sparse matrices over a [`Coeff`] field.

use rayon::prelude::*;

use crate::scalar::Coeff;

/// Square or rectangular matrix stored as sorted `(column, value)` rows with
/// no explicit zeros. Products are row-parallel; each row is accumulated in a
/// fixed order, so float results do not depend on the thread count.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

/// Rows at or above this size are processed in parallel.
const PAR_ROWS: usize = 64;

impl<T: Coeff> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| T::one()).collect())
    }

    pub fn diagonal(d: Vec<T>) -> Self {
        let n = d.len();
        let rows =
            d.into_iter().enumerate().map(|(i, x)| if x.is_zero() { Vec::new() } else { vec![(i, x)] }).collect();
        SparseMatrix { nrows: n, ncols: n, rows }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, trips: Vec<(usize, usize, T)>) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
        for (i, j, x) in trips {
            assert!(i < nrows && j < ncols, "triplet out of range");
            rows[i].push((j, x));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for (j, x) in row.drain(..) {
                match merged.last_mut() {
                    Some((lj, lx)) if *lj == j => *lx = lx.add_ref(&x),
                    _ => merged.push((j, x)),
                }
            }
            merged.retain(|e| !e.1.is_zero());
            *row = merged;
        }
        SparseMatrix { nrows, ncols, rows }
    }

    pub fn from_dense(d: &[Vec<T>]) -> Self {
        let nrows = d.len();
        let ncols = d.first().map_or(0, |r| r.len());
        let rows = d
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect())
            .collect();
        SparseMatrix { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => T::zero(),
        }
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, _)| i == j)
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (i, j, x) in self.entries() {
            d[i][j] = x.clone();
        }
        d
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U + Sync) -> SparseMatrix<U> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .filter_map(|(j, x)| {
                        let y = f(x);
                        (!y.is_zero()).then_some((*j, y))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn try_map<U: Coeff, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<SparseMatrix<U>, E> {
        let mut rows = Vec::with_capacity(self.nrows);
        for r in &self.rows {
            let mut out = Vec::with_capacity(r.len());
            for (j, x) in r {
                let y = f(x)?;
                if !y.is_zero() {
                    out.push((*j, y));
                }
            }
            rows.push(out);
        }
        Ok(SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows })
    }

    fn merge_rows(a: &[(usize, T)], b: &[(usize, T)], sign: bool) -> Vec<(usize, T)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut k) = (0, 0);
        while i < a.len() || k < b.len() {
            let take_a = k == b.len() || (i < a.len() && a[i].0 < b[k].0);
            let take_b = i == a.len() || (k < b.len() && b[k].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let x = if sign { b[k].1.neg_ref() } else { b[k].1.clone() };
                out.push((b[k].0, x));
                k += 1;
            } else {
                let x = if sign { a[i].1.sub_ref(&b[k].1) } else { a[i].1.add_ref(&b[k].1) };
                if !x.is_zero() {
                    out.push((a[i].0, x));
                }
                i += 1;
                k += 1;
            }
        }
        out
    }

    fn zip_rows(&self, other: &Self, sign: bool) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "shape mismatch");
        let rows = if self.nrows >= PAR_ROWS {
            self.rows.par_iter().zip(other.rows.par_iter()).map(|(a, b)| Self::merge_rows(a, b, sign)).collect()
        } else {
            self.rows.iter().zip(&other.rows).map(|(a, b)| Self::merge_rows(a, b, sign)).collect()
        };
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_rows(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_rows(other, true)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg_ref())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zeros(self.nrows, self.ncols);
        }
        self.map(|x| x.mul_ref(c))
    }

    /// Multiply row `i` by `d[i]`, i.e. `diag(d) · self`.
    pub fn scale_rows(&self, d: &[T]) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(d)
            .map(|(r, di)| {
                r.iter()
                    .filter_map(|(j, x)| {
                        let y = di.mul_ref(x);
                        (!y.is_zero()).then_some((*j, y))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    /// Multiply column `j` by `d[j]`, i.e. `self · diag(d)`.
    pub fn scale_cols(&self, d: &[T]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .filter_map(|(j, x)| {
                        let y = x.mul_ref(&d[*j]);
                        (!y.is_zero()).then_some((*j, y))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    fn mul_row(a: &[(usize, T)], b: &Self) -> Vec<(usize, T)> {
        let mut acc: Vec<Option<T>> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        if a.len() == 1 {
            let (k, x) = &a[0];
            return b.rows[*k]
                .iter()
                .filter_map(|(j, y)| {
                    let v = x.mul_ref(y);
                    (!v.is_zero()).then_some((*j, v))
                })
                .collect();
        }
        acc.resize(b.ncols, None);
        for (k, x) in a {
            for (j, y) in &b.rows[*k] {
                let v = x.mul_ref(y);
                match &mut acc[*j] {
                    Some(s) => *s = s.add_ref(&v),
                    slot @ None => {
                        *slot = Some(v);
                        touched.push(*j);
                    }
                }
            }
        }
        touched.sort_unstable();
        touched.into_iter().filter_map(|j| acc[j].take().filter(|v| !v.is_zero()).map(|v| (j, v))).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "shape mismatch");
        let rows = if self.nrows >= PAR_ROWS {
            self.rows.par_iter().map(|a| Self::mul_row(a, other)).collect()
        } else {
            self.rows.iter().map(|a| Self::mul_row(a, other)).collect()
        };
        SparseMatrix { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.ncols, v.len(), "shape mismatch");
        let row = |r: &Vec<(usize, T)>| {
            r.iter().fold(T::zero(), |acc, (j, x)| if v[*j].is_zero() { acc } else { acc.add_ref(&x.mul_ref(&v[*j])) })
        };
        if self.nrows >= PAR_ROWS {
            self.rows.par_iter().map(row).collect()
        } else {
            self.rows.iter().map(row).collect()
        }
    }

    /// Plain Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let nr = self.nrows * other.nrows;
        let nc = self.ncols * other.ncols;
        let mut rows = Vec::with_capacity(nr);
        for ra in &self.rows {
            for rb in &other.rows {
                let mut out = Vec::with_capacity(ra.len() * rb.len());
                for (ja, xa) in ra {
                    for (jb, xb) in rb {
                        out.push((ja * other.ncols + jb, xa.mul_ref(xb)));
                    }
                }
                out.retain(|e| !e.1.is_zero());
                rows.push(out);
            }
        }
        SparseMatrix { nrows: nr, ncols: nc, rows }
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.ncols];
        for (i, j, x) in self.entries() {
            rows[j].push((i, x.clone()));
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.nrows);
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, x)| x.magnitude()).fold(0.0, f64::max)
    }

    /// First stored entry, for failure reports.
    pub fn first_nonzero(&self) -> Option<(usize, usize, T)> {
        self.entries().next().map(|(i, j, x)| (i, j, x.clone()))
    }

    /// Restriction to the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let out = rows
            .iter()
            .map(|&i| {
                let mut r: Vec<(usize, T)> = self.rows[i]
                    .iter()
                    .filter(|(j, _)| pos[*j] != usize::MAX)
                    .map(|(j, x)| (pos[*j], x.clone()))
                    .collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        SparseMatrix { nrows: rows.len(), ncols: cols.len(), rows: out }
    }
}

/// `max |a_ij| / max(1, max |b_ij|, max |c_ij|)`: residual of a float identity
/// relative to the size of the operators involved.
pub fn normalized_residual<T: Coeff>(res: &SparseMatrix<T>, scales: &[&SparseMatrix<T>]) -> f64 {
    let s = scales.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
    res.max_abs() / s
}

/// Dense vector helpers.
pub mod vecops {
    use crate::scalar::Coeff;

    pub fn add<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        a.iter().zip(b).map(|(x, y)| x.add_ref(y)).collect()
    }

    pub fn sub<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        a.iter().zip(b).map(|(x, y)| x.sub_ref(y)).collect()
    }

    pub fn scale<T: Coeff>(a: &[T], c: &T) -> Vec<T> {
        a.iter().map(|x| x.mul_ref(c)).collect()
    }

    pub fn is_zero<T: Coeff>(a: &[T]) -> bool {
        a.iter().all(Coeff::is_zero)
    }

    pub fn max_abs<T: Coeff>(a: &[T]) -> f64 {
        a.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    /// Index of the first nonzero entry.
    pub fn pivot<T: Coeff>(a: &[T]) -> Option<usize> {
        a.iter().position(|x| !x.is_zero())
    }

    /// Index of the largest-magnitude entry (first on ties); for float vectors.
    pub fn pivot_max(a: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, x) in a.iter().enumerate() {
            if best.is_none_or(|(_, b)| x.abs() > b) && *x != 0.0 {
                best = Some((i, x.abs()));
            }
        }
        best.map(|b| b.0)
    }

    pub fn norm2(a: &[f64]) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(d: &[&[f64]]) -> SparseMatrix<f64> {
        SparseMatrix::from_dense(&d.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn products() {
        let a = m(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(a.matmul(&b), m(&[&[2.0, 1.0], &[3.0, 0.0]]));
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(a.commutator(&a), SparseMatrix::zeros(2, 2));
    }

    #[test]
    fn kron_shape_and_entries() {
        let a = m(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let i = SparseMatrix::<f64>::identity(2);
        let k = a.kron(&i);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.get(0, 2), 2.0);
        assert_eq!(k.get(3, 3), 3.0);
        assert_eq!(k.get(0, 1), 0.0);
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = m(&[&[1.0, -1.0]]);
        let b = m(&[&[1.0], &[1.0]]);
        assert!(a.matmul(&b).is_zero());
        assert_eq!(a.sub(&a).nnz(), 0);
    }

    #[test]
    fn submatrix_and_transpose() {
        let a = m(&[&[1.0, 2.0, 0.0], &[0.0, 3.0, 4.0], &[5.0, 0.0, 6.0]]);
        assert_eq!(a.submatrix(&[0, 2], &[0, 2]), m(&[&[1.0, 0.0], &[5.0, 6.0]]));
        assert_eq!(a.transpose().get(2, 1), 4.0);
    }
}
