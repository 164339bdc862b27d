use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A sparse integer vector keyed by coordinate index. Zero entries are never stored.
pub type SparseVec = BTreeMap<usize, BigInt>;

/// Adds `k * src` into `dst`, dropping entries that cancel.
pub fn axpy(dst: &mut SparseVec, k: &BigInt, src: &SparseVec) {
    if k.is_zero() {
        return;
    }
    for (&i, v) in src {
        let e = dst.entry(i).or_insert_with(BigInt::zero);
        *e += k * v;
        if e.is_zero() {
            dst.remove(&i);
        }
    }
}

/// Arbitrary-precision integer matrix in column-major sparse storage.
///
/// Columns are the natural unit here: relators of a presentation and images of
/// generators under a morphism are both stored as columns.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, BigInt::one());
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in entries.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Builds a matrix from sparse columns; entries with row index out of range panic.
    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            if let Some((&r, _)) = c.iter().next_back() {
                assert!(r < rows, "row index {r} out of range for {rows} rows");
            }
            debug_assert!(c.values().all(|v| !v.is_zero()));
        }
        IntMatrix { rows, cols: columns.len(), data: columns }
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (&i, v) in col {
                out[i][j] = v.clone();
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.data[c].get(&r).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            self.data[c].remove(&r);
        } else {
            self.data[c].insert(r, v);
        }
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.data[c]
    }

    pub fn columns(&self) -> impl Iterator<Item = &SparseVec> {
        self.data.iter()
    }

    pub fn into_columns(self) -> Vec<SparseVec> {
        self.data
    }

    pub fn push_column(&mut self, col: SparseVec) {
        if let Some((&r, _)) = col.iter().next_back() {
            assert!(r < self.rows);
        }
        self.data.push(col);
        self.cols += 1;
    }

    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, k) in x {
            axpy(&mut out, k, &self.data[j]);
        }
        out
    }

    pub fn apply_dense(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (j, k) in x.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            for (&i, v) in &self.data[j] {
                out[i] += k * v;
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = other.data.iter().map(|c| self.apply(c)).collect();
        IntMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = vec![SparseVec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (&i, v) in col {
                data[i].insert(j, v.clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    /// Keeps only the first `rows` rows.
    pub fn truncate_rows(&self, rows: usize) -> IntMatrix {
        let data = self
            .data
            .iter()
            .map(|c| c.range(..rows).map(|(&i, v)| (i, v.clone())).collect())
            .collect();
        IntMatrix { rows, cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: impl IntoIterator<Item = usize>) -> IntMatrix {
        let data: Vec<SparseVec> = idx.into_iter().map(|j| self.data[j].clone()).collect();
        IntMatrix { rows: self.rows, cols: data.len(), data }
    }

    pub fn is_diagonal(&self) -> bool {
        self.data.iter().enumerate().all(|(j, c)| c.keys().all(|&i| i == j))
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data
            .iter()
            .flat_map(|c| c.values())
            .map(|v| v.abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Converts a dense vector into sparse form.
pub fn sparse_from_dense(x: &[BigInt]) -> SparseVec {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

pub fn dense_from_sparse(x: &SparseVec, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (&i, v) in x {
        out[i] = v.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_views_agree() {
        let m = IntMatrix::from_dense(&[vec![1, 0, 3], vec![0, 0, -2]]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(1, 2), BigInt::from(-2));
        let back = IntMatrix::from_dense(&m.to_dense());
        assert_eq!(back, m);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn setting_zero_removes_entry() {
        let mut m = IntMatrix::identity(2);
        m.set(0, 0, BigInt::zero());
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn product_matches_hand_computation() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), IntMatrix::from_dense(&[vec![2, 1], vec![4, 3]]));
    }
}
