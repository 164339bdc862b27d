//! Smith normal form over the integers.
//!
//! Pivots are always the entry of least absolute value in the active block,
//! ties broken by lowest `(row, col)`. Work starts on sparse rows and switches
//! to dense storage once the active block is more than half full.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, SparseVec};

/// Result of a Smith decomposition `U * M * V = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// `U^-1`, present when requested.
    pub u_inv: Option<IntMatrix>,
    /// `V^-1`, present when requested.
    pub v_inv: Option<IntMatrix>,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order (each divides the next).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i))
            .take_while(|v| !v.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    run(m, true, false)
}

/// Like [`smith_normal_form`] but also tracks the inverses of both transforms.
pub fn smith_normal_form_with_inverses(m: &IntMatrix) -> SmithForm {
    run(m, true, true)
}

/// Only the nonzero diagonal of the Smith form; skips the transforms.
pub fn smith_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut w = Work::new(m, false, false);
    w.reduce();
    w.diagonal()
}

fn run(m: &IntMatrix, transforms: bool, inverses: bool) -> SmithForm {
    let mut w = Work::new(m, transforms, inverses);
    w.reduce();
    w.finish()
}

/// Quotient rounding to nearest, so the remainder has absolute value at most |b|/2.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = &r * 2;
    if twice.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Matrix receiving row operations only; used for the transforms (column
/// operations are applied to a stored transpose).
struct RowOps {
    rows: Vec<SparseVec>,
}

impl RowOps {
    fn identity(n: usize) -> Self {
        RowOps { rows: (0..n).map(|i| BTreeMap::from([(i, BigInt::one())])).collect() }
    }

    fn add(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let src_row = self.rows[src].clone();
        super::matrix::axpy(&mut self.rows[dst], k, &src_row);
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    fn negate(&mut self, r: usize) {
        for v in self.rows[r].values_mut() {
            *v = -&*v;
        }
    }

    /// The matrix whose rows are stored here.
    fn as_matrix(&self, cols: usize) -> IntMatrix {
        IntMatrix::from_columns(cols, self.rows.clone()).transpose()
    }

    /// The transpose of the stored matrix.
    fn as_transposed(&self, rows: usize) -> IntMatrix {
        IntMatrix::from_columns(rows, self.rows.clone())
    }
}

enum Store {
    Sparse { rows: Vec<SparseVec>, cols: Vec<BTreeSet<usize>> },
    Dense(Vec<Vec<BigInt>>),
}

struct Work {
    nrows: usize,
    ncols: usize,
    store: Store,
    nnz: usize,
    u: Option<RowOps>,
    u_inv_t: Option<RowOps>,
    v_t: Option<RowOps>,
    v_inv: Option<RowOps>,
    done: usize,
}

impl Work {
    fn new(m: &IntMatrix, transforms: bool, inverses: bool) -> Self {
        let (nrows, ncols) = (m.rows(), m.cols());
        let mut rows = vec![SparseVec::new(); nrows];
        let mut cols = vec![BTreeSet::new(); ncols];
        for (j, col) in m.columns().enumerate() {
            for (&i, v) in col {
                rows[i].insert(j, v.clone());
                cols[j].insert(i);
            }
        }
        let inv = transforms && inverses;
        Work {
            nrows,
            ncols,
            nnz: m.nnz(),
            store: Store::Sparse { rows, cols },
            u: transforms.then(|| RowOps::identity(nrows)),
            u_inv_t: inv.then(|| RowOps::identity(nrows)),
            v_t: transforms.then(|| RowOps::identity(ncols)),
            v_inv: inv.then(|| RowOps::identity(ncols)),
            done: 0,
        }
    }

    fn get(&self, r: usize, c: usize) -> BigInt {
        match &self.store {
            Store::Sparse { rows, .. } => rows[r].get(&c).cloned().unwrap_or_default(),
            Store::Dense(d) => d[r][c].clone(),
        }
    }

    fn maybe_densify(&mut self) {
        let active_r = self.nrows - self.done;
        let active_c = self.ncols - self.done;
        let area = active_r * active_c;
        let active_nnz = self.nnz.saturating_sub(self.done);
        if let Store::Sparse { rows, .. } = &self.store {
            if area > 0 && active_nnz * 2 > area {
                let mut dense = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
                for (i, row) in rows.iter().enumerate() {
                    for (&j, v) in row {
                        dense[i][j] = v.clone();
                    }
                }
                self.store = Store::Dense(dense);
            }
        }
    }

    /// row dst += k * row src
    #[allow(clippy::needless_range_loop)]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        match &mut self.store {
            Store::Sparse { rows, cols } => {
                let src_row = rows[src].clone();
                for (j, v) in src_row {
                    let e = rows[dst].entry(j).or_insert_with(BigInt::zero);
                    let was_zero = e.is_zero();
                    *e += k * v;
                    if e.is_zero() {
                        rows[dst].remove(&j);
                        cols[j].remove(&dst);
                        self.nnz -= 1;
                    } else if was_zero {
                        cols[j].insert(dst);
                        self.nnz += 1;
                    }
                }
            }
            Store::Dense(d) => {
                for j in 0..self.ncols {
                    if d[src][j].is_zero() {
                        continue;
                    }
                    let was_zero = d[dst][j].is_zero();
                    let add = k * &d[src][j];
                    d[dst][j] += add;
                    match (was_zero, d[dst][j].is_zero()) {
                        (true, false) => self.nnz += 1,
                        (false, true) => self.nnz -= 1,
                        _ => {}
                    }
                }
            }
        }
        if let Some(u) = &mut self.u {
            u.add(dst, src, k);
        }
        if let Some(ui) = &mut self.u_inv_t {
            // U^-1 picks up col src -= k col dst
            ui.add(src, dst, &-k);
        }
    }

    /// col dst += k * col src
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        match &mut self.store {
            Store::Sparse { rows, cols } => {
                let src_rows: Vec<usize> = cols[src].iter().copied().collect();
                for i in src_rows {
                    let add = k * &rows[i][&src];
                    let e = rows[i].entry(dst).or_insert_with(BigInt::zero);
                    let was_zero = e.is_zero();
                    *e += add;
                    if e.is_zero() {
                        rows[i].remove(&dst);
                        cols[dst].remove(&i);
                        self.nnz -= 1;
                    } else if was_zero {
                        cols[dst].insert(i);
                        self.nnz += 1;
                    }
                }
            }
            Store::Dense(d) => {
                for row in d.iter_mut() {
                    if row[src].is_zero() {
                        continue;
                    }
                    let was_zero = row[dst].is_zero();
                    let add = k * &row[src];
                    row[dst] += add;
                    match (was_zero, row[dst].is_zero()) {
                        (true, false) => self.nnz += 1,
                        (false, true) => self.nnz -= 1,
                        _ => {}
                    }
                }
            }
        }
        if let Some(v) = &mut self.v_t {
            v.add(dst, src, k);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.add(src, dst, &-k);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        match &mut self.store {
            Store::Sparse { rows, cols } => {
                for j in rows[a].keys() {
                    cols[*j].remove(&a);
                }
                for j in rows[b].keys() {
                    cols[*j].remove(&b);
                }
                rows.swap(a, b);
                for j in rows[a].keys() {
                    cols[*j].insert(a);
                }
                for j in rows[b].keys() {
                    cols[*j].insert(b);
                }
            }
            Store::Dense(d) => d.swap(a, b),
        }
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
        if let Some(ui) = &mut self.u_inv_t {
            ui.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        match &mut self.store {
            Store::Sparse { rows, cols } => {
                let ra: Vec<usize> = cols[a].iter().copied().collect();
                let rb: Vec<usize> = cols[b].iter().copied().collect();
                let mut moved_a = Vec::new();
                for &i in &ra {
                    moved_a.push((i, rows[i].remove(&a).unwrap()));
                }
                let mut moved_b = Vec::new();
                for &i in &rb {
                    moved_b.push((i, rows[i].remove(&b).unwrap()));
                }
                for (i, v) in moved_a {
                    rows[i].insert(b, v);
                }
                for (i, v) in moved_b {
                    rows[i].insert(a, v);
                }
                cols.swap(a, b);
            }
            Store::Dense(d) => {
                for row in d.iter_mut() {
                    row.swap(a, b);
                }
            }
        }
        if let Some(v) = &mut self.v_t {
            v.swap(a, b);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap(a, b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        match &mut self.store {
            Store::Sparse { rows, .. } => {
                for v in rows[r].values_mut() {
                    *v = -&*v;
                }
            }
            Store::Dense(d) => {
                for v in d[r].iter_mut() {
                    *v = -&*v;
                }
            }
        }
        if let Some(u) = &mut self.u {
            u.negate(r);
        }
        if let Some(ui) = &mut self.u_inv_t {
            ui.negate(r);
        }
    }

    /// Entry of least absolute value in the active block, ties by lowest (row, col).
    fn min_entry(&self) -> Option<(usize, usize)> {
        let t = self.done;
        let mut best: Option<(BigInt, usize, usize)> = None;
        let mut consider = |i: usize, j: usize, v: &BigInt| {
            let a = v.abs();
            let better = match &best {
                None => true,
                Some((b, bi, bj)) => a < *b || (a == *b && (i, j) < (*bi, *bj)),
            };
            if better {
                best = Some((a, i, j));
            }
        };
        match &self.store {
            Store::Sparse { rows, .. } => {
                for (i, row) in rows.iter().enumerate().skip(t) {
                    for (&j, v) in row.range(t..) {
                        consider(i, j, v);
                    }
                }
            }
            Store::Dense(d) => {
                for (i, row) in d.iter().enumerate().skip(t) {
                    for (j, v) in row.iter().enumerate().skip(t) {
                        if !v.is_zero() {
                            consider(i, j, v);
                        }
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn col_nonzero_rows(&self, c: usize, from: usize) -> Vec<usize> {
        match &self.store {
            Store::Sparse { cols, .. } => cols[c].range(from..).copied().collect(),
            Store::Dense(d) => (from..self.nrows).filter(|&i| !d[i][c].is_zero()).collect(),
        }
    }

    fn row_nonzero_cols(&self, r: usize, from: usize) -> Vec<usize> {
        match &self.store {
            Store::Sparse { rows, .. } => rows[r].range(from..).map(|(&j, _)| j).collect(),
            Store::Dense(d) => (from..self.ncols).filter(|&j| !d[r][j].is_zero()).collect(),
        }
    }

    /// First active entry (row-major) not divisible by `p`.
    fn non_divisible(&self, p: &BigInt) -> Option<usize> {
        let t = self.done + 1;
        match &self.store {
            Store::Sparse { rows, .. } => {
                for (i, row) in rows.iter().enumerate().skip(t) {
                    if row.range(t..).any(|(_, v)| !v.is_multiple_of(p)) {
                        return Some(i);
                    }
                }
                None
            }
            Store::Dense(d) => {
                (t..self.nrows).find(|&i| d[i][t..].iter().any(|v| !v.is_multiple_of(p)))
            }
        }
    }

    fn reduce(&mut self) {
        let steps = self.nrows.min(self.ncols);
        while self.done < steps {
            self.maybe_densify();
            let Some((pr, pc)) = self.min_entry() else { break };
            let t = self.done;
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                let p = self.get(t, t);
                let mut dirty = false;
                for r in self.col_nonzero_rows(t, t + 1) {
                    let q = nearest_quotient(&self.get(r, t), &p);
                    self.add_row(r, t, &-q);
                    if !self.get(r, t).is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    self.bring_min_in_col(t);
                    continue;
                }
                for c in self.row_nonzero_cols(t, t + 1) {
                    let q = nearest_quotient(&self.get(t, c), &p);
                    self.add_col(c, t, &-q);
                    if !self.get(t, c).is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    self.bring_min_in_row(t);
                    continue;
                }
                if let Some(r) = self.non_divisible(&p) {
                    self.add_row(t, r, &BigInt::one());
                    continue;
                }
                break;
            }
            if self.get(t, t).is_negative() {
                self.negate_row(t);
            }
            self.done += 1;
        }
    }

    fn bring_min_in_col(&mut self, t: usize) {
        let mut best: Option<(BigInt, usize)> = None;
        for r in self.col_nonzero_rows(t, t) {
            let a = self.get(r, t).abs();
            if best.as_ref().is_none_or(|(b, _)| a < *b) {
                best = Some((a, r));
            }
        }
        if let Some((_, r)) = best {
            self.swap_rows(t, r);
        }
    }

    fn bring_min_in_row(&mut self, t: usize) {
        let mut best: Option<(BigInt, usize)> = None;
        for c in self.row_nonzero_cols(t, t) {
            let a = self.get(t, c).abs();
            if best.as_ref().is_none_or(|(b, _)| a < *b) {
                best = Some((a, c));
            }
        }
        if let Some((_, c)) = best {
            self.swap_cols(t, c);
        }
    }

    fn diagonal(&self) -> Vec<BigInt> {
        (0..self.done).map(|i| self.get(i, i)).collect()
    }

    fn finish(self) -> SmithForm {
        let diag = self.diagonal();
        let d = IntMatrix::diagonal(self.nrows, self.ncols, &diag);
        let u = self.u.as_ref().map(|u| u.as_matrix(self.nrows)).unwrap();
        let v = self.v_t.as_ref().map(|v| v.as_transposed(self.ncols)).unwrap();
        let u_inv = self.u_inv_t.as_ref().map(|x| x.as_transposed(self.nrows));
        let v_inv = self.v_inv.as_ref().map(|x| x.as_matrix(self.ncols));
        SmithForm { u, d, v, u_inv, v_inv }
    }
}
