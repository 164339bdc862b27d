use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::matrix::{IntMatrix, SparseVec};
use super::snf::{smith_normal_form_with_inverses, SmithForm};

/// Exact solver for `A y = b` over the integers, built on one Smith decomposition of `A`.
#[derive(Clone, Debug)]
pub struct IntSolver {
    rows: usize,
    cols: usize,
    smith: SmithForm,
    diag: Vec<BigInt>,
}

impl IntSolver {
    pub fn new(a: &IntMatrix) -> Self {
        let smith = smith_normal_form_with_inverses(a);
        let diag = smith.diagonal();
        IntSolver { rows: a.rows(), cols: a.cols(), smith, diag }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn smith(&self) -> &SmithForm {
        &self.smith
    }

    /// One integral solution of `A y = b`, or `None` if there is none.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        if let Some((&i, _)) = b.iter().next_back() {
            assert!(i < self.rows, "right-hand side longer than matrix");
        }
        let c = self.smith.u.apply(b);
        let mut z = SparseVec::new();
        for (&i, ci) in &c {
            if i >= self.diag.len() {
                return None;
            }
            let (q, r) = ci.div_rem(&self.diag[i]);
            if !r.is_zero() {
                return None;
            }
            z.insert(i, q);
        }
        Some(self.smith.v.apply(&z))
    }

    pub fn contains(&self, b: &SparseVec) -> bool {
        self.solve(b).is_some()
    }

    /// Basis of the integer kernel of `A`, as columns.
    pub fn kernel_basis(&self) -> IntMatrix {
        self.smith.v.select_columns(self.rank()..self.cols)
    }

    /// Whether the column lattice of `A` is all of `Z^rows`.
    pub fn spans_everything(&self) -> bool {
        self.rank() == self.rows && self.diag.iter().all(|d| d == &BigInt::from(1))
    }
}

/// A basis (as columns) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form_with_inverses(gens);
    let diag = s.diagonal();
    let u_inv = s.u_inv.expect("inverse requested");
    let cols = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut c = u_inv.column(i).clone();
            for v in c.values_mut() {
                *v *= d;
            }
            c
        })
        .collect();
    IntMatrix::from_columns(gens.rows(), cols)
}
