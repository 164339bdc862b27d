//! Finitely generated abelian groups over exact integers: presentations,
//! morphisms, chain complexes and their homology via Smith normal form.

mod group;
mod linalg;
mod matrix;
mod snf;

pub use group::{
    exterior_square, tensor, wedge, wedge_index, FgAbGroup, FgChainComplex, GroupMorphism, Homology,
    ImageSolver, Invariants, Subgroup, TensorMap,
};
pub use linalg::{lattice_basis, IntSolver};
pub use matrix::{axpy, dense_from_sparse, sparse_from_dense, IntMatrix, SparseVec};
pub use snf::{smith_diagonal, smith_normal_form, smith_normal_form_with_inverses, SmithForm};

use num_bigint::BigInt;
use serde_json::Value;

/// JSON number for an arbitrary-precision integer.
pub fn big_to_json(x: &BigInt) -> Value {
    Value::Number(x.to_string().parse().expect("integers are valid JSON numbers"))
}

/// Dense row-major JSON array of arrays.
pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_dense()
            .iter()
            .map(|row| Value::Array(row.iter().map(big_to_json).collect()))
            .collect(),
    )
}

/// `{"torsion": [...], "free_rank": r}`.
pub fn invariants_to_json(inv: &Invariants) -> Value {
    serde_json::json!({
        "torsion": inv.torsion.iter().map(big_to_json).collect::<Vec<_>>(),
        "free_rank": inv.free_rank,
        "description": inv.describe(),
    })
}
