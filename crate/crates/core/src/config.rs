use serde::{Deserialize, Serialize};

/// Size limits shared by the field backends and the complex builders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    /// Largest residue field order for which discrete logs are tabulated.
    pub residue_field_order: u64,
    /// Trial division bound for rational factorization.
    pub trial_division: u64,
    /// Largest characteristic accepted for `F_p(t)`.
    pub max_characteristic: u64,
    /// Largest degree of an irreducible factor over `F_p`.
    pub max_irreducible_degree: usize,
    /// Largest support size (number of listed places).
    pub max_support: usize,
    /// Largest `n` (and K-degree) accepted by the complex builders.
    pub max_n: usize,
    /// Largest matrix size for bar-resolution chains.
    pub max_matrix_size: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            residue_field_order: 1_000_000,
            trial_division: 1_000_000,
            max_characteristic: 97,
            max_irreducible_degree: 8,
            max_support: 6,
            max_n: 6,
            max_matrix_size: 8,
        }
    }
}

/// Version of the generator and coordinate conventions (unit basis order, residue
/// generators, reduced K-group presentation). Cached or recorded data made under a
/// different version is discarded.
pub const CONVENTION_VERSION: u32 = 1;
