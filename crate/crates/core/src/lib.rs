//! Exact computational algebra for Milnor K-groups of `Q` and `F_p(t)`: the
//! complex of tensor powers of units with Milnor K-groups, its homology at
//! S-unit truncation, and explicit bar-resolution cycles in general linear groups.

pub mod config;
pub mod error;
pub mod fgab;
pub mod fields;
pub mod milnor;
pub mod bncomplex;
pub mod barcycles;

pub use error::{Error, Result};
