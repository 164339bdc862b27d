//! Driver for the `kmilnor` command: configuration, the on-disk K-group cache,
//! golden-value regression and the randomized verification suites.

pub mod cache;
pub mod commands;
pub mod config;
pub mod golden;
pub mod random;
pub mod verify;

pub use commands::{run, Outcome};
pub use config::{Cli, RunConfig};
