//! Finite-level machinery for group piles and their model theory:
//! embedding-problem solvers, rigid products and domination, the
//! inverse-system comodel encoding with a bounded co-language evaluator,
//! a compiler from coformulas to ring formulas with a finite-field
//! differential oracle, and exact Haar-measure computation for test
//! sentences over finite Galois data.
//!
//! Start with the runnable programs in `examples/`; each one walks through
//! a major capability. The `pileforge` binary exposes the same operations
//! as batch subcommands over JSON files.

pub mod catalog;
pub mod colang;
pub mod embedding;
pub mod error;
pub mod files;
pub mod group;
pub mod isystem;
pub mod measure;
pub mod pile;
pub mod ringc;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupHom, Subgroup};
pub use pile::{GroupPile, PileHom};

