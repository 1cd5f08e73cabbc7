//! Combinatorics of manifolds with corners whose faces are acyclic: face
//! posets, structural checks, recognition as products of simplices and
//! polygon-like pieces, characteristic functions, invariants and shellings.

pub mod charfun;
pub mod checks;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod poset;
pub mod recognize;
pub mod shelling;

pub use error::{Error, Result};
