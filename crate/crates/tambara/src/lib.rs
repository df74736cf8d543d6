//! Exact computation of spectra of prime ideals of bi-incomplete Tambara
//! functors over finite cyclic groups.
//!
//! The crate is organized around four layers:
//!
//! * [`lattice`] and [`transfer`]: subgroup lattices of `C_n`, transfer
//!   systems, compatible pairs, and their exhaustive enumeration;
//! * [`zalg`]: finite-rank integer algebras and the Hermite-normal-form
//!   submodule calculus used for all ideal arithmetic;
//! * [`diagram`] and [`construct`]: Lewis diagrams of bi-incomplete Tambara
//!   functors, their axiom checkers, and a registry of built-in
//!   constructions (Burnside, constant fixed points, initial, ghost);
//! * [`spectra`]: Tambara ideals, generalized products and the Q-condition,
//!   primality refutation, and the spectrum pipelines with their
//!   specialization graphs.
//!
//! [`verify`] bundles the reproduction suite driven by `tambara verify`.

pub mod error;
pub mod matrix;
pub mod qpoly;

pub mod lattice;
pub mod transfer;
pub mod zalg;

pub mod diagram;
pub mod construct;
pub mod spectra;

pub mod verify;

pub use error::{Error, Result};
