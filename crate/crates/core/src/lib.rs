//! Contextual observables over finite-dimensional von Neumann algebras.
//!
//! The crate computes with the order-theoretic skeleton of matrix algebras
//! `L(C^n)`: projection lattices, spectral families and the spectral order,
//! abelian contexts (partitions of unity), restriction of selfadjoint
//! operators into contexts, observable and state presheaves over finite
//! context families, and their global sections — including explicit sections
//! in dimensions 2 and 3 that no single operator or linear state induces.
//!
//! Modules, bottom to top:
//!
//! - [`linalg`]: complex matrices, Hermitian operators, subspaces, the Jacobi
//!   eigensolver and the shared tolerance policy.
//! - [`plattice`]: the projection lattice (order, meet, join, complement,
//!   commutation).
//! - [`spectral`]: spectral families, the spectral order and its lattice
//!   operations, observable and mirrored observable values.
//! - [`context`]: abelian contexts, inclusion, meets, quasipoints.
//! - [`restrict`]: cores, supports, upper/lower aspects, corner restriction,
//!   coarse-graining.
//! - [`presheaf`]: context families, global sections, validation, gluing,
//!   the three-dimensional counterexample, formal observable sums.
//! - [`states`]: context states, state sections, measure extension, the
//!   two-dimensional counterexample, density fitting, quasistates.
//! - [`generate`]: seeded random generators for test batteries and demos.
//! - [`acceptance`]: the self-test battery with pinned tolerances.

pub mod acceptance;
pub mod context;
mod error;
pub mod generate;
pub mod linalg;
pub mod plattice;
pub mod presheaf;
pub mod restrict;
pub mod spectral;
pub mod states;

pub use error::{Error, Result};
