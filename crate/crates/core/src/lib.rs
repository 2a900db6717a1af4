//! Exact diagonalization of the periodic Ising chain in transverse and
//! longitudinal fields, together with a statistical model for its chaotic
//! eigenfunctions.
//!
//! The crate is organised bottom-up:
//!
//! - [`spin_basis`]: spin configurations, translation orbits, momentum bases
//!   and inversion classification, plus the closed-form orbit counts.
//! - [`hamiltonian`]: the full product-basis Hamiltonian (small `N`, used as an
//!   oracle) and dense fixed-momentum sector matrices.
//! - [`eigensolve`]: dense Hermitian diagonalization with residual checks and an
//!   on-disk cache.
//! - [`moments`]: analytic moments and cumulants of the Hamiltonian in product
//!   states and a brute-force counterpart.
//! - [`statmodel`]: Gaussian, Gram-Charlier and maximum-entropy strength
//!   functions and the resulting spectral density, moment and participation
//!   ratio predictions with symmetry corrections.
//! - [`empirics`]: statistics measured on eigen-decompositions and the
//!   model-versus-data comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod eigensolve;
pub mod empirics;
mod error;
pub mod format;
pub mod hamiltonian;
pub mod moments;
mod params;
pub mod spin_basis;
pub mod statmodel;

pub use error::{Error, Result};
pub use params::ModelParams;
