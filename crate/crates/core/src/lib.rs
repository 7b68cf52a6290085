//! Shadow-based quantum subspace diagonalization for shell-model ground
//! states.
//!
//! The crate is split along the pipeline:
//!
//! * [`shell_model`] parses interaction files, enumerates Slater determinants
//!   and builds the reduced Hamiltonian padded to `2^n` states.
//! * [`shadow`] is a dense statevector backend with uniform global Clifford
//!   sampling and classical-shadow snapshots.
//! * [`subspace`] evolves the initial state, assembles the vectorized
//!   shadow subspace `(H̃ˢ, S̃)` and solves the generalized eigenproblem.
//! * [`harness`] runs the scaling studies and backs the `shadowqsd` CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod shadow;
pub mod shell_model;
pub mod subspace;

pub use num_complex::Complex64;
