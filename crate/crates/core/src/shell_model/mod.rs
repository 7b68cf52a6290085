//! Nuclear shell-model Hamiltonians in a Slater-determinant basis.

mod basis;
mod cg;
mod hamiltonian;
mod interaction;

use thiserror::Error;

pub use basis::{enumerate_basis, twice_jz, write_basis_csv, SlaterDeterminant, MAX_ORBITALS};
pub use cg::{clebsch_gordan, MAX_TWICE_J};
pub use hamiltonian::{
    build_hamiltonian, expand_two_body, matrix_element, qubits_for_dimension, term_sparsity,
    verify_term_sparsity, MSchemeHamiltonian, ReducedHamiltonian, SparsityReport, TermSparsity,
    TwoBodyTerm, PAD_OFFSET_MEV,
};
pub use interaction::{
    parse_interaction, InteractionData, Orbital, Parity, Shell, Tbme, NEUTRON, PROTON,
};

#[derive(Debug, Error)]
pub enum ShellModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: undeclared shell `{label}`")]
    UndeclaredShell { line: usize, label: String },
    #[error("invalid interaction: {0}")]
    Validation(String),
    #[error("invalid angular momentum 2j = {twice_j}, 2m = {twice_m}")]
    InvalidQuantumNumbers { twice_j: i32, twice_m: i32 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Diagonal `2Jz` operator on `basis` (padded to the Hamiltonian dimension
/// with zeros).
pub fn twice_jz_operator(
    interaction: &InteractionData,
    basis: &[SlaterDeterminant],
    dim: usize,
) -> nalgebra::DMatrix<f64> {
    let mut jz = nalgebra::DMatrix::zeros(dim, dim);
    for (i, det) in basis.iter().enumerate() {
        jz[(i, i)] = twice_jz(interaction, det) as f64;
    }
    jz
}
