//! Real-time evolution, vectorized shadow subspace and its generalized
//! eigenproblem.

mod assemble;
mod evolve;
mod gevp;
mod mnes;
mod pipeline;

use thiserror::Error;

pub use assemble::{
    assemble_factorized, assemble_from_shadows, assemble_subspace, hermitize, SubspaceProblem,
};
pub use evolve::{
    evolve_exact, exact_ground_energy, time_grid, EvolvedFamily, GroundState, Propagator,
};
pub use gevp::{solve_generalized, solve_gevp, GevpSolution, DEFAULT_DROP_TOL};
pub use mnes::compute_mnes;
pub use pipeline::{
    shadow_qsd_ground_energy, write_diagnostics_csv, Assembly, Diagnostics, PipelineOptions,
    QsdRunner, Shots, DIAGNOSTICS_HEADER,
};

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("overlap matrix has no direction above the rank cut")]
    DegenerateSubspace,
    #[error(
        "no finite MNES at tolerance {tol}: evolved states capture only {captured:.6} of the ground state within {dim} states"
    )]
    NoFiniteMnes { tol: f64, captured: f64, dim: usize },
    #[error(transparent)]
    Shadow(#[from] crate::shadow::ShadowError),
}
