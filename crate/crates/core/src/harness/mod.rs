//! Experiment configs, built-in models, scaling studies and their CSV
//! outputs.

mod config;
mod fit;
mod models;
mod run;
mod studies;

use thiserror::Error;

pub use config::{parse_count_list, ExperimentConfig, Study};
pub use fit::{fit_line, fit_loglog_slope, fit_semilog_slope, mean_std, median, quantile, LineFit};
pub use models::{
    he6like_matrix, load_hamiltonian, pairing_hamiltonian, toy_hamiltonian, ModelSource, Nucleons,
    ToyModel, PAIRING_INTERACTION,
};
pub use run::{
    exact_csv, mnes_csv, read_runs_csv, replay_output, run_config, run_exact, run_mnes, run_study,
    write_outputs, Artifacts, RunOutcome, BIAS_HEADER, EXACT_HEADER, FIT_HEADER, MNES_HEADER,
    RUNS_HEADER, SHOTS_HEADER, SUBSPACE_HEADER,
};
pub use studies::{
    bias_variance_on, config_mnes, matrix_element_trace, replay_record, run_bias_variance_study,
    run_shots_scaling, run_subspace_scaling, shots_run_seed, shots_scaling_on, subspace_run_seed,
    subspace_scaling_on, BiasRow, BiasStudy, IndexPattern, RunRecord, ScalingResult, ScalingRow,
    LOWER_BOUND_SLACK,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("{0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Model(#[from] crate::shell_model::ShellModelError),
    #[error(transparent)]
    Subspace(#[from] crate::subspace::SubspaceError),
    #[error(transparent)]
    Shadow(#[from] crate::shadow::ShadowError),
}

impl HarnessError {
    /// `2` for bad configs, inputs or output paths, `3` for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Output(_) | HarnessError::Model(_) => 2,
            _ => 3,
        }
    }
}
