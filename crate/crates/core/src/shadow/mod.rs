//! Dense statevector backend and Clifford classical shadows.

mod clifford;
mod dump;
mod rng;
mod snapshot;
mod state;

use thiserror::Error;

pub use clifford::{sample_clifford, sample_clifford_circuit, CliffordElement, PauliRow, Tableau};
pub use dump::{read_snapshot_dump, replay_dump, write_snapshot_dump, DUMP_MAGIC};
pub use rng::{derive_seed, splitmix64, stream_rng};
pub use snapshot::{
    draw_snapshot, estimate_density, materialize, replay_snapshot, take_snapshots, ClassicalShadow,
    ShadowSnapshot,
};
pub use state::{apply_circuit, born_sample, Gate, StateVector, MAX_QUBITS};

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("qubit index out of range: {0}")]
    QubitOutOfRange(String),
    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("a shadow needs at least one snapshot")]
    EmptyShadow,
    #[error("snapshot dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
