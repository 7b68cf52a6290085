//! Classical-shadow snapshots and the inverse measurement channel.
//!
//! A snapshot is `φ = C†|z⟩` for a uniformly random Clifford `C` and an
//! outcome `z` drawn from `C|ψ⟩`. The shadow estimate of `|ψ⟩⟨ψ|` is
//! `ρ̂ = (1/M) Σ_k [(d+1)|φ_k⟩⟨φ_k| − I]`.
//!
//! Snapshot `k` of a shadow with key `s` uses the stream
//! `derive_seed(s, [k])`; the Clifford is drawn first, then the outcome.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::clifford::sample_clifford_circuit;
use super::rng::{derive_seed, stream_rng};
use super::state::{apply_gates_in_place, sample_amplitudes, StateVector, MAX_QUBITS};
use super::ShadowError;

/// Snapshots summed sequentially per chunk before the chunk partial sums
/// are combined pairwise. Fixed so results do not depend on scheduling.
const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowSnapshot {
    /// `C†|z⟩`.
    pub phi: StateVector,
    pub z: usize,
    /// Seed that regenerates the Clifford (and the outcome draw).
    pub clifford_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalShadow {
    n_qubits: usize,
    snapshots: Vec<ShadowSnapshot>,
}

impl ClassicalShadow {
    pub fn new(n_qubits: usize, snapshots: Vec<ShadowSnapshot>) -> Result<Self, ShadowError> {
        if snapshots.is_empty() {
            return Err(ShadowError::EmptyShadow);
        }
        if snapshots.iter().any(|s| s.phi.n_qubits() != n_qubits) {
            return Err(ShadowError::Dimension(
                "snapshots disagree on the qubit count".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            snapshots,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[ShadowSnapshot] {
        &self.snapshots
    }
}

fn check_state(state: &StateVector) -> Result<(), ShadowError> {
    if state.n_qubits() == 0 || state.n_qubits() > MAX_QUBITS {
        return Err(ShadowError::Dimension(format!(
            "shadows need 1..={MAX_QUBITS} qubits, got {}",
            state.n_qubits()
        )));
    }
    Ok(())
}

/// One snapshot of `state` from the stream `clifford_seed`.
pub fn draw_snapshot(
    state: &StateVector,
    clifford_seed: u64,
) -> Result<ShadowSnapshot, ShadowError> {
    check_state(state)?;
    let n = state.n_qubits();
    let mut rng = stream_rng(clifford_seed);
    let circuit = sample_clifford_circuit(n, &mut rng);
    let mut work = state.amplitudes().to_vec();
    apply_gates_in_place(&mut work, &circuit, false);
    let z = sample_amplitudes(&work, &mut rng)?;
    let mut phi = StateVector::basis(n, z);
    apply_gates_in_place(phi.amps_mut(), &circuit, true);
    Ok(ShadowSnapshot {
        phi,
        z,
        clifford_seed,
    })
}

/// Rebuilds a snapshot from its recorded seed and outcome.
pub fn replay_snapshot(
    n_qubits: usize,
    clifford_seed: u64,
    z: usize,
) -> Result<ShadowSnapshot, ShadowError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS || z >= 1 << n_qubits {
        return Err(ShadowError::Dimension(format!(
            "outcome {z} on {n_qubits} qubits"
        )));
    }
    let mut rng = stream_rng(clifford_seed);
    let circuit = sample_clifford_circuit(n_qubits, &mut rng);
    let mut phi = StateVector::basis(n_qubits, z);
    apply_gates_in_place(phi.amps_mut(), &circuit, true);
    Ok(ShadowSnapshot {
        phi,
        z,
        clifford_seed,
    })
}

/// `M` snapshots of `state`, snapshot `k` keyed by `derive_seed(shadow_seed, [k])`.
pub fn take_snapshots(
    state: &StateVector,
    shots: usize,
    shadow_seed: u64,
) -> Result<ClassicalShadow, ShadowError> {
    if shots == 0 {
        return Err(ShadowError::EmptyShadow);
    }
    check_state(state)?;
    let snapshots = (0..shots)
        .into_par_iter()
        .map(|k| draw_snapshot(state, derive_seed(shadow_seed, &[k as u64])))
        .collect::<Result<Vec<_>, _>>()?;
    ClassicalShadow::new(state.n_qubits(), snapshots)
}

/// Upper triangle of `|φ⟩⟨φ|` added into `acc`; exact zeros of the
/// (stabilizer) snapshot are skipped.
fn accumulate_projector(acc: &mut DMatrix<Complex64>, phi: &[Complex64], support: &mut Vec<usize>) {
    support.clear();
    support.extend(
        phi.iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(i, _)| i),
    );
    for (jj, &b) in support.iter().enumerate() {
        let cb = phi[b].conj();
        for &a in &support[..=jj] {
            acc[(a, b)] += phi[a] * cb;
        }
    }
}

fn pairwise_sum(mut parts: Vec<DMatrix<Complex64>>) -> DMatrix<Complex64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a += b;
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().expect("at least one part")
}

/// Applies the inverse channel to the upper-triangular projector sum.
fn finish(mut upper: DMatrix<Complex64>, shots: usize) -> DMatrix<Complex64> {
    let d = upper.nrows();
    let scale = (d as f64 + 1.0) / shots as f64;
    for b in 0..d {
        for a in 0..b {
            let v = upper[(a, b)] * scale;
            upper[(a, b)] = v;
            upper[(b, a)] = v.conj();
        }
        let diag = upper[(b, b)].re * scale - 1.0;
        upper[(b, b)] = Complex64::new(diag, 0.0);
    }
    upper
}

/// `ρ̂ = (1/M) Σ_k [(d+1)|φ_k⟩⟨φ_k| − I]`, Hermitian by construction.
pub fn materialize(shadow: &ClassicalShadow) -> DMatrix<Complex64> {
    let d = shadow.dim();
    let parts: Vec<DMatrix<Complex64>> = shadow
        .snapshots
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = DMatrix::zeros(d, d);
            let mut support = Vec::with_capacity(d);
            for s in chunk {
                accumulate_projector(&mut acc, s.phi.amplitudes(), &mut support);
            }
            acc
        })
        .collect();
    finish(pairwise_sum(parts), shadow.len())
}

/// Same estimate as `materialize(&take_snapshots(state, shots, seed)?)`,
/// bit for bit, without storing the snapshots.
pub fn estimate_density(
    state: &StateVector,
    shots: usize,
    shadow_seed: u64,
) -> Result<DMatrix<Complex64>, ShadowError> {
    if shots == 0 {
        return Err(ShadowError::EmptyShadow);
    }
    check_state(state)?;
    let d = state.dim();
    let n_chunks = shots.div_ceil(CHUNK);
    let parts = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::zeros(d, d);
            let mut support = Vec::with_capacity(d);
            for k in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let snap = draw_snapshot(state, derive_seed(shadow_seed, &[k as u64]))?;
                accumulate_projector(&mut acc, snap.phi.amplitudes(), &mut support);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, ShadowError>>()?;
    Ok(finish(pairwise_sum(parts), shots))
}
