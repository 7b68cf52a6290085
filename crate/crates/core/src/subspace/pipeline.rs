//! End-to-end shadow-based subspace diagonalization.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::assemble::{assemble_factorized, assemble_subspace, SubspaceProblem};
use super::evolve::{exact_ground_energy, Propagator};
use super::gevp::{solve_gevp, DEFAULT_DROP_TOL};
use super::SubspaceError;
use crate::shadow::{derive_seed, estimate_density, take_snapshots, StateVector};
use crate::shell_model::ReducedHamiltonian;

/// Snapshots per evolved state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    /// Exact density matrices, the infinite-shot limit.
    Exact,
    Finite(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assembly {
    Dense,
    Factorized,
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub drop_tol: f64,
    pub assembly: Assembly,
    /// Defaults to `|0…0⟩`.
    pub initial: Option<StateVector>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            drop_tol: DEFAULT_DROP_TOL,
            assembly: Assembly::Dense,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub e_s: f64,
    pub e0: f64,
    pub epsilon: f64,
    pub kept_rank: usize,
    pub s_spectrum: Vec<f64>,
    pub shots_per_state: Vec<usize>,
    /// Reported only; enters no computation.
    pub spectral_bound: f64,
}

/// Holds the spectral decomposition and reference energy so repeated runs
/// on one Hamiltonian only pay for sampling and the subspace solve.
#[derive(Clone, Debug)]
pub struct QsdRunner {
    hamiltonian: ReducedHamiltonian,
    propagator: Propagator,
    e0: f64,
    options: PipelineOptions,
}

impl QsdRunner {
    pub fn new(h: &ReducedHamiltonian, options: PipelineOptions) -> Result<Self, SubspaceError> {
        if let Some(init) = &options.initial {
            if init.dim() != h.dim() {
                return Err(SubspaceError::Dimension(format!(
                    "initial state of dimension {} for a {}-dimensional Hamiltonian",
                    init.dim(),
                    h.dim()
                )));
            }
        }
        Ok(Self {
            propagator: Propagator::new(h)?,
            e0: exact_ground_energy(h)?.energy,
            hamiltonian: h.clone(),
            options,
        })
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn hamiltonian(&self) -> &ReducedHamiltonian {
        &self.hamiltonian
    }

    pub fn initial_state(&self) -> StateVector {
        self.options
            .initial
            .clone()
            .unwrap_or_else(|| StateVector::zero(self.hamiltonian.n_qubits))
    }

    pub fn evolved_states(&self, times: &[f64]) -> Result<Vec<StateVector>, SubspaceError> {
        let init = self.initial_state();
        times
            .iter()
            .map(|&t| self.propagator.evolve(t, &init))
            .collect()
    }

    /// Density matrices of `states`: exact projectors, or shadow estimates
    /// with state `j` sampled from the stream `derive_seed(seed, [j])`.
    pub fn densities(
        &self,
        states: &[StateVector],
        shots: Shots,
        seed: u64,
    ) -> Result<Vec<DMatrix<Complex64>>, SubspaceError> {
        match shots {
            Shots::Exact => Ok(states.iter().map(StateVector::density_matrix).collect()),
            Shots::Finite(0) => Err(SubspaceError::Dimension(
                "at least one shot per state".into(),
            )),
            Shots::Finite(m) => Ok(states
                .iter()
                .enumerate()
                .map(|(j, s)| estimate_density(s, m, derive_seed(seed, &[j as u64])))
                .collect::<Result<Vec<_>, _>>()?),
        }
    }

    /// Assembles and solves the dense subspace problem for given densities.
    pub fn solve_densities(
        &self,
        rhos: &[DMatrix<Complex64>],
        shots: Shots,
    ) -> Result<(f64, Diagnostics), SubspaceError> {
        let problem = assemble_subspace(rhos, &self.hamiltonian.matrix)?;
        self.finish(&problem, rhos.len(), shots)
    }

    fn finish(
        &self,
        problem: &SubspaceProblem,
        m: usize,
        shots: Shots,
    ) -> Result<(f64, Diagnostics), SubspaceError> {
        let sol = solve_gevp(problem, self.options.drop_tol)?;
        let e_s = sol.lowest();
        let per_state = match shots {
            Shots::Exact => 0,
            Shots::Finite(n) => n,
        };
        let diagnostics = Diagnostics {
            e_s,
            e0: self.e0,
            epsilon: (e_s - self.e0).abs(),
            kept_rank: sol.kept_rank,
            s_spectrum: sol.s_spectrum,
            shots_per_state: vec![per_state; m],
            spectral_bound: self.hamiltonian.spectral_bound(),
        };
        Ok((e_s, diagnostics))
    }

    /// Full run on `e^{−iHt_j}|initial⟩`. A longer time list reuses the
    /// shadows of its prefix.
    pub fn run(
        &self,
        times: &[f64],
        shots: Shots,
        seed: u64,
    ) -> Result<(f64, Diagnostics), SubspaceError> {
        if times.is_empty() {
            return Err(SubspaceError::Dimension("no evolution times".into()));
        }
        let states = self.evolved_states(times)?;
        match (shots, self.options.assembly) {
            (Shots::Finite(n), Assembly::Factorized) if n > 0 => {
                let shadows = states
                    .iter()
                    .enumerate()
                    .map(|(j, s)| take_snapshots(s, n, derive_seed(seed, &[j as u64])))
                    .collect::<Result<Vec<_>, _>>()?;
                let problem = assemble_factorized(&shadows, &self.hamiltonian.matrix)?;
                self.finish(&problem, times.len(), shots)
            }
            _ => {
                let rhos = self.densities(&states, shots, seed)?;
                self.solve_densities(&rhos, shots)
            }
        }
    }
}

/// Minimum generalized eigenvalue of the shadow subspace built from
/// `e^{−iHt_j}|initial⟩`, with diagnostics.
pub fn shadow_qsd_ground_energy(
    h: &ReducedHamiltonian,
    times: &[f64],
    shots: Shots,
    seed: u64,
    options: &PipelineOptions,
) -> Result<(f64, Diagnostics), SubspaceError> {
    QsdRunner::new(h, options.clone())?.run(times, shots, seed)
}

pub const DIAGNOSTICS_HEADER: &str =
    "run,e_s,e0,epsilon,kept_rank,spectral_bound,shots_per_state,s_spectrum";

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

/// One row per run; list-valued columns are `;`-separated.
pub fn write_diagnostics_csv<W: Write>(rows: &[Diagnostics], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{DIAGNOSTICS_HEADER}")?;
    for (i, d) in rows.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            d.e_s,
            d.e0,
            d.epsilon,
            d.kept_rank,
            d.spectral_bound,
            join(&d.shots_per_state),
            join(&d.s_spectrum)
        )?;
    }
    Ok(())
}
