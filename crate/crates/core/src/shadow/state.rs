//! Dense statevectors and the gate set `{H, S, S†, X, Z, CNOT}`.
//!
//! Qubit `q` is bit `q` of the basis-state index.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::ShadowError;

/// Dense simulation cap (`d = 2^n <= 1024`).
pub const MAX_QUBITS: usize = 10;

const NORM_TOL: f64 = 1e-10;
const BORN_NORM_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Accepts a power-of-two length vector with unit norm (within `1e-10`).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, ShadowError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(ShadowError::Dimension(format!(
                "state length {len} is not a power of two >= 2"
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(ShadowError::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Normalizes `amps` first.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self, ShadowError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(ShadowError::NotNormalized(norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn from_dvector(v: &DVector<Complex64>) -> Result<Self, ShadowError> {
        Self::from_amplitudes(v.iter().copied().collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amps)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    fn max_qubit(self) -> usize {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Z(q) => q,
            Gate::Cnot { control, target } => control.max(target),
        }
    }

    fn validate(self, n_qubits: usize) -> Result<(), ShadowError> {
        if let Gate::Cnot { control, target } = self {
            if control == target {
                return Err(ShadowError::QubitOutOfRange(format!(
                    "CNOT control and target are both {control}"
                )));
            }
        }
        if self.max_qubit() >= n_qubits {
            return Err(ShadowError::QubitOutOfRange(format!(
                "{self:?} on a {n_qubits}-qubit register"
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn apply_gate_in_place(amps: &mut [Complex64], gate: Gate) {
    let len = amps.len();
    match gate {
        Gate::H(q) => {
            let bit = 1 << q;
            for i in 0..len {
                if i & bit == 0 {
                    let (a, b) = (amps[i], amps[i | bit]);
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Gate::S(q) => {
            let bit = 1 << q;
            for (i, a) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = Complex64::new(-a.im, a.re);
                }
            }
        }
        Gate::Sdg(q) => {
            let bit = 1 << q;
            for (i, a) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = Complex64::new(a.im, -a.re);
                }
            }
        }
        Gate::X(q) => {
            let bit = 1 << q;
            for i in 0..len {
                if i & bit == 0 {
                    amps.swap(i, i | bit);
                }
            }
        }
        Gate::Z(q) => {
            let bit = 1 << q;
            for (i, a) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = -*a;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (cb, tb) = (1 << control, 1 << target);
            for i in 0..len {
                if i & cb != 0 && i & tb == 0 {
                    amps.swap(i, i | tb);
                }
            }
        }
    }
}

/// Applies gates in order, or (with `inverse`) in reverse order with each
/// gate inverted. Indices are not checked.
pub(crate) fn apply_gates_in_place(amps: &mut [Complex64], circuit: &[Gate], inverse: bool) {
    if inverse {
        for &g in circuit.iter().rev() {
            apply_gate_in_place(amps, g.inverse());
        }
    } else {
        for &g in circuit {
            apply_gate_in_place(amps, g);
        }
    }
}

/// `C|state⟩`, or `C†|state⟩` when `inverse` is set.
pub fn apply_circuit(
    circuit: &[Gate],
    state: &StateVector,
    inverse: bool,
) -> Result<StateVector, ShadowError> {
    for &g in circuit {
        g.validate(state.n_qubits)?;
    }
    let mut out = state.clone();
    apply_gates_in_place(&mut out.amps, circuit, inverse);
    Ok(out)
}

/// Draws a computational-basis outcome with probability `|⟨z|state⟩|²`.
pub fn born_sample<R: Rng + ?Sized>(
    state: &StateVector,
    rng: &mut R,
) -> Result<usize, ShadowError> {
    sample_amplitudes(&state.amps, rng)
}

pub(crate) fn sample_amplitudes<R: Rng + ?Sized>(
    amps: &[Complex64],
    rng: &mut R,
) -> Result<usize, ShadowError> {
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (total - 1.0).abs() > BORN_NORM_TOL {
        return Err(ShadowError::NotNormalized(total.sqrt()));
    }
    let r: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            acc += p;
            last_nonzero = i;
            if r < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_nonzero)
}
