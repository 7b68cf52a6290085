//! Exact real-time evolution and the diagonalization oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::SubspaceError;
use crate::shadow::StateVector;
use crate::shell_model::ReducedHamiltonian;

/// Spectral decomposition of a real symmetric Hamiltonian, reused for
/// every evolution time.
#[derive(Clone, Debug)]
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl Propagator {
    pub fn new(h: &ReducedHamiltonian) -> Result<Self, SubspaceError> {
        Self::from_matrix(&h.matrix)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self, SubspaceError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(SubspaceError::Numeric(
                "non-finite Hamiltonian entry".into(),
            ));
        }
        let eig = SymmetricEigen::new(m.clone());
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(SubspaceError::Numeric("eigendecomposition failed".into()));
        }
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `e^{−iHt}|initial⟩`.
    pub fn evolve(&self, t: f64, initial: &StateVector) -> Result<StateVector, SubspaceError> {
        if !t.is_finite() {
            return Err(SubspaceError::Numeric(format!("non-finite time {t}")));
        }
        if initial.dim() != self.dim() {
            return Err(SubspaceError::Dimension(format!(
                "state of dimension {} for a {}-dimensional Hamiltonian",
                initial.dim(),
                self.dim()
            )));
        }
        if t == 0.0 {
            return Ok(initial.clone());
        }
        let psi = initial.amplitudes();
        let v = &self.eigenvectors;
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for k in 0..d {
            let col = v.column(k);
            let c: Complex64 = col.iter().zip(psi).map(|(&vk, &p)| p * vk).sum();
            let c = c * Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
            for (o, &vk) in out.iter_mut().zip(col.iter()) {
                *o += c * vk;
            }
        }
        Ok(StateVector::normalized(out)?)
    }
}

/// `e^{−iHt}|initial⟩` through a full eigendecomposition of the padded `H`.
pub fn evolve_exact(
    h: &ReducedHamiltonian,
    t: f64,
    initial: &StateVector,
) -> Result<StateVector, SubspaceError> {
    Propagator::new(h)?.evolve(t, initial)
}

/// Evolution times `t_j = j·dt` for `j = 1..=m`.
pub fn time_grid(m: usize, dt: f64) -> Vec<f64> {
    (1..=m).map(|j| j as f64 * dt).collect()
}

#[derive(Clone, Debug)]
pub struct EvolvedFamily {
    pub hamiltonian: ReducedHamiltonian,
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl EvolvedFamily {
    pub fn new(
        h: &ReducedHamiltonian,
        times: &[f64],
        initial: &StateVector,
    ) -> Result<Self, SubspaceError> {
        let prop = Propagator::new(h)?;
        Self::with_propagator(h, &prop, times, initial)
    }

    pub fn with_propagator(
        h: &ReducedHamiltonian,
        prop: &Propagator,
        times: &[f64],
        initial: &StateVector,
    ) -> Result<Self, SubspaceError> {
        let states = times
            .iter()
            .map(|&t| prop.evolve(t, initial))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            hamiltonian: h.clone(),
            times: times.to_vec(),
            states,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// Padded to the full Hamiltonian dimension with zeros.
    pub vector: DVector<f64>,
}

/// Lowest eigenpair of the physical block; padding never enters.
pub fn exact_ground_energy(h: &ReducedHamiltonian) -> Result<GroundState, SubspaceError> {
    let block = h.physical_block();
    if block.iter().any(|v| !v.is_finite()) {
        return Err(SubspaceError::Numeric(
            "non-finite Hamiltonian entry".into(),
        ));
    }
    let eig = SymmetricEigen::new(block);
    let (k, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| SubspaceError::Numeric("empty Hamiltonian".into()))?;
    if !energy.is_finite() {
        return Err(SubspaceError::Numeric("eigendecomposition failed".into()));
    }
    let mut vector = DVector::zeros(h.dim());
    vector
        .rows_mut(0, h.dim_physical)
        .copy_from(&eig.eigenvectors.column(k));
    Ok(GroundState { energy, vector })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> ReducedHamiltonian {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(values));
        ReducedHamiltonian::from_physical(&m, Vec::new()).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = diag(&[1.0, 2.0, 5.0]);
        let psi = StateVector::normalized(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(evolve_exact(&h, 0.0, &psi).unwrap(), psi);
    }

    #[test]
    fn phase_after_pi() {
        let h = diag(&[1.0, 2.0]);
        let out = evolve_exact(&h, std::f64::consts::PI, &StateVector::zero(1)).unwrap();
        let a = out.amplitudes();
        assert!((a[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(a[1].norm() < 1e-12);
    }

    #[test]
    fn ground_energy_ignores_padding() {
        assert_eq!(exact_ground_energy(&diag(&[-1.0])).unwrap().energy, -1.0);
        let g = exact_ground_energy(&diag(&[3.0, -2.0, 7.0])).unwrap();
        assert!((g.energy + 2.0).abs() < 1e-14);
        assert!((g.vector[1].abs() - 1.0).abs() < 1e-14);
        assert_eq!(g.vector.len(), 4);
    }

    #[test]
    fn non_finite_time_rejected() {
        let h = diag(&[1.0, 2.0]);
        assert!(evolve_exact(&h, f64::NAN, &StateVector::zero(1)).is_err());
    }
}
