//! Minimum number of evolved states.

use nalgebra::DVector;
use num_complex::Complex64;

use super::evolve::{exact_ground_energy, Propagator};
use super::SubspaceError;
use crate::shadow::StateVector;
use crate::shell_model::ReducedHamiltonian;

/// Residual norm below which a new evolved vector counts as linearly
/// dependent on the previous ones.
const DEPENDENT: f64 = 1e-10;

/// Smallest `M` such that `span{e^{−iH·j·dt}|initial⟩ : j = 1..M}` captures
/// the exact ground vector up to squared weight `1 − tol`.
pub fn compute_mnes(
    h: &ReducedHamiltonian,
    initial: &StateVector,
    dt: f64,
    tol: f64,
) -> Result<usize, SubspaceError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(SubspaceError::Numeric(format!(
            "tolerance {tol} outside (0, 1)"
        )));
    }
    if !(dt.is_finite() && dt != 0.0) {
        return Err(SubspaceError::Numeric(format!("invalid time step {dt}")));
    }
    let ground = exact_ground_energy(h)?;
    let g: DVector<Complex64> = ground.vector.map(|v| Complex64::new(v, 0.0));
    let prop = Propagator::new(h)?;
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut captured = 0.0;
    for count in 1..=h.dim_physical {
        let mut v = prop.evolve(count as f64 * dt, initial)?.to_dvector();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let norm = v.norm();
        if norm > DEPENDENT {
            let q = v / Complex64::new(norm, 0.0);
            captured += q.dotc(&g).norm_sqr();
            basis.push(q);
        }
        if captured >= 1.0 - tol {
            return Ok(count);
        }
    }
    Err(SubspaceError::NoFiniteMnes {
        tol,
        captured,
        dim: h.dim_physical,
    })
}
