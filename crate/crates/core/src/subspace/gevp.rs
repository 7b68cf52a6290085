//! Generalized eigenproblem `H̃c = ES̃c` by whitening.
//!
//! `S̃` is diagonalized, directions with `λ ≤ drop_tol·λ_max` are dropped
//! (a machine-rank cut, not a statistical truncation), and the Hermitian
//! problem `W†H̃W` with `W = V_k Λ_k^{-1/2}` is solved.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::assemble::{hermitize, SubspaceProblem};
use super::SubspaceError;

pub const DEFAULT_DROP_TOL: f64 = 1e-12;

type CMat = DMatrix<Complex64>;

#[derive(Clone, Debug)]
pub struct GevpSolution {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub kept_rank: usize,
    pub drop_tolerance: f64,
    /// Eigenvectors in the whitened basis, one per column.
    pub coefficients: CMat,
    /// `W`, mapping whitened coordinates back to the subspace basis.
    pub whitening: CMat,
    /// Eigenvalues of `S̃`, ascending.
    pub s_spectrum: Vec<f64>,
}

impl GevpSolution {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn solve_gevp(problem: &SubspaceProblem, drop_tol: f64) -> Result<GevpSolution, SubspaceError> {
    solve_generalized(&problem.h_eff, &problem.s, drop_tol)
}

/// Solves `Ac = λBc` for Hermitian `A` and positive semidefinite `B`.
pub fn solve_generalized(a: &CMat, b: &CMat, drop_tol: f64) -> Result<GevpSolution, SubspaceError> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(SubspaceError::Dimension(format!(
            "generalized eigenproblem needs two equal square matrices, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if !(0.0..1.0).contains(&drop_tol) {
        return Err(SubspaceError::Numeric(format!(
            "drop tolerance {drop_tol} outside [0, 1)"
        )));
    }
    if a.iter()
        .chain(b.iter())
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(SubspaceError::Numeric(
            "non-finite subspace matrix entry".into(),
        ));
    }
    let s_eig = SymmetricEigen::new(hermitize(b));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s_eig.eigenvalues[i].total_cmp(&s_eig.eigenvalues[j]));
    let s_spectrum: Vec<f64> = order.iter().map(|&i| s_eig.eigenvalues[i]).collect();
    let lambda_max = s_spectrum[n - 1];
    if !(lambda_max > 0.0) {
        return Err(SubspaceError::DegenerateSubspace);
    }
    let cut = drop_tol * lambda_max;
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| s_eig.eigenvalues[i] > cut)
        .collect();
    if kept.is_empty() {
        return Err(SubspaceError::DegenerateSubspace);
    }
    let k = kept.len();
    let whitening = DMatrix::from_fn(n, k, |r, c| {
        let idx = kept[c];
        s_eig.eigenvectors[(r, idx)] / s_eig.eigenvalues[idx].sqrt()
    });
    let reduced = hermitize(&(whitening.adjoint() * hermitize(a) * &whitening));
    let eig = SymmetricEigen::new(reduced);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(SubspaceError::Numeric("reduced eigenproblem failed".into()));
    }
    let coefficients = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok(GevpSolution {
        eigenvalues,
        kept_rank: k,
        drop_tolerance: drop_tol,
        coefficients,
        whitening,
        s_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, v: &[f64]) -> CMat {
        DMatrix::from_row_slice(rows, rows, v).map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn identity_overlap() {
        let sol = solve_generalized(
            &real(2, &[2.0, 0.0, 0.0, 4.0]),
            &real(2, &[1.0, 0.0, 0.0, 1.0]),
            DEFAULT_DROP_TOL,
        )
        .unwrap();
        assert_eq!(sol.kept_rank, 2);
        assert!((sol.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((sol.eigenvalues[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn scaled_overlap() {
        let sol = solve_generalized(
            &real(2, &[2.0, 0.0, 0.0, 4.0]),
            &real(2, &[1.0, 0.0, 0.0, 4.0]),
            DEFAULT_DROP_TOL,
        )
        .unwrap();
        assert!((sol.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sol.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn collinear_basis_keeps_one_direction() {
        let sol = solve_generalized(
            &real(2, &[3.0, 3.0, 3.0, 3.0]),
            &real(2, &[1.0, 1.0, 1.0, 1.0]),
            DEFAULT_DROP_TOL,
        )
        .unwrap();
        assert_eq!(sol.kept_rank, 1);
        assert!((sol.eigenvalues[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_overlap_is_degenerate() {
        let z = real(2, &[0.0; 4]);
        assert!(matches!(
            solve_generalized(&z, &z, DEFAULT_DROP_TOL),
            Err(SubspaceError::DegenerateSubspace)
        ));
    }
}
