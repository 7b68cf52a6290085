//! Vectorized subspace matrices.
//!
//! The basis elements are `σ_{(i,j)} = ρ_iρ_j`, flattened row-major as
//! `σ = i·m + j`. With `⟨⟨X|Y⟩⟩ = Tr(X†Y)` and Hermitian `ρ`,
//!
//! ```text
//! S̃[(i,j),(l,n)] = Tr(ρ_jρ_iρ_lρ_n)
//! H̃[(i,j),(l,n)] = Tr(ρ_jρ_i H ρ_lρ_n)
//! ```
//!
//! since `H⊗I` acts on a vectorized matrix as left multiplication by `H`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::SubspaceError;
use crate::shadow::ClassicalShadow;

type CMat = DMatrix<Complex64>;

#[derive(Clone, Debug)]
pub struct SubspaceProblem {
    pub m: usize,
    /// `index_map[σ] = (i, j)`.
    pub index_map: Vec<(usize, usize)>,
    pub h_eff: CMat,
    pub s: CMat,
}

impl SubspaceProblem {
    pub fn dim(&self) -> usize {
        self.index_map.len()
    }

    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }
}

pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn complexify(h: &DMatrix<f64>) -> CMat {
    h.map(|v| Complex64::new(v, 0.0))
}

fn row_major_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect()
}

/// `Tr(A†B)`.
fn frobenius_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Dense path: every `ρ_iρ_j` is formed once, entries are Frobenius inner
/// products of those products.
pub fn assemble_subspace(
    rhos: &[CMat],
    h: &DMatrix<f64>,
) -> Result<SubspaceProblem, SubspaceError> {
    let m = rhos.len();
    if m == 0 {
        return Err(SubspaceError::Dimension("no density matrices".into()));
    }
    let d = h.nrows();
    if h.ncols() != d || rhos.iter().any(|r| r.nrows() != d || r.ncols() != d) {
        return Err(SubspaceError::Dimension(format!(
            "density matrices must match the {d}x{d} Hamiltonian"
        )));
    }
    let hc = complexify(h);
    let pairs = row_major_pairs(m);
    let products: Vec<CMat> = pairs
        .par_iter()
        .map(|&(i, j)| &rhos[i] * &rhos[j])
        .collect();
    let h_products: Vec<CMat> = products.par_iter().map(|p| &hc * p).collect();
    let dim = pairs.len();
    let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..dim)
        .into_par_iter()
        .map(|a| {
            let s_row = (0..dim)
                .map(|b| frobenius_inner(&products[a], &products[b]))
                .collect();
            let h_row = (0..dim)
                .map(|b| frobenius_inner(&products[a], &h_products[b]))
                .collect();
            (s_row, h_row)
        })
        .collect();
    let s = DMatrix::from_fn(dim, dim, |a, b| rows[a].0[b]);
    let h_eff = DMatrix::from_fn(dim, dim, |a, b| rows[a].1[b]);
    Ok(SubspaceProblem {
        m,
        index_map: pairs,
        h_eff: hermitize(&h_eff),
        s: hermitize(&s),
    })
}

/// Snapshot vectors of one shadow as the columns of a `d×M` matrix.
fn snapshot_matrix(shadow: &ClassicalShadow) -> CMat {
    let d = shadow.dim();
    let snaps = shadow.snapshots();
    DMatrix::from_fn(d, snaps.len(), |r, c| snaps[c].phi.amplitudes()[r])
}

/// Factorized path: `ρ_i = c_iΦ_iΦ_i† − I` with `c_i = (d+1)/M_i`, so every
/// trace expands into 16 terms, each a cyclic chain of Gram blocks
/// `Φ_a†Φ_b` (or `Φ_a†HΦ_b` for the link that crosses `H`).
pub fn assemble_factorized(
    shadows: &[ClassicalShadow],
    h: &DMatrix<f64>,
) -> Result<SubspaceProblem, SubspaceError> {
    let m = shadows.len();
    if m == 0 {
        return Err(SubspaceError::Dimension("no shadows".into()));
    }
    let d = h.nrows();
    if h.ncols() != d || shadows.iter().any(|s| s.dim() != d) {
        return Err(SubspaceError::Dimension(format!(
            "shadows must match the {d}x{d} Hamiltonian"
        )));
    }
    let hc = complexify(h);
    let phis: Vec<CMat> = shadows.iter().map(snapshot_matrix).collect();
    let h_phis: Vec<CMat> = phis.iter().map(|p| &hc * p).collect();
    let gram: Vec<Vec<CMat>> = (0..m)
        .map(|a| (0..m).map(|b| phis[a].adjoint() * &phis[b]).collect())
        .collect();
    let gram_h: Vec<Vec<CMat>> = (0..m)
        .map(|a| (0..m).map(|b| phis[a].adjoint() * &h_phis[b]).collect())
        .collect();
    let scale: Vec<f64> = shadows
        .iter()
        .map(|s| (d as f64 + 1.0) / s.len() as f64)
        .collect();
    let trace_h: Complex64 = hc.trace();
    let ctx = ChainContext {
        gram: &gram,
        gram_h: &gram_h,
        scale: &scale,
        trace_h,
        dim: d as f64,
    };
    let pairs = row_major_pairs(m);
    let dim = pairs.len();
    let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..dim)
        .into_par_iter()
        .map(|a| {
            let (i, j) = pairs[a];
            let mut s_row = Vec::with_capacity(dim);
            let mut h_row = Vec::with_capacity(dim);
            for &(l, n) in &pairs {
                let slots = [j, i, l, n];
                s_row.push(ctx.expanded_trace(slots, false));
                h_row.push(ctx.expanded_trace(slots, true));
            }
            (s_row, h_row)
        })
        .collect();
    let s = DMatrix::from_fn(dim, dim, |a, b| rows[a].0[b]);
    let h_eff = DMatrix::from_fn(dim, dim, |a, b| rows[a].1[b]);
    Ok(SubspaceProblem {
        m,
        index_map: pairs,
        h_eff: hermitize(&h_eff),
        s: hermitize(&s),
    })
}

struct ChainContext<'a> {
    gram: &'a [Vec<CMat>],
    gram_h: &'a [Vec<CMat>],
    scale: &'a [f64],
    trace_h: Complex64,
    dim: f64,
}

/// `H` sits between slot 1 and slot 2 of `ρ_{s0}ρ_{s1} H ρ_{s2}ρ_{s3}`.
const H_GAP: usize = 1;

impl ChainContext<'_> {
    /// `Tr(ρ_{s0}ρ_{s1} [H] ρ_{s2}ρ_{s3})` summed over the 16 subsets of
    /// slots that keep their `cΦΦ†` part.
    fn expanded_trace(&self, slots: [usize; 4], with_h: bool) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0u32..16 {
            let present: Vec<usize> = (0..4).filter(|p| mask & (1 << p) != 0).collect();
            let mut coeff = 1.0;
            for (p, &s) in slots.iter().enumerate() {
                coeff *= if mask & (1 << p) != 0 {
                    self.scale[s]
                } else {
                    -1.0
                };
            }
            let value = if present.is_empty() {
                if with_h {
                    self.trace_h
                } else {
                    Complex64::new(self.dim, 0.0)
                }
            } else {
                self.chain_trace(&slots, &present, with_h)
            };
            total += value * coeff;
        }
        total
    }

    /// Cyclic trace of `Φ†_{a_0} X Φ_{a_1} Φ†_{a_1} X Φ_{a_2} …` over the
    /// present slots, with `X = H` on the single link that crosses the gap.
    fn chain_trace(&self, slots: &[usize; 4], present: &[usize], with_h: bool) -> Complex64 {
        let k = present.len();
        let mut acc: Option<CMat> = None;
        for idx in 0..k {
            let from = present[idx];
            let to = present[(idx + 1) % k];
            let crosses = with_h && link_crosses_gap(from, to);
            let block = if crosses {
                &self.gram_h[slots[from]][slots[to]]
            } else {
                &self.gram[slots[from]][slots[to]]
            };
            acc = Some(match acc {
                None => block.clone(),
                Some(a) => a * block,
            });
        }
        acc.expect("non-empty chain").trace()
    }
}

/// Whether walking forward (cyclically) from slot `from` to slot `to`
/// passes the `H` position. `from == to` is a full loop.
fn link_crosses_gap(from: usize, to: usize) -> bool {
    let mut p = from;
    loop {
        let next = (p + 1) % 4;
        if p == H_GAP {
            return true;
        }
        p = next;
        if p == to {
            return false;
        }
    }
}

/// Assembly from materialized density matrices of explicit shadows.
pub fn assemble_from_shadows(
    shadows: &[ClassicalShadow],
    h: &DMatrix<f64>,
) -> Result<SubspaceProblem, SubspaceError> {
    let rhos: Vec<CMat> = shadows.iter().map(crate::shadow::materialize).collect();
    assemble_subspace(&rhos, h)
}
