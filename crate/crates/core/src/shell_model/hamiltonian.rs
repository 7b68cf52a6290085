//! m-scheme expansion of the coupled interaction and the reduced Hamiltonian
//! matrix on a determinant basis.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use super::basis::SlaterDeterminant;
use super::cg::clebsch_gordan;
use super::interaction::InteractionData;
use super::ShellModelError;

/// Energy added to the largest physical diagonal element to obtain the
/// diagonal of padded (unphysical) basis states.
pub const PAD_OFFSET_MEV: f64 = 100.0;

const TERM_CUTOFF: f64 = 1e-13;

/// `strength · a†_p a†_q a_r a_s` with `p > q` and `r < s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoBodyTerm {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub strength: f64,
}

/// Sign picked up by a creation or annihilation operator on orbital `k`:
/// the number of occupied orbitals above `k` in the descending product.
#[inline]
fn fermion_sign(bits: u64, k: usize) -> f64 {
    let above = if k >= 63 { 0 } else { bits >> (k + 1) };
    if above.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn annihilate(bits: u64, k: usize) -> Option<(f64, u64)> {
    if bits & (1 << k) == 0 {
        return None;
    }
    Some((fermion_sign(bits, k), bits & !(1 << k)))
}

#[inline]
fn create(bits: u64, k: usize) -> Option<(f64, u64)> {
    if bits & (1 << k) != 0 {
        return None;
    }
    Some((fermion_sign(bits, k), bits | (1 << k)))
}

impl TwoBodyTerm {
    /// Acts on a determinant bitmask; `None` when the result vanishes.
    pub fn apply(&self, bits: u64) -> Option<(f64, u64)> {
        let (s1, b) = annihilate(bits, self.s)?;
        let (s2, b) = annihilate(b, self.r)?;
        let (s3, b) = create(b, self.q)?;
        let (s4, b) = create(b, self.p)?;
        Some((s1 * s2 * s3 * s4 * self.strength, b))
    }
}

/// Pair amplitudes of `[c†_a × c†_b]_{JM,TTz}` as `(p, q, coefficient)`
/// for `c†_p c†_q`, before the `1/sqrt(1 + δ_ab)` normalisation.
fn pair_amplitudes(
    data: &InteractionData,
    a: usize,
    b: usize,
    twice_j: u32,
    twice_m: i32,
    twice_t: u32,
    twice_tz: i32,
) -> Result<Vec<(usize, usize, f64)>, ShellModelError> {
    let mut out = Vec::new();
    for op in data.orbitals.iter().filter(|o| o.shell == a) {
        for oq in data.orbitals.iter().filter(|o| o.shell == b) {
            if op.index == oq.index || op.twice_m + oq.twice_m != twice_m {
                continue;
            }
            if op.twice_tz + oq.twice_tz != twice_tz {
                continue;
            }
            let spin = clebsch_gordan(
                op.twice_j, op.twice_m, oq.twice_j, oq.twice_m, twice_j, twice_m,
            )?;
            if spin == 0.0 {
                continue;
            }
            let iso = clebsch_gordan(1, op.twice_tz, 1, oq.twice_tz, twice_t, twice_tz)?;
            if iso == 0.0 {
                continue;
            }
            out.push((op.index, oq.index, spin * iso));
        }
    }
    Ok(out)
}

/// Expands every coupled `V_JT(ab;cd) T̂_JT(ab;cd)` (and its Hermitian
/// partner when `(ab) != (cd)`) into canonical uncoupled two-body strings.
///
/// The returned list is sorted by `(p, q, r, s)`.
pub fn expand_two_body(data: &InteractionData) -> Result<Vec<TwoBodyTerm>, ShellModelError> {
    let mut acc: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
    for rec in &data.tbme {
        let mut pairs = vec![((rec.a, rec.b), (rec.c, rec.d))];
        if (rec.a, rec.b) != (rec.c, rec.d) {
            pairs.push(((rec.c, rec.d), (rec.a, rec.b)));
        }
        for ((a, b), (c, d)) in pairs {
            let norm_ab = if a == b {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                1.0
            };
            let norm_cd = if c == d {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                1.0
            };
            let scale = rec.value * norm_ab * norm_cd;
            let j = rec.twice_j as i32;
            let t = rec.twice_t as i32;
            for twice_m in (-j..=j).step_by(2) {
                for twice_tz in (-t..=t).step_by(2) {
                    let create_amps =
                        pair_amplitudes(data, a, b, rec.twice_j, twice_m, rec.twice_t, twice_tz)?;
                    let destroy_amps =
                        pair_amplitudes(data, c, d, rec.twice_j, twice_m, rec.twice_t, twice_tz)?;
                    for &(p, q, alpha) in &create_amps {
                        for &(x, y, beta) in &destroy_amps {
                            // (c†_x c†_y)† = c_y c_x
                            let (mut cp, mut cq, mut sign) = (p, q, 1.0);
                            if cp < cq {
                                std::mem::swap(&mut cp, &mut cq);
                                sign = -sign;
                            }
                            let (mut ar, mut as_) = (y, x);
                            if ar > as_ {
                                std::mem::swap(&mut ar, &mut as_);
                                sign = -sign;
                            }
                            *acc.entry((cp, cq, ar, as_)).or_insert(0.0) +=
                                sign * scale * alpha * beta;
                        }
                    }
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, v)| v.abs() > TERM_CUTOFF)
        .map(|((p, q, r, s), strength)| TwoBodyTerm {
            p,
            q,
            r,
            s,
            strength,
        })
        .collect())
}

/// The m-scheme Hamiltonian: one-body energies per orbital plus two-body
/// strings indexed by their annihilated pair.
#[derive(Clone, Debug)]
pub struct MSchemeHamiltonian {
    pub orbital_energy: Vec<f64>,
    pub terms: Vec<TwoBodyTerm>,
    by_annihilated: HashMap<(usize, usize), Vec<usize>>,
}

impl MSchemeHamiltonian {
    pub fn new(data: &InteractionData) -> Result<Self, ShellModelError> {
        let orbital_energy = data.orbitals.iter().map(|o| data.spe[o.shell]).collect();
        let terms = expand_two_body(data)?;
        let mut by_annihilated: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in terms.iter().enumerate() {
            by_annihilated.entry((t.r, t.s)).or_default().push(i);
        }
        Ok(Self {
            orbital_energy,
            terms,
            by_annihilated,
        })
    }

    fn one_body(&self, bits: u64) -> f64 {
        (0..self.orbital_energy.len())
            .filter(|k| bits & (1 << k) != 0)
            .map(|k| self.orbital_energy[k])
            .sum()
    }

    /// `H|ket⟩` as a list of `(amplitude, bits)`, duplicates not merged.
    pub fn apply(&self, ket: u64) -> Vec<(f64, u64)> {
        let mut out = vec![(self.one_body(ket), ket)];
        let occ: Vec<usize> = (0..64).filter(|k| ket & (1 << k) != 0).collect();
        for (i, &r) in occ.iter().enumerate() {
            for &s in &occ[i + 1..] {
                if let Some(ids) = self.by_annihilated.get(&(r, s)) {
                    for &t in ids {
                        if let Some(hit) = self.terms[t].apply(ket) {
                            out.push(hit);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn matrix_element(
        &self,
        bra: &SlaterDeterminant,
        ket: &SlaterDeterminant,
    ) -> Result<f64, ShellModelError> {
        if bra.particle_count() != ket.particle_count() {
            return Err(ShellModelError::Domain(format!(
                "determinants hold {} and {} particles",
                bra.particle_count(),
                ket.particle_count()
            )));
        }
        // A two-body operator moves at most two particles.
        if (bra.bits() ^ ket.bits()).count_ones() > 4 {
            return Ok(0.0);
        }
        Ok(self
            .apply(ket.bits())
            .into_iter()
            .filter(|&(_, b)| b == bra.bits())
            .map(|(v, _)| v)
            .sum())
    }
}

/// `⟨bra|H^f|ket⟩` in MeV. Expands the interaction on every call; use
/// [`MSchemeHamiltonian`] when evaluating many elements.
pub fn matrix_element(
    bra: &SlaterDeterminant,
    ket: &SlaterDeterminant,
    interaction: &InteractionData,
) -> Result<f64, ShellModelError> {
    MSchemeHamiltonian::new(interaction)?.matrix_element(bra, ket)
}

/// Dense real Hamiltonian on `2^n_qubits` states; rows/columns at and beyond
/// `dim_physical` are padding that only carry `pad_energy` on the diagonal.
#[derive(Clone, Debug)]
pub struct ReducedHamiltonian {
    pub dim_physical: usize,
    pub n_qubits: usize,
    pub matrix: DMatrix<f64>,
    /// Empty for models given directly as a matrix.
    pub basis: Vec<SlaterDeterminant>,
    pub pad_energy: f64,
}

/// `ceil(log2 d)`, with a one-dimensional space promoted to one qubit.
pub fn qubits_for_dimension(d: usize) -> usize {
    let mut n = 0;
    while (1usize << n) < d {
        n += 1;
    }
    n.max(1)
}

impl ReducedHamiltonian {
    /// Pads a real symmetric physical block to the next power of two.
    pub fn from_physical(
        physical: &DMatrix<f64>,
        basis: Vec<SlaterDeterminant>,
    ) -> Result<Self, ShellModelError> {
        let d = physical.nrows();
        if d == 0 || physical.ncols() != d {
            return Err(ShellModelError::Domain(
                "physical block must be square and non-empty".into(),
            ));
        }
        if !basis.is_empty() && basis.len() != d {
            return Err(ShellModelError::Domain(format!(
                "basis has {} states for a {d}x{d} block",
                basis.len()
            )));
        }
        if physical.iter().any(|v| !v.is_finite()) {
            return Err(ShellModelError::Domain("non-finite matrix element".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if (physical[(i, j)] - physical[(j, i)]).abs() > 1e-12 {
                    return Err(ShellModelError::Domain(format!(
                        "physical block is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let n_qubits = qubits_for_dimension(d);
        let dim = 1usize << n_qubits;
        let max_diag = (0..d)
            .map(|i| physical[(i, i)])
            .fold(f64::NEG_INFINITY, f64::max);
        let pad_energy = max_diag + PAD_OFFSET_MEV;
        let mut matrix = DMatrix::zeros(dim, dim);
        for j in 0..d {
            for i in 0..=j {
                let v = physical[(i, j)];
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        for i in d..dim {
            matrix[(i, i)] = pad_energy;
        }
        Ok(Self {
            dim_physical: d,
            n_qubits,
            matrix,
            basis,
            pad_energy,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn physical_block(&self) -> DMatrix<f64> {
        self.matrix
            .view((0, 0), (self.dim_physical, self.dim_physical))
            .into_owned()
    }

    /// Largest absolute eigenvalue bound (Gershgorin) of the padded matrix.
    pub fn spectral_bound(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Reduced Hamiltonian of `interaction` on `basis`, upper triangle computed
/// and mirrored.
pub fn build_hamiltonian(
    interaction: &InteractionData,
    basis: &[SlaterDeterminant],
) -> Result<ReducedHamiltonian, ShellModelError> {
    if basis.is_empty() {
        return Err(ShellModelError::Domain("empty basis".into()));
    }
    let count = basis[0].particle_count();
    if basis.iter().any(|d| d.particle_count() != count) {
        return Err(ShellModelError::Domain(
            "basis mixes particle numbers".into(),
        ));
    }
    let h = MSchemeHamiltonian::new(interaction)?;
    let index: HashMap<u64, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, d)| (d.bits(), i))
        .collect();
    let d = basis.len();
    let mut physical = DMatrix::<f64>::zeros(d, d);
    for (col, ket) in basis.iter().enumerate() {
        for (amp, bits) in h.apply(ket.bits()) {
            if let Some(&row) = index.get(&bits) {
                if row <= col {
                    physical[(row, col)] += amp;
                }
            }
        }
    }
    for col in 0..d {
        for row in 0..col {
            physical[(col, row)] = physical[(row, col)];
        }
    }
    ReducedHamiltonian::from_physical(&physical, basis.to_vec())
}

/// Column-sparsity outcome for one uncoupled two-body string.
#[derive(Clone, Debug)]
pub struct TermSparsity {
    pub term: TwoBodyTerm,
    pub max_nonzeros_per_column: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SparsityReport {
    pub terms: Vec<TermSparsity>,
}

impl SparsityReport {
    pub fn all_pass(&self) -> bool {
        self.terms.iter().all(|t| t.pass)
    }
}

/// Counts nonzero entries per column of each single string `a†a†aa`
/// represented on `basis`. Every string must have at most one per column.
pub fn verify_term_sparsity(
    interaction: &InteractionData,
    basis: &[SlaterDeterminant],
) -> Result<SparsityReport, ShellModelError> {
    let terms = expand_two_body(interaction)?;
    Ok(SparsityReport {
        terms: terms.into_iter().map(|t| term_sparsity(t, basis)).collect(),
    })
}

pub fn term_sparsity(term: TwoBodyTerm, basis: &[SlaterDeterminant]) -> TermSparsity {
    let mut max_nz = 0;
    for ket in basis {
        let image = term.apply(ket.bits());
        let nz = basis
            .iter()
            .filter(|bra| matches!(image, Some((v, b)) if b == bra.bits() && v != 0.0))
            .count();
        max_nz = max_nz.max(nz);
    }
    TermSparsity {
        term,
        max_nonzeros_per_column: max_nz,
        pass: max_nz <= 1,
    }
}
