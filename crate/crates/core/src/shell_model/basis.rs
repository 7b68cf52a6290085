//! Slater-determinant basis enumeration.

use std::fmt;
use std::io::Write;

use super::interaction::{InteractionData, NEUTRON, PROTON};
use super::ShellModelError;

/// Largest number of single-particle orbitals a determinant bitmask can hold.
pub const MAX_ORBITALS: usize = 64;

/// `a†_{k1} a†_{k2} … a†_{kp} |v⟩` with `k1 > k2 > … > kp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlaterDeterminant {
    occupied: Vec<usize>,
    bits: u64,
}

impl SlaterDeterminant {
    /// Builds a determinant from any order of distinct orbital indices.
    pub fn new(orbitals: &[usize]) -> Result<Self, ShellModelError> {
        let mut bits = 0u64;
        for &k in orbitals {
            if k >= MAX_ORBITALS {
                return Err(ShellModelError::Domain(format!(
                    "orbital index {k} exceeds the {MAX_ORBITALS}-orbital limit"
                )));
            }
            if bits & (1 << k) != 0 {
                return Err(ShellModelError::Domain(format!(
                    "orbital {k} occupied twice"
                )));
            }
            bits |= 1 << k;
        }
        Ok(Self::from_bits(bits))
    }

    pub fn from_bits(bits: u64) -> Self {
        let mut occupied: Vec<usize> = (0..MAX_ORBITALS).filter(|k| bits & (1 << k) != 0).collect();
        occupied.reverse();
        Self { occupied, bits }
    }

    /// Occupied orbitals, strictly descending.
    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn particle_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_occupied(&self, k: usize) -> bool {
        k < MAX_ORBITALS && self.bits & (1 << k) != 0
    }
}

impl fmt::Display for SlaterDeterminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.occupied.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn combinations(pool: &[usize], k: usize) -> Vec<u64> {
    fn rec(pool: &[usize], k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=pool.len() - k {
            rec(pool, k - 1, i + 1, acc | (1 << pool[i]), out);
        }
    }
    let mut out = Vec::new();
    if k <= pool.len() {
        rec(pool, k, 0, 0, &mut out);
    }
    out
}

/// Total doubled `Jz` of a determinant.
pub fn twice_jz(interaction: &InteractionData, det: &SlaterDeterminant) -> i32 {
    det.occupied()
        .iter()
        .map(|&k| interaction.orbitals[k].twice_m)
        .sum()
}

/// All determinants with the requested proton and neutron numbers, optionally
/// restricted to one total `2Jz`, sorted lexicographically on the descending
/// occupation lists.
pub fn enumerate_basis(
    interaction: &InteractionData,
    n_protons: usize,
    n_neutrons: usize,
    jz_restriction: Option<i32>,
) -> Result<Vec<SlaterDeterminant>, ShellModelError> {
    if interaction.orbitals.len() > MAX_ORBITALS {
        return Err(ShellModelError::Domain(format!(
            "{} orbitals exceed the {MAX_ORBITALS}-orbital limit",
            interaction.orbitals.len()
        )));
    }
    let protons: Vec<usize> = interaction
        .orbitals_with_tz(PROTON)
        .map(|o| o.index)
        .collect();
    let neutrons: Vec<usize> = interaction
        .orbitals_with_tz(NEUTRON)
        .map(|o| o.index)
        .collect();
    if n_protons > protons.len() || n_neutrons > neutrons.len() {
        return Err(ShellModelError::Domain(format!(
            "cannot place {n_protons} protons in {} orbitals and {n_neutrons} neutrons in {} orbitals",
            protons.len(),
            neutrons.len()
        )));
    }
    if n_protons + n_neutrons == 0 {
        return Err(ShellModelError::Domain(
            "no valence particles requested".into(),
        ));
    }

    let p_sets = combinations(&protons, n_protons);
    let n_sets = combinations(&neutrons, n_neutrons);
    let mut basis = Vec::with_capacity(p_sets.len() * n_sets.len());
    for &p in &p_sets {
        for &n in &n_sets {
            let det = SlaterDeterminant::from_bits(p | n);
            if let Some(jz) = jz_restriction {
                if twice_jz(interaction, &det) != jz {
                    continue;
                }
            }
            basis.push(det);
        }
    }
    if basis.is_empty() {
        return Err(ShellModelError::Domain(format!(
            "no determinant satisfies 2Jz = {:?}",
            jz_restriction
        )));
    }
    basis.sort_by(|a, b| a.occupied().cmp(b.occupied()));
    Ok(basis)
}

/// Writes `index,occupied_orbitals` rows; orbitals are space separated.
pub fn write_basis_csv<W: Write>(basis: &[SlaterDeterminant], mut out: W) -> std::io::Result<()> {
    writeln!(out, "index,occupied_orbitals")?;
    for (i, det) in basis.iter().enumerate() {
        writeln!(out, "{i},{det}")?;
    }
    Ok(())
}
