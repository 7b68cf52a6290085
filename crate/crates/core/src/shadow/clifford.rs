//! Uniformly random global Clifford operators.
//!
//! Sampling proceeds qubit by qubit. For qubit `i` a uniformly random
//! non-identity Pauli `a` and a uniformly random Pauli `b` anticommuting with
//! it are drawn on qubits `i..n`. A sweep of `H`, `S` and `CNOT` gates maps
//! the pair to `(X_i, Z_i)`, and a uniformly random Pauli on qubit `i` fixes
//! the two signs. Every Clifford (modulo global phase) corresponds to exactly
//! one sequence of choices, so the resulting circuit is uniform over the
//! group. The tableau is obtained by conjugating the identity tableau through
//! the circuit.

use num_complex::Complex64;
use rand::Rng;

use super::state::{Gate, StateVector, MAX_QUBITS};
use super::ShadowError;

/// Hermitian Pauli string with a sign: `(-1)^sign ⊗_q P_q`, where
/// `(x_q, z_q) = (1, 1)` encodes `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliRow {
    pub x: u64,
    pub z: u64,
    pub sign: bool,
}

impl PauliRow {
    pub fn x_on(q: usize) -> Self {
        Self {
            x: 1 << q,
            z: 0,
            sign: false,
        }
    }

    pub fn z_on(q: usize) -> Self {
        Self {
            x: 0,
            z: 1 << q,
            sign: false,
        }
    }

    /// Whether two strings anticommute (symplectic product is one).
    pub fn anticommutes(&self, other: &PauliRow) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }

    /// Dense action on a statevector.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        let y_count = (self.x & self.z).count_ones();
        let mut base = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if self.sign {
            base = -base;
        }
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (k, a) in amps.iter().enumerate() {
            let phase = if (self.z & k as u64).count_ones().is_multiple_of(2) {
                base
            } else {
                -base
            };
            out[k ^ self.x as usize] = phase * a;
        }
        StateVector::from_amplitudes(out).expect("Pauli action preserves the norm")
    }

    fn conjugate(&mut self, gate: Gate) {
        let bit = |v: u64, q: usize| (v >> q) & 1 == 1;
        match gate {
            Gate::H(q) => {
                let (xq, zq) = (bit(self.x, q), bit(self.z, q));
                self.sign ^= xq && zq;
                if xq != zq {
                    self.x ^= 1 << q;
                    self.z ^= 1 << q;
                }
            }
            Gate::S(q) => {
                let (xq, zq) = (bit(self.x, q), bit(self.z, q));
                self.sign ^= xq && zq;
                if xq {
                    self.z ^= 1 << q;
                }
            }
            Gate::Sdg(q) => {
                let (xq, zq) = (bit(self.x, q), bit(self.z, q));
                self.sign ^= xq && !zq;
                if xq {
                    self.z ^= 1 << q;
                }
            }
            Gate::X(q) => self.sign ^= bit(self.z, q),
            Gate::Z(q) => self.sign ^= bit(self.x, q),
            Gate::Cnot { control, target } => {
                let (xa, za) = (bit(self.x, control), bit(self.z, control));
                let (xb, zb) = (bit(self.x, target), bit(self.z, target));
                self.sign ^= xa && zb && !(xb ^ za);
                if xa {
                    self.x ^= 1 << target;
                }
                if zb {
                    self.z ^= 1 << control;
                }
            }
        }
    }
}

/// Images of the Pauli generators under conjugation, `C P C†`: rows
/// `0..n` are the images of `X_j`, rows `n..2n` those of `Z_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n_qubits: usize,
    rows: Vec<PauliRow>,
}

impl Tableau {
    pub fn identity(n_qubits: usize) -> Self {
        let rows = (0..n_qubits)
            .map(PauliRow::x_on)
            .chain((0..n_qubits).map(PauliRow::z_on))
            .collect();
        Self { n_qubits, rows }
    }

    pub fn from_circuit(n_qubits: usize, circuit: &[Gate]) -> Self {
        let mut t = Self::identity(n_qubits);
        for &g in circuit {
            t.apply_gate(g);
        }
        t
    }

    /// Appends `gate` after the operator the tableau currently represents.
    pub fn apply_gate(&mut self, gate: Gate) {
        for row in &mut self.rows {
            row.conjugate(gate);
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rows(&self) -> &[PauliRow] {
        &self.rows
    }

    pub fn x_image(&self, q: usize) -> PauliRow {
        self.rows[q]
    }

    pub fn z_image(&self, q: usize) -> PauliRow {
        self.rows[self.n_qubits + q]
    }

    /// The `2n × 2n` binary matrix; row `r` is `[x bits | z bits]`.
    pub fn symplectic_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.n_qubits;
        self.rows
            .iter()
            .map(|r| {
                (0..n)
                    .map(|q| (r.x >> q) & 1 == 1)
                    .chain((0..n).map(|q| (r.z >> q) & 1 == 1))
                    .collect()
            })
            .collect()
    }

    pub fn phase_bits(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.sign).collect()
    }

    /// Exact check that the images keep the canonical commutation relations:
    /// `X_j`, `Z_k` anticommute iff `j == k`, everything else commutes.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n_qubits;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let expected = i != j && i % n == j % n;
                if self.rows[i].anticommutes(&self.rows[j]) != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// A Clifford operator with its tableau and a circuit realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordElement {
    pub n_qubits: usize,
    pub tableau: Tableau,
    pub circuit: Vec<Gate>,
}

#[derive(Clone, Copy)]
struct Pauli {
    x: u64,
    z: u64,
}

impl Pauli {
    fn conj(&mut self, gate: Gate) {
        match gate {
            Gate::H(q) => {
                let m = 1 << q;
                if (self.x & m != 0) != (self.z & m != 0) {
                    self.x ^= m;
                    self.z ^= m;
                }
            }
            Gate::S(q) | Gate::Sdg(q) => {
                if self.x & (1 << q) != 0 {
                    self.z ^= 1 << q;
                }
            }
            Gate::X(_) | Gate::Z(_) => {}
            Gate::Cnot { control, target } => {
                if self.x & (1 << control) != 0 {
                    self.x ^= 1 << target;
                }
                if self.z & (1 << target) != 0 {
                    self.z ^= 1 << control;
                }
            }
        }
    }

    fn anticommutes(&self, other: &Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }
}

struct Sweep<'a> {
    gates: &'a mut Vec<Gate>,
    a: Pauli,
    b: Pauli,
}

impl Sweep<'_> {
    fn push(&mut self, g: Gate) {
        self.a.conj(g);
        self.b.conj(g);
        self.gates.push(g);
    }

    fn bits(v: u64) -> impl Iterator<Item = usize> {
        (0..64).filter(move |q| (v >> q) & 1 == 1)
    }
}

/// Circuit of a uniformly random `n`-qubit Clifford over `{H, S, CNOT, X, Z}`.
pub fn sample_clifford_circuit<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Vec<Gate> {
    assert!((1..=MAX_QUBITS).contains(&n_qubits));
    let full = (1u64 << n_qubits) - 1;
    let mut gates = Vec::with_capacity(3 * n_qubits * n_qubits + 4 * n_qubits);
    for i in 0..n_qubits {
        let mask = full & !((1u64 << i) - 1);
        let a = loop {
            let p = Pauli {
                x: rng.gen::<u64>() & mask,
                z: rng.gen::<u64>() & mask,
            };
            if p.x | p.z != 0 {
                break p;
            }
        };
        let b = loop {
            let p = Pauli {
                x: rng.gen::<u64>() & mask,
                z: rng.gen::<u64>() & mask,
            };
            if a.anticommutes(&p) {
                break p;
            }
        };
        let mut sw = Sweep {
            gates: &mut gates,
            a,
            b,
        };

        // a → X_i
        for q in Sweep::bits(sw.a.z).collect::<Vec<_>>() {
            if sw.a.x & (1 << q) != 0 {
                sw.push(Gate::S(q));
            } else {
                sw.push(Gate::H(q));
            }
        }
        let pivot = sw.a.x.trailing_zeros() as usize;
        for q in Sweep::bits(sw.a.x & !(1 << pivot)).collect::<Vec<_>>() {
            sw.push(Gate::Cnot {
                control: pivot,
                target: q,
            });
        }
        if pivot != i {
            sw.push(Gate::Cnot {
                control: i,
                target: pivot,
            });
            sw.push(Gate::Cnot {
                control: pivot,
                target: i,
            });
            sw.push(Gate::Cnot {
                control: i,
                target: pivot,
            });
        }
        debug_assert!(sw.a.x == 1 << i && sw.a.z == 0);

        // b → Z_i while keeping a = X_i
        if !(sw.b.x == 0 && sw.b.z == 1 << i) {
            sw.push(Gate::H(i));
            for q in Sweep::bits(sw.b.z).collect::<Vec<_>>() {
                if sw.b.x & (1 << q) != 0 {
                    sw.push(Gate::S(q));
                } else {
                    sw.push(Gate::H(q));
                }
            }
            for q in Sweep::bits(sw.b.x & !(1 << i)).collect::<Vec<_>>() {
                sw.push(Gate::Cnot {
                    control: i,
                    target: q,
                });
            }
            sw.push(Gate::H(i));
        }
        debug_assert!(sw.a.x == 1 << i && sw.a.z == 0);
        debug_assert!(sw.b.x == 0 && sw.b.z == 1 << i);

        match rng.gen_range(0..4u8) {
            0 => {}
            1 => gates.push(Gate::X(i)),
            2 => gates.push(Gate::Z(i)),
            _ => {
                gates.push(Gate::Z(i));
                gates.push(Gate::X(i));
            }
        }
    }
    gates
}

/// Uniformly random Clifford element with tableau and realizing circuit.
pub fn sample_clifford<R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<CliffordElement, ShadowError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(ShadowError::Dimension(format!(
            "Clifford sampling needs 1..={MAX_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let circuit = sample_clifford_circuit(n_qubits, rng);
    let tableau = Tableau::from_circuit(n_qubits, &circuit);
    Ok(CliffordElement {
        n_qubits,
        tableau,
        circuit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow::state::apply_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_tableau_is_symplectic() {
        assert!(Tableau::identity(3).is_symplectic());
    }

    #[test]
    fn single_gate_images() {
        let t = Tableau::from_circuit(1, &[Gate::H(0)]);
        assert_eq!(t.x_image(0), PauliRow::z_on(0));
        assert_eq!(t.z_image(0), PauliRow::x_on(0));
        let t = Tableau::from_circuit(1, &[Gate::S(0)]);
        assert_eq!(
            t.x_image(0),
            PauliRow {
                x: 1,
                z: 1,
                sign: false
            }
        );
        let t = Tableau::from_circuit(
            2,
            &[Gate::Cnot {
                control: 0,
                target: 1,
            }],
        );
        assert_eq!(t.x_image(0).x, 0b11);
        assert_eq!(t.z_image(1).z, 0b11);
    }

    #[test]
    fn sampled_tableaux_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for _ in 0..50 {
                let c = sample_clifford(n, &mut rng).unwrap();
                assert!(c.tableau.is_symplectic());
                assert!(c.circuit.iter().all(|g| !matches!(g, Gate::Sdg(_))));
            }
        }
    }

    #[test]
    fn circuit_matches_tableau_on_basis_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=3 {
            for _ in 0..35 {
                let c = sample_clifford(n, &mut rng).unwrap();
                for z in 0..1usize << n {
                    let image =
                        apply_circuit(&c.circuit, &StateVector::basis(n, z), false).unwrap();
                    for q in 0..n {
                        // C Z_q C† stabilizes C|z⟩ with eigenvalue (-1)^{z_q}
                        let stab = c.tableau.z_image(q).apply(&image);
                        let ev = if (z >> q) & 1 == 1 { -1.0 } else { 1.0 };
                        assert!((stab.inner(&image).re - ev).abs() < 1e-12);
                        // C X_q C† maps C|z⟩ to C|z ⊕ e_q⟩ exactly
                        let flipped =
                            apply_circuit(&c.circuit, &StateVector::basis(n, z ^ (1 << q)), false)
                                .unwrap();
                        let moved = c.tableau.x_image(q).apply(&image);
                        for (u, v) in moved.amplitudes().iter().zip(flipped.amplitudes()) {
                            assert!((u - v).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_zero_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_clifford(0, &mut rng).is_err());
    }
}
