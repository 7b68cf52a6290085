mod common;

use common::{
    cg_by_lowering, fock_hamiltonian, fock_j_squared, jacobi_eigenvalues, random_symmetric,
    MIXED_INTERACTION,
};
use nalgebra::DMatrix;
use shadowqsd::harness::PAIRING_INTERACTION;
use shadowqsd::shell_model::{
    build_hamiltonian, clebsch_gordan, enumerate_basis, parse_interaction, twice_jz_operator,
    InteractionData, ReducedHamiltonian,
};
use shadowqsd::subspace::exact_ground_energy;

fn compare_with_fock(
    data: &InteractionData,
    fock: &DMatrix<f64>,
    protons: usize,
    neutrons: usize,
) -> f64 {
    let basis = enumerate_basis(data, protons, neutrons, None).unwrap();
    let h = build_hamiltonian(data, &basis).unwrap();
    let block = h.physical_block();
    let mut worst: f64 = 0.0;
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let oracle = fock[(bi.bits() as usize, bj.bits() as usize)];
            worst = worst.max((block[(i, j)] - oracle).abs());
        }
    }
    worst
}

#[test]
fn pairing_model_matches_fock_space_oracle() {
    let data = parse_interaction(PAIRING_INTERACTION).unwrap();
    assert_eq!(data.orbitals.len(), 6);
    let fock = fock_hamiltonian(&data);
    for n in 1..=5 {
        let err = compare_with_fock(&data, &fock, 0, n);
        assert!(err < 1e-10, "{n} neutrons: max deviation {err}");
    }
}

#[test]
fn proton_neutron_model_matches_fock_space_oracle() {
    let data = parse_interaction(MIXED_INTERACTION).unwrap();
    assert_eq!(data.orbitals.len(), 8);
    let fock = fock_hamiltonian(&data);
    for (p, n) in [(1, 1), (0, 2), (2, 0), (1, 2), (2, 2), (1, 3), (2, 4)] {
        let err = compare_with_fock(&data, &fock, p, n);
        assert!(err < 1e-10, "({p}, {n}): max deviation {err}");
    }
}

#[test]
fn hamiltonian_conserves_jz() {
    let data = parse_interaction(MIXED_INTERACTION).unwrap();
    for (p, n) in [(1, 1), (1, 2), (2, 3)] {
        let basis = enumerate_basis(&data, p, n, None).unwrap();
        let h = build_hamiltonian(&data, &basis).unwrap();
        let jz = twice_jz_operator(&data, &basis, h.dim());
        let comm = &h.matrix * &jz - &jz * &h.matrix;
        assert!(
            comm.amax() < 1e-12,
            "({p}, {n}): |[H, Jz]| = {}",
            comm.amax()
        );
    }
}

#[test]
fn hamiltonian_is_rotationally_invariant() {
    let data = parse_interaction(MIXED_INTERACTION).unwrap();
    let j2 = fock_j_squared(&data);
    for (p, n) in [(1, 1), (1, 2), (2, 2)] {
        let basis = enumerate_basis(&data, p, n, None).unwrap();
        let h = build_hamiltonian(&data, &basis).unwrap().physical_block();
        let d = basis.len();
        let j2_block = DMatrix::from_fn(d, d, |i, j| {
            j2[(basis[i].bits() as usize, basis[j].bits() as usize)]
        });
        let comm = &h * &j2_block - &j2_block * &h;
        assert!(
            comm.amax() < 1e-10,
            "({p}, {n}): |[H, J²]| = {}",
            comm.amax()
        );
    }
}

#[test]
fn clebsch_gordan_matches_lowering_construction() {
    for tj1 in 1..=7 {
        for tj2 in 1..=7 {
            let table = cg_by_lowering(tj1, tj2);
            let mut tj = (tj1 - tj2).abs();
            while tj <= tj1 + tj2 {
                for tm in (-tj..=tj).step_by(2) {
                    for m1 in (-tj1..=tj1).step_by(2) {
                        for m2 in (-tj2..=tj2).step_by(2) {
                            let lib = clebsch_gordan(tj1 as u32, m1, tj2 as u32, m2, tj as u32, tm)
                                .unwrap();
                            let oracle = table.get(&(m1, m2, tj, tm)).copied().unwrap_or(0.0);
                            assert!(
                                (lib - oracle).abs() < 1e-12,
                                "<{tj1}/2 {m1}/2, {tj2}/2 {m2}/2 | {tj}/2 {tm}/2>: {lib} vs {oracle}"
                            );
                        }
                    }
                }
                tj += 2;
            }
        }
    }
}

#[test]
fn clebsch_gordan_orthogonality() {
    for (tj1, tj2) in [(1i32, 1i32), (3, 1), (5, 3), (7, 5), (4, 2)] {
        let mut tjs = Vec::new();
        let mut tj = (tj1 - tj2).abs();
        while tj <= tj1 + tj2 {
            tjs.push(tj);
            tj += 2;
        }
        let cg = |m1: i32, m2: i32, tj: i32, tm: i32| {
            clebsch_gordan(tj1 as u32, m1, tj2 as u32, m2, tj as u32, tm).unwrap()
        };
        for &ja in &tjs {
            for &jb in &tjs {
                for tm in (-ja.min(jb)..=ja.min(jb)).step_by(2) {
                    let mut s = 0.0;
                    for m1 in (-tj1..=tj1).step_by(2) {
                        let m2 = tm - m1;
                        if m2.abs() <= tj2 {
                            s += cg(m1, m2, ja, tm) * cg(m1, m2, jb, tm);
                        }
                    }
                    let expect = if ja == jb { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12);
                }
            }
        }
        for m1 in (-tj1..=tj1).step_by(2) {
            for m2 in (-tj2..=tj2).step_by(2) {
                for n1 in (-tj1..=tj1).step_by(2) {
                    let n2 = m1 + m2 - n1;
                    if n2.abs() > tj2 {
                        continue;
                    }
                    let s: f64 = tjs
                        .iter()
                        .filter(|&&tj| (m1 + m2).abs() <= tj)
                        .map(|&tj| cg(m1, m2, tj, m1 + m2) * cg(n1, n2, tj, m1 + m2))
                        .sum();
                    let expect = if m1 == n1 { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn exact_ground_energy_matches_jacobi_rotations() {
    let m = random_symmetric(15, 4242) * 10.0;
    let h = ReducedHamiltonian::from_physical(&m, Vec::new()).unwrap();
    assert_eq!(h.dim(), 16);
    let gs = exact_ground_energy(&h).unwrap();
    let oracle = jacobi_eigenvalues(&m)[0];
    assert!(
        (gs.energy - oracle).abs() < 1e-9,
        "{} vs {oracle}",
        gs.energy
    );
    let padded = &h.matrix * &gs.vector;
    let residual = (padded - &gs.vector * gs.energy).norm();
    assert!(residual < 1e-9);
    assert!(gs.vector[15].abs() < 1e-12);
}

#[test]
fn pairing_ground_energy_matches_fock_spectrum() {
    let data = parse_interaction(PAIRING_INTERACTION).unwrap();
    let fock = fock_hamiltonian(&data);
    let basis = enumerate_basis(&data, 0, 2, None).unwrap();
    let idx: Vec<usize> = basis.iter().map(|b| b.bits() as usize).collect();
    let sector = DMatrix::from_fn(idx.len(), idx.len(), |i, j| fock[(idx[i], idx[j])]);
    let h = build_hamiltonian(&data, &basis).unwrap();
    let e = exact_ground_energy(&h).unwrap().energy;
    assert!((e - jacobi_eigenvalues(&sector)[0]).abs() < 1e-9);
}
