mod common;

use std::io::BufReader;

use common::{random_state, rng};
use nalgebra::DMatrix;
use shadowqsd::shadow::{
    apply_circuit, born_sample, estimate_density, materialize, read_snapshot_dump, replay_dump,
    sample_clifford, take_snapshots, write_snapshot_dump, StateVector,
};
use shadowqsd::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn pauli_expectations(s: &StateVector) -> [f64; 3] {
    let a = s.amplitudes();
    let (a0, a1) = (a[0], a[1]);
    let x = 2.0 * (a0.conj() * a1).re;
    let y = 2.0 * (a0.conj() * a1).im;
    let z = a0.norm_sqr() - a1.norm_sqr();
    [x, y, z]
}

#[test]
fn single_qubit_cliffords_hit_stabilizer_states_uniformly() {
    let mut r = rng(2718);
    let mut counts = [0usize; 6];
    let zero = StateVector::zero(1);
    for _ in 0..6000 {
        let c = sample_clifford(1, &mut r).unwrap();
        let s = apply_circuit(&c.circuit, &zero, false).unwrap();
        let e = pauli_expectations(&s);
        let axis = (0..3)
            .find(|&k| (e[k].abs() - 1.0).abs() < 1e-9)
            .expect("stabilizer state");
        counts[2 * axis + usize::from(e[axis] < 0.0)] += 1;
    }
    let expected = 1000.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = ChiSquared::new(5.0).unwrap().sf(chi2);
    assert!(p > 0.01, "counts {counts:?}, chi2 {chi2}, p {p}");
}

#[test]
fn two_qubit_twirl_is_maximally_mixed() {
    let mut r = rng(99);
    let psi = StateVector::from_amplitudes(random_state(4, 17)).unwrap();
    let n = 100_000;
    let mut sum = DMatrix::<Complex64>::zeros(4, 4);
    let mut sum_sq = DMatrix::<f64>::zeros(4, 8);
    for _ in 0..n {
        let c = sample_clifford(2, &mut r).unwrap();
        let rho = apply_circuit(&c.circuit, &psi, false)
            .unwrap()
            .density_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let v = rho[(i, j)];
                sum_sq[(i, 2 * j)] += v.re * v.re;
                sum_sq[(i, 2 * j + 1)] += v.im * v.im;
            }
        }
        sum += rho;
    }
    let nf = n as f64;
    for i in 0..4 {
        for j in 0..4 {
            let mean = sum[(i, j)] / nf;
            let target = if i == j { 0.25 } else { 0.0 };
            for (part, m, sq) in [
                ("re", mean.re, sum_sq[(i, 2 * j)]),
                ("im", mean.im, sum_sq[(i, 2 * j + 1)]),
            ] {
                let t = if part == "re" { target } else { 0.0 };
                let var = (sq / nf - m * m).max(0.0);
                let se = (var / nf).sqrt();
                if se == 0.0 {
                    assert!((m - t).abs() < 1e-12);
                } else {
                    assert!(
                        (m - t).abs() <= 3.0 * se,
                        "({i},{j}) {part}: {m} vs {t}, se {se}"
                    );
                }
            }
        }
    }
}

#[test]
fn bell_state_born_statistics() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let bell =
        StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)])
            .unwrap();
    let mut r = rng(5);
    let mut counts = [0usize; 4];
    let n = 20_000;
    for _ in 0..n {
        counts[born_sample(&bell, &mut r).unwrap()] += 1;
    }
    assert_eq!(counts[1] + counts[2], 0);
    let sigma = (n as f64 * 0.25).sqrt();
    assert!(
        (counts[0] as f64 - n as f64 / 2.0).abs() < 4.0 * sigma,
        "{counts:?}"
    );
}

#[test]
fn shadow_is_unbiased() {
    let psi = StateVector::from_amplitudes(random_state(4, 23)).unwrap();
    let rho = psi.density_matrix();
    let shots = 200;
    let reps = 400;
    let mut mean = DMatrix::<Complex64>::zeros(4, 4);
    let mut sq_err = 0.0;
    for k in 0..reps {
        let est = estimate_density(&psi, shots, 10_000 + k).unwrap();
        sq_err += (&est - &rho).norm_squared();
        mean += est;
    }
    mean /= Complex64::new(reps as f64, 0.0);
    // E‖ρ̂ − ρ‖² = (d² + d − 2)/M for a Clifford 2-design at d = 4.
    let predicted = 18.0 / shots as f64;
    let observed = sq_err / reps as f64;
    assert!(
        (observed / predicted - 1.0).abs() < 0.1,
        "{observed} vs {predicted}"
    );
    let bias = (&mean - &rho).norm();
    let bias_sigma = (predicted / reps as f64).sqrt();
    assert!(bias < 4.0 * bias_sigma, "{bias} vs {bias_sigma}");
}

#[test]
fn snapshot_estimates_have_unit_trace_and_are_hermitian() {
    let psi = StateVector::from_amplitudes(random_state(8, 1)).unwrap();
    let est = estimate_density(&psi, 37, 4).unwrap();
    let tr = est.trace();
    assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
    assert!((&est - est.adjoint()).map(|c| c.norm()).max() < 1e-12);
}

#[test]
fn dump_file_replays_identical_estimate() {
    let psi = StateVector::from_amplitudes(random_state(8, 2)).unwrap();
    let shadow = take_snapshots(&psi, 64, 77).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snaps.csv");
    write_snapshot_dump(&shadow, std::fs::File::create(&path).unwrap()).unwrap();
    let (n, rows) =
        read_snapshot_dump(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!((n, rows.len()), (3, 64));
    let replayed = replay_dump(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(materialize(&replayed), materialize(&shadow));
    assert_eq!(
        materialize(&shadow),
        estimate_density(&psi, 64, 77).unwrap()
    );
}
