//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowqsd::shadow::StateVector;
use shadowqsd::shell_model::InteractionData;
use shadowqsd::Complex64;

/// Two p-shell species with proton and neutron `p1/2` and neutron `p3/2`.
pub const MIXED_INTERACTION: &str = "\
SHELL p1/2 1 - +1
SHELL p1/2 1 - -1
SHELL p3/2 3 - -1
SPE p1/2 1.3
SPE p3/2 -0.7
TBME p1/2 p1/2 p1/2 p1/2 0 2 -2.1
TBME p1/2 p1/2 p1/2 p1/2 2 0 -3.3
TBME p1/2 p1/2 p1/2 p3/2 2 0 0.35
TBME p1/2 p1/2 p3/2 p3/2 0 2 0.9
TBME p1/2 p3/2 p1/2 p3/2 2 2 -1.1
TBME p1/2 p3/2 p1/2 p3/2 4 2 0.4
TBME p1/2 p3/2 p1/2 p3/2 2 0 -1.7
TBME p1/2 p3/2 p1/2 p3/2 4 0 -2.2
TBME p3/2 p3/2 p3/2 p3/2 0 2 -1.5
TBME p3/2 p3/2 p3/2 p3/2 4 2 -0.3
";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(d: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let a = DMatrix::from_fn(d, d, |_, _| r.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn random_state(d: usize, seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

/// Cyclic Jacobi rotations; returns ascending eigenvalues.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Doubled `(m1, m2, J, M)` to coefficient.
pub type CgTable = HashMap<(i32, i32, i32, i32), f64>;

/// Coupling coefficients built by applying `J−` to stretched states and
/// orthogonalising, with `⟨j1 j1, j2 J−j1 | J J⟩ > 0`. Keys are doubled
/// `(m1, m2, J, M)`.
pub fn cg_by_lowering(tj1: i32, tj2: i32) -> CgTable {
    let n1 = (tj1 + 1) as usize;
    let n2 = (tj2 + 1) as usize;
    let idx = |m1: i32, m2: i32| ((m1 + tj1) / 2) as usize * n2 + ((m2 + tj2) / 2) as usize;
    let lower_coef = |tj: i32, tm: i32| {
        let (j, m) = (tj as f64 / 2.0, tm as f64 / 2.0);
        ((j + m) * (j - m + 1.0)).sqrt()
    };
    let lower = |v: &DVector<f64>| {
        let mut out = DVector::zeros(n1 * n2);
        for m1 in (-tj1..=tj1).step_by(2) {
            for m2 in (-tj2..=tj2).step_by(2) {
                let a = v[idx(m1, m2)];
                if a == 0.0 {
                    continue;
                }
                if m1 > -tj1 {
                    out[idx(m1 - 2, m2)] += a * lower_coef(tj1, m1);
                }
                if m2 > -tj2 {
                    out[idx(m1, m2 - 2)] += a * lower_coef(tj2, m2);
                }
            }
        }
        out
    };
    let mut states: Vec<(i32, i32, DVector<f64>)> = Vec::new();
    let mut tj = tj1 + tj2;
    while tj >= (tj1 - tj2).abs() {
        let mut top = DVector::zeros(n1 * n2);
        let mut found = false;
        for m1 in (-tj1..=tj1).step_by(2) {
            let m2 = tj - m1;
            if m2.abs() > tj2 {
                continue;
            }
            let mut cand = DVector::zeros(n1 * n2);
            cand[idx(m1, m2)] = 1.0;
            for (_, _, s) in states.iter().filter(|(_, tm, _)| *tm == tj) {
                let ov = s.dot(&cand);
                cand -= s * ov;
            }
            if cand.norm() > 1e-8 {
                top = cand.normalize();
                found = true;
                break;
            }
        }
        assert!(found);
        if top[idx(tj1, tj - tj1)] < 0.0 {
            top = -top;
        }
        let mut cur = top;
        let mut tm = tj;
        loop {
            states.push((tj, tm, cur.clone()));
            if tm == -tj {
                break;
            }
            let next = lower(&cur) / lower_coef(tj, tm);
            cur = next;
            tm -= 2;
        }
        tj -= 2;
    }
    let mut out = HashMap::new();
    for (tj, tm, v) in states {
        for m1 in (-tj1..=tj1).step_by(2) {
            for m2 in (-tj2..=tj2).step_by(2) {
                let c = v[idx(m1, m2)];
                if c.abs() > 1e-14 {
                    out.insert((m1, m2, tj, tm), c);
                }
            }
        }
    }
    out
}

/// Annihilation operator on orbital `k` of `n` orbitals; the sign counts
/// occupied orbitals above `k`.
pub fn annihilation(n: usize, k: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut c = DMatrix::zeros(dim, dim);
    for bits in 0..dim {
        if bits & (1 << k) != 0 {
            let above = (bits >> (k + 1)).count_ones();
            c[(bits & !(1 << k), bits)] = if above.is_multiple_of(2) { 1.0 } else { -1.0 };
        }
    }
    c
}

/// Second-quantised Hamiltonian on the full Fock space of `data`'s orbitals.
pub fn fock_hamiltonian(data: &InteractionData) -> DMatrix<f64> {
    let n = data.orbitals.len();
    assert!(n <= 10);
    let dim = 1usize << n;
    let ann: Vec<DMatrix<f64>> = (0..n).map(|k| annihilation(n, k)).collect();
    let cre: Vec<DMatrix<f64>> = ann.iter().map(|c| c.transpose()).collect();
    let mut h = DMatrix::zeros(dim, dim);
    for o in &data.orbitals {
        h += &cre[o.index] * &ann[o.index] * data.spe[o.shell];
    }
    let iso = cg_by_lowering(1, 1);
    let mut spin_tables: HashMap<(i32, i32), CgTable> = HashMap::new();
    let mut pair_creator = |a: usize, b: usize, tj: i32, tm: i32, tt: i32, ttz: i32| {
        let ja = data.shells[a].twice_j as i32;
        let jb = data.shells[b].twice_j as i32;
        let spin = spin_tables
            .entry((ja, jb))
            .or_insert_with(|| cg_by_lowering(ja, jb))
            .clone();
        let mut op = DMatrix::zeros(dim, dim);
        for p in data.orbitals.iter().filter(|o| o.shell == a) {
            for q in data.orbitals.iter().filter(|o| o.shell == b) {
                let s = spin
                    .get(&(p.twice_m, q.twice_m, tj, tm))
                    .copied()
                    .unwrap_or(0.0);
                let i = iso
                    .get(&(p.twice_tz, q.twice_tz, tt, ttz))
                    .copied()
                    .unwrap_or(0.0);
                if s * i != 0.0 {
                    op += &cre[p.index] * &cre[q.index] * (s * i);
                }
            }
        }
        let norm = if a == b {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        };
        op * norm
    };
    for t in &data.tbme {
        let tj = t.twice_j as i32;
        let tt = t.twice_t as i32;
        for tm in (-tj..=tj).step_by(2) {
            for ttz in (-tt..=tt).step_by(2) {
                let ab = pair_creator(t.a, t.b, tj, tm, tt, ttz);
                let cd = pair_creator(t.c, t.d, tj, tm, tt, ttz);
                let term = &ab * cd.transpose() * t.value;
                if (t.a, t.b) != (t.c, t.d) {
                    h += term.transpose();
                }
                h += term;
            }
        }
    }
    h
}

/// `J²` on the full Fock space of `data`'s orbitals.
pub fn fock_j_squared(data: &InteractionData) -> DMatrix<f64> {
    let n = data.orbitals.len();
    let dim = 1usize << n;
    let ann: Vec<DMatrix<f64>> = (0..n).map(|k| annihilation(n, k)).collect();
    let mut jp = DMatrix::zeros(dim, dim);
    let mut jz = DMatrix::zeros(dim, dim);
    for o in &data.orbitals {
        let (j, m) = (o.twice_j as f64 / 2.0, o.twice_m as f64 / 2.0);
        jz += ann[o.index].transpose() * &ann[o.index] * m;
        if let Some(up) = data
            .orbitals
            .iter()
            .find(|u| u.shell == o.shell && u.twice_tz == o.twice_tz && u.twice_m == o.twice_m + 2)
        {
            let c = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            jp += ann[up.index].transpose() * &ann[o.index] * c;
        }
    }
    let jm = jp.transpose();
    &jm * &jp + &jz * &jz + jz
}

/// Lowest eigenvalues of the state-vector subspace problem via Cholesky.
pub fn standard_qsd(h: &DMatrix<f64>, states: &[StateVector]) -> Vec<f64> {
    let m = states.len();
    let hc: DMatrix<Complex64> = h.map(|v| Complex64::new(v, 0.0));
    let vs: Vec<DVector<Complex64>> = states
        .iter()
        .map(|s| DVector::from_column_slice(s.amplitudes()))
        .collect();
    let hs = DMatrix::<Complex64>::from_fn(m, m, |i, j| vs[i].dotc(&(&hc * &vs[j])));
    let ss = DMatrix::<Complex64>::from_fn(m, m, |i, j| vs[i].dotc(&vs[j]));
    let l = ss.cholesky().unwrap().l();
    let linv = l.try_inverse().unwrap();
    let a = &linv * hs * linv.adjoint();
    let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
