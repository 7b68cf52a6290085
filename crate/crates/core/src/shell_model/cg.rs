//! Clebsch–Gordan coefficients in the Condon–Shortley phase convention.
//!
//! All angular momenta are passed doubled (`2j`, `2m`) so half-integer spins
//! stay in integer arithmetic. The coefficient is evaluated with the Racah
//! closed-form sum using a table of `ln k!`.

use std::sync::OnceLock;

use super::ShellModelError;

/// Largest doubled angular momentum the factorial table is sized for.
pub const MAX_TWICE_J: u32 = 40;

// j1 + j2 + J + 1 <= 3 * MAX_TWICE_J / 2 + 1 = 61; leave headroom.
const LOG_FACT_LEN: usize = 128;

fn log_factorials() -> &'static [f64; LOG_FACT_LEN] {
    static TABLE: OnceLock<[f64; LOG_FACT_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; LOG_FACT_LEN];
        for k in 1..LOG_FACT_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

#[inline]
fn ln_fact(k: i32) -> f64 {
    debug_assert!(k >= 0);
    log_factorials()[k as usize]
}

fn check_pair(twice_j: u32, twice_m: i32) -> Result<(), ShellModelError> {
    let j = twice_j as i32;
    if twice_m.abs() > j || (j - twice_m).rem_euclid(2) != 0 {
        return Err(ShellModelError::InvalidQuantumNumbers {
            twice_j: j,
            twice_m,
        });
    }
    Ok(())
}

/// `⟨j1 m1, j2 m2 | J M⟩` with every argument doubled.
///
/// Returns `Ok(0.0)` when `M != m1 + m2` or the triangle rule fails. A
/// projection that exceeds its spin or has the wrong parity is rejected.
pub fn clebsch_gordan(
    twice_j1: u32,
    twice_m1: i32,
    twice_j2: u32,
    twice_m2: i32,
    twice_j: u32,
    twice_m: i32,
) -> Result<f64, ShellModelError> {
    check_pair(twice_j1, twice_m1)?;
    check_pair(twice_j2, twice_m2)?;
    check_pair(twice_j, twice_m)?;
    for tj in [twice_j1, twice_j2, twice_j] {
        if tj > MAX_TWICE_J {
            return Err(ShellModelError::Domain(format!(
                "2j = {tj} exceeds the supported maximum {MAX_TWICE_J}"
            )));
        }
    }

    if twice_m1 + twice_m2 != twice_m {
        return Ok(0.0);
    }
    let (j1, j2, j) = (twice_j1 as i32, twice_j2 as i32, twice_j as i32);
    if j > j1 + j2 || j < (j1 - j2).abs() || (j1 + j2 + j) % 2 != 0 {
        return Ok(0.0);
    }

    // Doubled quantities halved back to integers where the formula needs them.
    let a = (j1 + j2 - j) / 2;
    let b = (j1 - j2 + j) / 2;
    let c = (-j1 + j2 + j) / 2;
    let s = (j1 + j2 + j) / 2 + 1;
    let j1pm = (j1 + twice_m1) / 2;
    let j1mm = (j1 - twice_m1) / 2;
    let j2pm = (j2 + twice_m2) / 2;
    let j2mm = (j2 - twice_m2) / 2;
    let jpm = (j + twice_m) / 2;
    let jmm = (j - twice_m) / 2;

    let ln_prefactor = 0.5
        * (((j + 1) as f64).ln() + ln_fact(a) + ln_fact(b) + ln_fact(c) - ln_fact(s)
            + ln_fact(j1pm)
            + ln_fact(j1mm)
            + ln_fact(j2pm)
            + ln_fact(j2mm)
            + ln_fact(jpm)
            + ln_fact(jmm));

    // Denominator arguments: k, a-k, j1-m1-k, j2+m2-k, J-j2+m1+k, J-j1-m2+k.
    let d4 = (j - j2 + twice_m1) / 2;
    let d5 = (j - j1 - twice_m2) / 2;
    let k_min = 0.max(-d4).max(-d5);
    let k_max = a.min(j1mm).min(j2pm);

    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = ln_fact(k)
            + ln_fact(a - k)
            + ln_fact(j1mm - k)
            + ln_fact(j2pm - k)
            + ln_fact(d4 + k)
            + ln_fact(d5 + k);
        let term = (ln_prefactor - ln_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}
