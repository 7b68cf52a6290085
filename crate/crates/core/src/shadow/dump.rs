//! Snapshot audit dumps.
//!
//! CSV with a versioned header; each row is one `(clifford_seed, z)` pair.
//! The outcome `z` is written as an integer whose bit `q` is qubit `q`.
//!
//! ```text
//! # shadowqsd-snapshots v1
//! # n_qubits=4
//! clifford_seed,z
//! 1234567890123,5
//! ```

use std::io::{BufRead, Write};

use super::snapshot::{replay_snapshot, ClassicalShadow};
use super::ShadowError;

pub const DUMP_MAGIC: &str = "# shadowqsd-snapshots v1";

pub fn write_snapshot_dump<W: Write>(
    shadow: &ClassicalShadow,
    mut out: W,
) -> Result<(), ShadowError> {
    writeln!(out, "{DUMP_MAGIC}")?;
    writeln!(out, "# n_qubits={}", shadow.n_qubits())?;
    writeln!(out, "clifford_seed,z")?;
    for s in shadow.snapshots() {
        writeln!(out, "{},{}", s.clifford_seed, s.z)?;
    }
    Ok(())
}

/// Parses a dump into the qubit count and its `(seed, z)` rows.
pub fn read_snapshot_dump<R: BufRead>(input: R) -> Result<(usize, Vec<(u64, usize)>), ShadowError> {
    let bad = |line: usize, msg: &str| ShadowError::Dump {
        line,
        msg: msg.to_string(),
    };
    let mut lines = input.lines().enumerate();
    let mut next = |expect: &str| -> Result<(usize, String), ShadowError> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(bad(0, &format!("missing {expect}"))),
        }
    };
    let (l1, magic) = next("header")?;
    if magic.trim() != DUMP_MAGIC {
        return Err(bad(l1, "unsupported dump version"));
    }
    let (l2, nq) = next("qubit count")?;
    let n_qubits: usize = nq
        .trim()
        .strip_prefix("# n_qubits=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(l2, "expected `# n_qubits=<n>`"))?;
    let (l3, cols) = next("column header")?;
    if cols.trim() != "clifford_seed,z" {
        return Err(bad(l3, "expected `clifford_seed,z`"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (seed, z) = line
            .split_once(',')
            .ok_or_else(|| bad(i + 1, "expected two columns"))?;
        let seed: u64 = seed.trim().parse().map_err(|_| bad(i + 1, "bad seed"))?;
        let z: usize = z.trim().parse().map_err(|_| bad(i + 1, "bad outcome"))?;
        rows.push((seed, z));
    }
    Ok((n_qubits, rows))
}

/// Rebuilds the shadow recorded in a dump.
pub fn replay_dump<R: BufRead>(input: R) -> Result<ClassicalShadow, ShadowError> {
    let (n_qubits, rows) = read_snapshot_dump(input)?;
    let snapshots = rows
        .into_iter()
        .map(|(seed, z)| replay_snapshot(n_qubits, seed, z))
        .collect::<Result<Vec<_>, _>>()?;
    ClassicalShadow::new(n_qubits, snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow::{take_snapshots, StateVector};

    #[test]
    fn dump_round_trip() {
        let psi = StateVector::zero(2);
        let shadow = take_snapshots(&psi, 40, 3).unwrap();
        let mut buf = Vec::new();
        write_snapshot_dump(&shadow, &mut buf).unwrap();
        let back = replay_dump(buf.as_slice()).unwrap();
        assert_eq!(back, shadow);
    }

    #[test]
    fn wrong_version_rejected() {
        let text = "# shadowqsd-snapshots v0\n# n_qubits=1\nclifford_seed,z\n";
        assert!(read_snapshot_dump(text.as_bytes()).is_err());
    }
}
