//! Interaction files: valence shells, single-particle energies and coupled
//! two-body matrix elements.
//!
//! The format is line oriented UTF-8 text. `#` starts a comment.
//!
//! ```text
//! SHELL <label> <2j> <parity> <tz>     # one line per shell and isospin species
//! SPE   <label> <energy_MeV>
//! TBME  <a> <b> <c> <d> <2J> <2T> <V_MeV>
//! ```
//!
//! `parity` is `+`/`-` (or `+1`/`-1`), `tz` is `+1` for protons and `-1` for
//! neutrons. A label may be declared once per species; both declarations must
//! agree on `2j` and parity. Shell ids follow the order in which labels first
//! appear, and TBME records must satisfy `a <= b`, `c <= d` in that order.
//! Each unordered pair `(ab), (cd)` is listed once; the Hamiltonian adds the
//! transposed element implicitly. Orbitals (m-substates) are generated in
//! `SHELL` line order with `2m` ascending.

use std::collections::HashMap;
use std::path::Path;

use super::ShellModelError;

/// Doubled isospin projection of a proton.
pub const PROTON: i32 = 1;
/// Doubled isospin projection of a neutron.
pub const NEUTRON: i32 = -1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A spatial shell, shared by both isospin species.
#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub label: String,
    pub twice_j: u32,
    pub parity: Parity,
}

/// One single-particle m-substate.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbital {
    pub index: usize,
    /// Index into [`InteractionData::shells`].
    pub shell: usize,
    pub twice_j: u32,
    pub twice_m: i32,
    /// `+1` proton, `-1` neutron.
    pub twice_tz: i32,
    pub shell_label: String,
}

/// `V_JT(ab;cd)` with shells referenced by id.
#[derive(Clone, Debug, PartialEq)]
pub struct Tbme {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub twice_j: u32,
    pub twice_t: u32,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteractionData {
    pub shells: Vec<Shell>,
    pub orbitals: Vec<Orbital>,
    /// Single-particle energy per shell id, MeV.
    pub spe: Vec<f64>,
    pub tbme: Vec<Tbme>,
}

impl InteractionData {
    pub fn shell_id(&self, label: &str) -> Option<usize> {
        self.shells.iter().position(|s| s.label == label)
    }

    pub fn orbitals_with_tz(&self, twice_tz: i32) -> impl Iterator<Item = &Orbital> {
        self.orbitals.iter().filter(move |o| o.twice_tz == twice_tz)
    }

    /// Orbital index for `(shell, 2m, 2tz)`, if that substate was declared.
    pub fn find_orbital(&self, shell: usize, twice_m: i32, twice_tz: i32) -> Option<usize> {
        self.orbitals
            .iter()
            .find(|o| o.shell == shell && o.twice_m == twice_m && o.twice_tz == twice_tz)
            .map(|o| o.index)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ShellModelError> {
        let text = std::fs::read_to_string(path)?;
        parse_interaction(&text)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ShellModelError {
    ShellModelError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(
    tok: &str,
    what: &str,
    line: usize,
) -> Result<T, ShellModelError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{tok}`")))
}

fn parse_parity(tok: &str, line: usize) -> Result<Parity, ShellModelError> {
    match tok {
        "+" | "+1" | "1" => Ok(Parity::Even),
        "-" | "-1" => Ok(Parity::Odd),
        _ => Err(parse_err(
            line,
            format!("parity must be + or -, got `{tok}`"),
        )),
    }
}

fn parse_tz(tok: &str, line: usize) -> Result<i32, ShellModelError> {
    match tok {
        "+1" | "1" => Ok(PROTON),
        "-1" => Ok(NEUTRON),
        _ => Err(parse_err(line, format!("tz must be +1 or -1, got `{tok}`"))),
    }
}

fn triangle(twice_a: u32, twice_b: u32, twice_c: u32) -> bool {
    let (a, b, c) = (twice_a as i64, twice_b as i64, twice_c as i64);
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Parse and validate an interaction file.
pub fn parse_interaction(source: &str) -> Result<InteractionData, ShellModelError> {
    let mut shells: Vec<Shell> = Vec::new();
    let mut declared: Vec<(usize, i32)> = Vec::new();
    let mut orbitals: Vec<Orbital> = Vec::new();
    let mut spe: HashMap<usize, f64> = HashMap::new();
    let mut pending_spe: Vec<(usize, String, f64)> = Vec::new();
    let mut pending_tbme: Vec<(usize, [String; 4], u32, u32, f64)> = Vec::new();

    for (lineno, raw) in source.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0].to_ascii_uppercase().as_str() {
            "SHELL" => {
                if toks.len() != 5 {
                    return Err(parse_err(line, "SHELL expects <label> <2j> <parity> <tz>"));
                }
                let label = toks[1].to_string();
                let twice_j: u32 = parse_num(toks[2], "2j", line)?;
                if twice_j % 2 != 1 {
                    return Err(parse_err(
                        line,
                        format!("2j must be odd for a nucleon, got {twice_j}"),
                    ));
                }
                let parity = parse_parity(toks[3], line)?;
                let twice_tz = parse_tz(toks[4], line)?;
                let shell = match shells.iter().position(|s| s.label == label) {
                    Some(id) => {
                        let s = &shells[id];
                        if s.twice_j != twice_j || s.parity != parity {
                            return Err(parse_err(
                                line,
                                format!("shell `{label}` redeclared with different 2j or parity"),
                            ));
                        }
                        id
                    }
                    None => {
                        shells.push(Shell {
                            label: label.clone(),
                            twice_j,
                            parity,
                        });
                        shells.len() - 1
                    }
                };
                if declared.contains(&(shell, twice_tz)) {
                    return Err(parse_err(
                        line,
                        format!("shell `{label}` declared twice for tz = {twice_tz}"),
                    ));
                }
                declared.push((shell, twice_tz));
                let j = twice_j as i32;
                for twice_m in (-j..=j).step_by(2) {
                    orbitals.push(Orbital {
                        index: orbitals.len(),
                        shell,
                        twice_j,
                        twice_m,
                        twice_tz,
                        shell_label: label.clone(),
                    });
                }
            }
            "SPE" => {
                if toks.len() != 3 {
                    return Err(parse_err(line, "SPE expects <label> <energy>"));
                }
                let e: f64 = parse_num(toks[2], "energy", line)?;
                pending_spe.push((line, toks[1].to_string(), e));
            }
            "TBME" => {
                if toks.len() != 8 {
                    return Err(parse_err(
                        line,
                        "TBME expects <a> <b> <c> <d> <2J> <2T> <V>",
                    ));
                }
                let labels = [
                    toks[1].to_string(),
                    toks[2].to_string(),
                    toks[3].to_string(),
                    toks[4].to_string(),
                ];
                let twice_j: u32 = parse_num(toks[5], "2J", line)?;
                let twice_t: u32 = parse_num(toks[6], "2T", line)?;
                let v: f64 = parse_num(toks[7], "V", line)?;
                pending_tbme.push((line, labels, twice_j, twice_t, v));
            }
            other => return Err(parse_err(line, format!("unknown record type `{other}`"))),
        }
    }

    let lookup = |label: &str, line: usize| -> Result<usize, ShellModelError> {
        shells.iter().position(|s| s.label == label).ok_or_else(|| {
            ShellModelError::UndeclaredShell {
                line,
                label: label.to_string(),
            }
        })
    };

    for (line, label, e) in pending_spe {
        let id = lookup(&label, line)?;
        if spe.insert(id, e).is_some() {
            return Err(ShellModelError::Validation(format!(
                "line {line}: duplicate SPE for shell `{label}`"
            )));
        }
    }
    let mut spe_vec = Vec::with_capacity(shells.len());
    for (id, s) in shells.iter().enumerate() {
        match spe.get(&id) {
            Some(e) => spe_vec.push(*e),
            None => {
                return Err(ShellModelError::Validation(format!(
                    "no SPE given for shell `{}`",
                    s.label
                )))
            }
        }
    }

    let mut tbme = Vec::with_capacity(pending_tbme.len());
    let mut seen: HashMap<(usize, usize, usize, usize, u32, u32), usize> = HashMap::new();
    for (line, labels, twice_j, twice_t, value) in pending_tbme {
        let a = lookup(&labels[0], line)?;
        let b = lookup(&labels[1], line)?;
        let c = lookup(&labels[2], line)?;
        let d = lookup(&labels[3], line)?;
        let invalid = |msg: String| ShellModelError::Validation(format!("line {line}: {msg}"));
        if a > b || c > d {
            return Err(invalid(
                "TBME shells must be ordered a <= b and c <= d".into(),
            ));
        }
        if twice_t != 0 && twice_t != 2 {
            return Err(invalid(format!("2T must be 0 or 2, got {twice_t}")));
        }
        let (ja, jb, jc, jd) = (
            shells[a].twice_j,
            shells[b].twice_j,
            shells[c].twice_j,
            shells[d].twice_j,
        );
        if !triangle(ja, jb, twice_j) || !triangle(jc, jd, twice_j) {
            return Err(invalid(format!(
                "2J = {twice_j} violates the triangle rule for ({}, {}) or ({}, {})",
                labels[0], labels[1], labels[2], labels[3]
            )));
        }
        let parity = |x: usize, y: usize| (shells[x].parity == shells[y].parity) as u8;
        if parity(a, b) != parity(c, d) {
            return Err(invalid("TBME does not conserve parity".into()));
        }
        let key = if (a, b) <= (c, d) {
            (a, b, c, d, twice_j, twice_t)
        } else {
            (c, d, a, b, twice_j, twice_t)
        };
        if let Some(prev) = seen.insert(key, line) {
            return Err(invalid(format!(
                "duplicate TBME (first given on line {prev})"
            )));
        }
        tbme.push(Tbme {
            a,
            b,
            c,
            d,
            twice_j,
            twice_t,
            value,
        });
    }

    Ok(InteractionData {
        shells,
        orbitals,
        spe: spe_vec,
        tbme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_shell_without_tbme() {
        let data = parse_interaction("SHELL 0s1/2 1 + -1\nSPE 0s1/2 -1.0\n").unwrap();
        assert_eq!(data.orbitals.len(), 2);
        assert_eq!(data.orbitals[0].twice_m, -1);
        assert_eq!(data.orbitals[1].twice_m, 1);
        assert_eq!(data.spe, vec![-1.0]);
        assert!(data.tbme.is_empty());
    }

    #[test]
    fn accepts_p32_pairing_record() {
        let src = "\
# p3/2 neutrons only
SHELL 0p3/2 3 - -1
SPE 0p3/2 1.5
TBME 0p3/2 0p3/2 0p3/2 0p3/2 0 2 -3.0
";
        let data = parse_interaction(src).unwrap();
        assert_eq!(data.orbitals.len(), 4);
        assert_eq!(
            data.tbme,
            vec![Tbme {
                a: 0,
                b: 0,
                c: 0,
                d: 0,
                twice_j: 0,
                twice_t: 2,
                value: -3.0
            }]
        );
    }

    #[test]
    fn triangle_violation_rejected() {
        let src = "SHELL 0p3/2 3 - -1\nSPE 0p3/2 0\nTBME 0p3/2 0p3/2 0p3/2 0p3/2 10 2 -3.0\n";
        assert!(matches!(
            parse_interaction(src),
            Err(ShellModelError::Validation(_))
        ));
    }

    #[test]
    fn undeclared_shell_reports_line() {
        let src = "SHELL 0p3/2 3 - -1\nSPE 0p3/2 0\nTBME 0p3/2 0p1/2 0p3/2 0p1/2 2 2 1.0\n";
        match parse_interaction(src) {
            Err(ShellModelError::UndeclaredShell { line, label }) => {
                assert_eq!(line, 3);
                assert_eq!(label, "0p1/2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line() {
        let src = "SHELL 0p3/2 3 - -1\nSPE 0p3/2 abc\n";
        assert!(matches!(
            parse_interaction(src),
            Err(ShellModelError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn ordering_and_duplicates_rejected() {
        let base = "SHELL a 3 - -1\nSHELL b 1 - -1\nSPE a 0\nSPE b 0\n";
        let unordered = format!("{base}TBME b a a b 2 2 1.0\n");
        assert!(parse_interaction(&unordered).is_err());
        let dup = format!("{base}TBME a b a a 2 2 1.0\nTBME a a a b 2 2 1.0\n");
        assert!(parse_interaction(&dup).is_err());
    }

    #[test]
    fn both_species_share_a_label() {
        let src = "SHELL 0s1/2 1 + -1\nSHELL 0s1/2 1 + +1\nSPE 0s1/2 -2\n";
        let data = parse_interaction(src).unwrap();
        assert_eq!(data.shells.len(), 1);
        assert_eq!(data.orbitals.len(), 4);
        assert_eq!(data.orbitals_with_tz(PROTON).count(), 2);
        assert_eq!(data.find_orbital(0, 1, PROTON), Some(3));
        assert!(parse_interaction("SHELL x 1 + -1\nSHELL x 3 + 1\nSPE x 0\n").is_err());
    }
}
