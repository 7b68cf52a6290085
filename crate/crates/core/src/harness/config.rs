//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. Integer lists are
//! comma separated and may contain inclusive ranges (`3..8`) or values in
//! scientific notation (`1e4`). Relative paths resolve against the
//! directory of the config file.
//!
//! | key          | meaning                                              | default          |
//! |--------------|------------------------------------------------------|------------------|
//! | `study`      | `shots`, `subspace`, `bias`, `exact` or `mnes`       | required         |
//! | `model`      | `toy:he6like`, `toy:pairing` or `file:<path>`        | required         |
//! | `protons`    | valence protons (file models)                        |                  |
//! | `neutrons`   | valence neutrons (file models)                       |                  |
//! | `jz`         | `2Jz` restriction of the basis                       | none             |
//! | `dt`         | time step, `t_j = j·dt` (MeV⁻¹)                      | `1.0`            |
//! | `m`          | evolved states for the shots study                   | MNES             |
//! | `m_range`    | evolved-state counts for the subspace study          |                  |
//! | `shots`      | snapshots per evolved state (list)                   |                  |
//! | `repeats`    | independent runs per point                           | `1`              |
//! | `seed`       | master seed                                          | `0`              |
//! | `output`     | output directory                                     | `shadowqsd-out`  |
//! | `mnes_tol`   | ground-state weight tolerance of the MNES            | `1e-6`           |
//! | `drop_tol`   | relative rank cut of the overlap matrix              | `1e-12`          |
//! | `assembly`   | `dense` or `factorized`                              | `dense`          |
//! | `initial`    | basis index of the initial state                     | `0`              |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::models::{ModelSource, Nucleons};
use super::HarnessError;
use crate::subspace::{Assembly, DEFAULT_DROP_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Study {
    Shots,
    Subspace,
    Bias,
    Exact,
    Mnes,
}

impl Study {
    pub fn id(self) -> &'static str {
        match self {
            Study::Shots => "shots",
            Study::Subspace => "subspace",
            Study::Bias => "bias",
            Study::Exact => "exact",
            Study::Mnes => "mnes",
        }
    }

    fn parse(s: &str) -> Result<Self, HarnessError> {
        Ok(match s {
            "shots" => Study::Shots,
            "subspace" => Study::Subspace,
            "bias" => Study::Bias,
            "exact" => Study::Exact,
            "mnes" => Study::Mnes,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown study `{other}` (expected shots, subspace, bias, exact or mnes)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub study: Study,
    pub model: ModelSource,
    pub nucleons: Option<Nucleons>,
    pub dt: f64,
    pub m: Option<usize>,
    pub m_values: Vec<usize>,
    pub shots: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub mnes_tol: f64,
    pub drop_tol: f64,
    pub assembly: Assembly,
    pub initial: usize,
    /// Verbatim config text, echoed into the manifest.
    pub source: String,
}

const KEYS: &[&str] = &[
    "study", "model", "protons", "neutrons", "jz", "dt", "m", "m_range", "shots", "repeats",
    "seed", "output", "mnes_tol", "drop_tol", "assembly", "initial",
];

fn cfg_err(line: usize, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("line {line}: {msg}"))
}

fn parse_count(raw: &str) -> Option<usize> {
    if let Ok(v) = raw.parse::<usize>() {
        return Some(v);
    }
    let f: f64 = raw.parse().ok()?;
    (f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 1e15).then_some(f as usize)
}

/// `1000, 1e4, 3..5` → `[1000, 10000, 3, 4, 5]`.
pub fn parse_count_list(raw: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let (a, b) = (parse_count(a.trim())?, parse_count(b.trim())?);
            if a > b {
                return None;
            }
            out.extend(a..=b);
        } else {
            out.push(parse_count(item)?);
        }
    }
    (!out.is_empty()).then_some(out)
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut kv: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(line_no, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(cfg_err(line_no, format!("unknown key `{k}`")));
            }
            if v.is_empty() {
                return Err(cfg_err(line_no, format!("empty value for `{k}`")));
            }
            if kv.insert(k, (line_no, v)).is_some() {
                return Err(cfg_err(line_no, format!("duplicate key `{k}`")));
            }
        }
        let get = |k: &str| kv.get(k).copied();
        let require = |k: &str| {
            get(k).ok_or_else(|| HarnessError::Config(format!("missing required key `{k}`")))
        };

        let (_, study) = require("study")?;
        let study = Study::parse(study)?;
        let (line, model) = require("model")?;
        let model = match ModelSource::parse(model).map_err(|e| cfg_err(line, e))? {
            ModelSource::File(p) if p.is_relative() => ModelSource::File(base_dir.join(p)),
            other => other,
        };

        let count = |k: &str| -> Result<Option<usize>, HarnessError> {
            get(k)
                .map(|(line, v)| {
                    parse_count(v).ok_or_else(|| {
                        cfg_err(line, format!("`{k}` must be a non-negative integer"))
                    })
                })
                .transpose()
        };
        let float = |k: &str, default: f64| -> Result<f64, HarnessError> {
            match get(k) {
                None => Ok(default),
                Some((line, v)) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|f| f.is_finite())
                    .ok_or_else(|| cfg_err(line, format!("`{k}` must be a finite number"))),
            }
        };
        let list = |k: &str| -> Result<Vec<usize>, HarnessError> {
            match get(k) {
                None => Ok(Vec::new()),
                Some((line, v)) => parse_count_list(v).ok_or_else(|| {
                    cfg_err(
                        line,
                        format!("`{k}` must be a list of non-negative integers"),
                    )
                }),
            }
        };

        let nucleons = match (count("protons")?, count("neutrons")?) {
            (None, None) => None,
            (p, n) => {
                let twice_jz = match get("jz") {
                    None => None,
                    Some((line, v)) => Some(
                        v.parse::<i32>()
                            .map_err(|_| cfg_err(line, "`jz` must be an integer (2Jz)"))?,
                    ),
                };
                Some(Nucleons {
                    protons: p.unwrap_or(0),
                    neutrons: n.unwrap_or(0),
                    twice_jz,
                })
            }
        };
        if matches!(model, ModelSource::File(_)) && nucleons.is_none() {
            return Err(HarnessError::Config(
                "file models need `protons` and `neutrons`".into(),
            ));
        }

        let dt = float("dt", 1.0)?;
        if dt == 0.0 {
            return Err(HarnessError::Config("`dt` must be non-zero".into()));
        }
        let mnes_tol = float("mnes_tol", 1e-6)?;
        if !(mnes_tol > 0.0 && mnes_tol < 1.0) {
            return Err(HarnessError::Config("`mnes_tol` must lie in (0, 1)".into()));
        }
        let drop_tol = float("drop_tol", DEFAULT_DROP_TOL)?;
        if !(0.0..1.0).contains(&drop_tol) {
            return Err(HarnessError::Config("`drop_tol` must lie in [0, 1)".into()));
        }
        let assembly = match get("assembly") {
            None | Some((_, "dense")) => Assembly::Dense,
            Some((_, "factorized")) => Assembly::Factorized,
            Some((line, other)) => {
                return Err(cfg_err(line, format!("unknown assembly `{other}`")))
            }
        };
        let repeats = count("repeats")?.unwrap_or(1);
        if repeats == 0 {
            return Err(HarnessError::Config("`repeats` must be at least 1".into()));
        }
        let seed = match get("seed") {
            None => 0,
            Some((line, v)) => v
                .parse::<u64>()
                .map_err(|_| cfg_err(line, "`seed` must be an unsigned 64-bit integer"))?,
        };
        let output = get("output")
            .map(|(_, v)| PathBuf::from(v))
            .unwrap_or_else(|| PathBuf::from("shadowqsd-out"));
        let output = if output.is_relative() {
            base_dir.join(output)
        } else {
            output
        };

        let m = count("m")?;
        if m == Some(0) {
            return Err(HarnessError::Config("`m` must be at least 1".into()));
        }
        let mut m_values = list("m_range")?;
        m_values.sort_unstable();
        m_values.dedup();
        if m_values.first() == Some(&0) {
            return Err(HarnessError::Config(
                "`m_range` values must be at least 1".into(),
            ));
        }
        let mut shots = list("shots")?;
        shots.sort_unstable();
        if shots.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::Config("`shots` contains duplicates".into()));
        }
        if shots.first() == Some(&0) {
            return Err(HarnessError::Config(
                "`shots` values must be at least 1".into(),
            ));
        }

        match study {
            Study::Shots | Study::Bias if shots.is_empty() => {
                return Err(HarnessError::Config(format!(
                    "study `{}` needs `shots`",
                    study.id()
                )))
            }
            Study::Subspace if m_values.is_empty() => {
                return Err(HarnessError::Config(
                    "study `subspace` needs `m_range`".into(),
                ))
            }
            Study::Subspace if shots.len() != 1 => {
                return Err(HarnessError::Config(
                    "study `subspace` needs exactly one `shots` value".into(),
                ))
            }
            _ => {}
        }

        Ok(Self {
            study,
            model,
            nucleons,
            dt,
            m,
            m_values,
            shots,
            repeats,
            seed,
            output,
            mnes_tol,
            drop_tol,
            assembly,
            initial: count("initial")?.unwrap_or(0),
            source: text.to_string(),
        })
    }
}
