//! Study dispatch and on-disk artifacts.
//!
//! Every run writes into the configured output directory:
//!
//! * `results.csv`: one row per point of the study (schema per study below),
//! * `runs.csv`: one row per pipeline run (shots and subspace studies),
//! * `fit.csv`: fitted slopes (`quantity,slope,intercept,stderr,n_points`),
//! * `manifest.txt`: version, seed, audit counts and the verbatim config.
//!
//! Floats are written with round-trip precision.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, Study};
use super::fit::LineFit;
use super::models::load_hamiltonian;
use super::studies::{
    bias_variance_on, replay_record, shots_scaling_on, subspace_scaling_on, BiasStudy,
    IndexPattern, RunRecord, ScalingResult,
};
use super::HarnessError;
use crate::shadow::StateVector;
use crate::shell_model::ReducedHamiltonian;
use crate::subspace::{compute_mnes, exact_ground_energy};

pub const SHOTS_HEADER: &str = "n_shots,median_epsilon,spread,q25,q75,repeats,m";
pub const SUBSPACE_HEADER: &str = "m,median_epsilon,spread,q25,q75,repeats,n_shots,mnes";
pub const BIAS_HEADER: &str =
    "pattern,n_shots,bias_re,bias_im,abs_bias,stderr_re,stderr_im,variance,repeats";
pub const EXACT_HEADER: &str = "dim_physical,n_qubits,e0,pad_energy,spectral_bound";
pub const MNES_HEADER: &str = "dt,tol,mnes,n_qubits,dim_physical";
pub const RUNS_HEADER: &str = "x,repeat,run_seed,e_s,e0,epsilon,kept_rank";
pub const FIT_HEADER: &str = "quantity,slope,intercept,stderr,n_points";

/// Round-trip float formatting, in exponent form outside `[1e-4, 1e15)`.
struct F(f64);

impl fmt::Display for F {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

const MANIFEST_CONFIG_MARK: &str = "--- config ---";

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub study: Study,
    pub output_dir: PathBuf,
    /// Human-readable one-line summary.
    pub summary: String,
    pub lower_bound_violations: usize,
}

/// In-memory result of one study.
#[derive(Clone, Debug)]
pub enum Artifacts {
    Scaling(ScalingResult),
    Bias(BiasStudy),
    Exact { h: ReducedHamiltonian, e0: f64 },
    Mnes { h: ReducedHamiltonian, mnes: usize },
}

pub fn run_config(path: impl AsRef<Path>) -> Result<RunOutcome, HarnessError> {
    let config = ExperimentConfig::from_file(path.as_ref())?;
    let base = path.as_ref().parent().unwrap_or(Path::new("."));
    run_study(&config, base)
}

/// Runs `config.study` and writes its artifacts. `config_dir` is recorded
/// in the manifest so relative paths replay.
pub fn run_study(config: &ExperimentConfig, config_dir: &Path) -> Result<RunOutcome, HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    let artifacts = match config.study {
        Study::Shots => Artifacts::Scaling(shots_scaling_on(config, &h)?),
        Study::Subspace => Artifacts::Scaling(subspace_scaling_on(config, &h)?),
        Study::Bias => Artifacts::Bias(bias_variance_on(
            config,
            &h,
            &[IndexPattern::Worst, IndexPattern::Distinct],
        )?),
        Study::Exact => {
            let e0 = exact_ground_energy(&h)?.energy;
            Artifacts::Exact { h, e0 }
        }
        Study::Mnes => {
            let mnes = run_mnes_on(config, &h)?;
            Artifacts::Mnes { h, mnes }
        }
    };
    write_outputs(config, config_dir, &artifacts)?;
    Ok(outcome(config, &artifacts))
}

pub fn run_exact(config: &ExperimentConfig) -> Result<(ReducedHamiltonian, f64), HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    let e0 = exact_ground_energy(&h)?.energy;
    Ok((h, e0))
}

pub fn run_mnes(config: &ExperimentConfig) -> Result<(ReducedHamiltonian, usize), HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    let mnes = run_mnes_on(config, &h)?;
    Ok((h, mnes))
}

fn run_mnes_on(config: &ExperimentConfig, h: &ReducedHamiltonian) -> Result<usize, HarnessError> {
    if config.initial >= h.dim_physical {
        return Err(HarnessError::Config(format!(
            "initial state {} outside the {} physical basis states",
            config.initial, h.dim_physical
        )));
    }
    let initial = StateVector::basis(h.n_qubits, config.initial);
    Ok(compute_mnes(h, &initial, config.dt, config.mnes_tol)?)
}

fn outcome(config: &ExperimentConfig, artifacts: &Artifacts) -> RunOutcome {
    let (summary, violations) = match artifacts {
        Artifacts::Scaling(r) => {
            let slope = r
                .fit
                .map(|f| format!("slope {:.4} ± {:.4}", f.slope, f.stderr))
                .unwrap_or_else(|| "slope undefined".into());
            (
                format!(
                    "{} study: {} points, {slope}",
                    config.study.id(),
                    r.rows.len()
                ),
                r.lower_bound_violations(),
            )
        }
        Artifacts::Bias(b) => {
            let slope = b
                .bias_fit
                .map(|f| format!("bias slope {:.4} ± {:.4}", f.slope, f.stderr))
                .unwrap_or_else(|| "bias slope undefined".into());
            (format!("bias study: {} rows, {slope}", b.rows.len()), 0)
        }
        Artifacts::Exact { h, e0 } => (
            format!(
                "E0 = {e0} MeV ({} physical states on {} qubits)",
                h.dim_physical, h.n_qubits
            ),
            0,
        ),
        Artifacts::Mnes { mnes, .. } => (format!("MNES = {mnes}"), 0),
    };
    RunOutcome {
        study: config.study,
        output_dir: config.output.clone(),
        summary,
        lower_bound_violations: violations,
    }
}

fn fit_line_csv(out: &mut String, quantity: &str, fit: Option<LineFit>, n: usize) {
    match fit {
        Some(f) => {
            let _ = writeln!(
                out,
                "{quantity},{},{},{},{n}",
                F(f.slope),
                F(f.intercept),
                F(f.stderr)
            );
        }
        None => {
            let _ = writeln!(out, "{quantity},,,,{n}");
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), HarnessError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| HarnessError::Output(format!("{}: {e}", path.display())))
}

/// `results.csv` body of the exact study.
pub fn exact_csv(h: &ReducedHamiltonian, e0: f64) -> String {
    format!(
        "{EXACT_HEADER}\n{},{},{},{},{}\n",
        h.dim_physical,
        h.n_qubits,
        F(e0),
        F(h.pad_energy),
        F(h.spectral_bound())
    )
}

/// `results.csv` body of the MNES study.
pub fn mnes_csv(config: &ExperimentConfig, h: &ReducedHamiltonian, mnes: usize) -> String {
    format!(
        "{MNES_HEADER}\n{},{},{mnes},{},{}\n",
        F(config.dt),
        F(config.mnes_tol),
        h.n_qubits,
        h.dim_physical
    )
}

pub fn write_outputs(
    config: &ExperimentConfig,
    config_dir: &Path,
    artifacts: &Artifacts,
) -> Result<(), HarnessError> {
    let dir = &config.output;
    fs::create_dir_all(dir).map_err(|e| HarnessError::Output(format!("{}: {e}", dir.display())))?;
    let mut results = String::new();
    let mut fits = format!("{FIT_HEADER}\n");
    let mut manifest = String::new();
    let _ = writeln!(manifest, "shadowqsd manifest");
    let _ = writeln!(manifest, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "study = {}", config.study.id());
    let _ = writeln!(manifest, "model = {}", config.model);
    let _ = writeln!(manifest, "seed = {}", config.seed);
    let config_dir = if config_dir.as_os_str().is_empty() {
        Path::new(".")
    } else {
        config_dir
    };
    let config_dir = fs::canonicalize(config_dir).unwrap_or_else(|_| config_dir.to_path_buf());
    let _ = writeln!(manifest, "config_dir = {}", config_dir.display());
    let mut violations = 0;
    let mut warnings: Vec<String> = Vec::new();
    match artifacts {
        Artifacts::Scaling(r) => {
            let shots_study = config.study == Study::Shots;
            results.push_str(if shots_study {
                SHOTS_HEADER
            } else {
                SUBSPACE_HEADER
            });
            results.push('\n');
            let mnes = r.mnes.map(|m| m.to_string()).unwrap_or_default();
            for row in &r.rows {
                let _ = write!(
                    results,
                    "{},{},{},{},{},{},{}",
                    row.x,
                    F(row.median_epsilon),
                    F(row.spread),
                    F(row.q25),
                    F(row.q75),
                    row.repeats,
                    r.fixed
                );
                if !shots_study {
                    let _ = write!(results, ",{mnes}");
                }
                results.push('\n');
            }
            let quantity = if shots_study {
                "log_inv_epsilon_vs_log_shots"
            } else {
                "log_inv_epsilon_vs_m"
            };
            fit_line_csv(&mut fits, quantity, r.fit, r.rows.len());
            let mut runs = format!("{RUNS_HEADER}\n");
            for rec in &r.runs {
                let _ = writeln!(
                    runs,
                    "{},{},{},{},{},{},{}",
                    rec.x,
                    rec.repeat,
                    rec.run_seed,
                    F(rec.e_s),
                    F(rec.e0),
                    F(rec.epsilon),
                    rec.kept_rank
                );
            }
            write_file(dir, "runs.csv", &runs)?;
            violations = r.lower_bound_violations();
            warnings.extend(r.warnings.iter().cloned());
            let _ = writeln!(manifest, "fixed = {}", r.fixed);
            let _ = writeln!(
                manifest,
                "mnes = {}",
                if mnes.is_empty() { "none" } else { &mnes }
            );
            if let Some(f) = r.fit {
                let _ = writeln!(manifest, "fit_slope = {}", f.slope);
                let _ = writeln!(manifest, "fit_intercept = {}", f.intercept);
                let _ = writeln!(manifest, "fit_stderr = {}", f.stderr);
            }
        }
        Artifacts::Bias(b) => {
            results.push_str(BIAS_HEADER);
            results.push('\n');
            for row in &b.rows {
                let _ = writeln!(
                    results,
                    "{},{},{},{},{},{},{},{},{}",
                    row.pattern.id(),
                    row.shots,
                    F(row.bias.re),
                    F(row.bias.im),
                    F(row.bias.norm()),
                    F(row.stderr_re),
                    F(row.stderr_im),
                    F(row.variance),
                    row.repeats
                );
            }
            let n = b
                .rows
                .iter()
                .filter(|r| r.pattern == IndexPattern::Worst)
                .count();
            fit_line_csv(&mut fits, "log_abs_bias_vs_log_shots", b.bias_fit, n);
            fit_line_csv(&mut fits, "log_variance_vs_log_shots", b.variance_fit, n);
            warnings.extend(b.warnings.iter().cloned());
            let _ = writeln!(manifest, "exact_worst = {}", b.exact_worst);
            if let Some(f) = b.bias_fit {
                let _ = writeln!(manifest, "fit_slope = {}", f.slope);
                let _ = writeln!(manifest, "fit_stderr = {}", f.stderr);
            }
        }
        Artifacts::Exact { h, e0 } => results = exact_csv(h, *e0),
        Artifacts::Mnes { h, mnes } => results = mnes_csv(config, h, *mnes),
    }
    let _ = writeln!(manifest, "lower_bound_violations = {violations}");
    for w in &warnings {
        let _ = writeln!(manifest, "warning = {w}");
    }
    let _ = writeln!(manifest, "{MANIFEST_CONFIG_MARK}");
    manifest.push_str(&config.source);
    write_file(dir, "results.csv", &results)?;
    write_file(dir, "fit.csv", &fits)?;
    write_file(dir, "manifest.txt", &manifest)?;
    Ok(())
}

pub fn read_runs_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>, HarnessError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some(RUNS_HEADER) {
        return Err(HarnessError::Config(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || {
                HarnessError::Config(format!("{} line {}: malformed row", path.display(), i + 2))
            };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(bad());
            }
            Ok(RunRecord {
                x: f[0].parse().map_err(|_| bad())?,
                repeat: f[1].parse().map_err(|_| bad())?,
                run_seed: f[2].parse().map_err(|_| bad())?,
                e_s: f[3].parse().map_err(|_| bad())?,
                e0: f[4].parse().map_err(|_| bad())?,
                epsilon: f[5].parse().map_err(|_| bad())?,
                kept_rank: f[6].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Recomputes every row of `runs.csv` in `dir` from the manifest and
/// returns the number of rows checked. Any difference is an error.
pub fn replay_output(dir: impl AsRef<Path>) -> Result<usize, HarnessError> {
    let dir = dir.as_ref();
    let manifest_path = dir.join("manifest.txt");
    let manifest = fs::read_to_string(&manifest_path).map_err(|e| {
        HarnessError::Config(format!("cannot read {}: {e}", manifest_path.display()))
    })?;
    let (head, source) = manifest
        .split_once(&format!("{MANIFEST_CONFIG_MARK}\n"))
        .ok_or_else(|| HarnessError::Config("manifest has no config section".into()))?;
    let field = |key: &str| {
        head.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
    };
    let config_dir = PathBuf::from(field("config_dir").unwrap_or_else(|| ".".into()));
    let fixed: usize = field("fixed")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| HarnessError::Config("manifest has no replayable runs".into()))?;
    let config = ExperimentConfig::parse(source, &config_dir)?;
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    let runs = read_runs_csv(dir.join("runs.csv"))?;
    for rec in &runs {
        let eps = replay_record(&config, &h, fixed, rec)?;
        if eps.to_bits() != rec.epsilon.to_bits() {
            return Err(HarnessError::Numeric(format!(
                "replay of x = {}, repeat = {} gave ε = {eps}, recorded {}",
                rec.x, rec.repeat, rec.epsilon
            )));
        }
    }
    Ok(runs.len())
}
