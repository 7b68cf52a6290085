//! Scaling studies: error vs. shots, error vs. subspace size, and the bias
//! and variance of a single subspace matrix element.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::fit::{fit_loglog_slope, fit_semilog_slope, mean_std, median, quantile, LineFit};
use super::models::load_hamiltonian;
use super::HarnessError;
use crate::shadow::{derive_seed, estimate_density, StateVector};
use crate::shell_model::ReducedHamiltonian;
use crate::subspace::{
    compute_mnes, time_grid, PipelineOptions, Propagator, QsdRunner, Shots, SubspaceError,
};

pub const TAG_SHOTS: u64 = 1;
pub const TAG_SUBSPACE: u64 = 2;
pub const TAG_BIAS_WORST: u64 = 3;
pub const TAG_BIAS_DISTINCT: u64 = 4;

/// Tolerance of the `E_s ≥ E0` audit.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// One pipeline run; `(x, run_seed)` together with the config replays it.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub x: usize,
    pub repeat: usize,
    pub run_seed: u64,
    pub e_s: f64,
    pub e0: f64,
    pub epsilon: f64,
    pub kept_rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub x: usize,
    pub median_epsilon: f64,
    /// Standard deviation of `ε` over repeats.
    pub spread: f64,
    pub q25: f64,
    pub q75: f64,
    pub repeats: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Slope of `ln(1/ε)` against `ln N` (shots) or `m` (subspace); `None`
    /// when undefined.
    pub fit: Option<LineFit>,
    pub runs: Vec<RunRecord>,
    pub mnes: Option<usize>,
    /// Evolved states (shots study) or shots per state (subspace study).
    pub fixed: usize,
    pub warnings: Vec<String>,
}

impl ScalingResult {
    pub fn lower_bound_violations(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.e_s < r.e0 - LOWER_BOUND_SLACK)
            .count()
    }
}

pub(crate) fn pipeline_options(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
) -> Result<PipelineOptions, HarnessError> {
    if config.initial >= h.dim_physical {
        return Err(HarnessError::Config(format!(
            "initial state {} outside the {} physical basis states",
            config.initial, h.dim_physical
        )));
    }
    Ok(PipelineOptions {
        drop_tol: config.drop_tol,
        assembly: config.assembly,
        initial: Some(StateVector::basis(h.n_qubits, config.initial)),
    })
}

fn summarize(x: usize, eps: &[f64]) -> ScalingRow {
    let (_, spread) = mean_std(eps);
    ScalingRow {
        x,
        median_epsilon: median(eps),
        spread,
        q25: quantile(eps, 0.25),
        q75: quantile(eps, 0.75),
        repeats: eps.len(),
    }
}

fn record(
    x: usize,
    repeat: usize,
    run_seed: u64,
    e0: f64,
    result: Result<(f64, crate::subspace::Diagnostics), SubspaceError>,
) -> Result<RunRecord, HarnessError> {
    let (e_s, d) = result?;
    Ok(RunRecord {
        x,
        repeat,
        run_seed,
        e_s,
        e0,
        epsilon: d.epsilon,
        kept_rank: d.kept_rank,
    })
}

/// MNES of the configured initial state, `None` if there is no finite one.
pub fn config_mnes(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
) -> Result<Option<usize>, HarnessError> {
    let initial = StateVector::basis(h.n_qubits, config.initial);
    match compute_mnes(h, &initial, config.dt, config.mnes_tol) {
        Ok(m) => Ok(Some(m)),
        Err(SubspaceError::NoFiniteMnes { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn shots_run_seed(config: &ExperimentConfig, shots: usize, repeat: usize) -> u64 {
    derive_seed(config.seed, &[TAG_SHOTS, shots as u64, repeat as u64])
}

pub fn subspace_run_seed(config: &ExperimentConfig, repeat: usize) -> u64 {
    derive_seed(config.seed, &[TAG_SUBSPACE, repeat as u64])
}

pub fn run_shots_scaling(config: &ExperimentConfig) -> Result<ScalingResult, HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    shots_scaling_on(config, &h)
}

/// Median `ε` per shot count at a fixed number of evolved states (`m`, or
/// the MNES when unset).
pub fn shots_scaling_on(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
) -> Result<ScalingResult, HarnessError> {
    let runner = QsdRunner::new(h, pipeline_options(config, h)?)?;
    let mnes = config_mnes(config, h)?;
    let m = match (config.m, mnes) {
        (Some(m), _) => m,
        (None, Some(m)) => m,
        (None, None) => {
            return Err(HarnessError::Numeric(
                "no finite MNES for the initial state; set `m` explicitly".into(),
            ))
        }
    };
    let times = time_grid(m, config.dt);
    let states = runner.evolved_states(&times)?;
    let e0 = runner.e0();
    let jobs: Vec<(usize, usize)> = config
        .shots
        .iter()
        .flat_map(|&n| (0..config.repeats).map(move |r| (n, r)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(n, r)| {
            let seed = shots_run_seed(config, n, r);
            let result = runner
                .densities(&states, Shots::Finite(n), seed)
                .and_then(|rhos| runner.solve_densities(&rhos, Shots::Finite(n)));
            record(n, r, seed, e0, result)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<ScalingRow> = config
        .shots
        .iter()
        .map(|&n| {
            let eps: Vec<f64> = runs
                .iter()
                .filter(|r| r.x == n)
                .map(|r| r.epsilon)
                .collect();
            summarize(n, &eps)
        })
        .collect();
    let mut warnings = Vec::new();
    let fit = if rows.len() < 2 {
        warnings.push("single shot count: slope undefined".to_string());
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.x as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| 1.0 / r.median_epsilon).collect();
        match fit_loglog_slope(&xs, &ys) {
            Ok(f) => Some(f),
            Err(e) => {
                warnings.push(format!("slope undefined: {e}"));
                None
            }
        }
    };
    Ok(ScalingResult {
        rows,
        fit,
        runs,
        mnes,
        fixed: m,
        warnings,
    })
}

pub fn run_subspace_scaling(config: &ExperimentConfig) -> Result<ScalingResult, HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    subspace_scaling_on(config, &h)
}

/// Median `ε` per number of evolved states at fixed shots. All `m` of one
/// repeat share the shadows of their common states.
pub fn subspace_scaling_on(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
) -> Result<ScalingResult, HarnessError> {
    let runner = QsdRunner::new(h, pipeline_options(config, h)?)?;
    let shots = config.shots[0];
    let mut warnings = Vec::new();
    let mut m_values: Vec<usize> = config
        .m_values
        .iter()
        .map(|&m| {
            if m > h.dim_physical {
                warnings.push(format!(
                    "m = {m} exceeds the physical dimension {}; clamped",
                    h.dim_physical
                ));
            }
            m.min(h.dim_physical)
        })
        .collect();
    m_values.dedup();
    let m_max = *m_values.last().expect("validated non-empty");
    let mnes = config_mnes(config, h)?;
    let states = runner.evolved_states(&time_grid(m_max, config.dt))?;
    let e0 = runner.e0();
    let per_repeat = (0..config.repeats)
        .into_par_iter()
        .map(|r| {
            let seed = subspace_run_seed(config, r);
            let rhos = runner.densities(&states, Shots::Finite(shots), seed)?;
            m_values
                .iter()
                .map(|&m| {
                    record(
                        m,
                        r,
                        seed,
                        e0,
                        runner.solve_densities(&rhos[..m], Shots::Finite(shots)),
                    )
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut runs: Vec<RunRecord> = per_repeat.into_iter().flatten().collect();
    runs.sort_by_key(|r| (r.x, r.repeat));
    let rows: Vec<ScalingRow> = m_values
        .iter()
        .map(|&m| {
            let eps: Vec<f64> = runs
                .iter()
                .filter(|r| r.x == m)
                .map(|r| r.epsilon)
                .collect();
            summarize(m, &eps)
        })
        .collect();
    let fit = if rows.len() < 2 {
        warnings.push("single subspace size: slope undefined".to_string());
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.x as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| 1.0 / r.median_epsilon).collect();
        match fit_semilog_slope(&xs, &ys) {
            Ok(f) => Some(f),
            Err(e) => {
                warnings.push(format!("slope undefined: {e}"));
                None
            }
        }
    };
    Ok(ScalingResult {
        rows,
        fit,
        runs,
        mnes,
        fixed: shots,
        warnings,
    })
}

/// Re-runs one recorded pipeline run and returns its `ε`.
pub fn replay_record(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
    m_fixed: usize,
    rec: &RunRecord,
) -> Result<f64, HarnessError> {
    let runner = QsdRunner::new(h, pipeline_options(config, h)?)?;
    let (m, shots) = match config.study {
        super::config::Study::Shots => (m_fixed, rec.x),
        super::config::Study::Subspace => (rec.x, m_fixed),
        other => {
            return Err(HarnessError::Config(format!(
                "study `{}` has no replayable pipeline runs",
                other.id()
            )))
        }
    };
    let (_, d) = runner.run(&time_grid(m, config.dt), Shots::Finite(shots), rec.run_seed)?;
    Ok(d.epsilon)
}

/// Which indices `(i, j, l, m)` of `Tr(ρ_jρ_i H ρ_lρ_m)` are probed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexPattern {
    /// `i = j = l = m`, one shadow in all four slots.
    Worst,
    /// Four distinct states with independent shadows.
    Distinct,
}

impl IndexPattern {
    pub fn id(self) -> &'static str {
        match self {
            IndexPattern::Worst => "worst",
            IndexPattern::Distinct => "distinct",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiasRow {
    pub pattern: IndexPattern,
    pub shots: usize,
    /// `exact − mean(estimate)`.
    pub bias: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// `E|estimate − mean|²`.
    pub variance: f64,
    pub repeats: usize,
}

impl BiasRow {
    /// Largest component of the bias in units of its standard error.
    pub fn z_score(&self) -> f64 {
        let zr = self.bias.re.abs() / self.stderr_re;
        let zi = if self.stderr_im > 0.0 {
            self.bias.im.abs() / self.stderr_im
        } else {
            0.0
        };
        zr.max(zi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiasStudy {
    pub rows: Vec<BiasRow>,
    /// `ln|bias|` against `ln M` for the worst-case pattern.
    pub bias_fit: Option<LineFit>,
    /// `ln variance` against `ln M` for the worst-case pattern.
    pub variance_fit: Option<LineFit>,
    pub exact_worst: f64,
    pub exact_distinct: Complex64,
    pub warnings: Vec<String>,
}

/// `Tr(ρ_jρ_i H ρ_lρ_m)`.
pub fn matrix_element_trace(
    rj: &DMatrix<Complex64>,
    ri: &DMatrix<Complex64>,
    h: &DMatrix<Complex64>,
    rl: &DMatrix<Complex64>,
    rm: &DMatrix<Complex64>,
) -> Complex64 {
    let left = rj * ri;
    let right = rl * rm;
    (left * h * right).trace()
}

pub fn run_bias_variance_study(config: &ExperimentConfig) -> Result<BiasStudy, HarnessError> {
    let h = load_hamiltonian(&config.model, config.nucleons)?;
    bias_variance_on(config, &h, &[IndexPattern::Worst, IndexPattern::Distinct])
}

/// Monte-Carlo bias and variance of a single subspace matrix element
/// against its exact value, per shot count.
pub fn bias_variance_on(
    config: &ExperimentConfig,
    h: &ReducedHamiltonian,
    patterns: &[IndexPattern],
) -> Result<BiasStudy, HarnessError> {
    if config.repeats < 2 {
        return Err(HarnessError::Config(
            "the bias study needs `repeats` >= 2".into(),
        ));
    }
    let opts = pipeline_options(config, h)?;
    let prop = Propagator::new(h)?;
    let initial = opts.initial.expect("set by pipeline_options");
    let states = (1..=4)
        .map(|j| prop.evolve(j as f64 * config.dt, &initial))
        .collect::<Result<Vec<_>, _>>()?;
    let hc = h.matrix.map(|v| Complex64::new(v, 0.0));
    let exact: Vec<DMatrix<Complex64>> = states.iter().map(StateVector::density_matrix).collect();
    let exact_worst = matrix_element_trace(&exact[0], &exact[0], &hc, &exact[0], &exact[0]).re;
    let exact_distinct = matrix_element_trace(&exact[1], &exact[0], &hc, &exact[2], &exact[3]);

    let mut rows = Vec::new();
    for &pattern in patterns {
        for &shots in &config.shots {
            let samples = (0..config.repeats)
                .into_par_iter()
                .map(|r| -> Result<Complex64, HarnessError> {
                    match pattern {
                        IndexPattern::Worst => {
                            let seed =
                                derive_seed(config.seed, &[TAG_BIAS_WORST, shots as u64, r as u64]);
                            let rho = estimate_density(&states[0], shots, seed)?;
                            Ok(matrix_element_trace(&rho, &rho, &hc, &rho, &rho))
                        }
                        IndexPattern::Distinct => {
                            let rhos = (0..4)
                                .map(|k| {
                                    let seed = derive_seed(
                                        config.seed,
                                        &[TAG_BIAS_DISTINCT, shots as u64, r as u64, k],
                                    );
                                    estimate_density(&states[k as usize], shots, seed)
                                })
                                .collect::<Result<Vec<_>, _>>()?;
                            Ok(matrix_element_trace(
                                &rhos[1], &rhos[0], &hc, &rhos[2], &rhos[3],
                            ))
                        }
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let exact_value = match pattern {
                IndexPattern::Worst => Complex64::new(exact_worst, 0.0),
                IndexPattern::Distinct => exact_distinct,
            };
            let re: Vec<f64> = samples.iter().map(|c| c.re).collect();
            let im: Vec<f64> = samples.iter().map(|c| c.im).collect();
            let (mean_re, std_re) = mean_std(&re);
            let (mean_im, std_im) = mean_std(&im);
            let n = samples.len() as f64;
            rows.push(BiasRow {
                pattern,
                shots,
                bias: exact_value - Complex64::new(mean_re, mean_im),
                stderr_re: std_re / n.sqrt(),
                stderr_im: std_im / n.sqrt(),
                variance: std_re * std_re + std_im * std_im,
                repeats: samples.len(),
            });
        }
    }

    let mut warnings = Vec::new();
    let worst: Vec<&BiasRow> = rows
        .iter()
        .filter(|r| r.pattern == IndexPattern::Worst)
        .collect();
    let (bias_fit, variance_fit) = if worst.len() < 2 {
        if patterns.contains(&IndexPattern::Worst) {
            warnings.push("single shot count: slopes undefined".to_string());
        }
        (None, None)
    } else {
        let xs: Vec<f64> = worst.iter().map(|r| r.shots as f64).collect();
        let b: Vec<f64> = worst.iter().map(|r| r.bias.norm()).collect();
        let v: Vec<f64> = worst.iter().map(|r| r.variance).collect();
        let bias_fit = fit_loglog_slope(&xs, &b)
            .map_err(|e| warnings.push(format!("bias slope undefined: {e}")))
            .ok();
        let variance_fit = fit_loglog_slope(&xs, &v)
            .map_err(|e| warnings.push(format!("variance slope undefined: {e}")))
            .ok();
        (bias_fit, variance_fit)
    };
    Ok(BiasStudy {
        rows,
        bias_fit,
        variance_fit,
        exact_worst,
        exact_distinct,
        warnings,
    })
}
