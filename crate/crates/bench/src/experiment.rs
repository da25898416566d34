//! Experiment grid: data preparation, σ calibration, per-seed runs and tuning.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use noisyfix::admm::{
    centralized_run, decentralized_run, federated_run, AdmmConfig, AdmmTraceOptions, ConsensusProblem,
};
use noisyfix::privacy::{self, calibrate_sigma, PrivacyTarget, Setting};
use noisyfix::simnet::{Observation, ParticipationCounts};
use noisyfix::ProxSpec;
use rayon::prelude::*;

use crate::data::{gen_lasso, lasso_objective, LassoDataset};
use crate::dpsgd::{dpsgd_baseline, DpSgdConfig, Participation};
use crate::error::{BenchError, Result};
use crate::reference::select_kappa;
use crate::TracePoint;

/// Penalties tried when κ is chosen by cross-validation.
pub const KAPPA_GRID: [f64; 6] = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2];
pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SettingKind {
    Centralized,
    Federated,
    Decentralized,
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SettingKind::Centralized => "centralized",
            SettingKind::Federated => "federated",
            SettingKind::Decentralized => "decentralized",
        })
    }
}

impl FromStr for SettingKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "centralized" => Ok(SettingKind::Centralized),
            "federated" => Ok(SettingKind::Federated),
            "decentralized" => Ok(SettingKind::Decentralized),
            _ => Err(format!("unknown setting '{s}' (centralized|federated|decentralized)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Admm,
    DpSgd,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Admm => "admm",
            Algorithm::DpSgd => "dpsgd",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "admm" => Ok(Algorithm::Admm),
            "dpsgd" => Ok(Algorithm::DpSgd),
            _ => Err(format!("unknown algorithm '{s}' (admm|dpsgd)")),
        }
    }
}

/// Either a fixed noise level or a list of ε budgets to calibrate for.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Sigma(f64),
    Epsilons(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub setting: SettingKind,
    pub algorithm: Algorithm,
    pub n: usize,
    pub p: usize,
    pub support: usize,
    pub noise_std: f64,
    pub data_seed: u64,
    pub train_frac: f64,
    pub iterations: usize,
    /// ADMM relaxation λ.
    pub lambda: f64,
    /// DP-SGD step size.
    pub step: f64,
    /// ADMM γ in per-user units; the consensus problem uses `n·γ`.
    pub gamma: f64,
    /// `None` selects κ by 5-fold cross-validation on the training split.
    pub kappa: Option<f64>,
    pub clip: Option<f64>,
    pub noise: NoiseSpec,
    pub delta: f64,
    pub sample_rate: f64,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setting: SettingKind::Federated,
            algorithm: Algorithm::Admm,
            n: 1000,
            p: 64,
            support: 8,
            noise_std: 0.1,
            data_seed: 0,
            train_frac: 0.9,
            iterations: 200,
            lambda: 0.5,
            step: 0.5,
            gamma: 0.1,
            kappa: None,
            clip: Some(1.0),
            noise: NoiseSpec::Epsilons(vec![1.0]),
            delta: DEFAULT_DELTA,
            sample_rate: 0.1,
            seeds: (0..10).collect(),
        }
    }
}

/// Train/test data and the penalty shared by every cell of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub train: LassoDataset,
    pub test: LassoDataset,
    pub kappa: f64,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let data = gen_lasso(cfg.n, cfg.p, cfg.support, cfg.noise_std, cfg.data_seed)?;
    let (train, test) = data.split(cfg.train_frac, cfg.data_seed)?;
    let kappa = match cfg.kappa {
        Some(k) => k,
        None => select_kappa(&train, &KAPPA_GRID, 5)?,
    };
    Ok(Prepared { train, test, kappa })
}

/// Users per federated round for `n` training users.
pub fn users_per_round(cfg: &ExperimentConfig, n: usize) -> usize {
    ((cfg.sample_rate * n as f64).round() as usize).clamp(1, n)
}

/// Accountant view of one run; `k_i` overrides the per-user participation estimate.
///
/// Clipping at `C` bounds a user's contribution: ADMM moves `u_i` by at most
/// `4λC` against noise `λσ` (`Lγ = C`), a clipped gradient by `2C` against
/// noise `σ` (`Lγ = C/2`). The centralized bound carries `1/n²`, so its `L`
/// is scaled by `n`.
pub fn privacy_setting(cfg: &ExperimentConfig, n: usize, k_i: Option<usize>) -> Result<Setting<f64>> {
    let c = cfg
        .clip
        .ok_or_else(|| noisyfix::Error::Parameter("private runs need a clipping threshold".into()))?;
    let lg = match cfg.algorithm {
        Algorithm::Admm => c,
        Algorithm::DpSgd => c / 2.0,
    };
    let k = cfg.iterations;
    Ok(match cfg.setting {
        SettingKind::Centralized => Setting::Centralized {
            k,
            l: lg * n as f64,
            gamma: 1.0,
            n,
        },
        SettingKind::Federated => Setting::FederatedCentral {
            k,
            l: lg,
            gamma: 1.0,
            m: users_per_round(cfg, n),
            n,
        },
        SettingKind::Decentralized => Setting::Network {
            k_i: match k_i {
                Some(v) => v,
                None => privacy::participations_estimate(k, n)?,
            },
            l: lg,
            gamma: 1.0,
            n,
        },
    })
}

/// `(ε, δ)`-DP reached with noise `sigma`; infinite when no bound applies.
pub fn achieved_epsilon(setting: &Setting<f64>, sigma: f64, delta: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Ok(f64::INFINITY);
    }
    match PrivacyTarget::dp(f64::INFINITY, delta).achieved(setting, sigma) {
        Ok(e) => Ok(e),
        Err(noisyfix::Error::ConditionNotMet { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub setting: SettingKind,
    pub algorithm: Algorithm,
    /// Achieved ε, recomputed by the accountant from the σ and K actually used.
    pub epsilon: f64,
    pub delta: f64,
    pub sigma: f64,
    pub iterations: usize,
    pub seed: u64,
    pub train_obj: f64,
    pub test_obj: f64,
    pub runtime_ms: f64,
    /// Budget the run was calibrated for, if any.
    pub target_epsilon: Option<f64>,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub model: Vec<f64>,
    pub train_obj: f64,
    pub test_obj: f64,
    pub trace: Vec<TracePoint>,
    pub counts: ParticipationCounts,
    pub observations: Vec<Observation<f64>>,
    pub runtime_ms: f64,
}

/// Lasso consensus problem on `data`: rank-one data proxes, soft threshold `γκ/n`.
pub fn lasso_consensus(
    data: &LassoDataset,
    kappa: f64,
    gamma: f64,
    clip: Option<f64>,
) -> Result<ConsensusProblem<f64>> {
    let n = data.n();
    let prox_f = (0..n)
        .map(|i| ProxSpec::quadratic_rank_one(data.row(i).to_vec(), data.b[i], gamma, n))
        .collect::<noisyfix::Result<Vec<_>>>()?;
    let prox_r = if kappa > 0.0 {
        ProxSpec::l1(gamma * kappa / n as f64)?
    } else {
        ProxSpec::Zero
    };
    // Lipschitz constant matching the clip (Lγ/n = C); informational only.
    let lipschitz = clip.map_or(1.0, |c| c * n as f64 / gamma);
    Ok(ConsensusProblem::new(data.p(), prox_f, prox_r, gamma, lipschitz, clip)?)
}

/// Runs `cfg.algorithm` once with noise `sigma` and seed `seed`.
pub fn run_cell(
    cfg: &ExperimentConfig,
    prepared: &Prepared,
    sigma: f64,
    seed: u64,
    record_trace: bool,
    reference: Option<&[f64]>,
) -> Result<CellOutcome> {
    let train = &prepared.train;
    let kappa = prepared.kappa;
    let n = train.n();
    let start = Instant::now();
    let (model, trace, counts, observations) = match cfg.algorithm {
        Algorithm::Admm => {
            let problem = lasso_consensus(train, kappa, cfg.gamma * n as f64, cfg.clip)?;
            let mut admm = AdmmConfig::new(cfg.lambda, sigma, cfg.iterations, seed);
            if record_trace {
                let data = Arc::new(train.clone());
                admm.trace = AdmmTraceOptions {
                    objective: Some(Arc::new(move |z: &[f64]| {
                        lasso_objective(&data, z, kappa).unwrap_or(f64::NAN)
                    })),
                    reference: reference.map(<[f64]>::to_vec),
                    store_iterates: false,
                };
            }
            let (z, run_trace, observations) = match cfg.setting {
                SettingKind::Centralized => {
                    let out = centralized_run(&problem, None, &admm)?;
                    (out.z, out.trace, Vec::new())
                }
                SettingKind::Federated => {
                    let out = federated_run(&problem, None, &admm, users_per_round(cfg, n))?;
                    (out.z, out.trace, Vec::new())
                }
                SettingKind::Decentralized => {
                    let out = decentralized_run(&problem, None, &admm)?;
                    (out.z, out.trace, out.observations)
                }
            };
            let trace = run_trace
                .records
                .iter()
                .map(|r| TracePoint {
                    iter: r.k,
                    objective: r.objective.unwrap_or(f64::NAN),
                    dist_sq: r.dist_sq,
                })
                .collect();
            (z, trace, ParticipationCounts::from_trace(&run_trace), observations)
        }
        Algorithm::DpSgd => {
            let participation = match cfg.setting {
                SettingKind::Centralized => Participation::Full,
                SettingKind::Federated => Participation::Subset(users_per_round(cfg, n)),
                SettingKind::Decentralized => Participation::Walk,
            };
            let out = dpsgd_baseline(
                train,
                kappa,
                &DpSgdConfig {
                    step: cfg.step,
                    clip: cfg.clip,
                    sigma,
                    iterations: cfg.iterations,
                    participation,
                    seed,
                    record_trace,
                },
                reference,
            )?;
            (out.x, out.trace, out.counts, Vec::new())
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(CellOutcome {
        train_obj: lasso_objective(train, &model, kappa)?,
        test_obj: lasso_objective(&prepared.test, &model, kappa)?,
        model,
        trace,
        counts,
        observations,
        runtime_ms,
    })
}

/// Noise levels to run: one per budget (calibrated) or the fixed σ.
pub fn noise_levels(cfg: &ExperimentConfig, n: usize) -> Result<Vec<(Option<f64>, f64, f64)>> {
    match &cfg.noise {
        NoiseSpec::Sigma(s) => Ok(vec![(None, *s, cfg.delta)]),
        NoiseSpec::Epsilons(epsilons) => {
            let setting = privacy_setting(cfg, n, None)?;
            epsilons
                .iter()
                .map(|&eps| {
                    let sigma = calibrate_sigma(&PrivacyTarget::dp(eps, cfg.delta), &setting)?;
                    Ok((Some(eps), sigma, cfg.delta))
                })
                .collect()
        }
    }
}

/// Runs every `(budget, seed)` cell in parallel; rows come back in grid order.
pub fn run_experiment(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<Vec<ResultRow>> {
    let n = prepared.train.n();
    let levels = noise_levels(cfg, n)?;
    let cells: Vec<(Option<f64>, f64, f64, u64)> = levels
        .iter()
        .flat_map(|&(target, sigma, delta)| cfg.seeds.iter().map(move |&s| (target, sigma, delta, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(target, sigma, delta, seed)| {
            let out = run_cell(cfg, prepared, sigma, seed, false, None)?;
            let epsilon = match (cfg.clip, sigma > 0.0) {
                (Some(_), true) => {
                    let k_i = (cfg.setting == SettingKind::Decentralized).then(|| out.counts.max());
                    achieved_epsilon(&privacy_setting(cfg, n, k_i)?, sigma, delta)?
                }
                _ => f64::INFINITY,
            };
            Ok(ResultRow {
                setting: cfg.setting,
                algorithm: cfg.algorithm,
                epsilon,
                delta,
                sigma,
                iterations: cfg.iterations,
                seed,
                train_obj: out.train_obj,
                test_obj: out.test_obj,
                runtime_ms: out.runtime_ms,
                target_epsilon: target,
            })
        })
        .collect()
}

/// Hyperparameters picked by [`tune`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned {
    /// λ for ADMM, step size for DP-SGD.
    pub rate: f64,
    pub clip: f64,
    /// Per-user γ (ADMM only).
    pub gamma: f64,
    pub train_obj: f64,
}

/// Search grids for [`tune`].
#[derive(Debug, Clone, PartialEq)]
pub struct TuningGrid {
    /// ADMM relaxation λ.
    pub lambdas: Vec<f64>,
    /// DP-SGD step sizes in units of `1/max_i‖a_i‖²`, the per-item smoothness.
    pub steps: Vec<f64>,
    pub clips: Vec<f64>,
    /// Per-user ADMM γ.
    pub gammas: Vec<f64>,
}

impl Default for TuningGrid {
    fn default() -> Self {
        Self {
            lambdas: vec![0.1, 0.3, 0.5, 1.0],
            steps: vec![0.1, 0.3, 0.5, 1.0],
            clips: vec![0.1, 1.0, 10.0],
            gammas: vec![0.01, 0.1, 1.0],
        }
    }
}

impl TuningGrid {
    /// `(rate, clip, γ)` triples, DP-SGD steps divided by `item_beta`.
    fn candidates(&self, algorithm: Algorithm, item_beta: f64) -> Vec<(f64, f64, f64)> {
        let (rates, rate_scale, gammas): (&[f64], f64, &[f64]) = match algorithm {
            Algorithm::Admm => (&self.lambdas, 1.0, &self.gammas),
            Algorithm::DpSgd => (&self.steps, 1.0 / item_beta, &[1.0]),
        };
        let mut out = Vec::new();
        for &r in rates {
            for &c in &self.clips {
                for &g in gammas {
                    out.push((r * rate_scale, c, g));
                }
            }
        }
        out
    }
}

/// Grid search at one budget on the training objective, averaged over `seeds`.
pub fn tune(
    base: &ExperimentConfig,
    prepared: &Prepared,
    epsilon: f64,
    delta: f64,
    grid: &TuningGrid,
    seeds: &[u64],
) -> Result<Tuned> {
    let candidates = grid.candidates(base.algorithm, prepared.train.item_smoothness());
    let scored: Vec<Tuned> = candidates
        .par_iter()
        .map(|&(rate, clip, gamma)| {
            let mut cfg = base.clone();
            cfg.clip = Some(clip);
            cfg.gamma = gamma;
            match cfg.algorithm {
                Algorithm::Admm => cfg.lambda = rate,
                Algorithm::DpSgd => cfg.step = rate,
            }
            cfg.noise = NoiseSpec::Epsilons(vec![epsilon]);
            cfg.delta = delta;
            cfg.seeds = seeds.to_vec();
            let rows = run_experiment(&cfg, prepared)?;
            let mean = rows.iter().map(|r| r.train_obj).sum::<f64>() / rows.len() as f64;
            Ok(Tuned {
                rate,
                clip,
                gamma,
                train_obj: if mean.is_finite() { mean } else { f64::INFINITY },
            })
        })
        .collect::<Result<_>>()?;
    scored
        .into_iter()
        .min_by(|a, b| a.train_obj.total_cmp(&b.train_obj))
        .ok_or_else(|| BenchError::Core(noisyfix::Error::Parameter("empty tuning grid".into())))
}

/// Apply tuned values to a config.
pub fn with_tuned(base: &ExperimentConfig, t: &Tuned) -> ExperimentConfig {
    let mut cfg = base.clone();
    cfg.clip = Some(t.clip);
    match cfg.algorithm {
        Algorithm::Admm => {
            cfg.lambda = t.rate;
            cfg.gamma = t.gamma;
        }
        Algorithm::DpSgd => cfg.step = t.rate,
    }
    cfg
}

/// Settings of the DP-ADMM vs DP-SGD comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub base: ExperimentConfig,
    pub epsilons: Vec<f64>,
    pub grid: TuningGrid,
    pub tuning_seeds: Vec<u64>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            base: ExperimentConfig::default(),
            epsilons: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            grid: TuningGrid::default(),
            tuning_seeds: vec![1000, 1001],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonOutput {
    pub rows: Vec<ResultRow>,
    pub admm: Tuned,
    pub dpsgd: Tuned,
    pub kappa: f64,
}

/// Tunes both algorithms at the smallest budget, then runs every budget and seed.
pub fn run_comparison(cfg: &ComparisonConfig) -> Result<ComparisonOutput> {
    let prepared = prepare(&cfg.base)?;
    let smallest = cfg.epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    let mut tuned = Vec::new();
    for algorithm in [Algorithm::Admm, Algorithm::DpSgd] {
        let mut base = cfg.base.clone();
        base.algorithm = algorithm;
        let t = tune(&base, &prepared, smallest, cfg.base.delta, &cfg.grid, &cfg.tuning_seeds)?;
        let mut run = with_tuned(&base, &t);
        run.noise = NoiseSpec::Epsilons(cfg.epsilons.clone());
        rows.extend(run_experiment(&run, &prepared)?);
        tuned.push(t);
    }
    Ok(ComparisonOutput {
        rows,
        admm: tuned[0],
        dpsgd: tuned[1],
        kappa: prepared.kappa,
    })
}

/// Mean test objective per `(algorithm, target ε)`, sorted by ε.
pub fn summarize(rows: &[ResultRow]) -> Vec<(Algorithm, f64, f64, f64)> {
    let mut keys: Vec<(Algorithm, f64)> = Vec::new();
    for r in rows {
        let eps = r.target_epsilon.unwrap_or(r.epsilon);
        if !keys.iter().any(|&(a, e)| a == r.algorithm && e == eps) {
            keys.push((r.algorithm, eps));
        }
    }
    keys.sort_by(|a, b| a.1.total_cmp(&b.1).then((a.0 as u8).cmp(&(b.0 as u8))));
    keys.into_iter()
        .map(|(alg, eps)| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == alg && r.target_epsilon.unwrap_or(r.epsilon) == eps)
                .map(|r| r.test_obj)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len().max(2) - 1) as f64;
            (alg, eps, mean, var.sqrt())
        })
        .collect()
}
