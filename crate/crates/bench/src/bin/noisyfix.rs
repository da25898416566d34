use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noisyfix::privacy::{calibrate_sigma, default_alphas, PrivacyTarget};
use noisyfix_bench::config;
use noisyfix_bench::data::train_count;
use noisyfix_bench::experiment::{
    achieved_epsilon, prepare, privacy_setting, run_cell, run_comparison, run_experiment, summarize, ComparisonConfig,
    ExperimentConfig, NoiseSpec,
};
use noisyfix_bench::export;
use noisyfix_bench::reference::{solve_reference, REFERENCE_MAX_ITER, REFERENCE_TOL};
use noisyfix_bench::{output_dir, BenchError, Result};

#[derive(Parser)]
#[command(name = "noisyfix", about = "Private ADMM and DP-SGD experiments on synthetic Lasso")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Experiment flags. Keys in `--config` take precedence over flags.
#[derive(Args)]
struct Common {
    /// `key = value` experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to $NOISYFIX_OUT or the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// centralized | federated | decentralized
    #[arg(long)]
    setting: Option<String>,
    /// admm | dpsgd
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    support: Option<String>,
    #[arg(long)]
    noise_std: Option<String>,
    #[arg(long)]
    data_seed: Option<String>,
    #[arg(long)]
    train_frac: Option<String>,
    /// Iteration count K.
    #[arg(long = "iterations", short = 'K')]
    iterations: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    step: Option<String>,
    /// Per-user γ.
    #[arg(long)]
    gamma: Option<String>,
    /// Lasso penalty, or `cv`.
    #[arg(long)]
    kappa: Option<String>,
    /// Clipping threshold C, or `none`.
    #[arg(long)]
    clip: Option<String>,
    #[arg(long)]
    sample_rate: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Fixed noise std; replaces any budget.
    #[arg(long)]
    sigma: Option<String>,
    /// Comma-separated ε budgets.
    #[arg(long)]
    epsilons: Option<String>,
    #[arg(long)]
    delta: Option<String>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("setting", &self.setting),
            ("algorithm", &self.algorithm),
            ("n", &self.n),
            ("p", &self.p),
            ("support", &self.support),
            ("noise_std", &self.noise_std),
            ("data_seed", &self.data_seed),
            ("train_frac", &self.train_frac),
            ("iterations", &self.iterations),
            ("lambda", &self.lambda),
            ("step", &self.step),
            ("gamma", &self.gamma),
            ("kappa", &self.kappa),
            ("clip", &self.clip),
            ("sample_rate", &self.sample_rate),
            ("seeds", &self.seeds),
            ("sigma", &self.sigma),
            ("epsilons", &self.epsilons),
            ("delta", &self.delta),
        ]
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// One run with the first seed; writes trace.csv (and observations.csv when decentralized).
    Solve(Common),
    /// Every budget and seed; writes results.csv.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Tune and compare both algorithms over the budget grid.
        #[arg(long)]
        compare: bool,
    },
    /// RDP curve and (ε, δ) for the σ given by `--sigma`; writes accountant.csv.
    Account(Common),
    /// Smallest σ meeting each configured budget.
    Calibrate(Common),
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::default();
    for (key, value) in common.flags() {
        if let Some(v) = value {
            config::apply(&mut cfg, 0, key, v)?;
        }
    }
    if let Some(path) = &common.config {
        config::apply_all(&mut cfg, &config::load(path)?)?;
    }
    Ok((cfg, common.out.clone().unwrap_or_else(output_dir)))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve(common) => {
            let (cfg, out) = load(&common)?;
            let prepared = prepare(&cfg)?;
            let reference = solve_reference(&prepared.train, prepared.kappa, REFERENCE_MAX_ITER, REFERENCE_TOL)?;
            let sigma = match &cfg.noise {
                NoiseSpec::Sigma(s) => *s,
                NoiseSpec::Epsilons(epsilons) => {
                    let eps = *epsilons.first().ok_or_else(|| bad_input("empty epsilon list"))?;
                    let setting = privacy_setting(&cfg, prepared.train.n(), None)?;
                    calibrate_sigma(&PrivacyTarget::dp(eps, cfg.delta), &setting)?
                }
            };
            let seed = cfg.seeds.first().copied().unwrap_or(0);
            let cell = run_cell(&cfg, &prepared, sigma, seed, true, Some(&reference.x))?;
            export::write_trace(&out.join("trace.csv"), &cell.trace)?;
            if !cell.observations.is_empty() {
                export::write_observations(&out.join("observations.csv"), &cell.observations)?;
            }
            println!(
                "kappa={} sigma={} train_obj={} test_obj={} dist_to_reference={}",
                prepared.kappa,
                sigma,
                cell.train_obj,
                cell.test_obj,
                noisyfix::linalg::dist_sq(&cell.model, &reference.x).sqrt()
            );
        }
        Cmd::Bench { common, compare } => {
            let (cfg, out) = load(&common)?;
            let rows = if compare {
                let NoiseSpec::Epsilons(epsilons) = cfg.noise.clone() else {
                    return Err(bad_input("--compare needs epsilon budgets"));
                };
                let cmp = run_comparison(&ComparisonConfig {
                    base: cfg,
                    epsilons,
                    ..ComparisonConfig::default()
                })?;
                println!("kappa={} admm={:?} dpsgd={:?}", cmp.kappa, cmp.admm, cmp.dpsgd);
                cmp.rows
            } else {
                run_experiment(&cfg, &prepare(&cfg)?)?
            };
            for (alg, eps, mean, sd) in summarize(&rows) {
                println!("{alg:>6} eps={eps:<6} test_obj={mean:.6} sd={sd:.6}");
            }
            export::write_results(&out.join("results.csv"), &rows)?;
        }
        Cmd::Account(common) => {
            let (cfg, out) = load(&common)?;
            let NoiseSpec::Sigma(sigma) = cfg.noise else {
                return Err(bad_input("account needs --sigma"));
            };
            let setting = privacy_setting(&cfg, train_count(cfg.n, cfg.train_frac), None)?;
            let curve = setting.curve(sigma, &default_alphas())?;
            export::write_accountant(&out.join("accountant.csv"), &curve)?;
            let eps = achieved_epsilon(&setting, sigma, cfg.delta)?;
            println!("{} epsilon={eps} delta={}", setting.name(), cfg.delta);
        }
        Cmd::Calibrate(common) => {
            let (cfg, _) = load(&common)?;
            let NoiseSpec::Epsilons(epsilons) = &cfg.noise else {
                return Err(bad_input("calibrate needs epsilon budgets"));
            };
            let setting = privacy_setting(&cfg, train_count(cfg.n, cfg.train_frac), None)?;
            for &eps in epsilons {
                let sigma = calibrate_sigma(&PrivacyTarget::dp(eps, cfg.delta), &setting)?;
                println!("epsilon={eps} delta={} sigma={sigma}", cfg.delta);
            }
        }
    }
    Ok(())
}

fn bad_input(msg: &str) -> BenchError {
    noisyfix::Error::Parameter(msg.to_string()).into()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
