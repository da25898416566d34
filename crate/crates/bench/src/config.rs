//! `key = value` experiment files. Blank lines and `#` comments are ignored.

use std::path::Path;

use crate::error::{BenchError, Result};
use crate::experiment::{ExperimentConfig, NoiseSpec};

/// Parsed `(line, key, value)` entries in file order.
pub fn parse(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| BenchError::Config {
            line: i + 1,
            msg: format!("expected key = value, got '{line}'"),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<(usize, String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text)
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| BenchError::Config {
        line,
        msg: format!("{key}: cannot parse '{v}'"),
    })
}

fn list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| num(line, key, s.trim())).collect()
}

/// Applies one entry; `line` is only used in error messages.
pub fn apply(cfg: &mut ExperimentConfig, line: usize, key: &str, value: &str) -> Result<()> {
    let bad = |msg: String| BenchError::Config { line, msg };
    match key {
        "setting" => cfg.setting = value.parse().map_err(bad)?,
        "algorithm" => cfg.algorithm = value.parse().map_err(bad)?,
        "n" => cfg.n = num(line, key, value)?,
        "p" => cfg.p = num(line, key, value)?,
        "support" => cfg.support = num(line, key, value)?,
        "noise_std" => cfg.noise_std = num(line, key, value)?,
        "data_seed" => cfg.data_seed = num(line, key, value)?,
        "train_frac" => cfg.train_frac = num(line, key, value)?,
        "iterations" | "K" => cfg.iterations = num(line, key, value)?,
        "lambda" => cfg.lambda = num(line, key, value)?,
        "step" => cfg.step = num(line, key, value)?,
        "gamma" => cfg.gamma = num(line, key, value)?,
        "kappa" => {
            cfg.kappa = if value == "cv" {
                None
            } else {
                Some(num(line, key, value)?)
            }
        }
        "clip" => {
            cfg.clip = if value == "none" {
                None
            } else {
                Some(num(line, key, value)?)
            }
        }
        "sample_rate" => cfg.sample_rate = num(line, key, value)?,
        "seeds" => cfg.seeds = list(line, key, value)?,
        "sigma" => cfg.noise = NoiseSpec::Sigma(num(line, key, value)?),
        "epsilons" | "epsilon" => cfg.noise = NoiseSpec::Epsilons(list(line, key, value)?),
        "delta" => cfg.delta = num(line, key, value)?,
        _ => return Err(bad(format!("unknown key '{key}'"))),
    }
    Ok(())
}

pub fn apply_all(cfg: &mut ExperimentConfig, entries: &[(usize, String, String)]) -> Result<()> {
    entries.iter().try_for_each(|(l, k, v)| apply(cfg, *l, k, v))
}
