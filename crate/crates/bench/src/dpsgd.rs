//! Proximal DP-SGD baseline: noise on clipped gradients of the smooth part.

use noisyfix::operators::{clip, prox_l1};
use noisyfix::simnet::{ParticipationCounts, UserPopulation};
use noisyfix::{linalg, Streams};

use crate::data::{item_gradient, lasso_objective, LassoDataset};
use crate::error::Result;
use crate::TracePoint;

/// Who contributes a gradient at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Participation {
    /// `m` users drawn without replacement per step.
    Subset(usize),
    /// Every item, every step.
    Full,
    /// One user per step along the random walk.
    Walk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSgdConfig {
    pub step: f64,
    /// `None` disables clipping.
    pub clip: Option<f64>,
    /// Std of the Gaussian added to each contributed gradient.
    pub sigma: f64,
    pub iterations: usize,
    pub participation: Participation,
    pub seed: u64,
    pub record_trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSgdOutput {
    pub x: Vec<f64>,
    pub trace: Vec<TracePoint>,
    pub counts: ParticipationCounts,
}

/// Runs `iterations` steps of `x ← prox_{tκ‖·‖₁}(x − t·mean_S(clip(∇f_i(x)) + ξ_i))`.
///
/// `ξ_i` for user `i` at step `k` comes from noise substream `(k, i)`.
pub fn dpsgd_baseline(
    data: &LassoDataset,
    kappa: f64,
    cfg: &DpSgdConfig,
    reference: Option<&[f64]>,
) -> Result<DpSgdOutput> {
    let bad = |m: String| noisyfix::Error::Parameter(m);
    if !(cfg.step > 0.0) {
        return Err(bad(format!("step={} must be > 0", cfg.step)).into());
    }
    if !(cfg.sigma >= 0.0) {
        return Err(bad(format!("sigma={} must be >= 0", cfg.sigma)).into());
    }
    if !(kappa >= 0.0) {
        return Err(bad(format!("kappa={kappa} must be >= 0")).into());
    }
    let (n, p) = (data.n(), data.p());
    let streams = Streams::new(cfg.seed);
    let population = UserPopulation::new(n, cfg.seed)?;
    let mut walker = population.first_user();
    let mut counts = vec![0usize; n];
    let mut x = vec![0.0; p];
    let mut trace = Vec::new();
    for k in 0..cfg.iterations {
        let users: Vec<usize> = match cfg.participation {
            Participation::Subset(m) => population.sample_round(k, m)?,
            Participation::Full => (0..n).collect(),
            Participation::Walk => vec![walker],
        };
        let mut g = vec![0.0; p];
        for &i in &users {
            counts[i] += 1;
            let mut gi = item_gradient(data, i, &x);
            if let Some(c) = cfg.clip {
                gi = clip(&gi, c)?;
            }
            let xi: Vec<f64> = streams.gaussian(k as u64, i as u64, p, cfg.sigma);
            linalg::axpy(1.0, &gi, &mut g);
            linalg::axpy(1.0, &xi, &mut g);
        }
        let inv = 1.0 / users.len() as f64;
        let v: Vec<f64> = x.iter().zip(&g).map(|(xj, gj)| xj - cfg.step * inv * gj).collect();
        x = prox_l1(&v, cfg.step * kappa)?;
        if cfg.participation == Participation::Walk {
            walker = population.walk_next(k, walker);
        }
        if cfg.record_trace {
            trace.push(TracePoint {
                iter: k,
                objective: lasso_objective(data, &x, kappa)?,
                dist_sq: reference.map(|r| linalg::dist_sq(&x, r)),
            });
        }
    }
    Ok(DpSgdOutput {
        x,
        trace,
        counts: ParticipationCounts::new(counts),
    })
}
