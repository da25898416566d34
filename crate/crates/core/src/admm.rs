//! Private consensus ADMM and its federated, decentralized and general forms.
//!
//! Every run returns the consensus variable `z` and a trace; primal `x`
//! iterates stay inside a round.
//!
//! Prox convention: `ConsensusProblem::prox_f[i]` is the x-update prox for
//! item `i` and `prox_r` is the z-update prox, both with γ (and any `1/n`
//! weighting of the objective) already folded in. For the Lasso objective
//! `(1/2n)‖Ax − b‖² + κ‖x‖₁` that means rank-one proxes with item count `n`
//! and soft thresholding at `γκ/n`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixedpoint::{IterationRecord, RunTrace};
use crate::linalg::{self, Matrix};
use crate::operators::{clip, BlockVector, ProxSpec};
use crate::rng::Streams;
use crate::scalar::Scalar;
use crate::simnet::{Observation, UserPopulation};

/// `min (1/n) Σ f_i(x_i) + r(z)` subject to `x_i = z`.
#[derive(Clone)]
pub struct ConsensusProblem<T> {
    n: usize,
    p: usize,
    prox_f: Vec<ProxSpec<T>>,
    prox_r: ProxSpec<T>,
    gamma: T,
    lipschitz: T,
    clip: Option<T>,
}

impl<T: Scalar> fmt::Debug for ConsensusProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConsensusProblem")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("prox_r", &self.prox_r)
            .field("gamma", &self.gamma)
            .field("lipschitz", &self.lipschitz)
            .field("clip", &self.clip)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> ConsensusProblem<T> {
    pub fn new(
        p: usize,
        prox_f: Vec<ProxSpec<T>>,
        prox_r: ProxSpec<T>,
        gamma: T,
        lipschitz: T,
        clip: Option<T>,
    ) -> Result<Self> {
        if prox_f.is_empty() {
            return Err(Error::param("item count n must be >= 1"));
        }
        if p == 0 {
            return Err(Error::param("dimension p must be >= 1"));
        }
        if !(gamma > T::zero()) {
            return Err(Error::param(format!("gamma={gamma} must be > 0")));
        }
        if !(lipschitz > T::zero()) {
            return Err(Error::param(format!("Lipschitz constant L={lipschitz} must be > 0")));
        }
        if let Some(c) = clip {
            if !(c > T::zero()) {
                return Err(Error::param(format!("clipping threshold {c} must be > 0")));
            }
        }
        Ok(Self {
            n: prox_f.len(),
            p,
            prox_f,
            prox_r,
            gamma,
            lipschitz,
            clip,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn clip_threshold(&self) -> Option<T> {
        self.clip
    }

    pub fn prox_f(&self, i: usize) -> Option<&ProxSpec<T>> {
        self.prox_f.get(i)
    }

    pub fn prox_r(&self) -> &ProxSpec<T> {
        &self.prox_r
    }

    /// Zero `u` with `z = prox_r(0)`.
    pub fn initial_state(&self) -> Result<AdmmState<T>> {
        self.state_from(BlockVector::zeros(self.n, self.p))
    }

    /// State from a given `u`, with `z = prox_r(mean u)`.
    pub fn state_from(&self, u: BlockVector<T>) -> Result<AdmmState<T>> {
        if u.num_blocks() != self.n || u.block_dim() != self.p {
            return Err(Error::structural(format!(
                "u has {}x{} layout, problem needs {}x{}",
                u.num_blocks(),
                u.block_dim(),
                self.n,
                self.p
            )));
        }
        let z = self.prox_r.apply(&u.block_mean())?;
        Ok(AdmmState { u, z, k: 0 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T> {
    pub u: BlockVector<T>,
    pub z: Vec<T>,
    pub k: usize,
}

type ZObjective<T> = dyn Fn(&[T]) -> T + Send + Sync;

/// Per-iteration monitoring of `z`.
#[derive(Clone, Default)]
pub struct AdmmTraceOptions<T> {
    pub objective: Option<Arc<ZObjective<T>>>,
    pub reference: Option<Vec<T>>,
    /// Keep every `z` in `RunTrace::iterates` as a one-block vector.
    pub store_iterates: bool,
}

impl<T> fmt::Debug for AdmmTraceOptions<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdmmTraceOptions")
            .field("objective", &self.objective.is_some())
            .field("reference", &self.reference.is_some())
            .field("store_iterates", &self.store_iterates)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct AdmmConfig<T> {
    pub lambda: T,
    pub sigma: T,
    pub iterations: usize,
    pub seed: u64,
    pub trace: AdmmTraceOptions<T>,
}

impl<T: Scalar> AdmmConfig<T> {
    pub fn new(lambda: T, sigma: T, iterations: usize, seed: u64) -> Self {
        Self {
            lambda,
            sigma,
            iterations,
            seed,
            trace: AdmmTraceOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        check_sigma(self.sigma)?;
        if self.iterations == 0 {
            return Err(Error::param("iteration count K must be >= 1"));
        }
        Ok(())
    }
}

/// What a run releases: the final consensus variable and its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmOutput<T> {
    pub z: Vec<T>,
    pub trace: RunTrace<T>,
}

fn check_lambda<T: Scalar>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda <= T::one() {
        Ok(())
    } else {
        Err(Error::param(format!("lambda={lambda} must be in (0,1]")))
    }
}

fn check_sigma<T: Scalar>(sigma: T) -> Result<()> {
    if sigma >= T::zero() {
        Ok(())
    } else {
        Err(Error::param(format!("sigma={sigma} must be >= 0")))
    }
}

fn check_layout<T: Scalar>(state: &AdmmState<T>, problem: &ConsensusProblem<T>) -> Result<()> {
    if state.u.num_blocks() != problem.n || state.u.block_dim() != problem.p || state.z.len() != problem.p {
        return Err(Error::structural("state layout does not match the problem"));
    }
    Ok(())
}

/// `prox_r(mean_i u_i)`.
pub fn z_update<T: Scalar>(state: &AdmmState<T>, problem: &ConsensusProblem<T>) -> Result<Vec<T>> {
    check_layout(state, problem)?;
    problem.prox_r.apply(&state.u.block_mean())
}

/// `prox_{f_i}(2z − u_i)`.
pub fn x_update<T: Scalar>(i: usize, z: &[T], state: &AdmmState<T>, problem: &ConsensusProblem<T>) -> Result<Vec<T>> {
    let prox = problem
        .prox_f
        .get(i)
        .ok_or_else(|| Error::structural(format!("item index {i} out of range (n={})", problem.n)))?;
    if z.len() != problem.p {
        return Err(Error::structural("z has the wrong dimension"));
    }
    let two = T::lit(2.0);
    let v: Vec<T> = z.iter().zip(state.u.block(i)).map(|(&zj, &uj)| two * zj - uj).collect();
    prox.apply(&v)
}

/// `u_i + 2λ(clip(x_i − z) + ½η_i)`.
pub fn u_update<T: Scalar>(
    problem: &ConsensusProblem<T>,
    i: usize,
    x_i: &[T],
    z: &[T],
    state: &AdmmState<T>,
    lambda: T,
    eta: &[T],
) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    if i >= problem.n {
        return Err(Error::structural(format!(
            "item index {i} out of range (n={})",
            problem.n
        )));
    }
    let p = problem.p;
    if x_i.len() != p || z.len() != p || eta.len() != p {
        return Err(Error::structural("u-update operands have mismatched dimensions"));
    }
    let mut d = linalg::sub(x_i, z);
    if let Some(c) = problem.clip {
        d = clip(&d, c)?;
    }
    let two_lambda = T::lit(2.0) * lambda;
    let half = T::lit(0.5);
    Ok(state
        .u
        .block(i)
        .iter()
        .zip(d.iter().zip(eta))
        .map(|(&ui, (&di, &ei))| ui + two_lambda * (di + half * ei))
        .collect())
}

/// Local x/u update of user `i` against `z`, with noise from substream `(k, i)`.
fn local_update<T: Scalar>(
    problem: &ConsensusProblem<T>,
    state: &AdmmState<T>,
    i: usize,
    z: &[T],
    lambda: T,
    sigma: T,
    streams: &Streams,
) -> Result<Vec<T>> {
    let x = x_update(i, z, state, problem)?;
    let eta = streams.gaussian(state.k as u64, i as u64, problem.p, sigma);
    u_update(problem, i, &x, z, state, lambda, &eta)
}

/// One centralized iteration: z-update, then every user's x- and u-update.
pub fn centralized_iteration<T: Scalar>(
    problem: &ConsensusProblem<T>,
    state: &AdmmState<T>,
    lambda: T,
    sigma: T,
    streams: &Streams,
) -> Result<AdmmState<T>> {
    check_sigma(sigma)?;
    let z = z_update(state, problem)?;
    let mut next = state.clone();
    for i in 0..problem.n {
        let ui = local_update(problem, state, i, &z, lambda, sigma, streams)?;
        next.u.block_mut(i).copy_from_slice(&ui);
    }
    next.z = z;
    next.k += 1;
    Ok(next)
}

fn record<T: Scalar>(
    trace: &mut RunTrace<T>,
    opts: &AdmmTraceOptions<T>,
    k: usize,
    active: Vec<bool>,
    z: &[T],
    p: usize,
) -> Result<()> {
    let draws = active.iter().filter(|&&a| a).count() * p;
    trace.records.push(IterationRecord {
        k,
        active,
        objective: opts.objective.as_ref().map(|f| f.as_ref()(z)),
        dist_sq: opts.reference.as_ref().map(|r| linalg::dist_sq(z, r)),
        noise_draws: draws,
    });
    if opts.store_iterates {
        trace.iterates.push(BlockVector::from_flat(z.to_vec(), 1, z.len())?);
    }
    Ok(())
}

fn start_state<T: Scalar>(
    problem: &ConsensusProblem<T>,
    u0: Option<&BlockVector<T>>,
    cfg: &AdmmConfig<T>,
) -> Result<AdmmState<T>> {
    cfg.validate()?;
    if let Some(r) = &cfg.trace.reference {
        if r.len() != problem.p {
            return Err(Error::structural("reference point has the wrong dimension"));
        }
    }
    match u0 {
        Some(u) => problem.state_from(u.clone()),
        None => problem.initial_state(),
    }
}

/// Centralized private ADMM; releases only `z_K`.
pub fn centralized_run<T: Scalar>(
    problem: &ConsensusProblem<T>,
    u0: Option<&BlockVector<T>>,
    cfg: &AdmmConfig<T>,
) -> Result<AdmmOutput<T>> {
    let mut state = start_state(problem, u0, cfg)?;
    let streams = Streams::new(cfg.seed);
    let mut trace = RunTrace::default();
    for k in 0..cfg.iterations {
        state = centralized_iteration(problem, &state, cfg.lambda, cfg.sigma, &streams)?;
        record(&mut trace, &cfg.trace, k, vec![true; problem.n], &state.z, problem.p)?;
    }
    Ok(AdmmOutput { z: state.z, trace })
}

/// One federated round over the sampled users `sampled`.
///
/// Sampled users update against the current `z_k`; the server adds the sum of
/// their `Δu_i` divided by `n` (not by `|S|`) and applies `prox_r`.
pub fn federated_round<T: Scalar>(
    problem: &ConsensusProblem<T>,
    state: &AdmmState<T>,
    sampled: &[usize],
    lambda: T,
    sigma: T,
    streams: &Streams,
) -> Result<AdmmState<T>> {
    check_layout(state, problem)?;
    check_sigma(sigma)?;
    if sampled.is_empty() {
        return Err(Error::param("sampled user set is empty"));
    }
    let mut next = state.clone();
    let mut delta_sum = vec![T::zero(); problem.p];
    let mut seen = vec![false; problem.n];
    for &i in sampled {
        if i >= problem.n {
            return Err(Error::structural(format!("user {i} out of range (n={})", problem.n)));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::param(format!("user {i} sampled twice")));
        }
        let ui = local_update(problem, state, i, &state.z, lambda, sigma, streams)?;
        for ((d, &new), &old) in delta_sum.iter_mut().zip(&ui).zip(state.u.block(i)) {
            *d += new - old;
        }
        next.u.block_mut(i).copy_from_slice(&ui);
    }
    let inv_n = T::one() / T::from_usize_lossy(problem.n);
    let z_hat: Vec<T> = state.z.iter().zip(&delta_sum).map(|(&z, &d)| z + inv_n * d).collect();
    next.z = problem.prox_r.apply(&z_hat)?;
    next.k += 1;
    Ok(next)
}

/// Federated private ADMM with `m` users per round; releases only `z_K`.
pub fn federated_run<T: Scalar>(
    problem: &ConsensusProblem<T>,
    u0: Option<&BlockVector<T>>,
    cfg: &AdmmConfig<T>,
    users_per_round: usize,
) -> Result<AdmmOutput<T>> {
    let mut state = start_state(problem, u0, cfg)?;
    let streams = Streams::new(cfg.seed);
    let population = UserPopulation::new(problem.n, cfg.seed)?;
    let mut trace = RunTrace::default();
    for k in 0..cfg.iterations {
        let sampled = population.sample_round(k, users_per_round)?;
        state = federated_round(problem, &state, &sampled, cfg.lambda, cfg.sigma, &streams)?;
        let mut active = vec![false; problem.n];
        sampled.iter().for_each(|&i| active[i] = true);
        record(&mut trace, &cfg.trace, k, active, &state.z, problem.p)?;
    }
    Ok(AdmmOutput { z: state.z, trace })
}

/// One hop of the decentralized walk: user `i` updates and passes `z` on.
///
/// The next user is uniform over all `n` users (self-loops allowed).
pub fn decentralized_step<T: Scalar>(
    problem: &ConsensusProblem<T>,
    state: &AdmmState<T>,
    i: usize,
    lambda: T,
    sigma: T,
    streams: &Streams,
) -> Result<(AdmmState<T>, Observation<T>)> {
    check_layout(state, problem)?;
    check_sigma(sigma)?;
    if i >= problem.n {
        return Err(Error::structural(format!("user {i} out of range (n={})", problem.n)));
    }
    let ui = local_update(problem, state, i, &state.z, lambda, sigma, streams)?;
    let inv_n = T::one() / T::from_usize_lossy(problem.n);
    let z_hat: Vec<T> = state
        .z
        .iter()
        .zip(ui.iter().zip(state.u.block(i)))
        .map(|(&z, (&new, &old))| z + inv_n * (new - old))
        .collect();
    let mut next = state.clone();
    next.u.block_mut(i).copy_from_slice(&ui);
    next.z = problem.prox_r.apply(&z_hat)?;
    next.k += 1;
    let user = UserPopulation::new(problem.n, streams.seed())?.walk_next(state.k, i);
    let obs = Observation {
        step: next.k,
        user,
        z: next.z.clone(),
    };
    Ok((next, obs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecentralizedOutput<T> {
    pub z: Vec<T>,
    pub trace: RunTrace<T>,
    /// One entry per hop; the network view of the run.
    pub observations: Vec<Observation<T>>,
}

/// Fully decentralized private ADMM over `K` total hops.
pub fn decentralized_run<T: Scalar>(
    problem: &ConsensusProblem<T>,
    u0: Option<&BlockVector<T>>,
    cfg: &AdmmConfig<T>,
) -> Result<DecentralizedOutput<T>> {
    let mut state = start_state(problem, u0, cfg)?;
    let streams = Streams::new(cfg.seed);
    let mut trace = RunTrace::default();
    let mut observations = Vec::with_capacity(cfg.iterations);
    let mut user = UserPopulation::new(problem.n, cfg.seed)?.first_user();
    for k in 0..cfg.iterations {
        let (next, obs) = decentralized_step(problem, &state, user, cfg.lambda, cfg.sigma, &streams)?;
        let mut active = vec![false; problem.n];
        active[user] = true;
        record(&mut trace, &cfg.trace, k, active, &next.z, problem.p)?;
        user = obs.user;
        observations.push(obs);
        state = next;
    }
    Ok(DecentralizedOutput {
        z: state.z,
        trace,
        observations,
    })
}

/// Linear maps used by the general form, with structured cases kept implicit.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap<T> {
    Dense(Matrix<T>),
    Identity(usize),
    /// `x ↦ sign·(x, x, …, x)`, `copies` stacked copies of a `dim`-vector.
    StackedIdentity {
        copies: usize,
        dim: usize,
        sign: T,
    },
}

impl<T: Scalar> LinearMap<T> {
    pub fn rows(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.rows(),
            LinearMap::Identity(n) => *n,
            LinearMap::StackedIdentity { copies, dim, .. } => copies * dim,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.cols(),
            LinearMap::Identity(n) => *n,
            LinearMap::StackedIdentity { dim, .. } => *dim,
        }
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols() {
            return Err(Error::structural(format!(
                "linear map takes {} inputs, got {}",
                self.cols(),
                x.len()
            )));
        }
        match self {
            LinearMap::Dense(m) => m.matvec(x),
            LinearMap::Identity(_) => Ok(x.to_vec()),
            LinearMap::StackedIdentity { copies, sign, .. } => {
                let one: Vec<T> = x.iter().map(|&v| *sign * v).collect();
                Ok(one.repeat(*copies))
            }
        }
    }

    /// Smallest and largest singular values.
    pub fn singular_value_extremes(&self) -> Result<(T, T)> {
        match self {
            LinearMap::Dense(m) => m.singular_value_extremes(),
            LinearMap::Identity(_) => Ok((T::one(), T::one())),
            LinearMap::StackedIdentity { copies, sign, .. } => {
                let s = T::from_usize_lossy(*copies).sqrt() * sign.abs();
                Ok((s, s))
            }
        }
    }

    /// Solves `M x = rhs` for square invertible `M`.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != self.rows() {
            return Err(Error::structural("right-hand side has the wrong length"));
        }
        match self {
            LinearMap::Dense(m) => m.solve(rhs),
            LinearMap::Identity(_) => Ok(rhs.to_vec()),
            LinearMap::StackedIdentity { copies: 1, sign, .. } if *sign != T::zero() => {
                Ok(rhs.iter().map(|&v| v / *sign).collect())
            }
            LinearMap::StackedIdentity { .. } => Err(Error::Model(
                "stacked identity with more than one copy is not invertible".into(),
            )),
        }
    }
}

type FArgmin<T> = dyn Fn(&[T], &[T]) -> Vec<T> + Send + Sync;
type GArgmin<T> = dyn Fn(&[T]) -> Vec<T> + Send + Sync;

/// `min f(x; D) + g(z)` subject to `Ax + Bz = c`.
///
/// `f_argmin(z, u)` returns `argmin_x f(x) + (1/2γ)‖Ax + 2Bz + u − c‖²` and
/// `g_argmin(u)` returns `argmin_z g(z) + (1/2γ)‖Bz + u‖²`.
#[derive(Clone)]
pub struct GeneralAdmmProblem<T> {
    a: LinearMap<T>,
    b: LinearMap<T>,
    c: Vec<T>,
    gamma: T,
    lipschitz: T,
    n: usize,
    f_argmin: Arc<FArgmin<T>>,
    g_argmin: Arc<GArgmin<T>>,
    omega_a: T,
    norm_a: T,
    noise_blocks: usize,
}

impl<T: Scalar> fmt::Debug for GeneralAdmmProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralAdmmProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("gamma", &self.gamma)
            .field("lipschitz", &self.lipschitz)
            .field("n", &self.n)
            .field("omega_a", &self.omega_a)
            .field("norm_a", &self.norm_a)
            .field("noise_blocks", &self.noise_blocks)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralAdmmState<T> {
    /// Dual-like variable, `rows(A)` entries split into `noise_blocks` blocks.
    pub u: BlockVector<T>,
    pub z: Vec<T>,
    pub k: usize,
}

impl<T: Scalar> GeneralAdmmProblem<T> {
    /// `noise_blocks` splits `u` into blocks that draw noise from substreams `(k, b)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new<F, G>(
        a: LinearMap<T>,
        b: LinearMap<T>,
        c: Vec<T>,
        gamma: T,
        lipschitz: T,
        n: usize,
        noise_blocks: usize,
        f_argmin: F,
        g_argmin: G,
    ) -> Result<Self>
    where
        F: Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static,
        G: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        if !(gamma > T::zero()) {
            return Err(Error::param(format!("gamma={gamma} must be > 0")));
        }
        if !(lipschitz > T::zero()) {
            return Err(Error::param(format!("Lipschitz constant L={lipschitz} must be > 0")));
        }
        if n == 0 {
            return Err(Error::param("dataset size n must be >= 1"));
        }
        if a.rows() != b.rows() || a.rows() != c.len() {
            return Err(Error::structural(format!(
                "A has {} rows, B has {}, c has {}",
                a.rows(),
                b.rows(),
                c.len()
            )));
        }
        if noise_blocks == 0 || !a.rows().is_multiple_of(noise_blocks) {
            return Err(Error::structural(format!(
                "{} constraint rows cannot be split into {noise_blocks} noise blocks",
                a.rows()
            )));
        }
        let (omega_a, norm_a) = a.singular_value_extremes()?;
        let tol = T::epsilon().sqrt() * norm_a.max(T::one());
        if a.rows() < a.cols() || omega_a <= tol {
            return Err(Error::Model(format!(
                "A must have full column rank (smallest singular value {omega_a})"
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            gamma,
            lipschitz,
            n,
            f_argmin: Arc::new(f_argmin),
            g_argmin: Arc::new(g_argmin),
            omega_a,
            norm_a,
            noise_blocks,
        })
    }

    /// Consensus form: `A = I`, `B = −[I; …; I]`, `c = 0`, `u` split per user.
    pub fn from_consensus(problem: &ConsensusProblem<T>) -> Result<Self> {
        if problem.clip.is_some() {
            return Err(Error::param("the general form has no clipping step"));
        }
        let (n, p) = (problem.n, problem.p);
        let prox_f = problem.prox_f.clone();
        let prox_r = problem.prox_r.clone();
        let f_argmin = move |z: &[T], u: &[T]| {
            // x_i = prox_{f_i}(2z − u_i); errors surface as NaN and are caught by the step.
            let two = T::lit(2.0);
            let mut x = Vec::with_capacity(n * p);
            for (i, prox) in prox_f.iter().enumerate() {
                let v: Vec<T> = z
                    .iter()
                    .zip(&u[i * p..(i + 1) * p])
                    .map(|(&zj, &uj)| two * zj - uj)
                    .collect();
                match prox.apply(&v) {
                    Ok(xi) => x.extend(xi),
                    Err(_) => x.extend(std::iter::repeat_n(T::nan(), p)),
                }
            }
            x
        };
        let g_argmin = move |u: &[T]| {
            let mut mean = vec![T::zero(); p];
            for i in 0..n {
                linalg::axpy(T::one(), &u[i * p..(i + 1) * p], &mut mean);
            }
            let inv = T::one() / T::from_usize_lossy(n);
            mean.iter_mut().for_each(|m| *m *= inv);
            prox_r.apply(&mean).unwrap_or_else(|_| vec![T::nan(); p])
        };
        Self::new(
            LinearMap::Identity(n * p),
            LinearMap::StackedIdentity {
                copies: n,
                dim: p,
                sign: -T::one(),
            },
            vec![T::zero(); n * p],
            problem.gamma,
            problem.lipschitz,
            n,
            n,
            f_argmin,
            g_argmin,
        )
    }

    pub fn omega_a(&self) -> T {
        self.omega_a
    }

    pub fn norm_a(&self) -> T {
        self.norm_a
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &LinearMap<T> {
        &self.a
    }

    pub fn b(&self) -> &LinearMap<T> {
        &self.b
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    /// Zero `u`, zero `z`.
    pub fn initial_state(&self) -> GeneralAdmmState<T> {
        let rows = self.a.rows();
        GeneralAdmmState {
            u: BlockVector::zeros(self.noise_blocks, rows / self.noise_blocks),
            z: vec![T::zero(); self.b.cols()],
            k: 0,
        }
    }
}

/// One step of the general private ADMM.
pub fn general_admm_step<T: Scalar>(
    problem: &GeneralAdmmProblem<T>,
    state: &GeneralAdmmState<T>,
    lambda: T,
    sigma: T,
    streams: &Streams,
) -> Result<GeneralAdmmState<T>> {
    check_lambda(lambda)?;
    check_sigma(sigma)?;
    let rows = problem.a.rows();
    if state.u.len() != rows || state.u.num_blocks() != problem.noise_blocks {
        return Err(Error::structural("u does not match the constraint layout"));
    }
    let u = state.u.as_slice();
    let z = problem.g_argmin.as_ref()(u);
    if z.len() != problem.b.cols() {
        return Err(Error::structural("g_argmin returned the wrong dimension"));
    }
    let x = problem.f_argmin.as_ref()(&z, u);
    if x.len() != problem.a.cols() {
        return Err(Error::structural("f_argmin returned the wrong dimension"));
    }
    if z.iter().chain(&x).any(|v| !v.is_finite()) {
        return Err(Error::Model("argmin oracle returned a non-finite value".into()));
    }
    let ax = problem.a.apply(&x)?;
    let bz = problem.b.apply(&z)?;
    let two_lambda = T::lit(2.0) * lambda;
    let half = T::lit(0.5);
    let dim = state.u.block_dim();
    let mut next = state.u.clone();
    for blk in 0..problem.noise_blocks {
        let eta = streams.gaussian(state.k as u64, blk as u64, dim, sigma);
        let off = blk * dim;
        for (j, (o, &e)) in next.block_mut(blk).iter_mut().zip(&eta).enumerate() {
            let r = ax[off + j] + bz[off + j] - problem.c[off + j];
            *o += two_lambda * (r + half * e);
        }
    }
    Ok(GeneralAdmmState {
        u: next,
        z,
        k: state.k + 1,
    })
}

/// General private ADMM; releases only `z_K`.
pub fn general_run<T: Scalar>(problem: &GeneralAdmmProblem<T>, cfg: &AdmmConfig<T>) -> Result<AdmmOutput<T>> {
    cfg.validate()?;
    let streams = Streams::new(cfg.seed);
    let mut state = problem.initial_state();
    let mut trace = RunTrace::default();
    for k in 0..cfg.iterations {
        state = general_admm_step(problem, &state, cfg.lambda, cfg.sigma, &streams)?;
        let active = vec![true; problem.noise_blocks];
        record(&mut trace, &cfg.trace, k, active, &state.z, state.u.block_dim())?;
    }
    Ok(AdmmOutput { z: state.z, trace })
}

/// The unique `x̃` with `Ax̃ + Bz = c`.
pub fn recover_x_from_z<T: Scalar>(problem: &GeneralAdmmProblem<T>, z: &[T]) -> Result<Vec<T>> {
    if problem.a.rows() != problem.a.cols() {
        return Err(Error::Model(format!(
            "A is {}x{}; recovery needs a square invertible A",
            problem.a.rows(),
            problem.a.cols()
        )));
    }
    let bz = problem.b.apply(z)?;
    let rhs: Vec<T> = problem.c.iter().zip(&bz).map(|(&c, &b)| c - b).collect();
    problem.a.solve(&rhs)
}
