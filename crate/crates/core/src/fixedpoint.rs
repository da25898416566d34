//! Noisy block-coordinate fixed-point iteration.
//!
//! One step updates every active block `b` as
//! `u_b ← u_b + λ_k (R_b(u) + e_{k,b} + η_{k,b} − u_b)` and leaves inactive
//! blocks bit-identical. Noise for block `b` at step `k` always comes from the
//! `(k, b)` substream of the run seed.

use std::fmt;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::operators::{BlockVector, OperatorHandle};
use crate::rng::{Domain, Streams};
use crate::scalar::Scalar;

/// How blocks are activated at each step.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockSchedule<T> {
    AllBlocks,
    /// Block `k mod B` at step `k`.
    Cyclic,
    /// One block per step, in a fresh random order every `B` steps.
    CyclicPermutation,
    /// Each block independently with probability `q`.
    BernoulliPerBlock(T),
    /// One block uniformly at random.
    SingleUniform,
    /// `m` distinct blocks uniformly at random.
    SubsetUniform(usize),
}

impl<T: Scalar> BlockSchedule<T> {
    pub fn validate(&self, blocks: usize) -> Result<()> {
        if blocks == 0 {
            return Err(Error::structural("schedule over zero blocks"));
        }
        match *self {
            BlockSchedule::BernoulliPerBlock(q) if !(q > T::zero() && q <= T::one()) => {
                Err(Error::param(format!("activation probability q={q} must be in (0,1]")))
            }
            BlockSchedule::SubsetUniform(m) if m == 0 || m > blocks => {
                Err(Error::param(format!("subset size m={m} must be in [1, {blocks}]")))
            }
            _ => Ok(()),
        }
    }

    /// Marginal probability `q` that a given block is active at a given step.
    pub fn activation_probability(&self, blocks: usize) -> T {
        let b = T::from_usize_lossy(blocks);
        match *self {
            BlockSchedule::AllBlocks => T::one(),
            BlockSchedule::BernoulliPerBlock(q) => q,
            BlockSchedule::Cyclic | BlockSchedule::CyclicPermutation | BlockSchedule::SingleUniform => T::one() / b,
            BlockSchedule::SubsetUniform(m) => T::from_usize_lossy(m) / b,
        }
    }

    /// Activation mask for step `k`, drawn from the schedule substream.
    pub fn mask(&self, k: usize, blocks: usize, streams: &Streams) -> Vec<bool> {
        let mut mask = vec![false; blocks];
        match *self {
            BlockSchedule::AllBlocks => mask.iter_mut().for_each(|m| *m = true),
            BlockSchedule::Cyclic => mask[k % blocks] = true,
            BlockSchedule::CyclicPermutation => {
                let sweep = (k / blocks) as u64;
                let mut rng = streams.substream(Domain::Schedule, sweep, 0);
                let mut order: Vec<usize> = (0..blocks).collect();
                order.shuffle(&mut rng);
                mask[order[k % blocks]] = true;
            }
            BlockSchedule::BernoulliPerBlock(q) => {
                let mut rng = streams.substream(Domain::Schedule, k as u64, 0);
                let q = q.to_f64_lossy();
                mask.iter_mut().for_each(|m| *m = rng.random::<f64>() < q);
            }
            BlockSchedule::SingleUniform => {
                let mut rng = streams.substream(Domain::Schedule, k as u64, 0);
                mask[rng.random_range(0..blocks)] = true;
            }
            BlockSchedule::SubsetUniform(m) => {
                let mut rng = streams.substream(Domain::Schedule, k as u64, 0);
                for i in index::sample(&mut rng, blocks, m) {
                    mask[i] = true;
                }
            }
        }
        mask
    }
}

/// Step sizes `λ_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule<T> {
    Constant(T),
    /// One entry per iteration; must have at least `K` entries.
    PerIteration(Vec<T>),
}

impl<T: Scalar> StepSchedule<T> {
    pub fn at(&self, k: usize) -> T {
        match self {
            StepSchedule::Constant(l) => *l,
            StepSchedule::PerIteration(v) => v[k],
        }
    }

    fn validate(&self, iterations: usize) -> Result<()> {
        let check = |l: T| {
            if l > T::zero() && l <= T::one() {
                Ok(())
            } else {
                Err(Error::param(format!("step size lambda={l} must be in (0,1]")))
            }
        };
        match self {
            StepSchedule::Constant(l) => check(*l),
            StepSchedule::PerIteration(v) => {
                if v.len() < iterations {
                    return Err(Error::param(format!(
                        "{} step sizes supplied for {iterations} iterations",
                        v.len()
                    )));
                }
                v.iter().try_for_each(|&l| check(l))
            }
        }
    }
}

type InjectorFn<T> = dyn Fn(usize, &BlockVector<T>) -> BlockVector<T> + Send + Sync;
type ObjectiveFn<T> = dyn Fn(&BlockVector<T>) -> T + Send + Sync;

/// What the run records besides masks and draw counts.
#[derive(Clone, Default)]
pub struct TraceOptions<T> {
    pub objective: Option<Arc<ObjectiveFn<T>>>,
    pub reference: Option<BlockVector<T>>,
    pub store_iterates: bool,
}

impl<T> fmt::Debug for TraceOptions<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TraceOptions")
            .field("objective", &self.objective.is_some())
            .field("reference", &self.reference.is_some())
            .field("store_iterates", &self.store_iterates)
            .finish()
    }
}

/// Parameters of a fixed-point run.
#[derive(Clone)]
pub struct IterationConfig<T> {
    pub steps: StepSchedule<T>,
    pub sigma: T,
    pub iterations: usize,
    pub schedule: BlockSchedule<T>,
    /// Deterministic perturbation `e_k`; zero when absent.
    pub error_injector: Option<Arc<InjectorFn<T>>>,
    pub seed: u64,
    pub trace: TraceOptions<T>,
}

impl<T: Scalar> IterationConfig<T> {
    pub fn new(lambda: T, sigma: T, iterations: usize, schedule: BlockSchedule<T>, seed: u64) -> Self {
        Self {
            steps: StepSchedule::Constant(lambda),
            sigma,
            iterations,
            schedule,
            error_injector: None,
            seed,
            trace: TraceOptions::default(),
        }
    }

    pub fn validate(&self, blocks: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::param("iteration count K must be >= 1"));
        }
        if !(self.sigma >= T::zero()) {
            return Err(Error::param(format!("noise std sigma={} must be >= 0", self.sigma)));
        }
        self.steps.validate(self.iterations)?;
        self.schedule.validate(blocks)
    }
}

impl<T: Scalar> fmt::Debug for IterationConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IterationConfig")
            .field("steps", &self.steps)
            .field("sigma", &self.sigma)
            .field("iterations", &self.iterations)
            .field("schedule", &self.schedule)
            .field("error_injector", &self.error_injector.is_some())
            .field("seed", &self.seed)
            .field("trace", &self.trace)
            .finish()
    }
}

/// The map `R` driven by the engine.
///
/// `evaluate` returns a vector with the layout of `u`; only the entries of
/// active blocks are read, so implementations may skip the others.
pub trait FixedPointMap<T: Scalar>: Send + Sync {
    fn evaluate(&self, k: usize, u: &BlockVector<T>, active: &[bool]) -> Result<BlockVector<T>>;
}

impl<T: Scalar> FixedPointMap<T> for OperatorHandle<T> {
    fn evaluate(&self, _k: usize, u: &BlockVector<T>, _active: &[bool]) -> Result<BlockVector<T>> {
        self.apply(u)
    }
}

type BlockFn<T> = dyn Fn(&BlockVector<T>) -> Vec<T> + Send + Sync;

/// Per-block map: reads the whole iterate, returns one block.
pub type BlockGradientFn<T> = Arc<BlockFn<T>>;

/// A separate map `R_b` per block; only active blocks are evaluated.
#[derive(Clone)]
pub struct PerBlockOperator<T> {
    maps: Vec<Arc<BlockFn<T>>>,
}

impl<T: Scalar> PerBlockOperator<T> {
    pub fn new(maps: Vec<Arc<BlockFn<T>>>) -> Self {
        Self { maps }
    }

    pub fn num_blocks(&self) -> usize {
        self.maps.len()
    }
}

impl<T: Scalar> FixedPointMap<T> for PerBlockOperator<T> {
    fn evaluate(&self, _k: usize, u: &BlockVector<T>, active: &[bool]) -> Result<BlockVector<T>> {
        if self.maps.len() != u.num_blocks() {
            return Err(Error::structural(format!(
                "{} block maps for {} blocks",
                self.maps.len(),
                u.num_blocks()
            )));
        }
        let mut out = u.clone();
        for (b, map) in self.maps.iter().enumerate() {
            if !active[b] {
                continue;
            }
            let r = map.as_ref()(u);
            if r.len() != u.block_dim() {
                return Err(Error::structural(format!("block map {b} returned wrong dimension")));
            }
            out.block_mut(b).copy_from_slice(&r);
        }
        Ok(out)
    }
}

type StepMapFn<T> = dyn Fn(usize, &BlockVector<T>) -> Result<BlockVector<T>> + Send + Sync;

/// A map that may change with the step index (e.g. one data item per step).
#[derive(Clone)]
pub struct TimeVaryingOperator<T> {
    map: Arc<StepMapFn<T>>,
}

impl<T: Scalar> TimeVaryingOperator<T> {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(usize, &BlockVector<T>) -> Result<BlockVector<T>> + Send + Sync + 'static,
    {
        Self { map: Arc::new(f) }
    }
}

impl<T: Scalar> FixedPointMap<T> for TimeVaryingOperator<T> {
    fn evaluate(&self, k: usize, u: &BlockVector<T>, _active: &[bool]) -> Result<BlockVector<T>> {
        self.map.as_ref()(k, u)
    }
}

/// One iteration's record.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub k: usize,
    pub active: Vec<bool>,
    pub objective: Option<T>,
    pub dist_sq: Option<T>,
    /// Gaussian draws consumed; they come from substreams `(k, b)` of the active `b`.
    pub noise_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    /// Iterates after each step, when requested.
    pub iterates: Vec<BlockVector<T>>,
}

impl<T: Scalar> RunTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_noise_draws(&self) -> usize {
        self.records.iter().map(|r| r.noise_draws).sum()
    }
}

/// One step with an explicit activation mask.
pub fn step_with_mask<T: Scalar>(
    u: &BlockVector<T>,
    op: &dyn FixedPointMap<T>,
    cfg: &IterationConfig<T>,
    k: usize,
    mask: &[bool],
) -> Result<BlockVector<T>> {
    if mask.len() != u.num_blocks() {
        return Err(Error::structural(format!(
            "mask has {} entries for {} blocks",
            mask.len(),
            u.num_blocks()
        )));
    }
    if !mask.iter().any(|&m| m) {
        return Ok(u.clone());
    }
    let r = op.evaluate(k, u, mask)?;
    if !r.same_layout(u) {
        return Err(Error::structural("operator output layout differs from iterate"));
    }
    let e = match &cfg.error_injector {
        Some(f) => {
            let e = f.as_ref()(k, u);
            if !e.same_layout(u) {
                return Err(Error::structural("error term layout differs from iterate"));
            }
            Some(e)
        }
        None => None,
    };
    let lambda = cfg.steps.at(k);
    let streams = Streams::new(cfg.seed);
    let p = u.block_dim();
    let mut next = u.clone();
    for (b, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let eta = streams.gaussian(k as u64, b as u64, p, cfg.sigma);
        let ub = u.block(b);
        let rb = r.block(b);
        let out = next.block_mut(b);
        for j in 0..p {
            let ej = e.as_ref().map_or(T::zero(), |e| e.block(b)[j]);
            out[j] = ub[j] + lambda * (rb[j] + ej + eta[j] - ub[j]);
        }
    }
    Ok(next)
}

/// One step, with the mask drawn from the configured schedule.
pub fn step<T: Scalar>(
    u: &BlockVector<T>,
    op: &dyn FixedPointMap<T>,
    cfg: &IterationConfig<T>,
    k: usize,
) -> Result<BlockVector<T>> {
    let mask = cfg.schedule.mask(k, u.num_blocks(), &Streams::new(cfg.seed));
    step_with_mask(u, op, cfg, k, &mask)
}

/// Runs `K` steps from `u0`.
pub fn run<T: Scalar>(
    u0: &BlockVector<T>,
    op: &dyn FixedPointMap<T>,
    cfg: &IterationConfig<T>,
) -> Result<(BlockVector<T>, RunTrace<T>)> {
    cfg.validate(u0.num_blocks())?;
    if let Some(r) = &cfg.trace.reference {
        if !r.same_layout(u0) {
            return Err(Error::structural("reference point layout differs from iterate"));
        }
    }
    let streams = Streams::new(cfg.seed);
    let mut u = u0.clone();
    let mut trace = RunTrace {
        records: Vec::with_capacity(cfg.iterations),
        iterates: Vec::new(),
    };
    for k in 0..cfg.iterations {
        let mask = cfg.schedule.mask(k, u.num_blocks(), &streams);
        u = step_with_mask(&u, op, cfg, k, &mask)?;
        let active_count = mask.iter().filter(|&&m| m).count();
        trace.records.push(IterationRecord {
            k,
            noise_draws: active_count * u.block_dim(),
            active: mask,
            objective: cfg.trace.objective.as_ref().map(|f| f.as_ref()(&u)),
            dist_sq: cfg.trace.reference.as_ref().map(|r| u.dist_sq(r)),
        });
        if cfg.trace.store_iterates {
            trace.iterates.push(u.clone());
        }
    }
    Ok((u, trace))
}

/// Order in which data items are visited by stochastic-gradient instances.
#[derive(Debug, Clone, PartialEq)]
pub enum ItemOrder {
    /// Item `k mod n`.
    Cyclic,
    /// Uniform with replacement, drawn from the item substream.
    Uniform,
    /// Explicit sequence, cycled if shorter than the run.
    Fixed(Vec<usize>),
}

impl ItemOrder {
    pub fn item(&self, k: usize, n: usize, streams: &Streams) -> usize {
        match self {
            ItemOrder::Cyclic => k % n,
            ItemOrder::Uniform => streams.substream(Domain::Items, k as u64, 0).random_range(0..n),
            ItemOrder::Fixed(v) => v[k % v.len()],
        }
    }
}

pub type GradientFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Parameters of the DP-SGD instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSgdParams<T> {
    pub beta: T,
    pub gamma: T,
    /// Std of the gradient noise `η'`.
    pub sigma_grad: T,
    pub order: ItemOrder,
    pub iterations: usize,
    pub seed: u64,
}

/// DP-SGD written as a single-block engine run.
///
/// Uses `R(u) = u − (2/β)∇f(u; d_{i_k})`, `λ = γβ/2` and engine noise std
/// `(2/β)σ'`. A direct loop `u ← u − γ(∇f(u; d_{i_k}) + η')` reproduces the
/// engine trajectory when it draws `η' = −σ'·ξ` from the engine's noise
/// substream `(k, 0)`, where `ξ` is the standard normal draw.
pub fn dpsgd_instance<T: Scalar>(
    grads: Vec<GradientFn<T>>,
    params: &DpSgdParams<T>,
) -> Result<(TimeVaryingOperator<T>, IterationConfig<T>)> {
    let DpSgdParams {
        beta,
        gamma,
        sigma_grad,
        ..
    } = *params;
    if !(beta > T::zero()) {
        return Err(Error::param(format!("smoothness beta={beta} must be > 0")));
    }
    if !(gamma > T::zero() && gamma < T::lit(2.0) / beta) {
        return Err(Error::param(format!("step gamma={gamma} must be in (0, 2/beta)")));
    }
    if !(sigma_grad >= T::zero()) {
        return Err(Error::param(format!("gradient noise std {sigma_grad} must be >= 0")));
    }
    if grads.is_empty() {
        return Err(Error::structural("no per-item gradients supplied"));
    }
    if let ItemOrder::Fixed(v) = &params.order {
        if v.is_empty() || v.iter().any(|&i| i >= grads.len()) {
            return Err(Error::structural("fixed item order refers to missing items"));
        }
    }
    let two_over_beta = T::lit(2.0) / beta;
    let order = params.order.clone();
    let streams = Streams::new(params.seed);
    let op = TimeVaryingOperator::new(move |k, u: &BlockVector<T>| {
        if u.num_blocks() != 1 {
            return Err(Error::structural("DP-SGD instance uses a single block"));
        }
        let i = order.item(k, grads.len(), &streams);
        let g = grads[i].as_ref()(u.as_slice());
        if g.len() != u.len() {
            return Err(Error::structural(format!("gradient of item {i} has wrong dimension")));
        }
        let data = u
            .as_slice()
            .iter()
            .zip(&g)
            .map(|(&ui, &gi)| ui - two_over_beta * gi)
            .collect();
        BlockVector::from_flat(data, 1, u.block_dim())
    });
    let cfg = IterationConfig::new(
        gamma * beta / T::lit(2.0),
        two_over_beta * sigma_grad,
        params.iterations,
        BlockSchedule::AllBlocks,
        params.seed,
    );
    Ok((op, cfg))
}

/// DP-CD written as a block-coordinate engine run.
///
/// Block `b` uses `R_b(u) = u_b − (2/β)∇_b f(u)` with `λ = γβ/2`, so an active
/// block moves by `−γ∇_b f(u) + λη_b`.
pub fn dpcd_instance<T: Scalar>(
    coord_grads: Vec<Arc<BlockFn<T>>>,
    beta: T,
    gamma: T,
    sigma: T,
    schedule: BlockSchedule<T>,
    iterations: usize,
    seed: u64,
) -> Result<(PerBlockOperator<T>, IterationConfig<T>)> {
    if coord_grads.len() < 2 {
        return Err(Error::structural("coordinate descent needs B > 1 blocks"));
    }
    if !(beta > T::zero()) {
        return Err(Error::param(format!("smoothness beta={beta} must be > 0")));
    }
    if !(gamma > T::zero() && gamma < T::lit(2.0) / beta) {
        return Err(Error::param(format!("step gamma={gamma} must be in (0, 2/beta)")));
    }
    let two_over_beta = T::lit(2.0) / beta;
    let maps: Vec<Arc<BlockFn<T>>> = coord_grads
        .into_iter()
        .enumerate()
        .map(|(b, g)| {
            let f: Arc<BlockFn<T>> = Arc::new(move |u: &BlockVector<T>| {
                let gb = g.as_ref()(u);
                if gb.len() != u.block_dim() {
                    // passed through so the engine reports the mismatch
                    return gb;
                }
                u.block(b)
                    .iter()
                    .zip(&gb)
                    .map(|(&ui, &gi)| ui - two_over_beta * gi)
                    .collect()
            });
            f
        })
        .collect();
    let op = PerBlockOperator::new(maps);
    let cfg = IterationConfig::new(gamma * beta / T::lit(2.0), sigma, iterations, schedule, seed);
    cfg.validate(op.num_blocks())?;
    Ok((op, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Expansiveness;

    fn bv(x: &[f64]) -> BlockVector<f64> {
        BlockVector::from_flat(x.to_vec(), x.len(), 1).unwrap()
    }

    #[test]
    fn identity_operator_leaves_iterate() {
        let cfg = IterationConfig::new(1.0, 0.0, 3, BlockSchedule::AllBlocks, 0);
        let u = bv(&[1.0, -2.0]);
        let (out, trace) = run(&u, &OperatorHandle::identity(), &cfg).unwrap();
        assert_eq!(out, u);
        assert_eq!(trace.len(), 3);
    }

    #[test]
    fn half_step_towards_zero_map() {
        let zero = OperatorHandle::new(Expansiveness::Contractive(0.0), false, |u: &BlockVector<f64>| {
            Ok(BlockVector::zeros(u.num_blocks(), u.block_dim()))
        });
        let cfg = IterationConfig::new(0.5, 0.0, 1, BlockSchedule::AllBlocks, 0);
        assert_eq!(step(&bv(&[2.0]), &zero, &cfg, 0).unwrap(), bv(&[1.0]));
    }

    #[test]
    fn empty_mask_freezes_everything() {
        let cfg = IterationConfig::new(1.0, 1.0, 1, BlockSchedule::AllBlocks, 9);
        let u = bv(&[0.3, 0.4]);
        let out = step_with_mask(&u, &OperatorHandle::identity(), &cfg, 0, &[false, false]).unwrap();
        assert_eq!(out, u);
    }

    #[test]
    fn config_validation() {
        let ok = IterationConfig::new(0.5, 0.0, 1, BlockSchedule::<f64>::AllBlocks, 0);
        assert!(ok.validate(2).is_ok());
        let mut bad = ok.clone();
        bad.steps = StepSchedule::Constant(0.0);
        assert!(bad.validate(2).is_err());
        bad = ok.clone();
        bad.sigma = -1.0;
        assert!(bad.validate(2).is_err());
        bad = ok.clone();
        bad.iterations = 0;
        assert!(bad.validate(2).is_err());
        bad = ok.clone();
        bad.schedule = BlockSchedule::SubsetUniform(3);
        assert!(bad.validate(2).is_err());
        bad = ok;
        bad.steps = StepSchedule::PerIteration(vec![]);
        assert!(bad.validate(2).is_err());
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let bad = OperatorHandle::new(Expansiveness::NonExpansive, false, |_u: &BlockVector<f64>| {
            Ok(BlockVector::zeros(3, 1))
        });
        let cfg = IterationConfig::new(1.0, 0.0, 1, BlockSchedule::AllBlocks, 0);
        assert!(matches!(step(&bv(&[1.0]), &bad, &cfg, 0), Err(Error::Structural(_))));
    }

    #[test]
    fn schedules_emit_expected_counts() {
        let s = Streams::new(3);
        for k in 0..20 {
            let count = |sch: BlockSchedule<f64>| sch.mask(k, 6, &s).iter().filter(|&&m| m).count();
            assert_eq!(count(BlockSchedule::AllBlocks), 6);
            assert_eq!(count(BlockSchedule::Cyclic), 1);
            assert_eq!(count(BlockSchedule::CyclicPermutation), 1);
            assert_eq!(count(BlockSchedule::SingleUniform), 1);
            assert_eq!(count(BlockSchedule::SubsetUniform(4)), 4);
        }
        // every sweep of a cyclic permutation covers each block once
        let mut hits = [0usize; 6];
        for k in 6..12 {
            let m = BlockSchedule::<f64>::CyclicPermutation.mask(k, 6, &s);
            hits[m.iter().position(|&x| x).unwrap()] += 1;
        }
        assert_eq!(hits, [1; 6]);
        assert_eq!(BlockSchedule::<f64>::SubsetUniform(2).activation_probability(8), 0.25);
    }

    #[test]
    fn dpsgd_exact_gradient_step() {
        let g: GradientFn<f64> = Arc::new(|u: &[f64]| u.to_vec());
        let params = DpSgdParams {
            beta: 1.0,
            gamma: 1.0,
            sigma_grad: 0.0,
            order: ItemOrder::Cyclic,
            iterations: 1,
            seed: 0,
        };
        let (op, cfg) = dpsgd_instance(vec![g.clone()], &params).unwrap();
        let (u, _) = run(&bv(&[1.0]), &op, &cfg).unwrap();
        assert_eq!(u.as_slice(), &[0.0]);
        let bad = DpSgdParams { gamma: 2.0, ..params };
        assert!(matches!(dpsgd_instance(vec![g], &bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn dpcd_needs_several_blocks() {
        let g: Arc<BlockFn<f64>> = Arc::new(|u: &BlockVector<f64>| u.block(0).to_vec());
        assert!(matches!(
            dpcd_instance(vec![g], 1.0, 1.0, 0.0, BlockSchedule::Cyclic, 1, 0),
            Err(Error::Structural(_))
        ));
    }
}
