//! Proximal, reflection, gradient-step and Lions-Mercier operators.
//!
//! Operators carry a declared [`Expansiveness`] class. The class is metadata
//! supplied by whoever builds the operator; it is never inferred at runtime.
//! [`probe_lipschitz`] is the sampling audit used by tests to check a declared
//! class against the actual map.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rng::{Domain, Streams};
use crate::scalar::Scalar;

/// A vector in `R^(B·p)` stored flat and addressed by block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector<T> {
    data: Vec<T>,
    blocks: usize,
    dim: usize,
}

impl<T: Scalar> BlockVector<T> {
    pub fn zeros(blocks: usize, dim: usize) -> Self {
        Self {
            data: vec![T::zero(); blocks * dim],
            blocks,
            dim,
        }
    }

    pub fn from_flat(data: Vec<T>, blocks: usize, dim: usize) -> Result<Self> {
        if blocks == 0 || dim == 0 {
            return Err(Error::structural("block count and block dimension must be >= 1"));
        }
        if data.len() != blocks * dim {
            return Err(Error::structural(format!(
                "flat length {} is not {blocks}x{dim}",
                data.len()
            )));
        }
        Ok(Self { data, blocks, dim })
    }

    pub fn from_blocks(blocks: Vec<Vec<T>>) -> Result<Self> {
        let dim = blocks.first().map_or(0, Vec::len);
        if blocks.iter().any(|b| b.len() != dim) {
            return Err(Error::structural("blocks have different dimensions"));
        }
        let n = blocks.len();
        Self::from_flat(blocks.into_iter().flatten().collect(), n, dim)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, b: usize) -> &[T] {
        &self.data[b * self.dim..(b + 1) * self.dim]
    }

    pub fn block_mut(&mut self, b: usize) -> &mut [T] {
        &mut self.data[b * self.dim..(b + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<T> {
        self.data
    }

    pub fn norm(&self) -> T {
        linalg::norm(&self.data)
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        linalg::dist_sq(&self.data, &other.data)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.blocks == other.blocks && self.dim == other.dim
    }

    /// Mean of the blocks, a vector of length `p`.
    pub fn block_mean(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.dim];
        for b in 0..self.blocks {
            linalg::axpy(T::one(), self.block(b), &mut m);
        }
        let inv = T::one() / T::from_usize_lossy(self.blocks);
        m.iter_mut().for_each(|v| *v *= inv);
        m
    }
}

/// Declared Lipschitz class of an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expansiveness<T> {
    NonExpansive,
    /// τ-Lipschitz with τ ∈ [0, 1).
    Contractive(T),
    /// λR + (1 − λ)I with R non-expansive, λ ∈ (0, 1).
    Averaged(T),
}

impl<T: Scalar> Expansiveness<T> {
    /// Lipschitz constant implied by the class.
    pub fn lipschitz_bound(&self) -> T {
        match *self {
            Expansiveness::Contractive(tau) => tau,
            _ => T::one(),
        }
    }
}

type MapFn<T> = dyn Fn(&BlockVector<T>) -> Result<BlockVector<T>> + Send + Sync;

/// A map on [`BlockVector`]s with declared expansiveness.
#[derive(Clone)]
pub struct OperatorHandle<T> {
    map: Arc<MapFn<T>>,
    class: Expansiveness<T>,
    data_dependent: bool,
}

impl<T: Scalar> OperatorHandle<T> {
    pub fn new<F>(class: Expansiveness<T>, data_dependent: bool, f: F) -> Self
    where
        F: Fn(&BlockVector<T>) -> Result<BlockVector<T>> + Send + Sync + 'static,
    {
        Self {
            map: Arc::new(f),
            class,
            data_dependent,
        }
    }

    pub fn identity() -> Self {
        Self::new(Expansiveness::NonExpansive, false, |u| Ok(u.clone()))
    }

    pub fn apply(&self, u: &BlockVector<T>) -> Result<BlockVector<T>> {
        self.map.as_ref()(u)
    }

    pub fn class(&self) -> Expansiveness<T> {
        self.class
    }

    pub fn is_data_dependent(&self) -> bool {
        self.data_dependent
    }
}

impl<T: Scalar> fmt::Debug for OperatorHandle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("class", &self.class)
            .field("data_dependent", &self.data_dependent)
            .finish_non_exhaustive()
    }
}

type VecFn<T> = dyn Fn(&[T]) -> Vec<T> + Send + Sync;

/// A proximal operator `prox_{γh}` for some convex `h`, with γ folded in.
#[derive(Clone)]
pub enum ProxSpec<T> {
    /// `h = 0`; the prox is the identity.
    Zero,
    /// Soft thresholding at `threshold` (already the product κγ).
    L1 { threshold: T },
    /// Minimizer of `(1/2n)(aᵀx − b)² + (1/2γ)‖x − v‖²`.
    QuadraticRankOne { a: Vec<T>, b: T, gamma: T, n: usize },
    /// `h(x) = ½xᵀQx + cᵀx` with `Q` symmetric positive semidefinite.
    Quadratic { q: Matrix<T>, linear: Vec<T>, gamma: T },
    /// Caller-supplied prox; must be firmly non-expansive.
    Custom(Arc<VecFn<T>>),
}

impl<T: Scalar> ProxSpec<T> {
    pub fn l1(threshold: T) -> Result<Self> {
        if !(threshold >= T::zero()) {
            return Err(Error::param(format!("soft-threshold {threshold} must be >= 0")));
        }
        Ok(ProxSpec::L1 { threshold })
    }

    pub fn quadratic_rank_one(a: Vec<T>, b: T, gamma: T, n: usize) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::param(format!("prox step gamma={gamma} must be > 0")));
        }
        if n == 0 {
            return Err(Error::param("item count n must be >= 1"));
        }
        Ok(ProxSpec::QuadraticRankOne { a, b, gamma, n })
    }

    pub fn quadratic(q: Matrix<T>, linear: Vec<T>, gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::param(format!("prox step gamma={gamma} must be > 0")));
        }
        if q.rows() != q.cols() || q.rows() != linear.len() {
            return Err(Error::structural("quadratic prox: Q must be p x p and c of length p"));
        }
        Ok(ProxSpec::Quadratic { q, linear, gamma })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        ProxSpec::Custom(Arc::new(f))
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        match self {
            ProxSpec::Zero => Ok(v.to_vec()),
            ProxSpec::L1 { threshold } => prox_l1(v, *threshold),
            ProxSpec::QuadraticRankOne { a, b, gamma, n } => prox_quadratic_rank_one(a, *b, *gamma, *n, v),
            ProxSpec::Quadratic { q, linear, gamma } => {
                if v.len() != linear.len() {
                    return Err(Error::structural("quadratic prox: input dimension"));
                }
                // (I + γQ) x = v − γc
                let mut m = q.clone();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        m[(i, j)] *= *gamma;
                    }
                    m[(i, i)] += T::one();
                }
                let rhs: Vec<T> = v.iter().zip(linear).map(|(&vi, &ci)| vi - *gamma * ci).collect();
                m.solve(&rhs)
            }
            ProxSpec::Custom(f) => {
                let out = f.as_ref()(v);
                if out.len() != v.len() {
                    return Err(Error::structural("custom prox changed the dimension"));
                }
                Ok(out)
            }
        }
    }

    /// The prox as a block-wise operator on vectors of `B` blocks.
    pub fn to_operator(&self) -> OperatorHandle<T> {
        let prox = self.clone();
        OperatorHandle::new(Expansiveness::NonExpansive, false, move |u| {
            let mut out = u.clone();
            for b in 0..u.num_blocks() {
                let x = prox.apply(u.block(b))?;
                out.block_mut(b).copy_from_slice(&x);
            }
            Ok(out)
        })
    }
}

impl<T: fmt::Display> fmt::Debug for ProxSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxSpec::Zero => write!(f, "Zero"),
            ProxSpec::L1 { threshold } => write!(f, "L1 {{ threshold: {threshold} }}"),
            ProxSpec::QuadraticRankOne { b, gamma, n, a } => write!(
                f,
                "QuadraticRankOne {{ p: {}, b: {b}, gamma: {gamma}, n: {n} }}",
                a.len()
            ),
            ProxSpec::Quadratic { gamma, linear, .. } => {
                write!(f, "Quadratic {{ p: {}, gamma: {gamma} }}", linear.len())
            }
            ProxSpec::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Component-wise soft thresholding `sign(v)·max(|v| − t, 0)`.
pub fn prox_l1<T: Scalar>(v: &[T], t: T) -> Result<Vec<T>> {
    if !(t >= T::zero()) {
        return Err(Error::param(format!("soft-threshold {t} must be >= 0")));
    }
    Ok(v.iter()
        .map(|&x| {
            let mag = x.abs() - t;
            if mag > T::zero() {
                x.signum() * mag
            } else {
                T::zero()
            }
        })
        .collect())
}

/// Prox of one least-squares row via Sherman-Morrison.
///
/// Solves `(aaᵀ + sI) x = b·a + s·v` with `s = n/γ`, which is the minimizer of
/// `(1/2n)(aᵀx − b)² + (1/2γ)‖x − v‖²`. Uses
/// `(sI + aaᵀ)⁻¹ w = (w − a·(aᵀw)/(s + ‖a‖²)) / s`.
pub fn prox_quadratic_rank_one<T: Scalar>(a: &[T], b: T, gamma: T, n: usize, v: &[T]) -> Result<Vec<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::param(format!("prox step gamma={gamma} must be > 0")));
    }
    if n == 0 {
        return Err(Error::param("item count n must be >= 1"));
    }
    if a.len() != v.len() {
        return Err(Error::structural(format!(
            "row has dimension {} but input has {}",
            a.len(),
            v.len()
        )));
    }
    let s = T::from_usize_lossy(n) / gamma;
    let w: Vec<T> = a.iter().zip(v).map(|(&ai, &vi)| b * ai + s * vi).collect();
    let coef = linalg::dot(a, &w) / (s + linalg::norm_sq(a));
    Ok(w.iter().zip(a).map(|(&wi, &ai)| (wi - coef * ai) / s).collect())
}

/// Reflection `2·prox − I`, applied block-wise.
pub fn reflect<T: Scalar>(prox: &ProxSpec<T>) -> OperatorHandle<T> {
    let prox = prox.clone();
    OperatorHandle::new(Expansiveness::NonExpansive, false, move |u| {
        let mut out = u.clone();
        let two = T::lit(2.0);
        for b in 0..u.num_blocks() {
            let p = prox.apply(u.block(b))?;
            for (o, (&pi, &ui)) in out.block_mut(b).iter_mut().zip(p.iter().zip(u.block(b))) {
                *o = two * pi - ui;
            }
        }
        Ok(out)
    })
}

/// Lions-Mercier operator `λ·R₁R₂ + (1 − λ)I` with `Rᵢ = 2·proxᵢ − I`.
///
/// Its fixed points `u*` are not minimizers themselves; the minimizer of
/// `p1 + p2` is `prox2(u*)` (see [`splitting_solution`]).
pub fn lions_mercier<T: Scalar>(prox1: &ProxSpec<T>, prox2: &ProxSpec<T>, lambda: T) -> Result<OperatorHandle<T>> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::param(format!(
            "averaging weight lambda={lambda} must be in (0,1)"
        )));
    }
    let r1 = reflect(prox1);
    let r2 = reflect(prox2);
    Ok(OperatorHandle::new(Expansiveness::Averaged(lambda), false, move |u| {
        let rr = r1.apply(&r2.apply(u)?)?;
        let keep = T::one() - lambda;
        let data = rr
            .as_slice()
            .iter()
            .zip(u.as_slice())
            .map(|(&r, &ui)| lambda * r + keep * ui)
            .collect();
        BlockVector::from_flat(data, u.num_blocks(), u.block_dim())
    }))
}

/// Maps a Lions-Mercier fixed point to the minimizer of `p1 + p2`.
pub fn splitting_solution<T: Scalar>(prox2: &ProxSpec<T>, u: &BlockVector<T>) -> Result<BlockVector<T>> {
    prox2.to_operator().apply(u)
}

type GradFn<T> = dyn Fn(&BlockVector<T>) -> BlockVector<T> + Send + Sync;

fn gradient_step<T: Scalar>(grad: Arc<GradFn<T>>, step: T, class: Expansiveness<T>) -> OperatorHandle<T> {
    OperatorHandle::new(class, true, move |u| {
        let g = grad.as_ref()(u);
        if !g.same_layout(u) {
            return Err(Error::structural("gradient layout differs from iterate"));
        }
        let data = u
            .as_slice()
            .iter()
            .zip(g.as_slice())
            .map(|(&ui, &gi)| ui - step * gi)
            .collect();
        BlockVector::from_flat(data, u.num_blocks(), u.block_dim())
    })
}

/// `R(u) = u − (2/β)∇f(u)`, non-expansive for convex β-smooth `f`.
pub fn gradient_step_operator<T, G>(grad: G, beta: T) -> Result<OperatorHandle<T>>
where
    T: Scalar,
    G: Fn(&BlockVector<T>) -> BlockVector<T> + Send + Sync + 'static,
{
    if !(beta > T::zero()) {
        return Err(Error::param(format!("smoothness beta={beta} must be > 0")));
    }
    Ok(gradient_step(
        Arc::new(grad),
        T::lit(2.0) / beta,
        Expansiveness::NonExpansive,
    ))
}

/// `R(u) = u − (2/(β+μ))∇f(u)`, `(β−μ)/(β+μ)`-contractive for μ-strongly convex `f`.
pub fn strongly_convex_gradient_step<T, G>(grad: G, beta: T, mu: T) -> Result<OperatorHandle<T>>
where
    T: Scalar,
    G: Fn(&BlockVector<T>) -> BlockVector<T> + Send + Sync + 'static,
{
    if !(beta > T::zero()) {
        return Err(Error::param(format!("smoothness beta={beta} must be > 0")));
    }
    if !(mu > T::zero() && mu <= beta) {
        return Err(Error::param(format!("strong convexity mu={mu} must be in (0, beta]")));
    }
    let tau = (beta - mu) / (beta + mu);
    Ok(gradient_step(
        Arc::new(grad),
        T::lit(2.0) / (beta + mu),
        Expansiveness::Contractive(tau),
    ))
}

/// Radial projection onto the ball of radius `c`.
pub fn clip<T: Scalar>(v: &[T], c: T) -> Result<Vec<T>> {
    if !(c > T::zero()) {
        return Err(Error::param(format!("clipping threshold {c} must be > 0")));
    }
    let n = linalg::norm(v);
    if n <= c {
        Ok(v.to_vec())
    } else {
        let f = c / n;
        Ok(v.iter().map(|&x| x * f).collect())
    }
}

/// Largest ratio `‖T(v) − T(w)‖ / ‖v − w‖` over `pairs` random pairs in the unit ball.
///
/// Audit helper for declared classes; not meant as a runtime guard.
pub fn probe_lipschitz<T: Scalar>(
    op: &OperatorHandle<T>,
    blocks: usize,
    dim: usize,
    pairs: usize,
    seed: u64,
) -> Result<T> {
    let streams = Streams::new(seed);
    let mut worst = T::zero();
    for i in 0..pairs {
        let mut rng = streams.substream(Domain::Aux(0), i as u64, 0);
        let v: Vec<T> = unit_ball_point(&mut rng, blocks * dim);
        let w: Vec<T> = unit_ball_point(&mut rng, blocks * dim);
        let v = BlockVector::from_flat(v, blocks, dim)?;
        let w = BlockVector::from_flat(w, blocks, dim)?;
        let den = v.dist_sq(&w).sqrt();
        if den == T::zero() {
            continue;
        }
        let num = op.apply(&v)?.dist_sq(&op.apply(&w)?).sqrt();
        worst = worst.max(num / den);
    }
    Ok(worst)
}

fn unit_ball_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    let g: Vec<T> = (0..len).map(|_| T::sample_standard_normal(rng)).collect();
    let n = linalg::norm(&g);
    let radius = T::lit(rng.random::<f64>()).powf(T::one() / T::from_usize_lossy(len));
    g.iter().map(|&x| x / n * radius).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(x: &[f64]) -> BlockVector<f64> {
        BlockVector::from_flat(x.to_vec(), 1, x.len()).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(prox_l1(&[1.2], 0.5).unwrap()[0], 1.2 - 0.5);
        assert_eq!(prox_l1(&[-0.3, 0.3], 0.3).unwrap(), vec![0.0, 0.0]);
        assert_eq!(prox_l1(&[2.0, -2.0], 0.0).unwrap(), vec![2.0, -2.0]);
        assert!(matches!(prox_l1(&[1.0], -0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn rank_one_prox_with_zero_row_is_identity() {
        let x = prox_quadratic_rank_one(&[0.0], 5.0, 1.0, 1, &[3.0]).unwrap();
        assert_eq!(x, vec![3.0]);
    }

    #[test]
    fn rank_one_prox_one_dimensional_value() {
        // (1 + n/γ) x = b·a + (n/γ)·v with a=1, b=1, γ=2, n=1, v=0 gives x = 1/1.5.
        let x = prox_quadratic_rank_one::<f64>(&[1.0], 1.0, 2.0, 1, &[0.0]).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            prox_quadratic_rank_one(&[1.0], 1.0, 0.0, 1, &[0.0]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn reflect_examples() {
        let id = reflect(&ProxSpec::<f64>::Zero);
        assert_eq!(id.apply(&bv(&[1.5, -2.0])).unwrap(), bv(&[1.5, -2.0]));
        let r = reflect(&ProxSpec::l1(0.5).unwrap());
        let out = r.apply(&bv(&[1.2])).unwrap();
        assert!((out.as_slice()[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn lions_mercier_rejects_bad_lambda_and_is_identity_for_zero_proxes() {
        assert!(lions_mercier(&ProxSpec::<f64>::Zero, &ProxSpec::Zero, 1.0).is_err());
        assert!(lions_mercier(&ProxSpec::<f64>::Zero, &ProxSpec::Zero, 0.0).is_err());
        let t = lions_mercier(&ProxSpec::<f64>::Zero, &ProxSpec::Zero, 0.5).unwrap();
        assert_eq!(t.apply(&bv(&[0.7, 3.0])).unwrap(), bv(&[0.7, 3.0]));
        assert_eq!(t.class(), Expansiveness::Averaged(0.5));
    }

    #[test]
    fn gradient_step_examples() {
        let r = gradient_step_operator(|u: &BlockVector<f64>| u.clone(), 1.0).unwrap();
        assert_eq!(r.apply(&bv(&[1.0])).unwrap(), bv(&[-1.0]));
        let c = strongly_convex_gradient_step(|u: &BlockVector<f64>| u.clone(), 1.0, 1.0).unwrap();
        assert_eq!(c.apply(&bv(&[1.0])).unwrap(), bv(&[0.0]));
        assert_eq!(c.class(), Expansiveness::Contractive(0.0));
        assert!(gradient_step_operator(|u: &BlockVector<f64>| u.clone(), 0.0).is_err());
    }

    #[test]
    fn clip_examples() {
        assert_eq!(clip(&[3.0, 4.0], 10.0).unwrap(), vec![3.0, 4.0]);
        assert_eq!(clip(&[3.0, 4.0], 5.0).unwrap(), vec![3.0, 4.0]);
        assert_eq!(clip(&[6.0, 8.0], 5.0).unwrap(), vec![3.0, 4.0]);
        assert!(clip(&[1.0], 0.0).is_err());
    }

    #[test]
    fn block_vector_layout() {
        let v = BlockVector::from_blocks(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.block(1), &[3.0, 4.0]);
        assert_eq!(v.block_mean(), vec![2.0, 3.0]);
        assert!((v.norm() - 30f64.sqrt()).abs() < 1e-15);
        assert!(BlockVector::from_blocks(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let x = prox_l1(&[1.5f32, -0.25], 0.5).unwrap();
        assert_eq!(x, vec![1.0f32, 0.0]);
        let c = clip(&[6.0f32, 8.0], 5.0).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-6);
    }
}
