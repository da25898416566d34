//! Utility bounds for the noisy fixed-point iteration and the ADMM trade-offs.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams<T> {
    /// Contraction factor of `R`, in `[0, 1)`.
    pub tau: T,
    /// Block activation probability, in `(0, 1]`.
    pub q: T,
    pub sigma: T,
    /// Bound on the error term: `E‖e_k‖² ≤ ζ²`.
    pub zeta: T,
    pub p: usize,
    /// Initial squared distance `‖u0 − u*‖²`.
    pub d0: T,
    pub k: usize,
}

/// Quantities derived from `(τ, q, σ, ζ, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived<T> {
    /// `√(1 − q(1 − τ))`
    pub b: T,
    /// `(σ√p + ζ)/√q`
    pub sigma1: T,
    /// `σ₁/(1 − τ) − 1`
    pub c: T,
}

fn check_tau_q<T: Scalar>(tau: T, q: T) -> Result<()> {
    if !(tau >= T::zero() && tau < T::one()) {
        return Err(Error::param(format!("contraction factor tau={tau} must be in [0,1)")));
    }
    if !(q > T::zero() && q <= T::one()) {
        return Err(Error::param(format!("activation probability q={q} must be in (0,1]")));
    }
    Ok(())
}

/// `√(1 − q(1 − τ))`.
pub fn b_factor<T: Scalar>(tau: T, q: T) -> Result<T> {
    check_tau_q(tau, q)?;
    Ok((T::one() - q * (T::one() - tau)).sqrt())
}

impl<T: Scalar> UtilityParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_tau_q(self.tau, self.q)?;
        if !(self.sigma >= T::zero()) {
            return Err(Error::param(format!("sigma={} must be >= 0", self.sigma)));
        }
        if !(self.zeta >= T::zero()) {
            return Err(Error::param(format!("zeta={} must be >= 0", self.zeta)));
        }
        if self.p == 0 {
            return Err(Error::param("dimension p must be >= 1"));
        }
        if !(self.d0 >= T::zero()) {
            return Err(Error::param(format!("initial distance D={} must be >= 0", self.d0)));
        }
        Ok(())
    }

    /// `b`, `σ₁` and `c`; fails unless `σ√p + ζ > √q(1 − τ)`.
    pub fn derived(&self) -> Result<Derived<T>> {
        self.validate()?;
        let noise = self.sigma * T::from_usize_lossy(self.p).sqrt() + self.zeta;
        let rhs = self.q.sqrt() * (T::one() - self.tau);
        if !(noise > rhs) {
            return Err(Error::condition(
                "sigma sqrt(p) + zeta > sqrt(q) (1 - tau)",
                format!("lhs = {noise}, rhs = {rhs}"),
            ));
        }
        let sigma1 = noise / self.q.sqrt();
        Ok(Derived {
            b: b_factor(self.tau, self.q)?,
            sigma1,
            c: sigma1 / (T::one() - self.tau) - T::one(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityBound<T> {
    /// `(1 − q²(1 − τ)/8)^k · D`
    pub transient: T,
    /// `8((√p σ + ζ)/(√q(1 − τ)) + (pσ² + ζ²)/(q³(1 − τ)³))`
    pub floor: T,
}

impl<T: Scalar> UtilityBound<T> {
    pub fn total(&self) -> T {
        self.transient + self.floor
    }
}

/// Per-iteration contraction of the noiseless part, `1 − q²(1 − τ)/8`.
pub fn rate<T: Scalar>(tau: T, q: T) -> Result<T> {
    check_tau_q(tau, q)?;
    Ok(T::one() - q * q * (T::one() - tau) / T::lit(8.0))
}

/// Transient term alone, usable when there is no noise.
pub fn noiseless_bound<T: Scalar>(tau: T, q: T, d0: T, k: usize) -> Result<T> {
    let r = rate(tau, q)?;
    if !(d0 >= T::zero()) {
        return Err(Error::param(format!("initial distance D={d0} must be >= 0")));
    }
    Ok(r.powi(k.min(i32::MAX as usize) as i32) * d0)
}

/// Bound on `E‖u_k − u*‖²` in the noisy regime.
pub fn utility_bound<T: Scalar>(params: &UtilityParams<T>) -> Result<UtilityBound<T>> {
    params.derived()?;
    let UtilityParams {
        tau,
        q,
        sigma,
        zeta,
        p,
        d0,
        k,
    } = *params;
    let one_tau = T::one() - tau;
    let pf = T::from_usize_lossy(p);
    let first = (pf.sqrt() * sigma + zeta) / (q.sqrt() * one_tau);
    let second = (pf * sigma * sigma + zeta * zeta) / (q * q * q * one_tau * one_tau * one_tau);
    Ok(UtilityBound {
        transient: noiseless_bound(tau, q, d0, k)?,
        floor: T::lit(8.0) * (first + second),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    /// Recommended rate; may exceed 1.
    pub lambda_star: T,
    /// `λ*` clamped to `(0, 1]`, the range the engine accepts.
    pub lambda_clamped: T,
    /// Set when `λ* > 1` and the clamp changed it.
    pub clamped: bool,
}

/// Admissible learning-rate interval and the recommended `λ*` for given `(τ, q, c)`.
pub fn lambda_range_from_c<T: Scalar>(tau: T, q: T, c: T) -> Result<LearningRate<T>> {
    let b = b_factor(tau, q)?;
    if !(c > T::zero()) {
        return Err(Error::condition("c > 0", format!("c = {c}")));
    }
    let one = T::one();
    let half = T::lit(0.5);
    let one_b = one - b;
    let base = (one + c - q) / ((one + c) * one_b);
    let root = (one + T::lit(4.0) * (one + c) * one_b / ((one - tau) * (one + c - q) * (one + c - q))).sqrt();
    let lambda_star = (one - q / (T::lit(2.0) * (one + c))) / one_b;
    Ok(LearningRate {
        lambda_min: base,
        lambda_max: base * (half + half * root),
        lambda_star,
        lambda_clamped: lambda_star.min(one),
        clamped: lambda_star > one,
    })
}

/// Learning-rate interval for the noise level in `(σ, ζ, p)`.
pub fn lambda_range<T: Scalar>(tau: T, q: T, sigma: T, zeta: T, p: usize) -> Result<LearningRate<T>> {
    let params = UtilityParams {
        tau,
        q,
        sigma,
        zeta,
        p,
        d0: T::zero(),
        k: 0,
    };
    let d = params.derived()?;
    lambda_range_from_c(tau, q, d.c)
}

/// `1 + λ(σ₁ − (1 − b²)) − λ²σ₁(1 − b)` with `σ₁ = (1 + c)(1 − τ)`.
pub fn chi_general<T: Scalar>(tau: T, q: T, c: T, lambda: T) -> Result<T> {
    let b = b_factor(tau, q)?;
    if !(c > T::zero()) {
        return Err(Error::condition("c > 0", format!("c = {c}")));
    }
    let sigma1 = (T::one() + c) * (T::one() - tau);
    Ok(T::one() + lambda * (sigma1 - (T::one() - b * b)) - lambda * lambda * sigma1 * (T::one() - b))
}

/// `χ` at `λ*`: `1 − (1 + b)(1 + c − q/2)/(2(1 + c))`.
pub fn chi<T: Scalar>(tau: T, q: T, c: T) -> Result<T> {
    let b = b_factor(tau, q)?;
    if !(c > T::zero()) {
        return Err(Error::condition("c > 0", format!("c = {c}")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    Ok(one - (one + b) * (one + c - q / two) / (two * (one + c)))
}

/// Bracket `(q(1 − τ)/4, 1 − q²(1 − τ)/8]` that `χ` at `λ*` lies in.
pub fn chi_bracket<T: Scalar>(tau: T, q: T) -> Result<(T, T)> {
    Ok((q * (T::one() - tau) / T::lit(4.0), rate(tau, q)?))
}

/// Deployment whose privacy-utility trade-off is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TradeoffSetting<T> {
    Centralized,
    /// Federated with a fraction `r = m/n` of users per round, `r ∈ (0, 1/5)`.
    Federated {
        r: T,
    },
    Decentralized,
}

/// Inputs shared by the trade-off expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffParams<T> {
    pub alpha: T,
    pub epsilon: T,
    pub l: T,
    pub gamma: T,
    pub p: usize,
    pub n: usize,
    pub tau: T,
}

impl<T: Scalar> TradeoffParams<T> {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > T::one()) {
            return Err(Error::param(format!("alpha={} must be > 1", self.alpha)));
        }
        for (name, v) in [("epsilon", self.epsilon), ("L", self.l), ("gamma", self.gamma)] {
            if !(v > T::zero()) {
                return Err(Error::param(format!("{name}={v} must be > 0")));
            }
        }
        if self.p == 0 || self.n == 0 {
            return Err(Error::param("p and n must be >= 1"));
        }
        check_tau_q(self.tau, T::one())
    }

    /// `√(pα)Lγ/(1 − τ)` and `pαL²γ²/(1 − τ)³`, the setting-independent factors.
    fn factors(&self) -> (T, T) {
        let pa = T::from_usize_lossy(self.p) * self.alpha;
        let lg = self.l * self.gamma;
        let one_tau = T::one() - self.tau;
        (pa.sqrt() * lg / one_tau, pa * lg * lg / (one_tau * one_tau * one_tau))
    }
}

/// Federated expression without the range check on `r`.
pub fn federated_tradeoff_expression<T: Scalar>(params: &TradeoffParams<T>, r: T) -> Result<T> {
    params.validate()?;
    if !(r > T::zero()) {
        return Err(Error::param(format!("user fraction r={r} must be > 0")));
    }
    let (a, b) = params.factors();
    let n = T::from_usize_lossy(params.n);
    let eps = params.epsilon;
    Ok(a / ((eps * r).sqrt() * n) + b / (eps * r * r * n * n))
}

/// Order-of-magnitude privacy-utility trade-off (constants 1, log factors dropped).
pub fn tradeoff<T: Scalar>(setting: TradeoffSetting<T>, params: &TradeoffParams<T>) -> Result<T> {
    params.validate()?;
    let (a, b) = params.factors();
    let n = T::from_usize_lossy(params.n);
    let eps = params.epsilon;
    match setting {
        TradeoffSetting::Centralized => Ok(a / (eps.sqrt() * n) + b / (eps * n * n)),
        TradeoffSetting::Federated { r } => {
            if !(r > T::zero() && r < T::lit(0.2)) {
                return Err(Error::param(format!("user fraction r={r} must be in (0, 1/5)")));
            }
            federated_tradeoff_expression(params, r)
        }
        TradeoffSetting::Decentralized => Ok(a / (eps * n).sqrt() + b / (eps * n)),
    }
}
