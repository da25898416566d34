//! Rényi-DP accounting for the private ADMM variants.
//!
//! All bounds are closed-form upper bounds. Settings whose bound only holds in
//! a restricted regime report `Error::ConditionNotMet` naming the failed
//! clause instead of returning a number.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default Rényi orders used for conversion and calibration.
pub const DEFAULT_ALPHAS: [f64; 10] = [1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

pub fn default_alphas<T: Scalar>() -> Vec<T> {
    DEFAULT_ALPHAS.iter().map(|&a| T::lit(a)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdpPoint<T> {
    pub alpha: T,
    pub epsilon: T,
    pub provenance: String,
}

/// ε(α) on a finite grid of orders, sorted by α.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpCurve<T> {
    points: Vec<RdpPoint<T>>,
}

impl<T: Scalar> RdpCurve<T> {
    pub fn new(mut points: Vec<RdpPoint<T>>) -> Result<Self> {
        for pt in &points {
            check_alpha(pt.alpha)?;
            if !(pt.epsilon >= T::zero()) {
                return Err(Error::param(format!(
                    "epsilon({}) = {} is negative",
                    pt.alpha, pt.epsilon
                )));
            }
        }
        points.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap_or(std::cmp::Ordering::Equal));
        if points.windows(2).any(|w| w[0].alpha == w[1].alpha) {
            return Err(Error::structural("duplicate order in RDP curve"));
        }
        Ok(Self { points })
    }

    /// Evaluates `eps` on every order; orders where it fails are an error.
    pub fn from_fn<F>(alphas: &[T], provenance: &str, mut eps: F) -> Result<Self>
    where
        F: FnMut(T) -> Result<T>,
    {
        let points = alphas
            .iter()
            .map(|&alpha| {
                Ok(RdpPoint {
                    alpha,
                    epsilon: eps(alpha)?,
                    provenance: provenance.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Like [`RdpCurve::from_fn`] but keeps only orders where the bound is valid.
    ///
    /// Fails with the last `ConditionNotMet` if no order is valid.
    pub fn from_fn_valid<F>(alphas: &[T], provenance: &str, mut eps: F) -> Result<Self>
    where
        F: FnMut(T) -> Result<T>,
    {
        let mut points = Vec::new();
        let mut last_condition = None;
        for &alpha in alphas {
            match eps(alpha) {
                Ok(epsilon) => points.push(RdpPoint {
                    alpha,
                    epsilon,
                    provenance: provenance.to_string(),
                }),
                Err(e @ Error::ConditionNotMet { .. }) => last_condition = Some(e),
                Err(e) => return Err(e),
            }
        }
        if points.is_empty() {
            return Err(last_condition.unwrap_or_else(|| Error::structural("empty order grid")));
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[RdpPoint<T>] {
        &self.points
    }

    pub fn alphas(&self) -> Vec<T> {
        self.points.iter().map(|p| p.alpha).collect()
    }

    pub fn epsilon_at(&self, alpha: T) -> Option<T> {
        self.points.iter().find(|p| p.alpha == alpha).map(|p| p.epsilon)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Curve with every ε multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: T, provenance: &str) -> Result<Self> {
        if !(factor >= T::zero()) {
            return Err(Error::param(format!("scale factor {factor} must be >= 0")));
        }
        Ok(Self {
            points: self
                .points
                .iter()
                .map(|p| RdpPoint {
                    alpha: p.alpha,
                    epsilon: p.epsilon * factor,
                    provenance: provenance.to_string(),
                })
                .collect(),
        })
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::one() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("Renyi order alpha={alpha} must be > 1")))
    }
}

fn check_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name}={v} must be > 0")))
    }
}

fn check_nonneg<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name}={v} must be >= 0")))
    }
}

fn check_count(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be >= 1")))
    }
}

/// `αΔ²/(2σ²)`.
pub fn gaussian_rdp<T: Scalar>(delta: T, sigma: T, alpha: T) -> Result<T> {
    check_nonneg("sensitivity", delta)?;
    check_positive("sigma", sigma)?;
    check_alpha(alpha)?;
    Ok(alpha * delta * delta / (T::lit(2.0) * sigma * sigma))
}

/// Pointwise sum of curves sharing one order grid.
pub fn compose<T: Scalar>(curves: &[RdpCurve<T>]) -> Result<RdpCurve<T>> {
    let first = curves.first().ok_or_else(|| Error::structural("nothing to compose"))?;
    let grid = first.alphas();
    let mut eps = vec![T::zero(); grid.len()];
    for c in curves {
        if c.alphas() != grid {
            return Err(Error::structural("composed curves use different order grids"));
        }
        for (e, p) in eps.iter_mut().zip(&c.points) {
            *e += p.epsilon;
        }
    }
    let mut provenance: Vec<&str> = curves
        .iter()
        .flat_map(|c| c.points.first().map(|p| p.provenance.as_str()))
        .collect();
    provenance.sort_unstable();
    provenance.dedup();
    let tag = format!("composed({})", provenance.join("+"));
    RdpCurve::new(
        grid.into_iter()
            .zip(eps)
            .map(|(alpha, epsilon)| RdpPoint {
                alpha,
                epsilon,
                provenance: tag.clone(),
            })
            .collect(),
    )
}

/// `min_α ε(α) + ln(1/δ)/(α − 1)`.
pub fn rdp_to_dp<T: Scalar>(curve: &RdpCurve<T>, delta: T) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::param(format!("delta={delta} must be in (0,1)")));
    }
    if curve.is_empty() {
        return Err(Error::structural("empty RDP curve"));
    }
    let log_inv_delta = -delta.ln();
    Ok(curve
        .points
        .iter()
        .map(|p| p.epsilon + log_inv_delta / (p.alpha - T::one()))
        .fold(T::infinity(), T::min))
}

/// One-step sensitivity of consensus ADMM: `4λLγ/n`.
pub fn sensitivity_consensus<T: Scalar>(l: T, gamma: T, lambda: T, n: usize) -> Result<T> {
    check_positive("L", l)?;
    check_positive("gamma", gamma)?;
    if !(lambda > T::zero() && lambda <= T::one()) {
        return Err(Error::param(format!("lambda={lambda} must be in (0,1]")));
    }
    check_count("n", n)?;
    Ok(T::lit(4.0) * lambda * l * gamma / T::from_usize_lossy(n))
}

/// One-step sensitivity of general ADMM: `4λLγ‖A‖₂/(nω_A)`.
pub fn sensitivity_general<T: Scalar>(l: T, gamma: T, lambda: T, n: usize, norm_a: T, omega_a: T) -> Result<T> {
    if !(omega_a > T::zero()) {
        return Err(Error::Model(format!(
            "smallest singular value of A is {omega_a}; A must have full rank"
        )));
    }
    check_positive("norm of A", norm_a)?;
    Ok(sensitivity_consensus(l, gamma, lambda, n)? * norm_a / omega_a)
}

/// Centralized ADMM: `8αKL²γ²/(σ²n²)`.
pub fn centralized_epsilon<T: Scalar>(alpha: T, k: usize, l: T, gamma: T, sigma: T, n: usize) -> Result<T> {
    check_alpha(alpha)?;
    check_positive("L", l)?;
    check_positive("gamma", gamma)?;
    check_positive("sigma", sigma)?;
    check_count("n", n)?;
    let nf = T::from_usize_lossy(n);
    Ok(T::lit(8.0) * alpha * T::from_usize_lossy(k) * l * l * gamma * gamma / (sigma * sigma * nf * nf))
}

/// Checks the regime of the closed-form subsampled Gaussian bound.
///
/// Requires `q < 1/5`, `σ ≥ 4` and
/// `α ≤ (M²σ²/2 − ln(5σ²)) / (M + ln(qα) + 1/(2σ²))` with
/// `M = ln(1 + 1/(q(α − 1)))`, evaluated as written.
pub fn subsampling_regime<T: Scalar>(alpha: T, q: T, sigma: T) -> Result<()> {
    check_alpha(alpha)?;
    check_positive("sigma", sigma)?;
    if !(q > T::zero() && q <= T::one()) {
        return Err(Error::param(format!("sampling rate q={q} must be in (0,1]")));
    }
    if !(q < T::lit(0.2)) {
        return Err(Error::condition("q < 1/5", format!("q = {q}")));
    }
    if !(sigma >= T::lit(4.0)) {
        return Err(Error::condition("sigma >= 4", format!("sigma = {sigma}")));
    }
    let bound = subsampling_alpha_bound(alpha, q, sigma);
    if !(alpha <= bound) {
        return Err(Error::condition(
            "alpha <= (M^2 sigma^2/2 - ln(5 sigma^2)) / (M + ln(q alpha) + 1/(2 sigma^2))",
            format!("alpha = {alpha}, bound = {bound}"),
        ));
    }
    Ok(())
}

/// Right-hand side of the order condition (NaN or negative when the denominator is not positive).
pub fn subsampling_alpha_bound<T: Scalar>(alpha: T, q: T, sigma: T) -> T {
    let two = T::lit(2.0);
    let s2 = sigma * sigma;
    let m = (T::one() + T::one() / (q * (alpha - T::one()))).ln();
    let num = m * m * s2 / two - (T::lit(5.0) * s2).ln();
    let den = m + (q * alpha).ln() + T::one() / (two * s2);
    num / den
}

/// Subsampled Gaussian mechanism: `2αq²Δ²/σ²` inside its regime.
pub fn subsampled_rdp<T: Scalar>(alpha: T, q: T, delta: T, sigma: T) -> Result<T> {
    check_nonneg("sensitivity", delta)?;
    subsampling_regime(alpha, q, sigma)?;
    Ok(T::lit(2.0) * alpha * q * q * delta * delta / (sigma * sigma))
}

/// Federated ADMM, central model: `16αKL²γ²/(σ²n²)` for `m < n/5` and valid α.
pub fn federated_central_epsilon<T: Scalar>(
    alpha: T,
    k: usize,
    l: T,
    gamma: T,
    sigma: T,
    m: usize,
    n: usize,
) -> Result<T> {
    check_count("m", m)?;
    check_count("n", n)?;
    if m > n {
        return Err(Error::param(format!("m={m} users per round exceeds n={n}")));
    }
    if !(5 * m < n) {
        return Err(Error::condition("m < n/5", format!("m = {m}, n = {n}")));
    }
    let q = T::from_usize_lossy(m) / T::from_usize_lossy(n);
    subsampling_regime(alpha, q, sigma)?;
    Ok(T::lit(2.0) * centralized_epsilon(alpha, k, l, gamma, sigma, n)?)
}

/// Per-user guarantee against an observer of individual updates: `8αK_iL²γ²/σ²`.
pub fn local_epsilon<T: Scalar>(alpha: T, k_i: usize, l: T, gamma: T, sigma: T) -> Result<T> {
    centralized_epsilon(alpha, k_i, l, gamma, sigma, 1)
}

/// Per-user guarantee against the server in federated ADMM.
///
/// Without secure aggregation this is [`local_epsilon`]; with it the server
/// only sees the sum of `m` updates and the bound is divided by `m²`.
pub fn federated_server_epsilon<T: Scalar>(
    alpha: T,
    k_i: usize,
    l: T,
    gamma: T,
    sigma: T,
    m: usize,
    secure_aggregation: bool,
) -> Result<T> {
    check_count("m", m)?;
    let eps = local_epsilon(alpha, k_i, l, gamma, sigma)?;
    if secure_aggregation {
        let mf = T::from_usize_lossy(m);
        Ok(eps / (mf * mf))
    } else {
        Ok(eps)
    }
}

/// Amplification by iteration: `αs²/(2mσ²)` for total displacement `s` over `m` steps.
pub fn amplification_by_iteration<T: Scalar>(s_total: T, m_steps: usize, sigma: T, alpha: T) -> Result<T> {
    check_count("number of steps", m_steps)?;
    check_nonneg("displacement", s_total)?;
    check_positive("sigma", sigma)?;
    check_alpha(alpha)?;
    Ok(alpha * s_total * s_total / (T::lit(2.0) * T::from_usize_lossy(m_steps) * sigma * sigma))
}

/// Decentralized ADMM, network model: `8αK_iL²γ² ln n/(σ²n)` for `σ > 2Lγ√(α(α−1))`.
pub fn network_rdp_epsilon<T: Scalar>(alpha: T, k_i: usize, l: T, gamma: T, sigma: T, n: usize) -> Result<T> {
    check_alpha(alpha)?;
    check_positive("L", l)?;
    check_positive("gamma", gamma)?;
    check_positive("sigma", sigma)?;
    if n < 2 {
        return Err(Error::param(format!("network bound needs n >= 2, got {n}")));
    }
    let guard = T::lit(2.0) * l * gamma * (alpha * (alpha - T::one())).sqrt();
    if !(sigma > guard) {
        return Err(Error::condition(
            "sigma > 2 L gamma sqrt(alpha (alpha - 1))",
            format!("sigma = {sigma}, threshold = {guard}"),
        ));
    }
    let nf = T::from_usize_lossy(n);
    Ok(T::lit(8.0) * alpha * T::from_usize_lossy(k_i) * l * l * gamma * gamma * nf.ln() / (sigma * sigma * nf))
}

/// Estimated participations per user over `K` walk steps: `ceil(K/n)`.
pub fn participations_estimate(k: usize, n: usize) -> Result<usize> {
    check_count("n", n)?;
    Ok(k.div_ceil(n))
}

/// Which guarantee to account or calibrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting<T> {
    Centralized {
        k: usize,
        l: T,
        gamma: T,
        n: usize,
    },
    FederatedCentral {
        k: usize,
        l: T,
        gamma: T,
        m: usize,
        n: usize,
    },
    Local {
        k_i: usize,
        l: T,
        gamma: T,
    },
    Network {
        k_i: usize,
        l: T,
        gamma: T,
        n: usize,
    },
}

impl<T: Scalar> Setting<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Setting::Centralized { .. } => "centralized",
            Setting::FederatedCentral { .. } => "federated-central",
            Setting::Local { .. } => "local",
            Setting::Network { .. } => "network",
        }
    }

    pub fn epsilon(&self, alpha: T, sigma: T) -> Result<T> {
        match *self {
            Setting::Centralized { k, l, gamma, n } => centralized_epsilon(alpha, k, l, gamma, sigma, n),
            Setting::FederatedCentral { k, l, gamma, m, n } => {
                federated_central_epsilon(alpha, k, l, gamma, sigma, m, n)
            }
            Setting::Local { k_i, l, gamma } => local_epsilon(alpha, k_i, l, gamma, sigma),
            Setting::Network { k_i, l, gamma, n } => network_rdp_epsilon(alpha, k_i, l, gamma, sigma, n),
        }
    }

    /// RDP curve over `alphas`, keeping only orders where the bound holds.
    pub fn curve(&self, sigma: T, alphas: &[T]) -> Result<RdpCurve<T>> {
        RdpCurve::from_fn_valid(alphas, self.name(), |a| self.epsilon(a, sigma))
    }
}

/// Privacy level to reach.
#[derive(Debug, Clone, PartialEq)]
pub enum PrivacyTarget<T> {
    Rdp { alpha: T, epsilon: T },
    Dp { epsilon: T, delta: T, alphas: Vec<T> },
}

impl<T: Scalar> PrivacyTarget<T> {
    pub fn dp(epsilon: T, delta: T) -> Self {
        PrivacyTarget::Dp {
            epsilon,
            delta,
            alphas: default_alphas(),
        }
    }

    /// Privacy level achieved in `setting` with noise `sigma`, in the target's units.
    pub fn achieved(&self, setting: &Setting<T>, sigma: T) -> Result<T> {
        match self {
            PrivacyTarget::Rdp { alpha, .. } => setting.epsilon(*alpha, sigma),
            PrivacyTarget::Dp { delta, alphas, .. } => rdp_to_dp(&setting.curve(sigma, alphas)?, *delta),
        }
    }

    fn level(&self) -> T {
        match self {
            PrivacyTarget::Rdp { epsilon, .. } | PrivacyTarget::Dp { epsilon, .. } => *epsilon,
        }
    }
}

/// Relative bisection tolerance of [`calibrate_sigma`].
pub const CALIBRATION_TOLERANCE: f64 = 1e-4;

/// Smallest noise std (up to [`CALIBRATION_TOLERANCE`]) meeting `target` in `setting`.
///
/// The returned σ always satisfies the target; it exceeds the exact minimum by
/// at most the tolerance.
pub fn calibrate_sigma<T: Scalar>(target: &PrivacyTarget<T>, setting: &Setting<T>) -> Result<T> {
    let level = target.level();
    if !(level > T::zero()) {
        return Err(Error::condition("target epsilon > 0", format!("epsilon = {level}")));
    }
    if let PrivacyTarget::Dp { delta, alphas, .. } = target {
        if !(*delta > T::zero() && *delta < T::one()) {
            return Err(Error::param(format!("delta={delta} must be in (0,1)")));
        }
        if alphas.is_empty() {
            return Err(Error::structural("empty order grid"));
        }
    }
    let feasible = |sigma: T| -> Result<bool> {
        match target.achieved(setting, sigma) {
            Ok(eps) => Ok(eps <= level),
            Err(Error::ConditionNotMet { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    // Every bound is c/σ², so an RDP target has a closed-form inverse.
    if let PrivacyTarget::Rdp { alpha, epsilon } = *target {
        let c = match setting.epsilon(alpha, T::one()) {
            Ok(c) => Some(c),
            Err(Error::ConditionNotMet { .. }) => None,
            Err(e) => return Err(e),
        };
        if let Some(c) = c {
            if c == T::zero() {
                return Err(Error::condition("positive sensitivity", "epsilon is 0 for every sigma"));
            }
            let sigma = (c / epsilon).sqrt();
            if feasible(sigma)? {
                return Ok(sigma);
            }
        }
    }
    let cap = T::lit(1e12);
    let mut hi = T::lit(1e-6);
    while !feasible(hi)? {
        hi *= T::lit(2.0);
        if hi > cap {
            return Err(Error::condition(
                "target reachable with finite sigma",
                format!("no sigma up to {cap} meets epsilon = {level}"),
            ));
        }
    }
    let mut lo = hi / T::lit(2.0);
    let tol = T::lit(CALIBRATION_TOLERANCE);
    while (hi - lo) > tol * hi {
        let mid = (lo + hi) / T::lit(2.0);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_rdp(1.0, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(gaussian_rdp(0.0, 3.0, 7.0).unwrap(), 0.0);
        assert_eq!(gaussian_rdp(2.0, 2.0, 3.0).unwrap(), 1.5);
        assert!(matches!(gaussian_rdp(1.0, 0.0, 2.0), Err(Error::Parameter(_))));
        assert!(matches!(gaussian_rdp(1.0, 1.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn conversion_examples() {
        let one = |a: f64, e: f64| RdpPoint {
            alpha: a,
            epsilon: e,
            provenance: "t".into(),
        };
        let d = (-1f64).exp();
        let c = RdpCurve::new(vec![one(2.0, 1.0)]).unwrap();
        assert!(close(rdp_to_dp(&c, d).unwrap(), 2.0, 1e-15));
        let c = RdpCurve::new(vec![one(2.0, 1.0), one(11.0, 1.0)]).unwrap();
        assert!(close(rdp_to_dp(&c, d).unwrap(), 1.1, 1e-15));
        let c = RdpCurve::new(vec![one(2.0, 0.0)]).unwrap();
        assert!(rdp_to_dp(&c, 1.0 - 1e-12).unwrap() < 1e-11);
        let empty = RdpCurve::<f64>::new(vec![]).unwrap();
        assert!(matches!(rdp_to_dp(&empty, 0.5), Err(Error::Structural(_))));
    }

    #[test]
    fn compose_grid_mismatch() {
        let a = RdpCurve::from_fn(&[2.0, 3.0], "g", |al| gaussian_rdp(1.0, 1.0, al)).unwrap();
        let b = RdpCurve::from_fn(&[2.0, 4.0], "g", |al| gaussian_rdp(1.0, 1.0, al)).unwrap();
        assert!(matches!(compose(&[a, b]), Err(Error::Structural(_))));
    }

    #[test]
    fn sensitivity_examples() {
        assert!(close(sensitivity_consensus(1.0, 0.1, 1.0, 10).unwrap(), 0.04, 1e-15));
        assert!(close(sensitivity_consensus(1.0, 0.1, 1.0, 1).unwrap(), 0.4, 1e-15));
        assert_eq!(sensitivity_general(1.0, 1.0, 1.0, 1, 2.0, 0.5).unwrap(), 16.0);
        assert_eq!(
            sensitivity_general(1.0, 0.1, 1.0, 10, 1.0, 1.0).unwrap(),
            sensitivity_consensus(1.0, 0.1, 1.0, 10).unwrap()
        );
        assert!(matches!(
            sensitivity_general(1.0, 1.0, 1.0, 1, 2.0, 0.0),
            Err(Error::Model(_))
        ));
        assert!(sensitivity_consensus(0.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn setting_examples() {
        assert!(close(
            centralized_epsilon(2.0, 100, 1.0, 0.1, 1.0, 100).unwrap(),
            0.0016,
            1e-14
        ));
        assert_eq!(centralized_epsilon(2.0, 0, 1.0, 0.1, 1.0, 100).unwrap(), 0.0);
        // 16·2·10·1·0.01 / (16·10⁴)
        assert!(close(
            federated_central_epsilon(2.0, 10, 1.0, 0.1, 4.0, 10, 100).unwrap(),
            2e-5,
            1e-14
        ));
        assert!(matches!(
            federated_central_epsilon(2.0, 10, 1.0, 0.1, 4.0, 20, 100),
            Err(Error::ConditionNotMet {
                condition: "m < n/5",
                ..
            })
        ));
        assert_eq!(local_epsilon(2.0, 1, 1.0, 1.0, 4.0).unwrap(), 1.0);
        assert_eq!(local_epsilon(2.0, 0, 1.0, 1.0, 4.0).unwrap(), 0.0);
        assert!(close(
            network_rdp_epsilon(2.0, 1, 1.0, 1.0, 4.0, 10).unwrap(),
            0.1 * 10f64.ln(),
            1e-15
        ));
        let edge = 2.0 * 2f64.sqrt();
        assert!(matches!(
            network_rdp_epsilon(2.0, 1, 1.0, 1.0, edge, 10),
            Err(Error::ConditionNotMet { .. })
        ));
        assert!(matches!(
            network_rdp_epsilon(2.0, 1, 1.0, 1.0, 4.0, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn subsampling_examples() {
        assert!(close(subsampled_rdp(2.0, 0.1, 1.0, 4.0).unwrap(), 0.0025, 1e-15));
        assert!(matches!(
            subsampled_rdp(2.0, 0.5, 1.0, 4.0),
            Err(Error::ConditionNotMet {
                condition: "q < 1/5",
                ..
            })
        ));
        assert!(matches!(
            subsampled_rdp(2.0, 0.1, 1.0, 1.0),
            Err(Error::ConditionNotMet {
                condition: "sigma >= 4",
                ..
            })
        ));
    }

    #[test]
    fn secure_aggregation_scales_server_view() {
        let plain = federated_server_epsilon(2.0, 3, 1.0, 1.0, 4.0, 10, false).unwrap();
        let secure = federated_server_epsilon(2.0, 3, 1.0, 1.0, 4.0, 10, true).unwrap();
        assert!(close(secure * 100.0, plain, 1e-15));
    }

    #[test]
    fn amplification_examples() {
        assert_eq!(
            amplification_by_iteration(1.0, 1, 1.0, 2.0).unwrap(),
            gaussian_rdp(1.0, 1.0, 2.0).unwrap()
        );
        assert_eq!(amplification_by_iteration(1.0, 4, 1.0, 2.0).unwrap(), 0.25);
        assert!(amplification_by_iteration(1.0, 0, 1.0, 2.0).is_err());
    }

    #[test]
    fn calibration_inverts_centralized_example() {
        let setting = Setting::Centralized {
            k: 100,
            l: 1.0,
            gamma: 0.1,
            n: 100,
        };
        let target = PrivacyTarget::Rdp {
            alpha: 2.0,
            epsilon: 0.0016,
        };
        assert!(close(calibrate_sigma(&target, &setting).unwrap(), 1.0, 1e-12));
        let zero = PrivacyTarget::Rdp {
            alpha: 2.0,
            epsilon: 0.0,
        };
        assert!(matches!(
            calibrate_sigma(&zero, &setting),
            Err(Error::ConditionNotMet { .. })
        ));
    }

    #[test]
    fn participations() {
        assert_eq!(participations_estimate(10, 3).unwrap(), 4);
        assert_eq!(participations_estimate(9, 3).unwrap(), 3);
    }
}
