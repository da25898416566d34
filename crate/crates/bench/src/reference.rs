//! High-precision proximal-gradient solver used as the non-private reference.

use noisyfix::linalg;
use noisyfix::operators::prox_l1;

use crate::data::{smooth_gradient, LassoDataset};
use crate::error::Result;

pub const REFERENCE_MAX_ITER: usize = 100_000;
pub const REFERENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Norm of the last gradient-map step `(x − x⁺)/t`.
    pub gradient_map_norm: f64,
}

/// ISTA with step `1/β` until the gradient map falls below `tol` or `max_iter` is hit.
pub fn solve_reference(data: &LassoDataset, kappa: f64, max_iter: usize, tol: f64) -> Result<ReferenceSolution> {
    let beta = data.smoothness()?;
    let t = 1.0 / beta.max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; data.p()];
    let mut gmap = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        let g = smooth_gradient(data, &x)?;
        let v: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
        let next = prox_l1(&v, t * kappa)?;
        gmap = linalg::dist_sq(&x, &next).sqrt() / t;
        x = next;
        it += 1;
        if gmap < tol {
            break;
        }
    }
    Ok(ReferenceSolution {
        x,
        iterations: it,
        gradient_map_norm: gmap,
    })
}

/// Largest componentwise distance from `0 ∈ ∇smooth(x) + κ∂‖x‖₁`.
pub fn optimality_violation(data: &LassoDataset, x: &[f64], kappa: f64) -> Result<f64> {
    let g = smooth_gradient(data, x)?;
    Ok(x.iter()
        .zip(&g)
        .map(|(&xi, &gi)| {
            if xi > 0.0 {
                (gi + kappa).abs()
            } else if xi < 0.0 {
                (gi - kappa).abs()
            } else {
                (gi.abs() - kappa).max(0.0)
            }
        })
        .fold(0.0, f64::max))
}

/// κ with the lowest mean held-out objective over `folds` contiguous folds.
pub fn select_kappa(data: &LassoDataset, grid: &[f64], folds: usize) -> Result<f64> {
    let n = data.n();
    let folds = folds.clamp(2, n.max(2));
    let mut best = (f64::INFINITY, grid.first().copied().unwrap_or(0.0));
    for &kappa in grid {
        let mut total = 0.0;
        for f in 0..folds {
            let (lo, hi) = (f * n / folds, (f + 1) * n / folds);
            let held: Vec<usize> = (lo..hi).collect();
            let kept: Vec<usize> = (0..lo).chain(hi..n).collect();
            let fit = solve_reference(&data.select(&kept)?, kappa, 20_000, 1e-8)?;
            // held-out squared error only; κ·‖x‖₁ would favour large κ
            total += crate::data::lasso_objective(&data.select(&held)?, &fit.x, 0.0)?;
        }
        if total < best.0 {
            best = (total, kappa);
        }
    }
    Ok(best.1)
}
