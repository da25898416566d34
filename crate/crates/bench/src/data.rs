//! Synthetic sparse regression data and the Lasso objective.

use noisyfix::{linalg, Domain, Matrix, Streams};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{BenchError, Result};

/// Rows of `a` lie on the unit sphere; `b = a·x_true + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoDataset {
    pub a: Matrix<f64>,
    pub b: Vec<f64>,
    pub x_true: Vec<f64>,
    pub noise_std: f64,
}

/// Rows that [`LassoDataset::split`] puts in the training half.
pub fn train_count(n: usize, frac: f64) -> usize {
    ((frac * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1))
}

impl LassoDataset {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn p(&self) -> usize {
        self.a.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.a.row(i)
    }

    /// Subset of rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Result<LassoDataset> {
        let p = self.p();
        let mut data = Vec::with_capacity(rows.len() * p);
        let mut b = Vec::with_capacity(rows.len());
        for &i in rows {
            if i >= self.n() {
                return Err(BenchError::Core(noisyfix::Error::Structural(format!(
                    "row {i} out of range (n={})",
                    self.n()
                ))));
            }
            data.extend_from_slice(self.row(i));
            b.push(self.b[i]);
        }
        Ok(LassoDataset {
            a: Matrix::from_row_major(rows.len(), p, data)?,
            b,
            x_true: self.x_true.clone(),
            noise_std: self.noise_std,
        })
    }

    /// Seeded disjoint split; the first part holds `round(frac·n)` rows.
    pub fn split(&self, frac: f64, seed: u64) -> Result<(LassoDataset, LassoDataset)> {
        if !(frac > 0.0 && frac < 1.0) {
            return Err(param(format!("train fraction {frac} must be in (0,1)")));
        }
        let n = self.n();
        let cut = train_count(n, frac);
        let mut rng = Streams::new(seed).substream(Domain::Aux(101), 0, 0);
        let order = index::sample(&mut rng, n, n).into_vec();
        let (mut train, mut test) = (order[..cut].to_vec(), order[cut..].to_vec());
        train.sort_unstable();
        test.sort_unstable();
        Ok((self.select(&train)?, self.select(&test)?))
    }

    /// `max_i ‖a_i‖²`, the smoothness of a single squared-loss term.
    pub fn item_smoothness(&self) -> f64 {
        (0..self.n()).map(|i| linalg::norm_sq(self.row(i))).fold(0.0, f64::max)
    }

    /// Largest eigenvalue of `AᵀA/n`, the smoothness of the data term.
    pub fn smoothness(&self) -> Result<f64> {
        let mut g = self.a.gram();
        let inv = 1.0 / self.n() as f64;
        for i in 0..self.p() {
            for j in 0..self.p() {
                g[(i, j)] *= inv;
            }
        }
        Ok(*g.symmetric_eigenvalues()?.last().unwrap_or(&0.0))
    }
}

fn param(msg: String) -> BenchError {
    BenchError::Core(noisyfix::Error::Parameter(msg))
}

/// Rows uniform on the unit sphere, `x_true` uniform on `[-1, 1]` over a random support.
pub fn gen_lasso(n: usize, p: usize, support: usize, noise_std: f64, seed: u64) -> Result<LassoDataset> {
    if n == 0 || p == 0 {
        return Err(param("n and p must be >= 1".into()));
    }
    if support > p {
        return Err(param(format!("support size {support} exceeds dimension {p}")));
    }
    if !(noise_std >= 0.0) {
        return Err(param(format!("noise_std={noise_std} must be >= 0")));
    }
    let mut rng = Streams::new(seed).substream(Domain::Aux(100), 0, 0);
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        let mut row: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let norm = linalg::norm(&row);
        row.iter_mut().for_each(|v| *v /= norm);
        data.extend(row);
    }
    let a = Matrix::from_row_major(n, p, data)?;
    let mut x_true = vec![0.0; p];
    for j in index::sample(&mut rng, p, support) {
        x_true[j] = rng.random_range(-1.0..1.0);
    }
    let clean = a.matvec(&x_true)?;
    let b = clean
        .into_iter()
        .map(|v| {
            let e: f64 = rng.sample(StandardNormal);
            v + noise_std * e
        })
        .collect();
    Ok(LassoDataset {
        a,
        b,
        x_true,
        noise_std,
    })
}

/// `(1/2n)‖Ax − b‖² + κ‖x‖₁`.
pub fn lasso_objective(data: &LassoDataset, x: &[f64], kappa: f64) -> Result<f64> {
    if x.len() != data.p() {
        return Err(BenchError::Core(noisyfix::Error::Structural(format!(
            "x has length {}, data has p={}",
            x.len(),
            data.p()
        ))));
    }
    let r = linalg::sub(&data.a.matvec(x)?, &data.b);
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    Ok(linalg::norm_sq(&r) / (2.0 * data.n() as f64) + kappa * l1)
}

/// Gradient of the data term, `Aᵀ(Ax − b)/n`.
pub fn smooth_gradient(data: &LassoDataset, x: &[f64]) -> Result<Vec<f64>> {
    let r = linalg::sub(&data.a.matvec(x)?, &data.b);
    let g = data.a.transpose().matvec(&r)?;
    Ok(linalg::scale(1.0 / data.n() as f64, &g))
}

/// Gradient of item `i`'s squared loss, `a_i(a_iᵀx − b_i)`.
pub fn item_gradient(data: &LassoDataset, i: usize, x: &[f64]) -> Vec<f64> {
    let a = data.row(i);
    let r = linalg::dot(a, x) - data.b[i];
    linalg::scale(r, a)
}
