use noisyfix::fixedpoint::{run, BlockSchedule, IterationConfig};
use noisyfix::operators::{
    lions_mercier, probe_lipschitz, prox_l1, prox_quadratic_rank_one, reflect, splitting_solution,
    strongly_convex_gradient_step, BlockVector, ProxSpec,
};
use noisyfix::{linalg, Matrix, Streams};
use proptest::prelude::*;
use rand::Rng;

const PROBE_PAIRS: usize = 256;

/// Random symmetric PSD matrix `MᵀM + shift·I`.
fn random_psd(p: usize, shift: f64, seed: u64) -> Matrix<f64> {
    let mut rng = Streams::new(seed).substream(noisyfix::Domain::Aux(1), 0, 0);
    let m = Matrix::from_row_major(p, p, (0..p * p).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let mut q = m.gram();
    for i in 0..p {
        q[(i, i)] += shift;
    }
    q
}

fn dense_rank_one_oracle(a: &[f64], b: f64, gamma: f64, n: usize, v: &[f64]) -> Vec<f64> {
    let p = a.len();
    let s = n as f64 / gamma;
    let mut m = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            m[(i, j)] = a[i] * a[j];
        }
        m[(i, i)] += s;
    }
    let rhs: Vec<f64> = a.iter().zip(v).map(|(&ai, &vi)| b * ai + s * vi).collect();
    m.solve(&rhs).unwrap()
}

#[test]
fn rank_one_prox_matches_dense_solve() {
    let mut rng = Streams::new(11).substream(noisyfix::Domain::Aux(2), 0, 0);
    for _ in 0..50 {
        let a: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = rng.random_range(-3.0..3.0);
        let gamma = rng.random_range(0.1..5.0);
        let n = rng.random_range(1..200);
        let x = prox_quadratic_rank_one(&a, b, gamma, n, &v).unwrap();
        let oracle = dense_rank_one_oracle(&a, b, gamma, n, &v);
        let rel = linalg::dist_sq(&x, &oracle).sqrt() / linalg::norm(&oracle).max(1e-300);
        assert!(rel < 1e-10, "relative difference {rel}");
    }
    // one-dimensional case against the dense 1x1 system
    let x = prox_quadratic_rank_one(&[1.0], 1.0, 2.0, 1, &[0.0]).unwrap();
    assert!((x[0] - dense_rank_one_oracle(&[1.0], 1.0, 2.0, 1, &[0.0])[0]).abs() < 1e-15);
}

#[test]
fn prox_kinds_are_non_expansive_on_probes() {
    let q = random_psd(4, 0.0, 3);
    let proxes = [
        ProxSpec::Zero,
        ProxSpec::l1(0.3).unwrap(),
        ProxSpec::quadratic_rank_one(vec![0.5, -1.0, 2.0, 0.1], 0.7, 0.8, 5).unwrap(),
        ProxSpec::quadratic(q, vec![0.1, 0.2, -0.3, 0.0], 0.9).unwrap(),
        ProxSpec::custom(|v: &[f64]| v.iter().map(|x| x.clamp(-0.2, 0.2)).collect()),
    ];
    for (i, prox) in proxes.iter().enumerate() {
        let l = probe_lipschitz(&prox.to_operator(), 1, 4, PROBE_PAIRS, i as u64).unwrap();
        assert!(l <= 1.0 + 1e-9, "prox {i}: Lipschitz estimate {l}");
        let r = probe_lipschitz(&reflect(prox), 1, 4, PROBE_PAIRS, i as u64).unwrap();
        assert!(r <= 1.0 + 1e-9, "reflection {i}: Lipschitz estimate {r}");
    }
}

#[test]
fn strongly_convex_gradient_step_meets_declared_contraction() {
    for seed in 0..5 {
        let q = random_psd(3, 0.5, 100 + seed);
        let eig = q.symmetric_eigenvalues().unwrap();
        let (mu, beta) = (eig[0], eig[2]);
        let qq = q.clone();
        let op = strongly_convex_gradient_step(
            move |u: &BlockVector<f64>| BlockVector::from_flat(qq.matvec(u.as_slice()).unwrap(), 1, 3).unwrap(),
            beta,
            mu,
        )
        .unwrap();
        let tau = op.class().lipschitz_bound();
        assert!((tau - (beta - mu) / (beta + mu)).abs() < 1e-15);
        let l = probe_lipschitz(&op, 1, 3, PROBE_PAIRS, seed).unwrap();
        assert!(l <= tau + 1e-9, "estimate {l} above declared {tau}");
    }
}

#[test]
fn lions_mercier_one_dimensional_quadratic() {
    // p1 = (x − 3)²/2, p2 = 0; with γ = 1 the prox of p1 is (v + 3)/2.
    let q = Matrix::from_rows(&[vec![1.0]]).unwrap();
    let p1 = ProxSpec::quadratic(q, vec![-3.0], 1.0).unwrap();
    let t = lions_mercier(&p1, &ProxSpec::Zero, 0.5).unwrap();
    let cfg = IterationConfig::new(1.0, 0.0, 200, BlockSchedule::AllBlocks, 0);
    let (u, _) = run(&BlockVector::zeros(1, 1), &t, &cfg).unwrap();
    let x: BlockVector<f64> = splitting_solution(&ProxSpec::Zero, &u).unwrap();
    assert!((x.as_slice()[0] - 3.0).abs() < 1e-12);
}

#[test]
fn lions_mercier_lasso_like_with_large_penalty() {
    // p1 = x²/2 + x (shifted), p2 = 5|x|: the minimizer is 0 since |1| < 5.
    let q = Matrix::from_rows(&[vec![1.0]]).unwrap();
    let p1 = ProxSpec::quadratic(q, vec![1.0], 1.0).unwrap();
    let p2 = ProxSpec::l1(5.0).unwrap();
    let t = lions_mercier(&p1, &p2, 0.5).unwrap();
    let cfg = IterationConfig::new(1.0, 0.0, 200, BlockSchedule::AllBlocks, 0);
    let (u, _) = run(&BlockVector::from_flat(vec![4.0], 1, 1).unwrap(), &t, &cfg).unwrap();
    let x = splitting_solution(&p2, &u).unwrap().as_slice()[0];
    assert_eq!(x, 0.0);
}

proptest! {
    #[test]
    fn soft_threshold_shrinks_towards_zero(v in prop::collection::vec(-10.0f64..10.0, 1..8), t in 0.0f64..5.0) {
        let x = prox_l1(&v, t).unwrap();
        for (&xi, &vi) in x.iter().zip(&v) {
            prop_assert!(xi.abs() <= vi.abs());
            prop_assert!(xi == 0.0 || xi.signum() == vi.signum());
            prop_assert!((vi - xi).abs() <= t + 1e-12);
        }
    }

    #[test]
    fn clip_output_norm_at_most_threshold(v in prop::collection::vec(-10.0f64..10.0, 1..8), c in 0.01f64..5.0) {
        let x = noisyfix::operators::clip(&v, c).unwrap();
        prop_assert!(linalg::norm(&x) <= c * (1.0 + 1e-12));
        if linalg::norm(&v) <= c {
            prop_assert_eq!(x, v);
        }
    }

    #[test]
    fn block_vector_norm_is_flat_norm(blocks in 1usize..5, dim in 1usize..5, seed in any::<u64>()) {
        let mut rng = Streams::new(seed).substream(noisyfix::Domain::Aux(3), 0, 0);
        let data: Vec<f64> = (0..blocks * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = BlockVector::from_flat(data.clone(), blocks, dim).unwrap();
        prop_assert_eq!(v.len(), blocks * dim);
        prop_assert!((v.norm() - linalg::norm(&data)).abs() < 1e-15);
        for b in 0..blocks {
            prop_assert_eq!(v.block(b).len(), dim);
        }
    }

    #[test]
    fn rank_one_prox_is_firmly_non_expansive(
        a in prop::collection::vec(-2.0f64..2.0, 3),
        v in prop::collection::vec(-2.0f64..2.0, 3),
        w in prop::collection::vec(-2.0f64..2.0, 3),
        b in -2.0f64..2.0,
        gamma in 0.1f64..4.0,
    ) {
        let pv = prox_quadratic_rank_one(&a, b, gamma, 3, &v).unwrap();
        let pw = prox_quadratic_rank_one(&a, b, gamma, 3, &w).unwrap();
        let dp = linalg::sub(&pv, &pw);
        let dv = linalg::sub(&v, &w);
        prop_assert!(linalg::norm_sq(&dp) <= linalg::dot(&dp, &dv) + 1e-12);
    }
}
