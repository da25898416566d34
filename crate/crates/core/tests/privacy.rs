use noisyfix::admm::{centralized_iteration, ConsensusProblem};
use noisyfix::privacy::{
    calibrate_sigma, centralized_epsilon, compose, default_alphas, federated_central_epsilon, federated_server_epsilon,
    gaussian_rdp, local_epsilon, network_rdp_epsilon, participations_estimate, rdp_to_dp, sensitivity_consensus,
    sensitivity_general, subsampled_rdp, subsampling_regime, PrivacyTarget, RdpCurve, Setting, CALIBRATION_TOLERANCE,
};
use noisyfix::{Domain, Error, ProxSpec, Streams};
use proptest::prelude::*;
use rand::Rng;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn closed_forms_match_hand_recomputation_over_a_sweep() {
    let mut rng = Streams::new(2024).substream(Domain::Aux(30), 0, 0);
    for _ in 0..100 {
        let alpha = rng.random_range(1.01..8.0);
        let k = rng.random_range(0..5000usize);
        let l = rng.random_range(0.1..5.0);
        let gamma = rng.random_range(0.01..2.0);
        let sigma = rng.random_range(4.0..50.0);
        let n = rng.random_range(200..100_000usize);

        // centralized: K compositions of a Gaussian step with Δ = 4λLγ/n and
        // noise λσ on u; λ cancels
        let lambda = rng.random_range(0.05..1.0);
        let delta = sensitivity_consensus(l, gamma, lambda, n).unwrap();
        let step = gaussian_rdp(delta, lambda * sigma, alpha).unwrap();
        let by_composition = k as f64 * step;
        let spreadsheet = 8.0 * alpha * k as f64 * l * l * gamma * gamma / (sigma * sigma * (n * n) as f64);
        let c = centralized_epsilon(alpha, k, l, gamma, sigma, n).unwrap();
        if k > 0 {
            assert!(rel_err(c, spreadsheet) < 1e-12);
            assert!(rel_err(c, by_composition) < 1e-12);
        } else {
            assert_eq!(c, 0.0);
        }

        let k_i = rng.random_range(1..200usize);
        let local = local_epsilon(alpha, k_i, l, gamma, sigma).unwrap();
        assert!(rel_err(local, 8.0 * alpha * k_i as f64 * (l * gamma / sigma).powi(2)) < 1e-12);

        let m = rng.random_range(1..(n / 5).max(2));
        match federated_central_epsilon(alpha, k.max(1), l, gamma, sigma, m, n) {
            Ok(f) => {
                let sheet = 16.0 * alpha * k.max(1) as f64 * (l * gamma).powi(2) / (sigma * sigma * (n as f64).powi(2));
                assert!(rel_err(f, sheet) < 1e-12);
            }
            Err(Error::ConditionNotMet { .. }) => {
                assert!(subsampling_regime(alpha, m as f64 / n as f64, sigma).is_err());
            }
            Err(e) => panic!("unexpected error {e}"),
        }

        let nn = rng.random_range(2..10_000usize);
        let net_sigma = 2.0 * l * gamma * (alpha * (alpha - 1.0)).sqrt() + rng.random_range(0.01..10.0);
        let net = network_rdp_epsilon(alpha, k_i, l, gamma, net_sigma, nn).unwrap();
        let sheet =
            8.0 * alpha * k_i as f64 * (l * gamma).powi(2) * (nn as f64).ln() / (net_sigma * net_sigma * nn as f64);
        assert!(rel_err(net, sheet) < 1e-12);
    }
}

#[test]
fn out_of_regime_inputs_are_rejected() {
    let cond = |r: noisyfix::Result<f64>| matches!(r, Err(Error::ConditionNotMet { .. }));
    // m not below n/5
    assert!(cond(federated_central_epsilon(2.0, 10, 1.0, 1.0, 10.0, 20, 100)));
    // σ below 4
    assert!(cond(federated_central_epsilon(2.0, 10, 1.0, 1.0, 3.9, 1, 100)));
    assert!(cond(subsampled_rdp(2.0, 0.01, 1.0, 3.0)));
    assert!(cond(subsampled_rdp(2.0, 0.25, 1.0, 10.0)));
    // huge order violates the order condition
    assert!(cond(subsampled_rdp(1e6, 0.1, 1.0, 4.0)));
    // network guard is strict: σ equal to the threshold fails
    let threshold = 2.0 * 1.0 * 1.0 * (2.0f64 * 1.0).sqrt();
    assert!(cond(network_rdp_epsilon(2.0, 5, 1.0, 1.0, threshold, 10)));
    assert!(network_rdp_epsilon(2.0, 5, 1.0, 1.0, threshold * (1.0 + 1e-9), 10).is_ok());
    assert!(matches!(
        network_rdp_epsilon(2.0, 5, 1.0, 1.0, 10.0, 1),
        Err(Error::Parameter(_))
    ));
    assert!(matches!(
        centralized_epsilon(1.0, 5, 1.0, 1.0, 1.0, 10),
        Err(Error::Parameter(_))
    ));
    assert!(matches!(gaussian_rdp(1.0, 0.0, 2.0), Err(Error::Parameter(_))));
}

#[test]
fn sensitivity_bound_holds_on_neighboring_datasets() {
    // f_i(x) = L|x − a_i| is L-Lipschitz; its prox with γ/n folded in is a
    // shifted soft threshold at γL/n.
    let lipschitz_prox = |a: f64, t: f64| {
        ProxSpec::custom(move |v: &[f64]| {
            v.iter()
                .map(|&x| {
                    let d = x - a;
                    a + d.signum() * (d.abs() - t).max(0.0)
                })
                .collect()
        })
    };
    let mut rng = Streams::new(77).substream(Domain::Aux(31), 0, 0);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let n = rng.random_range(1..20usize);
        let l = rng.random_range(0.1..3.0);
        let gamma = rng.random_range(0.1..3.0);
        let lambda = rng.random_range(0.05..1.0);
        let t = gamma * l / n as f64;
        let centers: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mut neighbor = centers.clone();
        let changed = rng.random_range(0..n);
        neighbor[changed] = rng.random_range(-5.0..5.0);
        let build = |cs: &[f64]| {
            ConsensusProblem::new(
                1,
                cs.iter().map(|&a| lipschitz_prox(a, t)).collect(),
                ProxSpec::Zero,
                gamma,
                l,
                None,
            )
            .unwrap()
        };
        let (p, q) = (build(&centers), build(&neighbor));
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let state = p
            .state_from(noisyfix::BlockVector::from_flat(u, n, 1).unwrap())
            .unwrap();
        let streams = Streams::new(trial);
        let a = centralized_iteration(&p, &state, lambda, 1.0, &streams).unwrap();
        let b = centralized_iteration(&q, &state, lambda, 1.0, &streams).unwrap();
        let displacement = a.u.dist_sq(&b.u).sqrt();
        let bound = sensitivity_consensus(l, gamma, lambda, n).unwrap();
        worst = worst.max(displacement / bound);
        if displacement > bound * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "worst ratio {worst}");
    // the bound is attained in the worst case
    assert!(worst > 0.5);
}

#[test]
fn general_sensitivity_scales_by_condition_number() {
    let base = sensitivity_consensus(1.0, 0.5, 0.8, 10).unwrap();
    let g = sensitivity_general(1.0, 0.5, 0.8, 10, 3.0, 1.5).unwrap();
    assert!(rel_err(g, 2.0 * base) < 1e-15);
    assert!(matches!(
        sensitivity_general(1.0, 0.5, 0.8, 10, 3.0, 0.0),
        Err(Error::Model(_))
    ));
}

#[test]
fn network_series_stays_below_log_n_over_n() {
    for n in [5usize, 10, 100, 1000] {
        let nf = n as f64;
        let r = 1.0 - 1.0 / nf;
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 1..2_000_000 {
            pow *= r;
            let term = pow / k as f64;
            sum += term;
            if term < 1e-18 {
                break;
            }
        }
        let lhs = sum / nf;
        let rhs = nf.ln() / nf;
        assert!(lhs <= rhs, "n={n}: {lhs} > {rhs}");
        // the series sums to ln n, so the bound is tight
        assert!(rel_err(lhs, rhs) < 1e-9);
    }
}

#[test]
fn calibration_round_trips() {
    let settings = [
        Setting::Centralized {
            k: 100,
            l: 1.0,
            gamma: 1.0,
            n: 1000,
        },
        Setting::FederatedCentral {
            k: 500,
            l: 0.5,
            gamma: 1.0,
            m: 100,
            n: 1000,
        },
        Setting::Local {
            k_i: 20,
            l: 1.0,
            gamma: 0.1,
        },
        Setting::Network {
            k_i: 50,
            l: 1.0,
            gamma: 0.5,
            n: 100,
        },
    ];
    for setting in settings {
        for eps in [0.5, 1.0, 5.0] {
            let target = PrivacyTarget::dp(eps, 1e-6);
            let sigma = calibrate_sigma(&target, &setting).unwrap();
            let got = target.achieved(&setting, sigma).unwrap();
            assert!(got <= eps, "{}: {got} > {eps}", setting.name());
            let below = sigma * (1.0 - 2.0 * CALIBRATION_TOLERANCE);
            let infeasible = match target.achieved(&setting, below) {
                Ok(e) => e > eps,
                Err(Error::ConditionNotMet { .. }) => true,
                Err(e) => panic!("{e}"),
            };
            assert!(infeasible, "{}: sigma not minimal", setting.name());
        }
        let target = PrivacyTarget::Rdp {
            alpha: 2.0,
            epsilon: 0.3,
        };
        let sigma = calibrate_sigma(&target, &setting).unwrap();
        assert!(target.achieved(&setting, sigma).unwrap() <= 0.3 * (1.0 + 1e-12));
    }
    assert!(matches!(
        calibrate_sigma(&PrivacyTarget::dp(0.0, 1e-6), &settings[0]),
        Err(Error::ConditionNotMet { .. })
    ));
}

#[test]
fn secure_aggregation_divides_by_m_squared() {
    let plain = federated_server_epsilon(2.0, 10, 1.0, 1.0, 5.0, 4, false).unwrap();
    let secure = federated_server_epsilon(2.0, 10, 1.0, 1.0, 5.0, 4, true).unwrap();
    assert!(rel_err(plain, local_epsilon(2.0, 10, 1.0, 1.0, 5.0).unwrap()) < 1e-15);
    assert!(rel_err(secure * 16.0, plain) < 1e-15);
    assert_eq!(participations_estimate(1001, 100).unwrap(), 11);
    assert_eq!(participations_estimate(0, 100).unwrap(), 0);
}

#[test]
fn dominated_orders_never_win_the_conversion() {
    // an order whose ε is huge must not change the DP value
    let alphas = default_alphas::<f64>();
    let base = RdpCurve::from_fn(&alphas, "g", |a| gaussian_rdp(1.0, 5.0, a)).unwrap();
    let bumped = RdpCurve::from_fn(&alphas, "g", |a| {
        let e = gaussian_rdp(1.0, 5.0, a)?;
        Ok(if a == 256.0 { e + 1e6 } else { e })
    })
    .unwrap();
    let d = 1e-6;
    let best = rdp_to_dp(&base, d).unwrap();
    let oracle = alphas
        .iter()
        .map(|&a| a / 50.0 + (1.0 / d).ln() / (a - 1.0))
        .fold(f64::INFINITY, f64::min);
    assert!(rel_err(best, oracle) < 1e-12);
    if base.epsilon_at(256.0).unwrap() + (1.0 / d).ln() / 255.0 > best {
        assert_eq!(rdp_to_dp(&bumped, d).unwrap(), best);
    }
}

proptest! {
    #[test]
    fn epsilon_monotone_in_each_argument(
        alpha in 1.1f64..20.0,
        k in 1usize..1000,
        l in 0.1f64..5.0,
        gamma in 0.1f64..5.0,
        sigma in 0.5f64..20.0,
        n in 2usize..1000,
    ) {
        let e = centralized_epsilon(alpha, k, l, gamma, sigma, n).unwrap();
        prop_assert!(centralized_epsilon(alpha * 1.5, k, l, gamma, sigma, n).unwrap() > e);
        prop_assert!(centralized_epsilon(alpha, k + 1, l, gamma, sigma, n).unwrap() > e);
        prop_assert!(centralized_epsilon(alpha, k, l * 1.5, gamma, sigma, n).unwrap() > e);
        prop_assert!(centralized_epsilon(alpha, k, l, gamma * 1.5, sigma, n).unwrap() > e);
        prop_assert!(centralized_epsilon(alpha, k, l, gamma, sigma * 1.5, n).unwrap() < e);
        prop_assert!(centralized_epsilon(alpha, k, l, gamma, sigma, n + 1).unwrap() < e);
        // network ln(n)/n decreases for n ≥ 3
        let s = 2.0 * l * gamma * (alpha * (alpha - 1.0)).sqrt() + 1.0;
        if n >= 3 {
            prop_assert!(network_rdp_epsilon(alpha, k, l, gamma, s, n + 1).unwrap()
                < network_rdp_epsilon(alpha, k, l, gamma, s, n).unwrap());
        }
    }

    #[test]
    fn composition_adds_pointwise_and_dp_grows(
        s1 in 0.5f64..10.0,
        s2 in 0.5f64..10.0,
        delta in 1e-10f64..1e-2,
    ) {
        let alphas = default_alphas::<f64>();
        let c1 = RdpCurve::from_fn(&alphas, "a", |a| gaussian_rdp(1.0, s1, a)).unwrap();
        let c2 = RdpCurve::from_fn(&alphas, "b", |a| gaussian_rdp(1.0, s2, a)).unwrap();
        let both = compose(&[c1.clone(), c2.clone()]).unwrap();
        for &a in &alphas {
            let sum = c1.epsilon_at(a).unwrap() + c2.epsilon_at(a).unwrap();
            prop_assert!(rel_err(both.epsilon_at(a).unwrap(), sum) < 1e-15);
        }
        prop_assert!(rdp_to_dp(&both, delta).unwrap() >= rdp_to_dp(&c1, delta).unwrap());
        // composition is symmetric
        prop_assert_eq!(compose(&[c2, c1]).unwrap().points().iter().map(|p| p.epsilon).collect::<Vec<_>>(),
            both.points().iter().map(|p| p.epsilon).collect::<Vec<_>>());
    }

    #[test]
    fn stronger_delta_costs_more(eps_scale in 0.01f64..10.0, d in 1e-9f64..1e-3) {
        let alphas = default_alphas::<f64>();
        let c = RdpCurve::from_fn(&alphas, "g", |a| Ok(a * eps_scale)).unwrap();
        prop_assert!(rdp_to_dp(&c, d / 10.0).unwrap() > rdp_to_dp(&c, d).unwrap());
    }
}
