use noisyfix::fixedpoint::{run, BlockSchedule, IterationConfig};
use noisyfix::simnet::{
    sample_users, CompleteGraph, Observation, ObservationLog, ParticipationCounts, Topology, UserPopulation,
};
use noisyfix::{BlockVector, Domain, OperatorHandle, Streams};
use proptest::prelude::*;

/// Pearson χ² statistic of `counts` against a uniform expectation.
fn chi_square_uniform(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

// χ² critical values at the 0.999 level.
const CHI2_999_DF9: f64 = 27.877;
const CHI2_999_DF90: f64 = 137.208;
const CHI2_999_DF99: f64 = 148.230;

#[test]
fn round_inclusion_probability_is_m_over_n() {
    let pop = UserPopulation::new(10, 4).unwrap();
    let rounds = 20_000;
    let mut counts = vec![0usize; 10];
    for k in 0..rounds {
        for i in pop.sample_round(k, 3).unwrap() {
            counts[i] += 1;
        }
    }
    for &c in &counts {
        let freq = c as f64 / rounds as f64;
        let se = (0.3f64 * 0.7 / rounds as f64).sqrt();
        assert!((freq - 0.3).abs() < 5.0 * se, "inclusion frequency {freq}");
    }
    assert!(chi_square_uniform(&counts) < CHI2_999_DF9);
}

#[test]
fn walk_transitions_are_uniform_from_every_state() {
    let n = 10;
    let pop = UserPopulation::new(n, 8).unwrap();
    let mut matrix = vec![vec![0usize; n]; n];
    let mut user = pop.first_user();
    for k in 0..100_000 {
        let next = pop.walk_next(k, user);
        matrix[user][next] += 1;
        user = next;
    }
    // rows are independent multinomials, so their statistics pool to df = n(n − 1)
    let pooled: f64 = matrix.iter().map(|row| chi_square_uniform(row)).sum();
    assert!(pooled < CHI2_999_DF90, "pooled statistic {pooled}");
}

#[test]
fn return_times_are_geometric_with_mean_n() {
    let n = 20;
    let pop = UserPopulation::new(n, 12).unwrap();
    let mut user = pop.first_user();
    let mut last_seen = vec![None; n];
    let mut gaps = Vec::new();
    for k in 0..200_000 {
        if let Some(prev) = last_seen[user] {
            gaps.push((k - prev) as f64);
        }
        last_seen[user] = Some(k);
        user = pop.walk_next(k, user);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    // geometric(1/n): mean n, variance n(n − 1)
    let se = ((n * (n - 1)) as f64 / gaps.len() as f64).sqrt();
    assert!((mean - n as f64).abs() < 5.0 * se, "mean gap {mean}");
    let ones = gaps.iter().filter(|&&g| g == 1.0).count() as f64 / gaps.len() as f64;
    assert!((ones - 1.0 / n as f64).abs() < 0.01);
}

#[test]
fn sampled_sets_are_uniform_over_users() {
    let mut rng = Streams::new(3).substream(Domain::Aux(50), 0, 0);
    let mut counts = vec![0usize; 100];
    for _ in 0..5000 {
        for i in sample_users(100, 10, &mut rng).unwrap() {
            counts[i] += 1;
        }
    }
    assert!(chi_square_uniform(&counts) < CHI2_999_DF99);
}

#[test]
fn complete_graph_reports_its_size() {
    let g = CompleteGraph::new(7).unwrap();
    assert_eq!(g.num_users(), 7);
    let mut rng = Streams::new(0).substream(Domain::Aux(51), 0, 0);
    assert!((0..100).all(|_| g.next(3, &mut rng) < 7));
    assert!(CompleteGraph::new(0).is_err());
    assert!(UserPopulation::new(0, 1).is_err());
}

#[test]
fn log_replay_partitions_events_by_user() {
    let events: Vec<Observation<f64>> = (0..30)
        .map(|k| Observation {
            step: k + 1,
            user: (k * 7) % 4,
            z: vec![k as f64],
        })
        .collect();
    let log = ObservationLog::from_observations(4, &events).unwrap();
    assert_eq!(log.total_events(), 30);
    for j in 0..4 {
        let mine: Vec<_> = events
            .iter()
            .filter(|e| e.user == j)
            .map(|e| (e.step, e.z.clone()))
            .collect();
        assert_eq!(log.user(j), mine.as_slice());
    }
    assert_eq!(log.counts().total(), 30);
    assert_eq!(log.num_users(), 4);
}

#[test]
fn participation_counts_from_engine_trace() {
    let cfg = IterationConfig::new(1.0, 0.0, 100, BlockSchedule::SubsetUniform(2), 4);
    let (_, trace) = run(&BlockVector::<f64>::zeros(5, 1), &OperatorHandle::identity(), &cfg).unwrap();
    let counts = ParticipationCounts::from_trace(&trace);
    assert_eq!(counts.counts.len(), 5);
    assert_eq!(counts.total(), 200);
    assert!((counts.mean() - 40.0).abs() < 1e-12);
    assert!(counts.max() >= 40);
    assert_eq!(ParticipationCounts::new(vec![]).mean(), 0.0);
}

proptest! {
    #[test]
    fn rounds_are_sorted_distinct_and_reproducible(n in 1usize..200, frac in 0.0f64..1.0, seed in any::<u64>(), k in 0usize..1000) {
        let m = ((n as f64 * frac) as usize).clamp(1, n);
        let pop = UserPopulation::new(n, seed).unwrap();
        let s = pop.sample_round(k, m).unwrap();
        prop_assert_eq!(s.len(), m);
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.iter().all(|&i| i < n));
        prop_assert_eq!(s, pop.sample_round(k, m).unwrap());
    }
}
