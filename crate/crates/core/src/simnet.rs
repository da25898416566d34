//! User sampling, the random-walk topology and per-user observation logs.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fixedpoint::RunTrace;
use crate::rng::{Domain, Streams};
use crate::scalar::Scalar;

/// `m` distinct users out of `n`, uniformly, sorted ascending.
pub fn sample_users<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::param(format!("users per round m={m} must be in [1, {n}]")));
    }
    if m == n {
        return Ok((0..n).collect());
    }
    let mut s = index::sample(rng, n, m).into_vec();
    s.sort_unstable();
    Ok(s)
}

/// Next holder of the token on the complete graph with self-loops.
pub fn walk_next<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<usize> {
    if n == 0 {
        return Err(Error::param("walk over zero users"));
    }
    Ok(rng.random_range(0..n))
}

/// Where the walk goes next from `current`.
pub trait Topology {
    fn num_users(&self) -> usize;
    fn next<R: Rng + ?Sized>(&self, current: usize, rng: &mut R) -> usize;
}

/// Every user reachable from every user with probability `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompleteGraph {
    n: usize,
}

impl CompleteGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("user count n must be >= 1"));
        }
        Ok(Self { n })
    }
}

impl Topology for CompleteGraph {
    fn num_users(&self) -> usize {
        self.n
    }

    fn next<R: Rng + ?Sized>(&self, _current: usize, rng: &mut R) -> usize {
        rng.random_range(0..self.n)
    }
}

/// `n` users sharing one run seed; all sampling goes through seeded substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserPopulation {
    graph: CompleteGraph,
    streams: Streams,
}

impl UserPopulation {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            graph: CompleteGraph::new(n)?,
            streams: Streams::new(seed),
        })
    }

    pub fn n(&self) -> usize {
        self.graph.num_users()
    }

    /// Users taking part in round `k`.
    pub fn sample_round(&self, k: usize, m: usize) -> Result<Vec<usize>> {
        let mut rng = self.streams.substream(Domain::Sampling, k as u64, 0);
        sample_users(self.n(), m, &mut rng)
    }

    /// Recipient of the token after step `k`, sent by `current`.
    pub fn walk_next(&self, k: usize, current: usize) -> usize {
        let mut rng = self.streams.substream(Domain::Walk, k as u64, 0);
        self.graph.next(current, &mut rng)
    }

    /// Holder of the token before the first step.
    pub fn first_user(&self) -> usize {
        let mut rng = self.streams.substream(Domain::Walk, 0, 1);
        self.graph.next(0, &mut rng)
    }
}

/// What user `user` receives after `step` walk updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<T> {
    pub step: usize,
    pub user: usize,
    pub z: Vec<T>,
}

/// Per-user sequences of `(step, z)` received on the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationLog<T> {
    per_user: Vec<Vec<(usize, Vec<T>)>>,
}

impl<T: Scalar> ObservationLog<T> {
    pub fn new(n: usize) -> Self {
        Self {
            per_user: vec![Vec::new(); n],
        }
    }

    pub fn from_observations(n: usize, events: &[Observation<T>]) -> Result<Self> {
        let mut log = Self::new(n);
        for e in events {
            log.record(e.user, e.step, e.z.clone())?;
        }
        Ok(log)
    }

    pub fn record(&mut self, user: usize, step: usize, z: Vec<T>) -> Result<()> {
        let n = self.per_user.len();
        self.per_user
            .get_mut(user)
            .ok_or_else(|| Error::structural(format!("user {user} out of range (n={n})")))?
            .push((step, z));
        Ok(())
    }

    pub fn num_users(&self) -> usize {
        self.per_user.len()
    }

    pub fn user(&self, j: usize) -> &[(usize, Vec<T>)] {
        &self.per_user[j]
    }

    pub fn total_events(&self) -> usize {
        self.per_user.iter().map(Vec::len).sum()
    }

    /// Events per user.
    pub fn counts(&self) -> ParticipationCounts {
        ParticipationCounts::new(self.per_user.iter().map(Vec::len).collect())
    }
}

/// How often each user took part in a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipationCounts {
    pub counts: Vec<usize>,
}

impl ParticipationCounts {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    /// Active-user counts from a trace whose masks are indexed by user.
    pub fn from_trace<T: Scalar>(trace: &RunTrace<T>) -> Self {
        let n = trace.records.first().map_or(0, |r| r.active.len());
        let mut counts = vec![0usize; n];
        for r in &trace.records {
            for (c, &a) in counts.iter_mut().zip(&r.active) {
                *c += usize::from(a);
            }
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            0.0
        } else {
            self.total() as f64 / self.counts.len() as f64
        }
    }
}
