//! Event-driven Monte Carlo simulation of the open system.
//!
//! Every replication starts fresh (i.i.d. values, no knowledge of peers),
//! runs a fixed number of events, and measures the error at the epoch of the
//! next event, before applying it. Poisson arrivals see time averages, so
//! this snapshot is distributed like the state at an arbitrary time.
//!
//! Replications are independent, keyed by their index on the RNG stream, and
//! may run on any number of threads: results are gathered by index and
//! reduced sequentially, so the output does not depend on the schedule.

mod event;
mod state;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use event::{next_event, EventKind, SimEvent};
pub use state::{KnowledgeEntry, SimState};

use crate::age::{Age, AgeDistribution};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::RngStream;

/// Events per replication at the reference operating point (ten agents).
pub const REFERENCE_EVENTS: f64 = 200.0;
const REFERENCE_AGENTS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Pairwise averaging of a single scalar per agent.
    Gossip,
    /// Conditional expectation of the average given the knowledge table.
    Optimal,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gossip => "gossip",
            Self::Optimal => "optimal",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gossip" => Ok(Self::Gossip),
            "optimal" => Ok(Self::Optimal),
            other => Err(Error::InvalidSpec(format!(
                "unknown algorithm '{other}' (expected gossip or optimal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measurement {
    /// One snapshot per replication, at the epoch following the last event.
    #[default]
    Snapshot,
    /// Mean of the snapshots taken before each event of the second half of
    /// the run, the final snapshot included.
    TimeAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub n_replications: usize,
    pub n_events: usize,
    pub master_seed: u64,
    pub measurement: Measurement,
}

impl RunConfig {
    pub fn new(n_replications: usize, n_events: usize, master_seed: u64) -> Self {
        Self {
            n_replications,
            n_events,
            master_seed,
            measurement: Measurement::Snapshot,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_replications == 0 || self.n_events == 0 {
            return Err(Error::InvalidParams(
                "replication and event counts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Default burn-in: 200 events for ten agents, scaled in proportion to
/// `N (1 + (N-1) L / 2)` at the same rate ratio `L`.
pub fn default_events(params: &SystemParams) -> usize {
    let n = params.n_agents() as f64;
    let scale = match params.rate_ratio() {
        Ok(ratio) => {
            n * (1.0 + 0.5 * (n - 1.0) * ratio)
                / (REFERENCE_AGENTS * (1.0 + 0.5 * (REFERENCE_AGENTS - 1.0) * ratio))
        }
        // limit L -> infinity
        Err(_) => n * (n - 1.0) / (REFERENCE_AGENTS * (REFERENCE_AGENTS - 1.0)),
    };
    (REFERENCE_EVENTS * scale).round().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub gossip_mse: f64,
    pub optimal_mse: f64,
}

impl ReplicationOutcome {
    pub fn get(&self, algorithm: Algorithm) -> f64 {
        match algorithm {
            Algorithm::Gossip => self.gossip_mse,
            Algorithm::Optimal => self.optimal_mse,
        }
    }
}

/// Runs `n_events` events from a fresh start and returns the final state
/// together with the measurement epoch (the time of the next, unapplied event).
pub fn run_events(
    params: &SystemParams,
    n_events: usize,
    rng: &mut RngStream,
    mut observe: impl FnMut(usize, &SimState, f64),
) -> Result<(SimState, f64)> {
    let mut state = SimState::fresh(params, rng);
    let mut event = next_event(params, rng, 0.0)?;
    for k in 0..n_events {
        observe(k, &state, event.time);
        state.apply(&event, params, rng);
        event = next_event(params, rng, event.time)?;
    }
    observe(n_events, &state, event.time);
    Ok((state, event.time))
}

/// One replication, measuring both algorithms on the same trajectory.
pub fn run_replication(
    params: &SystemParams,
    n_events: usize,
    measurement: Measurement,
    rng: &mut RngStream,
) -> Result<ReplicationOutcome> {
    let first_sample = match measurement {
        Measurement::Snapshot => n_events,
        Measurement::TimeAveraged => n_events.div_ceil(2),
    };
    let mut gossip = 0.0;
    let mut optimal = 0.0;
    let mut samples = 0usize;
    run_events(params, n_events, rng, |k, state, at| {
        if k >= first_sample {
            gossip += state.gossip_mse();
            optimal += state.optimal_mse(at, params);
            samples += 1;
        }
    })?;
    Ok(ReplicationOutcome {
        gossip_mse: gossip / samples as f64,
        optimal_mse: optimal / samples as f64,
    })
}

/// Mean and standard error of the per-replication error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_replications: usize,
    pub algorithm: Algorithm,
    pub params: SystemParams,
}

impl MseEstimate {
    fn from_samples(samples: &[f64], algorithm: Algorithm, params: &SystemParams) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_replications: n,
            algorithm,
            params: *params,
        }
    }
}

fn replicate<T, F>(config: &RunConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    config.validate()?;
    (0..config.n_replications)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(config.master_seed, k as u64);
            f(&mut rng)
        })
        .collect()
}

/// Per-replication outcomes in replication order.
pub fn replication_outcomes(
    params: &SystemParams,
    config: &RunConfig,
) -> Result<Vec<ReplicationOutcome>> {
    replicate(config, |rng| {
        run_replication(params, config.n_events, config.measurement, rng)
    })
}

/// Estimates the steady-state `E[C(t)]` of one algorithm.
pub fn steady_state_mse(
    params: &SystemParams,
    algorithm: Algorithm,
    config: &RunConfig,
) -> Result<MseEstimate> {
    let outcomes = replication_outcomes(params, config)?;
    let samples: Vec<f64> = outcomes.iter().map(|o| o.get(algorithm)).collect();
    Ok(MseEstimate::from_samples(&samples, algorithm, params))
}

/// Paired estimates for both algorithms from the same replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedEstimate {
    pub gossip: MseEstimate,
    pub optimal: MseEstimate,
    /// Standard error of the per-replication difference gossip - optimal.
    pub difference_std_error: f64,
}

pub fn steady_state_mse_paired(
    params: &SystemParams,
    config: &RunConfig,
) -> Result<PairedEstimate> {
    let outcomes = replication_outcomes(params, config)?;
    let gossip: Vec<f64> = outcomes.iter().map(|o| o.gossip_mse).collect();
    let optimal: Vec<f64> = outcomes.iter().map(|o| o.optimal_mse).collect();
    let diff: Vec<f64> = outcomes
        .iter()
        .map(|o| o.gossip_mse - o.optimal_mse)
        .collect();
    Ok(PairedEstimate {
        gossip: MseEstimate::from_samples(&gossip, Algorithm::Gossip, params),
        optimal: MseEstimate::from_samples(&optimal, Algorithm::Optimal, params),
        difference_std_error: MseEstimate::from_samples(&diff, Algorithm::Gossip, params).std_error,
    })
}

/// Empirical CDF of the age of information on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalAgeCdf {
    grid: Vec<f64>,
    counts: Vec<u64>,
    n_samples: u64,
    n_infinite: u64,
}

impl EmpiricalAgeCdf {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    /// CDF values at the grid points.
    pub fn values(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n_samples as f64)
            .collect()
    }

    /// Binomial standard errors `sqrt(p (1-p) / n)` at the grid points.
    pub fn std_errors(&self) -> Vec<f64> {
        let n = self.n_samples as f64;
        self.values()
            .into_iter()
            .map(|p| (p * (1.0 - p) / n).sqrt())
            .collect()
    }
}

impl AgeDistribution for EmpiricalAgeCdf {
    /// Step function: the value at the largest grid point `<= s`.
    fn cdf(&self, s: f64) -> f64 {
        let idx = self.grid.partition_point(|&g| g <= s);
        if idx == 0 {
            0.0
        } else {
            self.counts[idx - 1] as f64 / self.n_samples as f64
        }
    }

    fn infinite_mass(&self) -> f64 {
        self.n_infinite as f64 / self.n_samples as f64
    }

    fn tail_cutoff(&self, _tol: f64) -> f64 {
        self.grid.last().copied().unwrap_or(0.0)
    }
}

/// Samples the ages `T_j^(i)` of all ordered pairs `i != j` at the end of each
/// replication and tabulates their CDF on `grid`. Unknown peers have infinite
/// age and never fall below a grid point.
pub fn empirical_age_cdf(
    params: &SystemParams,
    config: &RunConfig,
    grid: &[f64],
) -> Result<EmpiricalAgeCdf> {
    if grid.is_empty() || grid.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidSpec(
            "age grid must be non-empty, finite and >= 0".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec(
            "age grid must be strictly increasing".into(),
        ));
    }
    let n = params.n_agents();
    let per_replication = replicate(config, |rng| {
        let (state, at) = run_events(params, config.n_events, rng, |_, _, _| {})?;
        // counts[g] will hold #{ages <= grid[g]} after the prefix sum
        let mut counts = vec![0u64; grid.len()];
        let mut infinite = 0u64;
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                match state.age(i, j, at) {
                    Age::Finite(t) => {
                        let g = grid.partition_point(|&s| s < t);
                        if g < grid.len() {
                            counts[g] += 1;
                        }
                    }
                    Age::Infinite => infinite += 1,
                }
            }
        }
        for g in 1..counts.len() {
            counts[g] += counts[g - 1];
        }
        Ok((counts, infinite))
    })?;

    let mut counts = vec![0u64; grid.len()];
    let mut n_infinite = 0;
    for (c, inf) in &per_replication {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        n_infinite += inf;
    }
    Ok(EmpiricalAgeCdf {
        grid: grid.to_vec(),
        counts,
        n_samples: (config.n_replications * n * (n - 1)) as u64,
        n_infinite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_events_reference_point() {
        for ratio in [0.01, 1.0, 100.0] {
            let p = SystemParams::from_ratio(10, ratio, 1.0, 1.0).unwrap();
            assert_eq!(default_events(&p), 200);
        }
        let p = SystemParams::from_ratio(20, 1.0, 1.0, 1.0).unwrap();
        // 20 * 10.5 / (10 * 5.5) * 200
        assert_eq!(default_events(&p), 764);
    }

    #[test]
    fn replication_is_reproducible() {
        let p = SystemParams::from_ratio(6, 1.0, 1.0, 1.0).unwrap();
        let a = run_replication(&p, 50, Measurement::Snapshot, &mut RngStream::new(3, 2)).unwrap();
        let b = run_replication(&p, 50, Measurement::Snapshot, &mut RngStream::new(3, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clock_and_timestamps_stay_consistent() {
        let p = SystemParams::from_ratio(8, 3.0, 1.0, 1.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut last = 0.0;
        let mut prev_sum: Option<f64> = None;
        run_events(&p, 500, &mut rng, |_, state, at| {
            assert!(at > state.clock() || (at == 0.0 && state.clock() == 0.0) || at >= last);
            last = at;
            for i in 0..8 {
                for e in state.knowledge(i).iter().flatten() {
                    assert!(e.timestamp <= state.clock());
                }
            }
            prev_sum = Some(state.gossip_estimates().iter().sum());
        })
        .unwrap();
        assert!(prev_sum.is_some());
    }

    #[test]
    fn rejects_empty_runs_and_bad_grids() {
        let p = SystemParams::from_ratio(4, 1.0, 1.0, 1.0).unwrap();
        assert!(steady_state_mse(&p, Algorithm::Gossip, &RunConfig::new(0, 10, 1)).is_err());
        assert!(steady_state_mse(&p, Algorithm::Gossip, &RunConfig::new(1, 0, 1)).is_err());
        let cfg = RunConfig::new(2, 10, 1);
        assert!(empirical_age_cdf(&p, &cfg, &[]).is_err());
        assert!(empirical_age_cdf(&p, &cfg, &[1.0, 0.5]).is_err());
        assert!(empirical_age_cdf(&p, &cfg, &[-1.0]).is_err());
    }

    #[test]
    fn empirical_cdf_is_monotone_and_starts_at_zero() {
        let p = SystemParams::from_ratio(5, 1.0, 1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| k as f64 * 0.2).collect();
        let cdf = empirical_age_cdf(&p, &RunConfig::new(200, 100, 4), &grid).unwrap();
        let v = cdf.values();
        assert_eq!(v[0], 0.0);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(cdf.n_samples(), 200 * 20);
        assert!(v.last().unwrap() + cdf.infinite_mass() <= 1.0);
    }
}
