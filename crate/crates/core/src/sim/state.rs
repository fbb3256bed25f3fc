use crate::age::Age;
use crate::params::{sample_value, SystemParams};
use crate::rng::RngStream;

use super::event::{EventKind, SimEvent};

/// The most recent value an agent knows about a peer, and when that value
/// was read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnowledgeEntry {
    pub value: f64,
    pub timestamp: f64,
}

/// State of one simulated open system.
///
/// Both algorithms run on the same trajectory: `gossip_estimates` holds the
/// pairwise-averaging estimates, and the knowledge tables hold, for each
/// ordered pair `(i, j)`, the freshest `(value, timestamp)` agent `i` has about
/// `j`. That table is a sufficient statistic for the optimal estimator, so
/// the full interaction history is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    n_agents: usize,
    values: Vec<f64>,
    gossip_estimates: Vec<f64>,
    /// Row-major `N x N`; row `i` is agent `i`'s table.
    knowledge: Vec<Option<KnowledgeEntry>>,
    clock: f64,
}

impl SimState {
    /// Fresh system at time 0: i.i.d. values, estimates equal to own values,
    /// each agent knowing only itself.
    pub fn fresh(params: &SystemParams, rng: &mut RngStream) -> Self {
        let n = params.n_agents();
        let values: Vec<f64> = (0..n).map(|_| sample_value(params, rng)).collect();
        let mut knowledge = vec![None; n * n];
        for (i, &value) in values.iter().enumerate() {
            knowledge[i * n + i] = Some(KnowledgeEntry {
                value,
                timestamp: 0.0,
            });
        }
        Self {
            n_agents: n,
            gossip_estimates: values.clone(),
            values,
            knowledge,
            clock: 0.0,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gossip_estimates(&self) -> &[f64] {
        &self.gossip_estimates
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn knowledge(&self, agent: usize) -> &[Option<KnowledgeEntry>] {
        let n = self.n_agents;
        &self.knowledge[agent * n..(agent + 1) * n]
    }

    /// Number of peers (self included) agent `agent` knows something about.
    pub fn known_count(&self, agent: usize) -> usize {
        self.knowledge(agent).iter().filter(|e| e.is_some()).count()
    }

    /// Average of the values currently present.
    pub fn true_average(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n_agents as f64
    }

    /// Advances the clock to the event time and applies it to both algorithms.
    pub fn apply(&mut self, event: &SimEvent, params: &SystemParams, rng: &mut RngStream) {
        debug_assert!(event.time >= self.clock);
        self.clock = event.time;
        match event.kind {
            EventKind::Replacement(agent) => self.apply_replacement(agent, params, rng),
            EventKind::Communication(i, j) => {
                self.apply_communication_gossip(i, j);
                self.apply_communication_optimal(i, j, event.time);
            }
        }
    }

    /// Replaces `agent` at the current clock: new value, gossip estimate reset
    /// to it, memory erased down to the self entry. Other agents are not told.
    pub fn apply_replacement(&mut self, agent: usize, params: &SystemParams, rng: &mut RngStream) {
        let n = self.n_agents;
        let value = sample_value(params, rng);
        self.values[agent] = value;
        self.gossip_estimates[agent] = value;
        let row = &mut self.knowledge[agent * n..(agent + 1) * n];
        row.fill(None);
        row[agent] = Some(KnowledgeEntry {
            value,
            timestamp: self.clock,
        });
    }

    /// Pairwise averaging of the gossip estimates.
    pub fn apply_communication_gossip(&mut self, i: usize, j: usize) {
        let mean = 0.5 * (self.gossip_estimates[i] + self.gossip_estimates[j]);
        self.gossip_estimates[i] = mean;
        self.gossip_estimates[j] = mean;
    }

    /// Merges the knowledge tables of `i` and `j`, keeping the freshest entry
    /// per peer, and records both current values at time `now`.
    pub fn apply_communication_optimal(&mut self, i: usize, j: usize, now: f64) {
        let n = self.n_agents;
        for k in 0..n {
            let a = self.knowledge[i * n + k];
            let b = self.knowledge[j * n + k];
            let merged = match (a, b) {
                (Some(x), Some(y)) => Some(if y.timestamp > x.timestamp { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            };
            self.knowledge[i * n + k] = merged;
            self.knowledge[j * n + k] = merged;
        }
        for agent in [i, j] {
            let fresh = Some(KnowledgeEntry {
                value: self.values[agent],
                timestamp: now,
            });
            self.knowledge[i * n + agent] = fresh;
            self.knowledge[j * n + agent] = fresh;
        }
    }

    /// Age at time `now` of what `i` knows about `j`. Self-knowledge is
    /// always exact.
    pub fn age(&self, i: usize, j: usize, now: f64) -> Age {
        if i == j {
            return Age::Finite(0.0);
        }
        match self.knowledge[i * self.n_agents + j] {
            Some(entry) => Age::Finite(now - entry.timestamp),
            None => Age::Infinite,
        }
    }

    /// Conditional expectation of the average given `i`'s knowledge:
    /// `(1/N) sum_j exp(-lambda_r T_j) x_j`, with unknown peers counted as 0
    /// and the own value taken exactly.
    pub fn optimal_estimate(&self, i: usize, now: f64, params: &SystemParams) -> f64 {
        let lambda_r = params.lambda_r();
        let mut sum = self.values[i];
        for (j, entry) in self.knowledge(i).iter().enumerate() {
            if j == i {
                continue;
            }
            if let Some(entry) = entry {
                sum += (-lambda_r * (now - entry.timestamp)).exp() * entry.value;
            }
        }
        sum / self.n_agents as f64
    }

    pub fn optimal_estimates(&self, now: f64, params: &SystemParams) -> Vec<f64> {
        (0..self.n_agents)
            .map(|i| self.optimal_estimate(i, now, params))
            .collect()
    }

    /// `C = (1/N) sum_i (xbar - y_i)^2` for the given estimates.
    pub fn mse(&self, estimates: &[f64]) -> f64 {
        let avg = self.true_average();
        estimates.iter().map(|y| (avg - y).powi(2)).sum::<f64>() / self.n_agents as f64
    }

    pub fn gossip_mse(&self) -> f64 {
        self.mse(&self.gossip_estimates)
    }

    pub fn optimal_mse(&self, now: f64, params: &SystemParams) -> f64 {
        self.mse(&self.optimal_estimates(now, params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (SystemParams, RngStream, SimState) {
        let params = SystemParams::new(n, 1.0, 1.0, 1.0).unwrap();
        let mut rng = RngStream::new(5, 0);
        let state = SimState::fresh(&params, &mut rng);
        (params, rng, state)
    }

    #[test]
    fn fresh_state_knows_only_itself() {
        let (_, _, s) = setup(6);
        for i in 0..6 {
            assert_eq!(s.known_count(i), 1);
            assert_eq!(s.gossip_estimates()[i], s.values()[i]);
        }
    }

    #[test]
    fn replacement_erases_memory_only_locally() {
        let (params, mut rng, mut s) = setup(5);
        s.clock = 1.0;
        s.apply_communication_optimal(0, 1, 1.0);
        s.apply_communication_optimal(1, 2, 1.0);
        let before = s.knowledge(2)[1];
        s.clock = 2.0;
        s.apply_replacement(1, &params, &mut rng);
        assert_eq!(s.known_count(1), 1);
        assert_eq!(s.gossip_estimates()[1], s.values()[1]);
        assert_eq!(s.knowledge(1)[1].unwrap().timestamp, 2.0);
        assert_eq!(s.knowledge(2)[1], before);
        assert!(s.knowledge(0)[1].is_some());
    }

    #[test]
    fn gossip_examples() {
        let (_, _, mut s) = setup(4);
        s.gossip_estimates = vec![0.0, 1.0, 3.0, 3.0];
        s.apply_communication_gossip(0, 1);
        assert_eq!(&s.gossip_estimates()[..2], &[0.5, 0.5]);
        s.apply_communication_gossip(2, 3);
        assert_eq!(&s.gossip_estimates()[2..], &[3.0, 3.0]);
        let total: f64 = s.gossip_estimates().iter().sum();
        s.apply_communication_gossip(1, 3);
        assert!((s.gossip_estimates().iter().sum::<f64>() - total).abs() < 1e-15);
    }

    #[test]
    fn merge_keeps_freshest_entry() {
        let (_, _, mut s) = setup(4);
        let n = 4;
        s.knowledge[n + 3] = Some(KnowledgeEntry {
            value: 5.0,
            timestamp: 5.0,
        });
        s.knowledge[2 * n + 3] = Some(KnowledgeEntry {
            value: 7.0,
            timestamp: 7.0,
        });
        s.apply_communication_optimal(1, 2, 8.0);
        assert_eq!(s.knowledge(1), s.knowledge(2));
        assert_eq!(s.knowledge(1)[3].unwrap().value, 7.0);
        assert_eq!(s.knowledge(1)[1].unwrap().timestamp, 8.0);
        assert_eq!(s.knowledge(1)[2].unwrap().value, s.values()[2]);
        assert!(s.knowledge(1)[0].is_none());
    }

    #[test]
    fn merge_of_disjoint_tables_is_union() {
        let (_, _, mut s) = setup(4);
        s.apply_communication_optimal(0, 1, 1.0);
        s.apply_communication_optimal(2, 3, 2.0);
        s.apply_communication_optimal(0, 2, 3.0);
        assert_eq!(s.known_count(0), 4);
        assert_eq!(s.knowledge(0)[1].unwrap().timestamp, 1.0);
        assert_eq!(s.knowledge(0)[3].unwrap().timestamp, 2.0);
    }

    #[test]
    fn optimal_estimate_examples() {
        let (params, _, mut s) = setup(5);
        let v = s.values()[2];
        assert!((s.optimal_estimate(2, 0.0, &params) - v / 5.0).abs() < 1e-15);

        let params = SystemParams::new(2, 1.0, 1.0, 1.0).unwrap();
        let mut rng = RngStream::new(1, 1);
        s = SimState::fresh(&params, &mut rng);
        s.apply_communication_optimal(0, 1, 0.0);
        let (v, u) = (s.values()[0], s.values()[1]);
        assert!((s.optimal_estimate(0, 0.0, &params) - (v + u) / 2.0).abs() < 1e-15);
        let t = 2f64.ln();
        assert!((s.optimal_estimate(0, t, &params) - (v + u / 2.0) / 2.0).abs() < 1e-15);
        assert_eq!(s.age(0, 1, t), Age::Finite(t));
        assert_eq!(s.age(0, 0, t), Age::Finite(0.0));
    }
}
