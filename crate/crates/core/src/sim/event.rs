use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// The agent leaves and is instantly replaced by a newcomer.
    Replacement(usize),
    /// Agents `i < j` exchange information.
    Communication(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// Draws the next event of the merged Poisson process after `now`.
///
/// The superposition of `N` replacement clocks and `N(N-1)/2` pair clocks is a
/// single Poisson process of rate `N lambda_r + N(N-1)/2 lambda_c`; each event
/// is a replacement of a uniform agent with probability `N lambda_r / total`,
/// and otherwise a communication of a uniform pair.
pub fn next_event(params: &SystemParams, rng: &mut RngStream, now: f64) -> Result<SimEvent> {
    let total = params.total_event_rate();
    if total <= 0.0 {
        return Err(Error::NoDynamics);
    }
    let n = params.n_agents();
    let dt: f64 = rng.sample::<f64, _>(Exp1) / total;
    let replacement_rate = n as f64 * params.lambda_r();
    let kind = if rng.gen::<f64>() * total < replacement_rate {
        EventKind::Replacement(rng.gen_range(0..n))
    } else {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        EventKind::Communication(a.min(b), a.max(b))
    };
    Ok(SimEvent {
        time: now + dt,
        kind,
    })
}
