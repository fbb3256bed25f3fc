//! Fundamental limits and simulation of intrinsic averaging in open
//! multi-agent systems.
//!
//! Agents are replaced at Poisson rate `lambda_r` (memory erased, fresh value)
//! and every pair communicates at Poisson rate `lambda_c`. Each agent tries to
//! track the average of the values currently present. This crate provides
//! lower bounds on the steady-state mean-square error any algorithm can
//! reach ([`bounds`], [`infection`]) and an event-driven simulator running a
//! naive gossip algorithm next to the optimal knowledge-based estimator
//! ([`sim`]).

pub mod age;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod infection;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod sim;

pub use age::{Age, AgeDistribution, ExponentialAge, NoInformation, PointMassAge};
pub use bounds::{
    general_bound, ping_age_distribution, ping_bound, relaxed_bound, BoundMethod, BoundResult,
};
pub use error::{Error, Result};
pub use infection::{
    bidiagonal_resolvent_apply, infection_age_cdf, infection_bound_algebraic,
    infection_bound_matrix, solve_pk, InfectionAge, InfectionChain,
};
pub use params::{sample_value, SystemParams, ValueDistribution};
pub use rng::RngStream;
