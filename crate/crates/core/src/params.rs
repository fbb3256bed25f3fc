//! System parameters and value sampling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Distribution of the intrinsic agent values. Every option is zero-mean with
/// variance `sigma_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ValueDistribution {
    /// Standard normal scaled by `sigma`.
    #[default]
    Normal,
    /// `+sigma` or `-sigma` with probability 1/2 each.
    TwoPoint,
    /// Uniform on `[-sqrt(3) sigma, sqrt(3) sigma]`.
    Uniform,
}

impl ValueDistribution {
    pub const ALL: [ValueDistribution; 3] = [Self::Normal, Self::TwoPoint, Self::Uniform];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::TwoPoint => "two-point",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Self::Normal),
            "two-point" => Ok(Self::TwoPoint),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::InvalidParams(format!(
                "unknown value distribution '{other}' (expected normal, two-point or uniform)"
            ))),
        }
    }
}

/// Parameters of an open system of constant size with Poisson replacements
/// and pairwise Poisson communications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    n_agents: usize,
    lambda_r: f64,
    lambda_c: f64,
    sigma_sq: f64,
    value_dist: ValueDistribution,
}

impl SystemParams {
    /// Validated constructor with the default (normal) value distribution.
    pub fn new(n_agents: usize, lambda_r: f64, lambda_c: f64, sigma_sq: f64) -> Result<Self> {
        if n_agents < 2 {
            return Err(Error::InvalidParams(format!(
                "n_agents must be at least 2, got {n_agents}"
            )));
        }
        if !(lambda_r.is_finite() && lambda_r >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda_r must be finite and >= 0, got {lambda_r}"
            )));
        }
        if !(lambda_c.is_finite() && lambda_c >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda_c must be finite and >= 0, got {lambda_c}"
            )));
        }
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma_sq must be finite and > 0, got {sigma_sq}"
            )));
        }
        Ok(Self {
            n_agents,
            lambda_r,
            lambda_c,
            sigma_sq,
            value_dist: ValueDistribution::default(),
        })
    }

    /// Parameters with `lambda_c = ratio * lambda_r`.
    pub fn from_ratio(n_agents: usize, ratio: f64, lambda_r: f64, sigma_sq: f64) -> Result<Self> {
        Self::new(n_agents, lambda_r, ratio * lambda_r, sigma_sq)
    }

    pub fn with_value_dist(mut self, value_dist: ValueDistribution) -> Self {
        self.value_dist = value_dist;
        self
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn lambda_r(&self) -> f64 {
        self.lambda_r
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn value_dist(&self) -> ValueDistribution {
        self.value_dist
    }

    /// `lambda_c / lambda_r`.
    pub fn rate_ratio(&self) -> Result<f64> {
        if self.lambda_r == 0.0 {
            return Err(Error::RatioUndefined);
        }
        Ok(self.lambda_c / self.lambda_r)
    }

    /// The error of an agent that only knows its own value, `(N-1)/N^2 sigma^2`.
    pub fn no_information_mse(&self) -> f64 {
        let n = self.n_agents as f64;
        (n - 1.0) / (n * n) * self.sigma_sq
    }

    /// Number of unordered agent pairs, `N(N-1)/2`.
    pub fn n_pairs(&self) -> usize {
        self.n_agents * (self.n_agents - 1) / 2
    }

    /// Total rate of the merged replacement + communication process.
    pub fn total_event_rate(&self) -> f64 {
        self.n_agents as f64 * self.lambda_r + self.n_pairs() as f64 * self.lambda_c
    }
}

/// Draws one intrinsic value from the configured distribution.
pub fn sample_value(params: &SystemParams, rng: &mut RngStream) -> f64 {
    let sigma = params.sigma_sq.sqrt();
    match params.value_dist {
        ValueDistribution::Normal => sigma * rng.sample::<f64, _>(StandardNormal),
        ValueDistribution::TwoPoint => {
            if rng.gen::<bool>() {
                sigma
            } else {
                -sigma
            }
        }
        ValueDistribution::Uniform => {
            let half_width = 3.0_f64.sqrt() * sigma;
            rng.gen_range(-half_width..=half_width)
        }
    }
}
