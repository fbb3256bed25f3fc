//! Lower bounds on the steady-state mean-square error of intrinsic averaging.
//!
//! Every bound has the shape `(N-1)/N^2 * sigma^2 * I`, where `I` is the
//! expectation of `1 - exp(-2 lambda_r T)` over the age `T` of the most recent
//! information about a peer. Faster information means a smaller `I`.

use std::fmt;
use std::str::FromStr;

use crate::age::{AgeDistribution, ExponentialAge};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quadrature::{self, QuadOptions};

/// Truncation level for the age tail in [`general_bound`].
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Ping,
    InfectionMatrix,
    InfectionAlgebraic,
    Relaxed,
    GenericQuadrature,
}

impl BoundMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ping => "ping",
            Self::InfectionMatrix => "infection-matrix",
            Self::InfectionAlgebraic => "infection-algebraic",
            Self::Relaxed => "relaxed",
            Self::GenericQuadrature => "generic-quadrature",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ping" => Ok(Self::Ping),
            "infection-matrix" => Ok(Self::InfectionMatrix),
            "infection-algebraic" => Ok(Self::InfectionAlgebraic),
            "relaxed" => Ok(Self::Relaxed),
            "generic-quadrature" => Ok(Self::GenericQuadrature),
            other => Err(Error::InvalidSpec(format!(
                "unknown bound method '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// Lower bound on `E[C(t)]`, in the units of `sigma_sq`.
    pub value: f64,
    pub method: BoundMethod,
    pub params: SystemParams,
    /// Upper bound on the contribution of a truncated integration tail, which
    /// is not included in `value`. Zero for closed forms.
    pub tail_uncertainty: f64,
    /// Set when `lambda_r = 0` and the analytic limit was returned instead.
    pub zero_replacement_limit: bool,
}

impl BoundResult {
    pub(crate) fn exact(value: f64, method: BoundMethod, params: &SystemParams) -> Self {
        Self {
            value,
            method,
            params: *params,
            tail_uncertainty: 0.0,
            zero_replacement_limit: false,
        }
    }
}

/// Shared handling of `lambda_r = 0` for the closed forms: without
/// replacements any communication eventually drives the error to zero.
pub(crate) fn zero_replacement_limit(
    params: &SystemParams,
    method: BoundMethod,
) -> Result<Option<BoundResult>> {
    if params.lambda_r() > 0.0 {
        return Ok(None);
    }
    if params.lambda_c() == 0.0 {
        return Err(Error::Indeterminate);
    }
    Ok(Some(BoundResult {
        zero_replacement_limit: true,
        ..BoundResult::exact(0.0, method, params)
    }))
}

/// Age distribution under the Ping relaxation: exponential with rate
/// `(N-1) lambda_c`, the rate at which one agent takes part in communications.
pub fn ping_age_distribution(params: &SystemParams) -> ExponentialAge {
    ExponentialAge::new((params.n_agents() - 1) as f64 * params.lambda_c())
}

/// Evaluates `(N-1)/N^2 sigma^2 E[1 - exp(-2 lambda_r T)]` for an age law that
/// stochastically bounds the true one from below.
///
/// Uses the density when the distribution provides one, otherwise the
/// integration-by-parts form `int 2 lambda_r e^{-2 lambda_r t} (S(t) - m) dt`
/// with `S` the survival function and `m` the mass at infinity. That mass
/// always contributes its full weight, analytically.
pub fn general_bound(params: &SystemParams, age: &dyn AgeDistribution) -> Result<BoundResult> {
    general_bound_with(params, age, &QuadOptions::default())
}

pub fn general_bound_with(
    params: &SystemParams,
    age: &dyn AgeDistribution,
    opts: &QuadOptions,
) -> Result<BoundResult> {
    let lambda_r = params.lambda_r();
    let infinite = age.infinite_mass();
    let scale = params.no_information_mse();
    let method = BoundMethod::GenericQuadrature;

    if lambda_r == 0.0 {
        return Ok(BoundResult {
            zero_replacement_limit: true,
            ..BoundResult::exact(scale * infinite, method, params)
        });
    }

    let beta = 2.0 * lambda_r;
    let age_cutoff = age.tail_cutoff(TAIL_TOLERANCE);
    let (finite_part, tail) = if infinite >= 1.0 {
        (0.0, 0.0)
    } else if age.has_density() {
        let integrand = |t: f64| {
            let density = age.pdf(t).unwrap_or(f64::NAN);
            density * -(-beta * t).exp_m1()
        };
        let r = quadrature::integrate(integrand, 0.0, age_cutoff, opts)?;
        let tail = (age.survival(age_cutoff) - infinite).max(0.0);
        (r.value, tail)
    } else {
        let cutoff = age_cutoff.min((1.0 / TAIL_TOLERANCE).ln() / beta);
        let integrand = |t: f64| beta * (-beta * t).exp() * (age.survival(t) - infinite);
        let r = quadrature::integrate(integrand, 0.0, cutoff, opts)?;
        let tail = (-beta * cutoff).exp() * (age.survival(cutoff) - infinite).max(0.0);
        (r.value, tail)
    };

    Ok(BoundResult {
        tail_uncertainty: scale * tail,
        ..BoundResult::exact(scale * (finite_part + infinite), method, params)
    })
}

/// `1 / (1 + (N-1)/2 L)`: the factor by which communication shrinks the
/// no-information error under the Ping relaxation.
fn ping_factor(n_agents: usize, ratio: f64) -> f64 {
    1.0 / (1.0 + 0.5 * (n_agents - 1) as f64 * ratio)
}

/// Closed-form bound under the Ping relaxation:
/// `(N-1)/N^2 * sigma^2 / (1 + (N-1)/2 * lambda_c/lambda_r)`.
pub fn ping_bound(params: &SystemParams) -> Result<BoundResult> {
    if let Some(limit) = zero_replacement_limit(params, BoundMethod::Ping)? {
        return Ok(limit);
    }
    let ratio = params.rate_ratio()?;
    let value = params.no_information_mse() * ping_factor(params.n_agents(), ratio);
    Ok(BoundResult::exact(value, BoundMethod::Ping, params))
}

/// The Ping bound multiplied by `1 + 1/2 ln((1 + (N-2)L) / (1 + L))`.
///
/// The logarithm stands in for a sum over `k = 1..N-2`; for `N = 2` that sum is
/// empty and the factor is exactly one.
pub fn relaxed_bound(params: &SystemParams) -> Result<BoundResult> {
    if let Some(limit) = zero_replacement_limit(params, BoundMethod::Relaxed)? {
        return Ok(limit);
    }
    let n = params.n_agents();
    let ratio = params.rate_ratio()?;
    let log_factor = if n > 2 {
        0.5 * ((1.0 + (n - 2) as f64 * ratio) / (1.0 + ratio)).ln()
    } else {
        0.0
    };
    let value = params.no_information_mse() * ping_factor(n, ratio) * (1.0 + log_factor);
    Ok(BoundResult::exact(value, BoundMethod::Relaxed, params))
}
