//! Information spreading as an SI epidemic on the complete graph.
//!
//! Ignoring replacements, an information emitted by agent `j` at time 0 is
//! held by a growing set of agents; its size is a pure-birth chain on
//! `1..=N` with rate `k (N-k) lambda_c` out of state `k`. The probability that
//! a given other agent holds it at age `s` bounds the true age CDF from above.

mod age;

pub use age::InfectionAge;

use crate::bounds::{zero_replacement_limit, BoundMethod, BoundResult};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::params::SystemParams;

/// Generator `A` (lower bidiagonal) and read-out weights `w` of the
/// infected-count chain. States are indexed `0..N` for counts `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectionChain {
    n_agents: usize,
    lambda_c: f64,
    generator_diag: Vec<f64>,
    generator_sub: Vec<f64>,
    weights: Vec<f64>,
}

impl InfectionChain {
    pub fn new(n_agents: usize, lambda_c: f64) -> Result<Self> {
        if n_agents < 2 {
            return Err(Error::InvalidParams(format!(
                "n_agents must be at least 2, got {n_agents}"
            )));
        }
        if !(lambda_c.is_finite() && lambda_c >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda_c must be finite and >= 0, got {lambda_c}"
            )));
        }
        let n = n_agents;
        let birth = |k: usize| (k * (n - k)) as f64 * lambda_c;
        let generator_diag = (1..=n).map(|k| -birth(k)).collect();
        let generator_sub = (1..n).map(birth).collect();
        let weights = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        Ok(Self {
            n_agents,
            lambda_c,
            generator_diag,
            generator_sub,
            weights,
        })
    }

    pub fn from_params(params: &SystemParams) -> Self {
        Self::new(params.n_agents(), params.lambda_c()).expect("validated parameters")
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    /// `A_kk`, equal to `-k (N-k) lambda_c` for counts `k = 1..=N`.
    pub fn generator_diag(&self) -> &[f64] {
        &self.generator_diag
    }

    /// `A_{k+1,k}`, equal to `k (N-k) lambda_c` for `k = 1..N`.
    pub fn generator_sub(&self) -> &[f64] {
        &self.generator_sub
    }

    /// `w_k = (k-1)/(N-1)`: probability that a given other agent is infected
    /// when `k` agents are.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Writes `A p` into `out`.
    pub fn apply_generator(&self, p: &[f64], out: &mut [f64]) {
        out[0] = self.generator_diag[0] * p[0];
        for k in 1..self.n_agents {
            out[k] = self.generator_diag[k] * p[k] + self.generator_sub[k - 1] * p[k - 1];
        }
    }

    /// Spectral radius of `A`, `max_k k (N-k) lambda_c`.
    pub fn stiffness(&self) -> f64 {
        self.generator_diag
            .iter()
            .fold(0.0_f64, |m, d| m.max(d.abs()))
    }

    pub(crate) fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            first_step: Some(0.1 / self.stiffness().max(f64::MIN_POSITIVE)),
            ..OdeOptions::default()
        }
    }

    pub(crate) fn cdf_of(&self, p: &[f64]) -> f64 {
        self.weights.iter().zip(p).map(|(w, p)| w * p).sum()
    }

    pub(crate) fn survival_of(&self, p: &[f64]) -> f64 {
        self.weights.iter().zip(p).map(|(w, p)| (1.0 - w) * p).sum()
    }

    pub(crate) fn pdf_of(&self, p: &[f64]) -> f64 {
        // w^T A p, with (A p)_k = d_k p_k + b_{k-1} p_{k-1}
        let mut acc = 0.0;
        for k in 1..self.n_agents {
            let rate = self.generator_sub[k - 1];
            acc += rate * p[k - 1] * (self.weights[k] - self.weights[k - 1]);
        }
        acc
    }

    /// Advances a distribution `p` over counts from `s0` to `s1`.
    pub(crate) fn advance(&self, p: &mut [f64], s0: f64, s1: f64, opts: &OdeOptions) -> Result<()> {
        ode::integrate(|_, y, dy| self.apply_generator(y, dy), s0, s1, p, opts)?;
        Ok(())
    }
}

/// Largest tolerated negative probability before it counts as a solver failure.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the total probability from one.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_probabilities(p: &mut [f64], at: f64) -> Result<()> {
    for v in p.iter_mut() {
        if *v < -NEGATIVE_PROBABILITY_TOLERANCE {
            return Err(Error::Ode {
                at,
                reason: format!("negative probability {v:e}"),
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > CONSERVATION_TOLERANCE {
        return Err(Error::Ode {
            at,
            reason: format!("probability mass drifted to {total}"),
        });
    }
    Ok(())
}

/// `P(s)`: the distribution of the number of infected agents at time `s`,
/// starting from a single infected agent.
pub fn solve_pk(chain: &InfectionChain, s: f64) -> Result<Vec<f64>> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "time must be finite and >= 0, got {s}"
        )));
    }
    let mut p = vec![0.0; chain.n_agents];
    p[0] = 1.0;
    if chain.lambda_c > 0.0 {
        chain.advance(&mut p, 0.0, s, &chain.ode_options())?;
    }
    check_probabilities(&mut p, s)?;
    Ok(p)
}

/// The infection age distribution, `F(s) = w^T P(s)`.
pub fn infection_age_cdf(chain: &InfectionChain) -> Result<InfectionAge> {
    InfectionAge::new(chain.clone())
}

/// Solves `(beta I - A) x = e_1` by forward substitution.
fn resolvent_column(chain: &InfectionChain, beta: f64) -> Vec<f64> {
    let n = chain.n_agents;
    let mut x = vec![0.0; n];
    x[0] = 1.0 / (beta - chain.generator_diag[0]);
    for k in 1..n {
        x[k] = chain.generator_sub[k - 1] * x[k - 1] / (beta - chain.generator_diag[k]);
    }
    x
}

/// `w^T A (beta I - A)^{-1} e_1`, in O(N).
///
/// Uses `A (beta I - A)^{-1} = beta (beta I - A)^{-1} - I`, so only the first
/// column of the bidiagonal inverse is needed.
pub fn bidiagonal_resolvent_apply(chain: &InfectionChain, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::ResolventUndefined { beta });
    }
    let x = resolvent_column(chain, beta);
    let value = chain
        .weights
        .iter()
        .zip(&x)
        .enumerate()
        .map(|(k, (w, x))| {
            let unit = if k == 0 { 1.0 } else { 0.0 };
            w * (beta * x - unit)
        })
        .sum();
    Ok(value)
}

/// Bound from the infection relaxation in matrix form:
/// `(N-1)/N^2 (1 - w^T A (2 lambda_r I - A)^{-1} e_1) sigma^2`.
pub fn infection_bound_matrix(params: &SystemParams) -> Result<BoundResult> {
    if let Some(limit) = zero_replacement_limit(params, BoundMethod::InfectionMatrix)? {
        return Ok(limit);
    }
    let chain = InfectionChain::from_params(params);
    let resolvent = bidiagonal_resolvent_apply(&chain, 2.0 * params.lambda_r())?;
    let value = params.no_information_mse() * (1.0 - resolvent);
    Ok(BoundResult::exact(
        value,
        BoundMethod::InfectionMatrix,
        params,
    ))
}

/// `h(N, L) = sum_{k=2}^N (k-1)/(N-1) prod_{j=1}^{k-1} j(N-j)L / (2 + (j+1)(N-j-1)L)`.
pub fn h_factor(n_agents: usize, ratio: f64) -> f64 {
    let n = n_agents;
    let mut product = 1.0;
    let mut sum = 0.0;
    for k in 2..=n {
        let j = k - 1;
        product *= (j * (n - j)) as f64 * ratio / (2.0 + ((j + 1) * (n - j - 1)) as f64 * ratio);
        sum += j as f64 / (n - 1) as f64 * product;
    }
    sum
}

/// Bound from the infection relaxation in algebraic form:
/// `(N-1)/N^2 (1 - h(N, L) / (1 + (N-1)/2 L)) sigma^2`.
pub fn infection_bound_algebraic(params: &SystemParams) -> Result<BoundResult> {
    if let Some(limit) = zero_replacement_limit(params, BoundMethod::InfectionAlgebraic)? {
        return Ok(limit);
    }
    let n = params.n_agents();
    let ratio = params.rate_ratio()?;
    let ping_factor = 1.0 / (1.0 + 0.5 * (n - 1) as f64 * ratio);
    let value = params.no_information_mse() * (1.0 - ping_factor * h_factor(n, ratio));
    Ok(BoundResult::exact(
        value,
        BoundMethod::InfectionAlgebraic,
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, lambda_r: f64, lambda_c: f64) -> SystemParams {
        SystemParams::new(n, lambda_r, lambda_c, 1.0).unwrap()
    }

    #[test]
    fn generator_columns_sum_to_zero() {
        let chain = InfectionChain::new(7, 0.3).unwrap();
        for k in 0..7 {
            let sub = chain.generator_sub().get(k).copied().unwrap_or(0.0);
            assert!((chain.generator_diag()[k] + sub).abs() < 1e-15);
        }
        assert_eq!(chain.generator_diag()[6], 0.0);
        let w = chain.weights();
        assert_eq!((w[0], w[6]), (0.0, 1.0));
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn solve_pk_examples() {
        let chain = InfectionChain::new(5, 1.0).unwrap();
        assert_eq!(
            solve_pk(&chain, 0.0).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0]
        );

        let chain = InfectionChain::new(2, 1.0).unwrap();
        let p = solve_pk(&chain, 2f64.ln()).unwrap();
        assert!(
            (p[0] - 0.5).abs() < 1e-10 && (p[1] - 0.5).abs() < 1e-10,
            "{p:?}"
        );

        for n in [2, 10, 50] {
            let chain = InfectionChain::new(n, 0.7).unwrap();
            let p = solve_pk(&chain, 50.0 / 0.7).unwrap();
            assert!(p[n - 1] >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn solve_pk_rejects_bad_time() {
        let chain = InfectionChain::new(3, 1.0).unwrap();
        assert!(solve_pk(&chain, -1.0).is_err());
        assert!(solve_pk(&chain, f64::INFINITY).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let chain = InfectionChain::new(2, 1.0).unwrap();
        let v = bidiagonal_resolvent_apply(&chain, 2.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);

        let chain = InfectionChain::new(10, 1.0).unwrap();
        assert!(bidiagonal_resolvent_apply(&chain, 1e12).unwrap() < 1e-10);

        let chain = InfectionChain::new(10, 0.0).unwrap();
        assert_eq!(bidiagonal_resolvent_apply(&chain, 2.0).unwrap(), 0.0);

        assert_eq!(
            bidiagonal_resolvent_apply(&chain, 0.0),
            Err(Error::ResolventUndefined { beta: 0.0 })
        );
    }

    #[test]
    fn matrix_bound_examples() {
        let v = infection_bound_matrix(&params(2, 1.0, 2.0)).unwrap().value;
        assert!((v - 0.125).abs() < 1e-15);
        let v = infection_bound_matrix(&params(10, 1.0, 0.0)).unwrap().value;
        assert!((v - 0.09).abs() < 1e-15);
        let v = infection_bound_matrix(&params(3, 1.0, 1.0)).unwrap().value;
        assert!((v - 5.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn algebraic_bound_examples() {
        assert_eq!(h_factor(2, 4.0), 2.0);
        let v = infection_bound_algebraic(&params(2, 1.0, 4.0))
            .unwrap()
            .value;
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(h_factor(10, 0.0), 0.0);
        let v = infection_bound_algebraic(&params(10, 1.0, 0.0))
            .unwrap()
            .value;
        assert!((v - 0.09).abs() < 1e-15);
        assert!((h_factor(3, 1.0) - 0.75).abs() < 1e-15);
        let v = infection_bound_algebraic(&params(3, 1.0, 1.0))
            .unwrap()
            .value;
        assert!((v - 5.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn zero_replacement_rate() {
        let r = infection_bound_matrix(&params(10, 0.0, 1.0)).unwrap();
        assert!(r.zero_replacement_limit && r.value == 0.0);
        assert_eq!(
            infection_bound_algebraic(&params(10, 0.0, 0.0)),
            Err(Error::Indeterminate)
        );
    }
}
