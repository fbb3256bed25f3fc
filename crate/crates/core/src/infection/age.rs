use crate::age::AgeDistribution;
use crate::error::Result;
use crate::ode::OdeOptions;

use super::{check_probabilities, InfectionChain};

const CHECKPOINT_SPACING: f64 = 0.25; // in units of 1 / ((N-1) lambda_c)
const SURVIVAL_FLOOR: f64 = 1e-13;
// 2000 spacings are 500 / ((N-1) lambda_c): the tail is far below rounding by then
const MAX_CHECKPOINTS: usize = 2_000;

/// Age distribution of the infection relaxation, backed by ODE solutions of
/// the infected-count chain.
///
/// Solutions are stored at evenly spaced checkpoints until the survival
/// function falls below `1e-13`; a query integrates forward from the nearest
/// checkpoint. Beyond the last checkpoint the chain is treated as absorbed and
/// the last stored solution is returned. Point queries cannot fail once construction succeeded, except
/// on solver breakdown, which is reported as `NaN`.
#[derive(Debug, Clone)]
pub struct InfectionAge {
    chain: InfectionChain,
    spacing: f64,
    checkpoints: Vec<Vec<f64>>,
    absorbed: bool,
    opts: OdeOptions,
}

impl InfectionAge {
    pub fn new(chain: InfectionChain) -> Result<Self> {
        let n = chain.n_agents();
        let opts = chain.ode_options();
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        if chain.lambda_c() == 0.0 {
            return Ok(Self {
                chain,
                spacing: 0.0,
                checkpoints: vec![p],
                absorbed: false,
                opts,
            });
        }
        let spacing = CHECKPOINT_SPACING / ((n - 1) as f64 * chain.lambda_c());
        let mut checkpoints = vec![p.clone()];
        while chain.survival_of(&p) > SURVIVAL_FLOOR && checkpoints.len() < MAX_CHECKPOINTS {
            let k = checkpoints.len();
            chain.advance(&mut p, (k - 1) as f64 * spacing, k as f64 * spacing, &opts)?;
            check_probabilities(&mut p, k as f64 * spacing)?;
            checkpoints.push(p.clone());
        }
        Ok(Self {
            chain,
            spacing,
            checkpoints,
            absorbed: true,
            opts,
        })
    }

    pub fn chain(&self) -> &InfectionChain {
        &self.chain
    }

    /// `P(s)` for any `s >= 0`, or `None` if the solver broke down.
    pub fn state_at(&self, s: f64) -> Option<Vec<f64>> {
        if self.spacing == 0.0 || s <= 0.0 {
            return Some(self.checkpoints[0].clone());
        }
        let last = self.checkpoints.len() - 1;
        if self.absorbed && s >= last as f64 * self.spacing {
            return Some(self.checkpoints[last].clone());
        }
        let k = ((s / self.spacing) as usize).min(last);
        let mut p = self.checkpoints[k].clone();
        self.chain
            .advance(&mut p, k as f64 * self.spacing, s, &self.opts)
            .ok()?;
        check_probabilities(&mut p, s).ok()?;
        Some(p)
    }
}

impl AgeDistribution for InfectionAge {
    fn cdf(&self, s: f64) -> f64 {
        self.state_at(s).map_or(f64::NAN, |p| self.chain.cdf_of(&p))
    }

    fn survival(&self, s: f64) -> f64 {
        self.state_at(s)
            .map_or(f64::NAN, |p| self.chain.survival_of(&p))
    }

    fn has_density(&self) -> bool {
        self.chain.lambda_c() > 0.0
    }

    fn pdf(&self, s: f64) -> Option<f64> {
        if !self.has_density() {
            return None;
        }
        Some(self.state_at(s).map_or(f64::NAN, |p| self.chain.pdf_of(&p)))
    }

    fn infinite_mass(&self) -> f64 {
        if self.chain.lambda_c() > 0.0 {
            0.0
        } else {
            1.0
        }
    }

    fn tail_cutoff(&self, tol: f64) -> f64 {
        self.checkpoints
            .iter()
            .position(|p| self.chain.survival_of(p) < tol)
            .unwrap_or(self.checkpoints.len() - 1) as f64
            * self.spacing
    }
}
