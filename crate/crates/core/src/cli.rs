//! Sweeps behind the `omas` command line: bound tables, simulations,
//! age-of-information CDFs and figure data, all written as CSV.
//!
//! Every CSV starts with a `#` line holding the exact `omas` invocation that
//! regenerates it, followed by a header row.

use std::fmt::Write as _;
use std::io::Write;

use crate::age::AgeDistribution;
use crate::bounds::{ping_age_distribution, ping_bound, relaxed_bound, BoundMethod, BoundResult};
use crate::error::{Error, Result};
use crate::infection::{
    infection_age_cdf, infection_bound_algebraic, infection_bound_matrix, InfectionChain,
};
use crate::params::{SystemParams, ValueDistribution};
use crate::sim::{
    default_events, empirical_age_cdf, steady_state_mse_paired, Algorithm, Measurement, RunConfig,
};

pub const DEFAULT_RATIO_MIN: f64 = 1e-2;
pub const DEFAULT_RATIO_MAX: f64 = 1e3;
pub const DEFAULT_POINTS_PER_DECADE: usize = 50;
pub const DEFAULT_SEED: u64 = 20_190_101;
pub const FIGURE_AGENTS: [usize; 3] = [3, 10, 100];
pub const FIG3_AGENTS: usize = 10;
pub const FIG3_REPLICATIONS: usize = 10_000;
pub const FIG3_EVENTS: usize = 200;
pub const FIG3_POINTS_PER_DECADE: usize = 10;

/// Log-spaced grid from `min` to `max` inclusive.
pub fn log_spaced(min: f64, max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || points_per_decade == 0 {
        return Err(Error::InvalidSpec(format!(
            "log grid needs 0 < min <= max and points per decade >= 1 (got {min}, {max}, {points_per_decade})"
        )));
    }
    let (lo, hi) = (min.log10(), max.log10());
    let steps = ((hi - lo) * points_per_decade as f64).round().max(0.0) as usize;
    Ok((0..=steps)
        .map(|k| {
            if k == steps {
                max
            } else {
                10f64.powf(lo + k as f64 / points_per_decade as f64)
            }
        })
        .collect())
}

/// Parameters of a sweep over agent counts and rate ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_agents: Vec<usize>,
    /// Values of `lambda_c / lambda_r`.
    pub ratios: Vec<f64>,
    pub lambda_r: f64,
    pub sigma_sq: f64,
    pub value_dist: ValueDistribution,
    pub methods: Vec<BoundMethod>,
    pub algorithms: Vec<Algorithm>,
    pub replications: usize,
    /// Events per replication; `None` uses [`default_events`] per point.
    pub events: Option<usize>,
    pub seed: u64,
    pub measurement: Measurement,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            n_agents: vec![10],
            ratios: log_spaced(
                DEFAULT_RATIO_MIN,
                DEFAULT_RATIO_MAX,
                DEFAULT_POINTS_PER_DECADE,
            )
            .expect("default grid is valid"),
            lambda_r: 1.0,
            sigma_sq: 1.0,
            value_dist: ValueDistribution::Normal,
            methods: vec![
                BoundMethod::Ping,
                BoundMethod::InfectionMatrix,
                BoundMethod::InfectionAlgebraic,
                BoundMethod::Relaxed,
            ],
            algorithms: vec![Algorithm::Gossip],
            replications: 1000,
            events: None,
            seed: DEFAULT_SEED,
            measurement: Measurement::Snapshot,
        }
    }
}

impl SweepSpec {
    /// Checks the sweep and sorts/deduplicates the grids so that output rows
    /// come out ordered by `(n_agents, ratio)`.
    pub fn normalized(&self) -> Result<Self> {
        let mut spec = self.clone();
        if spec.n_agents.is_empty() || spec.ratios.is_empty() {
            return Err(Error::InvalidSpec(
                "agent and ratio lists must be non-empty".into(),
            ));
        }
        if let Some(&n) = spec.n_agents.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!(
                "n_agents must be >= 2, got {n}"
            )));
        }
        if let Some(r) = spec.ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "ratios must be finite and >= 0, got {r}"
            )));
        }
        if !(spec.lambda_r.is_finite() && spec.lambda_r > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "lambda_r anchor must be > 0, got {}",
                spec.lambda_r
            )));
        }
        if spec.methods.is_empty() || spec.algorithms.is_empty() {
            return Err(Error::InvalidSpec(
                "method and algorithm lists must be non-empty".into(),
            ));
        }
        if spec.replications == 0 || spec.events == Some(0) {
            return Err(Error::InvalidSpec(
                "replications and events must be >= 1".into(),
            ));
        }
        spec.n_agents.sort_unstable();
        spec.n_agents.dedup();
        spec.ratios.sort_by(f64::total_cmp);
        spec.ratios.dedup();
        if spec.methods.iter().any(|m| !ALL_TABLE_METHODS.contains(m)) {
            return Err(Error::InvalidSpec(
                "bound tables support ping, infection-matrix, infection-algebraic and relaxed"
                    .into(),
            ));
        }
        let methods: Vec<BoundMethod> = ALL_TABLE_METHODS
            .into_iter()
            .filter(|m| spec.methods.contains(m))
            .collect();
        spec.methods = methods;
        spec.algorithms = [Algorithm::Gossip, Algorithm::Optimal]
            .into_iter()
            .filter(|a| spec.algorithms.contains(a))
            .collect();
        SystemParams::new(2, spec.lambda_r, 0.0, spec.sigma_sq)?;
        Ok(spec)
    }

    pub fn params(&self, n_agents: usize, ratio: f64) -> Result<SystemParams> {
        Ok(
            SystemParams::from_ratio(n_agents, ratio, self.lambda_r, self.sigma_sq)?
                .with_value_dist(self.value_dist),
        )
    }

    fn events_for(&self, params: &SystemParams) -> usize {
        self.events.unwrap_or_else(|| default_events(params))
    }

    fn run_config(&self, params: &SystemParams) -> RunConfig {
        RunConfig {
            n_replications: self.replications,
            n_events: self.events_for(params),
            master_seed: self.seed,
            measurement: self.measurement,
        }
    }

    fn common_args(&self, out: &mut String) {
        let join = |v: Vec<String>| v.join(",");
        write!(
            out,
            " --n-agents {} --ratios {} --lambda-r {} --sigma-sq {} --value-dist {}",
            join(self.n_agents.iter().map(|n| n.to_string()).collect()),
            join(self.ratios.iter().map(|r| r.to_string()).collect()),
            self.lambda_r,
            self.sigma_sq,
            self.value_dist,
        )
        .expect("writing to a String");
    }

    fn sim_args(&self, out: &mut String) {
        write!(out, " --replications {}", self.replications).expect("writing to a String");
        if let Some(e) = self.events {
            write!(out, " --events {e}").expect("writing to a String");
        }
        write!(out, " --seed {}", self.seed).expect("writing to a String");
        if self.measurement == Measurement::TimeAveraged {
            out.push_str(" --time-averaged");
        }
    }
}

const ALL_TABLE_METHODS: [BoundMethod; 4] = [
    BoundMethod::Ping,
    BoundMethod::InfectionMatrix,
    BoundMethod::InfectionAlgebraic,
    BoundMethod::Relaxed,
];

fn column_name(method: BoundMethod) -> &'static str {
    match method {
        BoundMethod::Ping => "ping",
        BoundMethod::InfectionMatrix => "infection_matrix",
        BoundMethod::InfectionAlgebraic => "infection_algebraic",
        BoundMethod::Relaxed => "relaxed",
        BoundMethod::GenericQuadrature => "generic_quadrature",
    }
}

/// Evaluates one closed-form bound.
pub fn evaluate_bound(method: BoundMethod, params: &SystemParams) -> Result<BoundResult> {
    match method {
        BoundMethod::Ping => ping_bound(params),
        BoundMethod::InfectionMatrix => infection_bound_matrix(params),
        BoundMethod::InfectionAlgebraic => infection_bound_algebraic(params),
        BoundMethod::Relaxed => relaxed_bound(params),
        BoundMethod::GenericQuadrature => Err(Error::InvalidSpec(
            "generic quadrature needs an explicit age distribution".into(),
        )),
    }
}

/// Rows of a bound table: `(n_agents, ratio, values in method order)`.
pub fn bound_rows(spec: &SweepSpec) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let mut rows = Vec::new();
    for &n in &spec.n_agents {
        for &ratio in &spec.ratios {
            let params = spec.params(n, ratio)?;
            let values = spec
                .methods
                .iter()
                .map(|&m| evaluate_bound(m, &params).map(|b| b.value / spec.sigma_sq))
                .collect::<Result<Vec<_>>>()?;
            rows.push((n, ratio, values));
        }
    }
    Ok(rows)
}

/// `omas bounds`: one row per `(N, ratio)`, values in units of `sigma^2`.
pub fn cmd_bounds(spec: &SweepSpec, out: &mut dyn Write) -> Result<()> {
    let spec = spec.normalized()?;
    let mut command = String::from("# omas bounds");
    spec.common_args(&mut command);
    let methods: Vec<&str> = spec.methods.iter().map(|m| m.as_str()).collect();
    write!(command, " --methods {}", methods.join(",")).expect("writing to a String");

    let rows = bound_rows(&spec)?;
    writeln!(out, "{command}")?;
    let columns: Vec<&str> = spec.methods.iter().map(|&m| column_name(m)).collect();
    writeln!(out, "n_agents,ratio,{}", columns.join(","))?;
    for (n, ratio, values) in rows {
        let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{n},{ratio},{}", values.join(","))?;
    }
    Ok(())
}

/// `omas simulate`: Monte Carlo estimates of the steady-state error.
///
/// When both algorithms are requested they are measured on the same
/// replications.
pub fn cmd_simulate(spec: &SweepSpec, out: &mut dyn Write) -> Result<()> {
    let spec = spec.normalized()?;
    let mut command = String::from("# omas simulate");
    spec.common_args(&mut command);
    let algorithm = match spec.algorithms.as_slice() {
        [single] => single.as_str(),
        _ => "both",
    };
    write!(command, " --algorithm {algorithm}").expect("writing to a String");
    spec.sim_args(&mut command);

    let mut lines = Vec::new();
    for &n in &spec.n_agents {
        for &ratio in &spec.ratios {
            let params = spec.params(n, ratio)?;
            let config = spec.run_config(&params);
            let paired = steady_state_mse_paired(&params, &config)?;
            for &a in &spec.algorithms {
                let est = match a {
                    Algorithm::Gossip => paired.gossip,
                    Algorithm::Optimal => paired.optimal,
                };
                lines.push(format!(
                    "{n},{ratio},{a},{},{},{},{},{}",
                    est.mean / spec.sigma_sq,
                    est.std_error / spec.sigma_sq,
                    est.n_replications,
                    config.n_events,
                    spec.seed
                ));
            }
        }
    }
    writeln!(out, "{command}")?;
    writeln!(
        out,
        "n_agents,ratio,algorithm,mse_mean,mse_stderr,n_replications,n_events,seed"
    )?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Grid for `omas age-cdf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeGrid {
    /// Largest age on the grid; `None` picks `2 / lambda_c` (or `2 / lambda_r`
    /// without communication).
    pub max: Option<f64>,
    pub points: usize,
}

impl Default for AgeGrid {
    fn default() -> Self {
        Self {
            max: None,
            points: 50,
        }
    }
}

impl AgeGrid {
    pub fn resolve(&self, params: &SystemParams) -> Result<Vec<f64>> {
        let max = self.max.unwrap_or_else(|| {
            if params.lambda_c() > 0.0 {
                2.0 / params.lambda_c()
            } else {
                2.0 / params.lambda_r()
            }
        });
        if !(max > 0.0 && max.is_finite()) || self.points < 2 {
            return Err(Error::InvalidSpec(format!(
                "age grid needs max > 0 and at least 2 points (got {max}, {})",
                self.points
            )));
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points).map(|k| max * k as f64 / last).collect())
    }
}

/// `omas age-cdf`: empirical age CDF next to the Ping and infection CDFs,
/// for a single `(N, ratio)`.
pub fn cmd_age_cdf(spec: &SweepSpec, grid: &AgeGrid, out: &mut dyn Write) -> Result<()> {
    let spec = spec.normalized()?;
    let (n, ratio) = match (spec.n_agents.as_slice(), spec.ratios.as_slice()) {
        ([n], [r]) => (*n, *r),
        _ => {
            return Err(Error::InvalidSpec(
                "age-cdf takes exactly one agent count and one ratio".into(),
            ))
        }
    };
    let params = spec.params(n, ratio)?;
    let s_grid = grid.resolve(&params)?;
    let config = spec.run_config(&params);
    let empirical = empirical_age_cdf(&params, &config, &s_grid)?;
    let ping = ping_age_distribution(&params);
    let infection = infection_age_cdf(&InfectionChain::from_params(&params))?;

    let mut command = String::from("# omas age-cdf");
    spec.common_args(&mut command);
    spec.sim_args(&mut command);
    let max = s_grid.last().copied().unwrap_or(0.0);
    write!(
        command,
        " --grid-max {max} --grid-points {} # samples={} events={}",
        s_grid.len(),
        empirical.n_samples(),
        config.n_events
    )
    .expect("writing to a String");

    writeln!(out, "{command}")?;
    writeln!(out, "s,empirical,ping,infection")?;
    for (s, e) in s_grid.iter().zip(empirical.values()) {
        writeln!(out, "{s},{e},{},{}", ping.cdf(*s), infection.cdf(*s))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Ping bound against the rate ratio, several `N`.
    Fig1,
    /// Ping, infection and relaxed bounds, several `N`.
    Fig2,
    /// Infection bound against simulated gossip, ten agents.
    Fig3,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            other => Err(Error::InvalidSpec(format!(
                "unknown figure '{other}' (expected fig1, fig2 or fig3)"
            ))),
        }
    }
}

impl Figure {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
        }
    }

    /// The sweep behind the figure, with unit variance.
    pub fn spec(self, seed: u64) -> SweepSpec {
        let base = SweepSpec {
            n_agents: FIGURE_AGENTS.to_vec(),
            seed,
            ..SweepSpec::default()
        };
        match self {
            Self::Fig1 => SweepSpec {
                methods: vec![BoundMethod::Ping],
                ..base
            },
            Self::Fig2 => SweepSpec {
                methods: vec![
                    BoundMethod::Ping,
                    BoundMethod::InfectionMatrix,
                    BoundMethod::Relaxed,
                ],
                ..base
            },
            Self::Fig3 => SweepSpec {
                n_agents: vec![FIG3_AGENTS],
                ratios: log_spaced(DEFAULT_RATIO_MIN, DEFAULT_RATIO_MAX, FIG3_POINTS_PER_DECADE)
                    .expect("figure grid is valid"),
                methods: vec![BoundMethod::InfectionMatrix],
                algorithms: vec![Algorithm::Gossip],
                replications: FIG3_REPLICATIONS,
                events: Some(FIG3_EVENTS),
                ..base
            },
        }
    }
}

/// `omas reproduce`: the data series behind one figure.
pub fn cmd_reproduce(figure: Figure, seed: u64, out: &mut dyn Write) -> Result<()> {
    let spec = figure.spec(seed).normalized()?;
    match figure {
        Figure::Fig1 | Figure::Fig2 => {
            let rows = bound_rows(&spec)?;
            writeln!(out, "# omas reproduce {}", figure.as_str())?;
            let columns: Vec<&str> = spec.methods.iter().map(|&m| column_name(m)).collect();
            writeln!(out, "n_agents,ratio,{}", columns.join(","))?;
            for (n, ratio, values) in rows {
                let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{n},{ratio},{}", values.join(","))?;
            }
        }
        Figure::Fig3 => {
            let mut lines = Vec::new();
            for &n in &spec.n_agents {
                for &ratio in &spec.ratios {
                    let params = spec.params(n, ratio)?;
                    let bound = infection_bound_matrix(&params)?.value;
                    let config = spec.run_config(&params);
                    let gossip = steady_state_mse_paired(&params, &config)?.gossip;
                    lines.push(format!(
                        "{n},{ratio},{bound},{},{},{},{},{}",
                        gossip.mean,
                        gossip.std_error,
                        gossip.n_replications,
                        config.n_events,
                        spec.seed
                    ));
                }
            }
            writeln!(out, "# omas reproduce fig3 --seed {seed}")?;
            writeln!(
                out,
                "n_agents,ratio,infection_matrix,gossip_mse_mean,gossip_mse_stderr,n_replications,n_events,seed"
            )?;
            for line in lines {
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = log_spaced(1e-2, 1e3, 50).unwrap();
        assert_eq!(g.len(), 251);
        assert_eq!(g[0], 1e-2);
        assert_eq!(*g.last().unwrap(), 1e3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_spaced(0.0, 1.0, 10).is_err());
        assert!(log_spaced(1.0, 0.5, 10).is_err());
    }

    #[test]
    fn normalization_sorts_and_validates() {
        let spec = SweepSpec {
            n_agents: vec![10, 3, 10],
            ratios: vec![1.0, 0.1, 1.0],
            methods: vec![BoundMethod::Relaxed, BoundMethod::Ping],
            ..SweepSpec::default()
        }
        .normalized()
        .unwrap();
        assert_eq!(spec.n_agents, vec![3, 10]);
        assert_eq!(spec.ratios, vec![0.1, 1.0]);
        assert_eq!(spec.methods, vec![BoundMethod::Ping, BoundMethod::Relaxed]);

        let bad = SweepSpec {
            ratios: vec![],
            ..SweepSpec::default()
        };
        assert!(bad.normalized().is_err());
        let bad = SweepSpec {
            methods: vec![BoundMethod::GenericQuadrature],
            ..SweepSpec::default()
        };
        assert!(bad.normalized().is_err());
        let bad = SweepSpec {
            ratios: vec![-1.0],
            ..SweepSpec::default()
        };
        assert!(bad.normalized().is_err());
    }

    #[test]
    fn bounds_table_rows() {
        let spec = SweepSpec {
            n_agents: vec![2, 3, 10],
            ratios: vec![0.0, 1.0],
            ..SweepSpec::default()
        };
        let mut buf = Vec::new();
        cmd_bounds(&spec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# omas bounds"));
        assert_eq!(
            lines[1],
            "n_agents,ratio,ping,infection_matrix,infection_algebraic,relaxed"
        );
        assert_eq!(lines.len(), 2 + 6);
        let row = |n: &str, r: &str| -> Vec<f64> {
            let line = lines
                .iter()
                .find(|l| l.starts_with(&format!("{n},{r},")))
                .unwrap();
            line.split(',')
                .skip(2)
                .map(|v| v.parse().unwrap())
                .collect()
        };
        for v in row("10", "0") {
            assert!((v - 0.09).abs() < 1e-15);
        }
        let two = row("2", "1");
        assert!((two[0] - two[1]).abs() < 1e-15);
        assert!((row("3", "1")[1] - 5.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn age_cdf_needs_single_point() {
        let spec = SweepSpec {
            n_agents: vec![3, 4],
            ratios: vec![1.0],
            ..SweepSpec::default()
        };
        let mut buf = Vec::new();
        assert!(cmd_age_cdf(&spec, &AgeGrid::default(), &mut buf).is_err());
    }
}
