//! Age of information and distributions over it.
//!
//! An agent that never heard about a peer holds an information of infinite
//! age. Distributions therefore may put part of their mass at `+inf`; that
//! mass is reported by [`AgeDistribution::infinite_mass`] and is never part
//! of the finite CDF limit.

use std::cmp::Ordering;

/// Age of a piece of information, with a distinguished infinite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Age {
    Finite(f64),
    Infinite,
}

impl Age {
    /// `exp(-rate * age)`, exactly 0 for an infinite age and a positive rate.
    pub fn decay(self, rate: f64) -> f64 {
        match self {
            Age::Finite(t) => (-rate * t).exp(),
            Age::Infinite if rate > 0.0 => 0.0,
            Age::Infinite => 1.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Age::Finite(_))
    }

    /// Whether the age is at most `s`.
    pub fn at_most(self, s: f64) -> bool {
        match self {
            Age::Finite(t) => t <= s,
            Age::Infinite => false,
        }
    }
}

impl PartialOrd for Age {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Age::Finite(a), Age::Finite(b)) => a.partial_cmp(b),
            (Age::Finite(_), Age::Infinite) => Some(Ordering::Less),
            (Age::Infinite, Age::Finite(_)) => Some(Ordering::Greater),
            (Age::Infinite, Age::Infinite) => Some(Ordering::Equal),
        }
    }
}

/// Distribution of the age of the most recent information an agent holds
/// about a peer.
pub trait AgeDistribution {
    /// `P(T <= s)` for finite `s >= 0`.
    fn cdf(&self, s: f64) -> f64;

    /// `P(T > s)`, including the mass at infinity.
    ///
    /// Implementations should override this when `1 - cdf` loses precision.
    fn survival(&self, s: f64) -> f64 {
        1.0 - self.cdf(s)
    }

    /// Whether [`AgeDistribution::pdf`] returns a density for the finite part.
    fn has_density(&self) -> bool {
        false
    }

    /// Density of the finite part at `s`, when available.
    fn pdf(&self, _s: f64) -> Option<f64> {
        None
    }

    /// `P(T = +inf)`.
    fn infinite_mass(&self) -> f64 {
        0.0
    }

    /// A time `s*` such that `P(s* < T < inf) < tol`.
    fn tail_cutoff(&self, tol: f64) -> f64;
}

/// Exponential age with the given rate. A zero rate means no information ever
/// arrives: all mass sits at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialAge {
    rate: f64,
}

impl ExponentialAge {
    pub fn new(rate: f64) -> Self {
        assert!(
            rate >= 0.0 && rate.is_finite(),
            "rate must be finite and >= 0"
        );
        Self { rate }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl AgeDistribution for ExponentialAge {
    fn cdf(&self, s: f64) -> f64 {
        -(-self.rate * s).exp_m1()
    }

    fn survival(&self, s: f64) -> f64 {
        (-self.rate * s).exp()
    }

    fn has_density(&self) -> bool {
        self.rate > 0.0
    }

    fn pdf(&self, s: f64) -> Option<f64> {
        (self.rate > 0.0).then(|| self.rate * (-self.rate * s).exp())
    }

    fn infinite_mass(&self) -> f64 {
        if self.rate > 0.0 {
            0.0
        } else {
            1.0
        }
    }

    fn tail_cutoff(&self, tol: f64) -> f64 {
        if self.rate > 0.0 {
            (1.0 / tol).ln().max(0.0) / self.rate
        } else {
            0.0
        }
    }
}

/// All mass at a single finite age.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMassAge {
    pub at: f64,
}

impl AgeDistribution for PointMassAge {
    fn cdf(&self, s: f64) -> f64 {
        if s >= self.at {
            1.0
        } else {
            0.0
        }
    }

    fn tail_cutoff(&self, _tol: f64) -> f64 {
        self.at
    }
}

/// All mass at infinite age: nothing is ever known.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoInformation;

impl AgeDistribution for NoInformation {
    fn cdf(&self, _s: f64) -> f64 {
        0.0
    }

    fn infinite_mass(&self) -> f64 {
        1.0
    }

    fn tail_cutoff(&self, _tol: f64) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_age_decays_to_zero() {
        assert_eq!(Age::Infinite.decay(1.0), 0.0);
        assert_eq!(Age::Infinite.decay(0.0), 1.0);
        assert_eq!(Age::Finite(0.0).decay(3.0), 1.0);
        assert!(Age::Finite(1e300) < Age::Infinite);
        assert!(!Age::Infinite.at_most(f64::MAX));
    }

    #[test]
    fn exponential_cdf_and_survival_agree() {
        let d = ExponentialAge::new(2.5);
        for s in [0.0, 1e-9, 0.1, 1.0, 10.0] {
            assert!((d.cdf(s) + d.survival(s) - 1.0).abs() < 1e-15);
        }
        assert_eq!(d.cdf(0.0), 0.0);
        assert!(d.survival(d.tail_cutoff(1e-12)) <= 1.0000001e-12);
    }

    #[test]
    fn degenerate_exponential_is_all_infinite() {
        let d = ExponentialAge::new(0.0);
        assert_eq!(d.cdf(5.0), 0.0);
        assert_eq!(d.infinite_mass(), 1.0);
        assert!(!d.has_density());
    }
}
