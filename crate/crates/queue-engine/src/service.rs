use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::QueueError;
use crate::Result;

/// IID service-time distribution, limited to families with closed-form
/// first and second moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ServiceDistribution {
    /// Exponential with rate `mu` (mean `1/mu`).
    Exponential { mu: f64 },
    /// Deterministic service of length `d`.
    Deterministic { d: f64 },
    /// Erlang: sum of `k` exponentials with the given per-stage rate.
    Erlang { k: u32, rate: f64 },
    /// Hyperexponential mixture: branch `i` with probability `probs[i]`,
    /// exponential with rate `rates[i]`.
    Hyperexponential { probs: Vec<f64>, rates: Vec<f64> },
}

impl ServiceDistribution {
    /// Validates the parameters (strict positivity, probabilities summing
    /// to one).
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(QueueError::InvalidSpec(msg.into()));
        match self {
            Self::Exponential { mu } => {
                if !(mu.is_finite() && *mu > 0.0) {
                    return fail("exponential rate mu must be positive");
                }
            }
            Self::Deterministic { d } => {
                if !(d.is_finite() && *d > 0.0) {
                    return fail("deterministic service d must be positive");
                }
            }
            Self::Erlang { k, rate } => {
                if *k == 0 {
                    return fail("erlang stage count k must be positive");
                }
                if !(rate.is_finite() && *rate > 0.0) {
                    return fail("erlang rate must be positive");
                }
            }
            Self::Hyperexponential { probs, rates } => {
                if probs.is_empty() || probs.len() != rates.len() {
                    return fail("hyperexponential probs and rates must match and be non-empty");
                }
                if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return fail("hyperexponential probabilities must be nonnegative");
                }
                if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return fail("hyperexponential rates must be positive");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return fail("hyperexponential probabilities must sum to 1");
                }
            }
        }
        Ok(())
    }

    /// First moment `E[S]`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { mu } => 1.0 / mu,
            Self::Deterministic { d } => *d,
            Self::Erlang { k, rate } => f64::from(*k) / rate,
            Self::Hyperexponential { probs, rates } => {
                probs.iter().zip(rates).map(|(p, r)| p / r).sum()
            }
        }
    }

    /// Second moment `E[S^2]`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Exponential { mu } => 2.0 / (mu * mu),
            Self::Deterministic { d } => d * d,
            Self::Erlang { k, rate } => {
                let k = f64::from(*k);
                k * (k + 1.0) / (rate * rate)
            }
            Self::Hyperexponential { probs, rates } => probs
                .iter()
                .zip(rates)
                .map(|(p, r)| 2.0 * p / (r * r))
                .sum(),
        }
    }

    /// Draws one service time by inverse transform (branch pick first for
    /// the mixture).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { mu } => exp_draw(rng, *mu),
            Self::Deterministic { d } => *d,
            Self::Erlang { k, rate } => (0..*k).map(|_| exp_draw(rng, *rate)).sum(),
            Self::Hyperexponential { probs, rates } => {
                let u: f64 = rng.random_range(0.0..1.0);
                let mut acc = 0.0;
                for (p, r) in probs.iter().zip(rates) {
                    acc += p;
                    if u < acc {
                        return exp_draw(rng, *r);
                    }
                }
                exp_draw(rng, *rates.last().expect("validated non-empty"))
            }
        }
    }
}

/// Exponential draw by inverse transform on `(0, 1)`.
pub(crate) fn exp_draw<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    -u.ln() / rate
}
