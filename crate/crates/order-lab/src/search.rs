use ctmc_core::{Ctmc, CtmcError, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OrderError;
use crate::monotonicity::{
    check_ccp_structure, check_doubly_monotone, check_generator_monotonicity,
};
use crate::policy::OrderPolicy;
use crate::scan::{sm_decrease_scan, ScanReport};
use crate::Result;

/// Distribution of the sampled off-diagonal rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum RateSampler {
    /// Exponential with the given mean.
    Exponential { mean: f64 },
    /// Two-point distribution: `hi` with probability `p_hi`, else `lo`.
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
}

impl RateSampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            RateSampler::Exponential { mean } => {
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                -mean * u.ln()
            }
            RateSampler::TwoPoint { lo, hi, p_hi } => {
                if rng.random_range(0.0..1.0) < p_hi {
                    hi
                } else {
                    lo
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RateSampler::Exponential { mean } => mean > 0.0 && mean.is_finite(),
            RateSampler::TwoPoint { lo, hi, p_hi } => {
                lo >= 0.0 && hi > 0.0 && lo <= hi && (0.0..=1.0).contains(&p_hi)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(OrderError::InvalidConfig("bad sampler parameters".into()))
        }
    }
}

/// Configuration of the randomized counterexample search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Number of chain states per sample.
    pub states: usize,
    /// Ascending modulation rates for the scan.
    pub c_list: Vec<f64>,
    /// Observation grids for the scan.
    pub grids: Vec<TimeGrid>,
    pub sampler: RateSampler,
    /// Intensities are sorted uniforms on `(0, lambda_max)`.
    pub lambda_max: f64,
    /// Number of random chains to draw.
    pub budget: usize,
    pub seed: u64,
}

/// Full diagnostics for a chain that the search decided to keep.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    /// Draw index, or `None` for an injected chain.
    pub sample_index: Option<u64>,
    pub lambda: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub monotone: bool,
    pub doubly_monotone: bool,
    pub ccp: bool,
    pub scan: ScanReport,
    /// Not stochastically monotone, yet the scan found no violation: the
    /// pattern the search hunts for.
    pub candidate: bool,
    /// The scan found a violated cell (interesting regardless of
    /// monotonicity).
    pub violation: bool,
}

/// Search outcome: counts plus the kept records.
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub seed: u64,
    pub samples_tried: usize,
    /// Draws discarded because the sampled rate graph was not irreducible
    /// (possible under a two-point sampler with a zero atom).
    pub skipped: usize,
    pub candidates_found: usize,
    pub violations_found: usize,
    pub records: Vec<SampleRecord>,
}

fn evaluate(
    chain: &Ctmc,
    sample_index: Option<u64>,
    config: &SearchConfig,
    policy: &OrderPolicy,
) -> Result<SampleRecord> {
    let monotone = check_generator_monotonicity(chain, policy.monotonicity_tol).monotone;
    let doubly = check_doubly_monotone(chain, policy.monotonicity_tol).is_doubly_monotone();
    let ccp = check_ccp_structure(chain, 1e-9).is_ccp;
    let scan = sm_decrease_scan(chain, &config.c_list, &config.grids, policy)?;
    let violation = scan.has_violation();
    let candidate = !monotone && scan.all_ordered;
    let m = chain.state_count();
    Ok(SampleRecord {
        sample_index,
        lambda: chain.lambda().iter().copied().collect(),
        q: (0..m)
            .map(|i| (0..m).map(|j| chain.generator()[(i, j)]).collect())
            .collect(),
        monotone,
        doubly_monotone: doubly,
        ccp,
        scan,
        candidate,
        violation,
    })
}

fn draw_chain(config: &SearchConfig, index: u64) -> std::result::Result<Ctmc, CtmcError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index + 1);
    let m = config.states;
    let mut rows = vec![vec![0.0; m]; m];
    for i in 0..m {
        let mut off = 0.0;
        for j in 0..m {
            if i != j {
                let rate = config.sampler.draw(&mut rng);
                rows[i][j] = rate;
                off += rate;
            }
        }
        rows[i][i] = -off;
    }
    let mut lambda: Vec<f64> = (0..m)
        .map(|_| rng.random_range(0.0..config.lambda_max))
        .collect();
    lambda.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ctmc::from_rows(&rows, &lambda)
}

/// Samples `budget` random chains (plus any injected ones, evaluated first)
/// and keeps every chain that is either a candidate — not stochastically
/// monotone but with an all-`Ordered` scan — or has a scan violation.
///
/// Deterministic for a fixed seed: each draw uses its own counter-derived
/// stream, so the outcome does not depend on thread count. An empty record
/// list is a legitimate outcome.
pub fn counterexample_search(
    config: &SearchConfig,
    injected: &[Ctmc],
    policy: &OrderPolicy,
) -> Result<SearchReport> {
    if config.states < 2 {
        return Err(OrderError::InvalidConfig("need at least 2 states".into()));
    }
    if config.budget == 0 && injected.is_empty() {
        return Err(OrderError::InvalidConfig(
            "budget must be at least 1".into(),
        ));
    }
    if config.lambda_max.is_nan() || config.lambda_max <= 0.0 {
        return Err(OrderError::InvalidConfig(
            "lambda_max must be positive".into(),
        ));
    }
    config.sampler.validate()?;
    // The scan lattice is levels^n with at most `states` levels.
    let max_dim = config.grids.iter().map(TimeGrid::dim).max().unwrap_or(0);
    let lattice = config
        .states
        .checked_pow(max_dim as u32)
        .unwrap_or(usize::MAX);
    if lattice > policy.lattice_cap {
        return Err(OrderError::LatticeCapExceeded {
            size: lattice,
            cap: policy.lattice_cap,
        });
    }

    let injected_records: Vec<SampleRecord> = injected
        .iter()
        .map(|chain| evaluate(chain, None, config, policy))
        .collect::<Result<Vec<_>>>()?;

    let sampled: Vec<Option<SampleRecord>> = (0..config.budget as u64)
        .into_par_iter()
        .map(|index| -> Result<Option<SampleRecord>> {
            match draw_chain(config, index) {
                Ok(chain) => Ok(Some(evaluate(&chain, Some(index), config, policy)?)),
                Err(CtmcError::NotIrreducible { .. }) => Ok(None),
                Err(other) => Err(other.into()),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let skipped = sampled.iter().filter(|r| r.is_none()).count();
    let mut candidates_found = 0;
    let mut violations_found = 0;
    let mut records = Vec::new();
    for record in injected_records
        .into_iter()
        .chain(sampled.into_iter().flatten())
    {
        if record.candidate {
            candidates_found += 1;
        }
        if record.violation {
            violations_found += 1;
        }
        if record.candidate || record.violation {
            records.push(record);
        }
    }

    Ok(SearchReport {
        seed: config.seed,
        samples_tried: config.budget,
        skipped,
        candidates_found,
        violations_found,
        records,
    })
}
