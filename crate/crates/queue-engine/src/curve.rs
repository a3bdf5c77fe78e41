use ctmc_core::Ctmc;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{rolski_bounds, RolskiBounds};
use crate::error::QueueError;
use crate::estimate::{EstimateMethod, WorkloadEstimate};
use crate::qbd::{qbd_mean_workload, QbdOptions};
use crate::service::ServiceDistribution;
use crate::sim::{simulate_mean_workload, SimOptions};
use crate::spec::QueueSpec;
use crate::Result;

/// How curve points are evaluated. `Auto` picks the exact QBD solve for
/// exponential service and simulation otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMethod {
    Auto,
    Qbd,
    Sim,
}

/// One evaluated modulation rate. `pair_flag` marks the adjacent pair
/// `(this c, next c)` as a suspected monotonicity violation.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub c: f64,
    pub estimate: WorkloadEstimate,
    pub pair_flag: bool,
}

/// Monotonicity verdict over the swept rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CurveVerdict {
    Decreasing,
    ViolationSuspected { pairs: Vec<(f64, f64)> },
}

/// The swept workload curve with its verdict and the environment bounds.
#[derive(Debug, Clone, Serialize)]
pub struct WCurve {
    pub points: Vec<CurvePoint>,
    pub verdict: CurveVerdict,
    pub bounds: RolskiBounds,
}

/// Report header fields for the CSV rendering.
#[derive(Debug, Clone, Serialize)]
pub struct CurveMetadata {
    pub seed: u64,
    pub spec_hash: String,
    pub policy: String,
}

/// Slack for exact-solve comparisons; simulation pairs use the sum of the
/// two confidence half-widths instead.
const EXACT_SLACK: f64 = 1e-8;

/// Evaluates `w(c)` over an ascending rate list and judges monotonicity:
/// `Decreasing` when every adjacent pair satisfies
/// `w(c_k) >= w(c_{k+1}) - slack`.
///
/// Points run in parallel; simulation points derive their seeds from
/// `sim_seed` and the point index, so the curve is reproducible and
/// thread-count independent.
pub fn w_curve(
    chain: &Ctmc,
    service: &ServiceDistribution,
    c_list: &[f64],
    method: CurveMethod,
    qbd_opts: &QbdOptions,
    sim_opts: &SimOptions,
) -> Result<WCurve> {
    if c_list.is_empty() {
        return Err(QueueError::InvalidSpec("empty c list".into()));
    }
    if c_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QueueError::InvalidSpec(
            "c list must be strictly ascending".into(),
        ));
    }
    let exponential = matches!(service, ServiceDistribution::Exponential { .. });
    let use_qbd = match method {
        CurveMethod::Auto => exponential,
        CurveMethod::Qbd => {
            if !exponential {
                return Err(QueueError::NotExponentialService);
            }
            true
        }
        CurveMethod::Sim => false,
    };

    let estimates: Vec<WorkloadEstimate> = c_list
        .par_iter()
        .enumerate()
        .map(|(k, &c)| -> Result<WorkloadEstimate> {
            let spec = QueueSpec::new(chain.clone(), c, service.clone())?;
            if use_qbd {
                qbd_mean_workload(&spec, qbd_opts)
            } else {
                // Golden-ratio stride keeps per-point seeds distinct.
                let stride = (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let opts = SimOptions {
                    seed: sim_opts.seed.wrapping_add(stride),
                    ..*sim_opts
                };
                Ok(simulate_mean_workload(&spec, &opts)?.workload)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pair_flags = vec![false; c_list.len()];
    let mut violations = Vec::new();
    for k in 0..estimates.len().saturating_sub(1) {
        let slack = if estimates[k].method == EstimateMethod::QbdExact {
            EXACT_SLACK
        } else {
            estimates[k].half_width + estimates[k + 1].half_width
        };
        if estimates[k].value < estimates[k + 1].value - slack {
            pair_flags[k] = true;
            violations.push((c_list[k], c_list[k + 1]));
        }
    }

    let bounds = {
        let spec = QueueSpec::new(chain.clone(), c_list[0], service.clone())?;
        rolski_bounds(&spec)
    };
    let points = c_list
        .iter()
        .zip(estimates)
        .zip(pair_flags)
        .map(|((&c, estimate), pair_flag)| CurvePoint {
            c,
            estimate,
            pair_flag,
        })
        .collect();
    let verdict = if violations.is_empty() {
        CurveVerdict::Decreasing
    } else {
        CurveVerdict::ViolationSuspected { pairs: violations }
    };
    Ok(WCurve {
        points,
        verdict,
        bounds,
    })
}

impl WCurve {
    /// CSV rendering: a commented metadata block, then one row per rate.
    pub fn to_csv(&self, meta: &CurveMetadata) -> String {
        let mut out = String::new();
        out.push_str(&format!("# seed={}\n", meta.seed));
        out.push_str(&format!("# spec_hash={}\n", meta.spec_hash));
        out.push_str(&format!("# policy={}\n", meta.policy));
        out.push_str(&format!(
            "# verdict={}\n",
            match &self.verdict {
                CurveVerdict::Decreasing => "decreasing".to_string(),
                CurveVerdict::ViolationSuspected { pairs } =>
                    format!("violation_suspected({} pairs)", pairs.len()),
            }
        ));
        out.push_str("c,value,half_width,method,verdict_pair_flag\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.c,
                p.estimate.value,
                p.estimate.half_width,
                p.estimate.method.as_str(),
                u8::from(p.pair_flag)
            ));
        }
        out
    }
}
