use std::path::Path;

use ctmc_core::{ChainFile, Ctmc, GridDistribution, LoadReport, NumericPolicy, StateSpec};
use queue_engine::ServiceDistribution;
use serde::Deserialize;

use crate::exit::CliError;

/// On-disk chain specification with the optional queue extension.
#[derive(Debug, Clone, Deserialize)]
pub struct InputFile {
    pub states: Vec<StateSpec>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(default)]
    pub service: Option<ServiceDistribution>,
}

pub struct LoadedChain {
    pub chain: Ctmc,
    pub report: LoadReport,
    pub service: Option<ServiceDistribution>,
    /// Canonical serialization of the parsed file, used for spec hashing.
    pub canonical: String,
}

pub fn load_input(path: &Path, policy: NumericPolicy) -> Result<LoadedChain, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let parsed: InputFile = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let file = ChainFile {
        states: parsed.states.clone(),
        q: parsed.q.clone(),
    };
    let (chain, report) = file.build(policy)?;
    let canonical = canonical_input(&parsed);
    Ok(LoadedChain {
        chain,
        report,
        service: parsed.service,
        canonical,
    })
}

/// Whitespace-independent rendering of the parsed input for hashing.
fn canonical_input(input: &InputFile) -> String {
    let states: Vec<serde_json::Value> = input
        .states
        .iter()
        .map(|s| serde_json::json!({"label": s.label, "lambda": s.lambda}))
        .collect();
    let service = input
        .service
        .as_ref()
        .map(|s| serde_json::to_value(s).expect("service serializes"));
    serde_json::json!({"states": states, "Q": input.q, "service": service}).to_string()
}

/// Debug input for `sm-check --pmf-pair`: two laws on a shared lattice.
#[derive(Debug, Deserialize)]
pub struct PmfPairFile {
    pub levels: Vec<f64>,
    pub dim: usize,
    pub x_pmf: Vec<f64>,
    pub y_pmf: Vec<f64>,
}

pub fn load_pmf_pair(
    path: &Path,
    mass_tol: f64,
) -> Result<(GridDistribution, GridDistribution), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let parsed: PmfPairFile = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let x = GridDistribution::new(parsed.levels.clone(), parsed.dim, parsed.x_pmf, mass_tol)?;
    let y = GridDistribution::new(parsed.levels, parsed.dim, parsed.y_pmf, mass_tol)?;
    Ok((x, y))
}

/// Parses a comma-separated list of strictly ascending positive rates.
pub fn parse_c_list(text: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::parse(format!("bad rate {t:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::parse("empty c list"));
    }
    if values.iter().any(|&c| c.is_nan() || c <= 0.0) {
        return Err(CliError::parse("modulation rates must be positive"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::parse("c list must be strictly ascending"));
    }
    Ok(values)
}

/// Parses one `--grid` occurrence: comma-separated strictly increasing
/// times.
pub fn parse_grid(text: &str, cap: usize) -> Result<ctmc_core::TimeGrid, CliError> {
    let points: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::parse(format!("bad time point {t:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(ctmc_core::TimeGrid::with_cap(points, cap)?)
}

/// Parses `--sampler`: `exponential:MEAN` or `twopoint:LO,HI,P_HI`.
pub fn parse_sampler(text: &str) -> Result<order_lab::RateSampler, CliError> {
    let (family, params) = text
        .split_once(':')
        .ok_or_else(|| CliError::parse("sampler must look like exponential:1.0"))?;
    match family {
        "exponential" | "exp" => {
            let mean: f64 = params
                .parse()
                .map_err(|e| CliError::parse(format!("bad sampler mean: {e}")))?;
            Ok(order_lab::RateSampler::Exponential { mean })
        }
        "twopoint" => {
            let parts: Vec<&str> = params.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::parse("twopoint sampler needs LO,HI,P_HI"));
            }
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|e| CliError::parse(format!("bad sampler parameter {t:?}: {e}")))
            };
            Ok(order_lab::RateSampler::TwoPoint {
                lo: parse(parts[0])?,
                hi: parse(parts[1])?,
                p_hi: parse(parts[2])?,
            })
        }
        other => Err(CliError::parse(format!("unknown sampler family {other:?}"))),
    }
}
