use serde::Serialize;

/// How a workload value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    QbdExact,
    Simulation,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::QbdExact => "qbd",
            EstimateMethod::Simulation => "sim",
        }
    }
}

/// Solver- or simulation-specific diagnostics attached to an estimate.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateDiagnostics {
    Qbd {
        iterations: usize,
        spectral_radius: f64,
    },
    Simulation {
        batches: usize,
        arrivals: u64,
    },
}

/// A point value with an error bar: exact solves carry half-width zero,
/// simulation estimates a 95% batch-means confidence half-width.
#[derive(Debug, Clone, Serialize)]
pub struct WorkloadEstimate {
    pub value: f64,
    pub half_width: f64,
    pub method: EstimateMethod,
    pub diagnostics: EstimateDiagnostics,
}

impl WorkloadEstimate {
    /// Whether the 95% interval covers `target`.
    pub fn covers(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.half_width
    }
}
