use serde::{Deserialize, Serialize};

/// Tolerances and caps for the order checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderPolicy {
    /// Order-violation threshold: a law pair is `Violated` when the LP
    /// optimum drops below `-epsilon` (relative to unit total mass). The
    /// marginal-equality pre-check shares this knob.
    pub epsilon: f64,
    /// Tolerance for cumulative-sum gaps in monotonicity checks.
    pub monotonicity_tol: f64,
    /// Feasibility residual accepted from the LP solver.
    pub lp_feasibility_tol: f64,
    /// Supermodularity residual a violation witness must satisfy on
    /// re-verification.
    pub witness_residual_tol: f64,
    /// Maximum lattice size `levels^n` for the dense LP.
    pub lattice_cap: usize,
}

impl Default for OrderPolicy {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            monotonicity_tol: 1e-12,
            lp_feasibility_tol: 1e-10,
            witness_residual_tol: 1e-9,
            lattice_cap: 625,
        }
    }
}
