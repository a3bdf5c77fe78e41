use serde::{Deserialize, Serialize};

/// Numeric tolerances and size caps shared by the CTMC operations.
///
/// One record holds every knob so that reports can state the policy a run
/// actually used. The defaults are the reference values; callers may relax
/// or tighten individual fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Accepted absolute row-sum residual of a generator *as supplied*.
    /// After construction the diagonal is recomputed, so stored generators
    /// satisfy the much tighter `row_sum_tol`.
    pub row_sum_input_tol: f64,
    /// Row-sum residual guaranteed by stored generators and checked on
    /// stochastic matrices.
    pub row_sum_tol: f64,
    /// Residual `max |pi^T Q|` accepted for a stationary distribution.
    pub stationary_residual_tol: f64,
    /// Mass defect accepted for probability mass functions.
    pub pmf_tol: f64,
    /// Poisson tail mass at which the uniformization series is truncated.
    pub poisson_tail: f64,
    /// Maximum dimension of a time grid (lattice is `levels^n`).
    pub grid_dim_cap: usize,
    /// Maximum number of chain states.
    pub max_states: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            row_sum_input_tol: 1e-9,
            row_sum_tol: 1e-12,
            stationary_residual_tol: 1e-10,
            pmf_tol: 1e-10,
            poisson_tail: 1e-13,
            grid_dim_cap: 4,
            max_states: 64,
        }
    }
}
