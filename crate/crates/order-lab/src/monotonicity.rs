use ctmc_core::{Ctmc, TransitionMatrix};
use serde::Serialize;

use crate::Result;

/// One failed dominance inequality: comparing rows `lower_row` and
/// `lower_row + 1`, the tail mass from `threshold` upward dropped by `gap`
/// (negative).
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityViolation {
    pub lower_row: usize,
    pub threshold: usize,
    pub gap: f64,
}

/// Outcome of a strong-order monotonicity check.
///
/// A row-stochastic matrix is monotone when every row dominates its
/// predecessor in the strong stochastic order; comparing adjacent rows
/// suffices because dominance is transitive.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub violations: Vec<MonotonicityViolation>,
}

/// Checks `sum_{j >= k} P_{i+1,j} >= sum_{j >= k} P_{i,j}` for every
/// adjacent row pair and every threshold `k`, with rows in the canonical
/// ascending-intensity order.
pub fn check_stochastic_monotonicity(p: &TransitionMatrix, tol: f64) -> MonotonicityReport {
    let m = p.state_count();
    let mut violations = Vec::new();
    for i in 0..m.saturating_sub(1) {
        for k in 1..m {
            let gap = p.tail(i + 1, k) - p.tail(i, k);
            if gap < -tol {
                violations.push(MonotonicityViolation {
                    lower_row: i,
                    threshold: k,
                    gap,
                });
            }
        }
    }
    MonotonicityReport {
        monotone: violations.is_empty(),
        violations,
    }
}

/// Monotonicity of the chain's semigroup, realized by uniformizing and
/// checking the jump matrix.
///
/// The uniformization rate is `2 max_i |Q_ii|`: at or above twice the
/// largest diagonal magnitude the threshold that separates the compared
/// rows can no longer fail, and the signs of all remaining cumulative-sum
/// gaps are independent of the rate, so the verdict is stable for every
/// admissible choice. (At exactly `max_i |Q_ii|` even a two-state chain
/// would be flagged, which contradicts the semigroup being monotone.)
pub fn check_generator_monotonicity(chain: &Ctmc, tol: f64) -> MonotonicityReport {
    let eta = 2.0 * chain.uniformization_rate();
    check_generator_monotonicity_at(chain, eta, tol).expect("2 max |Q_ii| is always admissible")
}

/// Same check at an explicit uniformization rate `eta >= 2 max_i |Q_ii|`.
/// The verdict does not depend on the choice of `eta` in that range.
pub fn check_generator_monotonicity_at(
    chain: &Ctmc,
    eta: f64,
    tol: f64,
) -> Result<MonotonicityReport> {
    let p = chain.uniformize(eta)?;
    Ok(check_stochastic_monotonicity(&p, tol))
}

/// Monotonicity reports for the chain and its time-reversal.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleMonotonicityReport {
    pub forward: MonotonicityReport,
    pub reversed: MonotonicityReport,
}

impl DoubleMonotonicityReport {
    pub fn is_doubly_monotone(&self) -> bool {
        self.forward.monotone && self.reversed.monotone
    }
}

/// Checks both the generator and its time-reversal for strong-order
/// monotonicity.
pub fn check_doubly_monotone(chain: &Ctmc, tol: f64) -> DoubleMonotonicityReport {
    DoubleMonotonicityReport {
        forward: check_generator_monotonicity(chain, tol),
        reversed: check_generator_monotonicity(&chain.time_reverse(), tol),
    }
}

/// Per-row evidence for the constant-rate structure check.
#[derive(Debug, Clone, Serialize)]
pub struct CcpRow {
    pub row: usize,
    pub min_rate: f64,
    pub max_rate: f64,
}

/// Outcome of the constant-row-rate structure check (`q_ij = alpha_i > 0`
/// for all `j != i`).
#[derive(Debug, Clone, Serialize)]
pub struct CcpReport {
    pub is_ccp: bool,
    /// Inferred per-row rate when the structure holds.
    pub alpha: Option<Vec<f64>>,
    pub rows: Vec<CcpRow>,
}

/// Tests whether every row's off-diagonal rates are mutually equal within
/// `tol` and strictly positive.
pub fn check_ccp_structure(chain: &Ctmc, tol: f64) -> CcpReport {
    let m = chain.state_count();
    let q = chain.generator();
    let mut rows = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut ok = true;
    for i in 0..m {
        let mut min_rate = f64::INFINITY;
        let mut max_rate = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for j in 0..m {
            if i == j {
                continue;
            }
            let v = q[(i, j)];
            min_rate = min_rate.min(v);
            max_rate = max_rate.max(v);
            sum += v;
        }
        rows.push(CcpRow {
            row: i,
            min_rate,
            max_rate,
        });
        if max_rate - min_rate > tol || min_rate <= 0.0 {
            ok = false;
        }
        alpha.push(sum / (m - 1) as f64);
    }
    CcpReport {
        is_ccp: ok,
        alpha: if ok { Some(alpha) } else { None },
        rows,
    }
}
