use nalgebra::DMatrix;

use crate::error::CtmcError;
use crate::policy::NumericPolicy;
use crate::Result;

/// A row-stochastic matrix over the canonical (intensity-sorted) state order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    p: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Validates and wraps a row-stochastic matrix.
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        Self::from_parts(p, &NumericPolicy::default())
    }

    /// Validates and wraps row-major probability rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(CtmcError::NotStochastic {
                row: rows.iter().position(|r| r.len() != m).unwrap_or(0),
                reason: "matrix is not square".into(),
            });
        }
        Self::new(DMatrix::from_row_iterator(
            m,
            m,
            rows.iter().flatten().copied(),
        ))
    }

    pub(crate) fn from_parts(p: DMatrix<f64>, policy: &NumericPolicy) -> Result<Self> {
        let m = p.nrows();
        if p.ncols() != m || m == 0 {
            return Err(CtmcError::NotStochastic {
                row: 0,
                reason: "matrix must be square and non-empty".into(),
            });
        }
        for i in 0..m {
            let mut sum = 0.0;
            for j in 0..m {
                let v = p[(i, j)];
                if !v.is_finite() || v < -policy.row_sum_tol || v > 1.0 + policy.row_sum_tol {
                    return Err(CtmcError::NotStochastic {
                        row: i,
                        reason: format!("entry {v} at column {j} outside [0, 1]"),
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > policy.row_sum_tol {
                return Err(CtmcError::NotStochastic {
                    row: i,
                    reason: format!("row sum {sum} differs from 1"),
                });
            }
        }
        Ok(Self { p })
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.p.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Entry accessor.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[(i, j)]
    }

    /// Dampened matrix `(1 - c) I + c P`; keeps the stationary vector of `P`
    /// for every `c` in `(0, 1]`.
    pub fn dampen(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 || c > 1.0 {
            return Err(CtmcError::InvalidDampening(c));
        }
        let m = self.state_count();
        let mut p = &self.p * c;
        for i in 0..m {
            p[(i, i)] += 1.0 - c;
        }
        Ok(Self { p })
    }

    /// Tail sum `sum_{j >= k} P_ij`.
    pub fn tail(&self, i: usize, k: usize) -> f64 {
        (k..self.state_count()).map(|j| self.p[(i, j)]).sum()
    }
}

/// `exp(Q t)` given the uniformized matrix `P = I + Q/eta` and `x = eta * t`:
/// sums `e^{-x} x^k / k! * P^k` until the remaining Poisson tail mass drops
/// below `tail`.
///
/// The truncated sum is divided by the accumulated weight (every row carries
/// the same deficit, so this is exact renormalization of the truncated
/// Poisson law), which keeps the result row-stochastic to rounding. Large
/// `x` is handled by halving down to a moderate step and squaring back up;
/// nonnegativity is preserved structurally throughout.
pub(crate) fn exp_uniformized(p: &DMatrix<f64>, x: f64, tail: f64) -> DMatrix<f64> {
    const MAX_STEP: f64 = 50.0;
    let squarings = if x > MAX_STEP {
        (x / MAX_STEP).log2().ceil() as u32
    } else {
        0
    };
    let step = x / f64::powi(2.0, squarings as i32);

    let mut result = poisson_series(p, step, tail);
    normalize_rows(&mut result);
    for _ in 0..squarings {
        result = &result * &result;
        normalize_rows(&mut result);
    }
    result
}

fn poisson_series(p: &DMatrix<f64>, x: f64, tail: f64) -> DMatrix<f64> {
    let m = p.nrows();
    let mut weight = (-x).exp();
    let mut cumulative = weight;
    let mut term = DMatrix::<f64>::identity(m, m);
    let mut acc = &term * weight;
    // Generous cap: mean + 10 standard deviations of Poisson(x), plus slack.
    let cap = (x + 10.0 * x.sqrt() + 60.0) as usize;
    for k in 1..=cap {
        if 1.0 - cumulative < tail {
            break;
        }
        term = &term * p;
        weight *= x / k as f64;
        acc += &term * weight;
        cumulative += weight;
    }
    acc
}

fn normalize_rows(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        let sum: f64 = (0..n).map(|j| m[(i, j)]).sum();
        if sum > 0.0 {
            for j in 0..n {
                m[(i, j)] /= sum;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Ctmc;
    use approx::assert_abs_diff_eq;

    fn two_state(a: f64, b: f64) -> Ctmc {
        Ctmc::from_rows(&[vec![-a, a], vec![b, -b]], &[0.0, 1.0]).unwrap()
    }

    /// Closed form for the two-state transition function:
    /// `P_00(t) = b/(a+b) + a/(a+b) e^{-(a+b)t}`.
    fn two_state_p00(a: f64, b: f64, t: f64) -> f64 {
        b / (a + b) + a / (a + b) * (-(a + b) * t).exp()
    }

    #[test]
    fn uniformize_direct_formula() {
        let chain = two_state(1.0, 2.0);
        let p = chain.uniformize(2.0).unwrap();
        assert_abs_diff_eq!(p.get(0, 0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uniformize_at_exact_rate_zeroes_a_diagonal() {
        let chain = two_state(1.0, 3.0);
        let p = chain.uniformize(chain.uniformization_rate()).unwrap();
        let min_diag = (0..2).map(|i| p.get(i, i)).fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min_diag, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uniformize_rejects_small_eta() {
        let chain = two_state(1.0, 3.0);
        assert!(matches!(
            chain.uniformize(2.9),
            Err(CtmcError::EtaTooSmall { .. })
        ));
    }

    #[test]
    fn uniformized_keeps_pi_invariant() {
        let chain = two_state(2.0, 1.0);
        let p = chain.uniformize(5.0).unwrap();
        let left = p.matrix().transpose() * chain.pi();
        assert!((left - chain.pi()).amax() < 1e-14);
    }

    #[test]
    fn dampen_identity_and_half() {
        let p =
            TransitionMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(p.dampen(1.0).unwrap().matrix(), p.matrix());
        let half = p.dampen(0.5).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(half.get(i, j), 0.5, epsilon = 1e-15);
            }
        }
        assert!(matches!(p.dampen(0.0), Err(CtmcError::InvalidDampening(_))));
        assert!(matches!(p.dampen(1.1), Err(CtmcError::InvalidDampening(_))));
    }

    #[test]
    fn transition_at_zero_is_identity() {
        let chain = two_state(1.0, 2.0);
        let p = chain.transition_matrix(0.0).unwrap();
        assert_eq!(p.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn transition_matches_two_state_closed_form() {
        // a = b = 1, t = ln 2: P_00 = 1/2 + 1/2 * 2^{-2} = 5/8.
        let chain = two_state(1.0, 1.0);
        let t = std::f64::consts::LN_2;
        let p = chain.transition_matrix(t).unwrap();
        assert_abs_diff_eq!(p.get(0, 0), 0.625, epsilon = 1e-12);
        assert_abs_diff_eq!(p.get(0, 0), two_state_p00(1.0, 1.0, t), epsilon = 1e-12);

        // a = b = 1/2, t = ln 2: P_00 = 1/2 + 1/2 * 2^{-1} = 3/4.
        let chain = two_state(0.5, 0.5);
        let p = chain.transition_matrix(t).unwrap();
        assert_abs_diff_eq!(p.get(0, 0), 0.75, epsilon = 1e-12);

        for (a, b, t) in [(0.3, 1.7, 0.9), (2.0, 0.1, 3.4), (1.0, 1.0, 0.05)] {
            let chain = two_state(a, b);
            let p = chain.transition_matrix(t).unwrap();
            assert_abs_diff_eq!(p.get(0, 0), two_state_p00(a, b, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn transition_long_horizon_reaches_pi() {
        let chain = two_state(1.0, 2.0);
        // Spectral gap of the two-state chain is a + b = 3.
        let p = chain.transition_matrix(50.0 / 3.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(p.get(i, j), chain.pi()[j], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn transition_semigroup_property() {
        let q = vec![
            vec![-3.0, 2.0, 1.0],
            vec![0.5, -0.7, 0.2],
            vec![4.0, 1.0, -5.0],
        ];
        let chain = Ctmc::from_rows(&q, &[1.0, 2.0, 3.0]).unwrap();
        for (s, t) in [(0.3, 0.8), (1.1, 2.4), (0.01, 5.0)] {
            let ps = chain.transition_matrix(s).unwrap();
            let pt = chain.transition_matrix(t).unwrap();
            let pst = chain.transition_matrix(s + t).unwrap();
            let product = ps.matrix() * pt.matrix();
            assert!((product - pst.matrix()).amax() < 1e-8);
        }
    }

    #[test]
    fn transition_large_eta_t_stays_stochastic() {
        let chain = two_state(1.0, 2.0);
        let p = chain.transition_matrix(1.0e6).unwrap();
        for i in 0..2 {
            let sum: f64 = (0..2).map(|j| p.get(i, j)).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.get(i, 1), chain.pi()[1], epsilon = 1e-6);
        }
    }
}
