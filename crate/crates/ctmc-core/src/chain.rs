use nalgebra::{DMatrix, DVector};

use crate::error::CtmcError;
use crate::policy::NumericPolicy;
use crate::transition::TransitionMatrix;
use crate::Result;

/// An irreducible finite-state CTMC together with a state-to-intensity map
/// and its cached stationary distribution.
///
/// States are stored sorted by ascending intensity value (ties broken by the
/// input index), so index order and intensity order coincide. The generator
/// diagonal is recomputed at construction, which pins the row sums to zero
/// up to rounding.
///
/// Modulation is tracked as a scalar factor on a fixed base generator, so
/// `modulate(c1 * c2)` and `modulate(c1).modulate(c2)` produce bit-identical
/// generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Ctmc {
    base_q: DMatrix<f64>,
    modulation: f64,
    q: DMatrix<f64>,
    lambda: DVector<f64>,
    pi: DVector<f64>,
    order: Vec<usize>,
    policy: NumericPolicy,
}

impl Ctmc {
    /// Builds a chain from a generator and an intensity vector, using the
    /// default numeric policy.
    pub fn new(q: DMatrix<f64>, lambda: Vec<f64>) -> Result<Self> {
        Self::with_policy(q, lambda, NumericPolicy::default())
    }

    /// Builds a chain from row-major rate rows. Convenience for tests and
    /// loaders.
    pub fn from_rows(rows: &[Vec<f64>], lambda: &[f64]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(CtmcError::NotAGenerator {
                row: rows.iter().position(|r| r.len() != m).unwrap_or(0),
                reason: "generator matrix is not square".into(),
            });
        }
        let q = DMatrix::from_row_iterator(m, m, rows.iter().flatten().copied());
        Self::new(q, lambda.to_vec())
    }

    /// Builds a chain under an explicit numeric policy.
    pub fn with_policy(q: DMatrix<f64>, lambda: Vec<f64>, policy: NumericPolicy) -> Result<Self> {
        let m = q.nrows();
        if q.ncols() != m {
            return Err(CtmcError::NotAGenerator {
                row: 0,
                reason: format!("matrix is {}x{}, not square", q.nrows(), q.ncols()),
            });
        }
        if m < 2 || m > policy.max_states {
            return Err(CtmcError::BadStateCount {
                m,
                max: policy.max_states,
            });
        }
        if lambda.len() != m {
            return Err(CtmcError::IntensityLength {
                got: lambda.len(),
                expected: m,
            });
        }
        for (i, &v) in lambda.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(CtmcError::InvalidIntensity { state: i, value: v });
            }
        }
        validate_generator(&q, &policy)?;

        // Canonical state order: ascending intensity, ties by input index.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            lambda[a]
                .partial_cmp(&lambda[b])
                .expect("intensities are finite")
                .then(a.cmp(&b))
        });

        let mut base_q = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    base_q[(i, j)] = q[(order[i], order[j])].max(0.0);
                }
            }
        }
        for i in 0..m {
            let off: f64 = (0..m).filter(|&j| j != i).map(|j| base_q[(i, j)]).sum();
            base_q[(i, i)] = -off;
        }
        let lambda = DVector::from_iterator(m, order.iter().map(|&i| lambda[i]));

        check_irreducible(&base_q)?;
        let pi = solve_stationary(&base_q, &policy)?;

        Ok(Self {
            q: base_q.clone(),
            base_q,
            modulation: 1.0,
            lambda,
            pi,
            order,
            policy,
        })
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.q.nrows()
    }

    /// The (modulated) generator matrix.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Intensity values in state order (ascending).
    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    /// Stationary distribution, computed at construction.
    pub fn pi(&self) -> &DVector<f64> {
        &self.pi
    }

    /// Modulation factor relative to the generator the chain was built from.
    pub fn modulation(&self) -> f64 {
        self.modulation
    }

    /// Permutation applied at construction: `state_order()[k]` is the input
    /// index of the state now stored at position `k`.
    pub fn state_order(&self) -> &[usize] {
        &self.order
    }

    /// The numeric policy the chain was built under.
    pub fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    /// Stationary mean intensity `sum_i pi_i lambda_i`.
    pub fn mean_intensity(&self) -> f64 {
        self.pi.dot(&self.lambda)
    }

    /// Largest diagonal magnitude `max_i |Q_ii|` of the modulated generator.
    pub fn uniformization_rate(&self) -> f64 {
        (0..self.state_count())
            .map(|i| self.q[(i, i)].abs())
            .fold(0.0, f64::max)
    }

    /// Whether the chain satisfies detailed balance `pi_i Q_ij = pi_j Q_ji`
    /// within `tol` (absolute, scaled by the largest rate).
    pub fn is_reversible(&self, tol: f64) -> bool {
        let m = self.state_count();
        let scale = 1.0 + self.uniformization_rate();
        for i in 0..m {
            for j in (i + 1)..m {
                let flow = self.pi[i] * self.q[(i, j)] - self.pi[j] * self.q[(j, i)];
                if flow.abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Time-rescaled chain: the environment `lambda(ct)` is generated by
    /// `cQ` with the same intensities and the same stationary law.
    pub fn modulate(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(CtmcError::InvalidModulation(c));
        }
        let modulation = self.modulation * c;
        Ok(Self {
            q: &self.base_q * modulation,
            base_q: self.base_q.clone(),
            modulation,
            lambda: self.lambda.clone(),
            pi: self.pi.clone(),
            order: self.order.clone(),
            policy: self.policy,
        })
    }

    /// Time-reversed chain with generator `Q*_ij = (pi_j / pi_i) Q_ji`.
    ///
    /// Shares the intensities and the stationary distribution; reversal is an
    /// involution up to rounding.
    pub fn time_reverse(&self) -> Self {
        let m = self.state_count();
        let mut qs = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    qs[(i, j)] = self.pi[j] / self.pi[i] * self.q[(j, i)];
                }
            }
        }
        for i in 0..m {
            let off: f64 = (0..m).filter(|&j| j != i).map(|j| qs[(i, j)]).sum();
            qs[(i, i)] = -off;
        }
        Self {
            base_q: qs.clone(),
            modulation: 1.0,
            q: qs,
            lambda: self.lambda.clone(),
            pi: self.pi.clone(),
            order: self.order.clone(),
            policy: self.policy,
        }
    }

    /// Uniformized jump matrix `P = I + Q/eta`. Requires
    /// `eta >= max_i |Q_ii|`.
    pub fn uniformize(&self, eta: f64) -> Result<TransitionMatrix> {
        let required = self.uniformization_rate();
        if eta.is_nan() || eta < required {
            return Err(CtmcError::EtaTooSmall { eta, required });
        }
        let m = self.state_count();
        let mut p = &self.q / eta;
        for i in 0..m {
            p[(i, i)] += 1.0;
        }
        TransitionMatrix::from_parts(p, &self.policy)
    }

    /// Transition probabilities `exp(Qt)`, computed by the uniformization
    /// series with Poisson-tail truncation, plus repeated squaring for large
    /// `eta * t`.
    pub fn transition_matrix(&self, t: f64) -> Result<TransitionMatrix> {
        if !t.is_finite() || t < 0.0 {
            return Err(CtmcError::NegativeTime(t));
        }
        let m = self.state_count();
        let eta = self.uniformization_rate();
        if t == 0.0 || eta == 0.0 {
            return TransitionMatrix::from_parts(DMatrix::identity(m, m), &self.policy);
        }
        let p = {
            let mut p = &self.q / eta;
            for i in 0..m {
                p[(i, i)] += 1.0;
            }
            p
        };
        let expm = crate::transition::exp_uniformized(&p, eta * t, self.policy.poisson_tail);
        TransitionMatrix::from_parts(expm, &self.policy)
    }
}

/// Checks generator validity (squareness is the caller's job): nonnegative
/// off-diagonal rates and near-zero row sums, per the input tolerance.
fn validate_generator(q: &DMatrix<f64>, policy: &NumericPolicy) -> Result<()> {
    let m = q.nrows();
    for i in 0..m {
        let mut sum = 0.0;
        for j in 0..m {
            let v = q[(i, j)];
            if !v.is_finite() {
                return Err(CtmcError::NotAGenerator {
                    row: i,
                    reason: format!("non-finite rate at column {j}"),
                });
            }
            if i != j && v < -policy.row_sum_input_tol {
                return Err(CtmcError::NotAGenerator {
                    row: i,
                    reason: format!("negative off-diagonal rate {v} at column {j}"),
                });
            }
            sum += v;
        }
        if sum.abs() > policy.row_sum_input_tol {
            return Err(CtmcError::NotAGenerator {
                row: i,
                reason: format!(
                    "row sum {sum:e} exceeds tolerance {:e}",
                    policy.row_sum_input_tol
                ),
            });
        }
    }
    Ok(())
}

/// Strong connectivity of the directed graph of positive off-diagonal rates.
fn check_irreducible(q: &DMatrix<f64>) -> Result<()> {
    let m = q.nrows();
    let reach = |transpose: bool| -> Vec<bool> {
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                let rate = if transpose { q[(j, i)] } else { q[(i, j)] };
                if i != j && rate > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    let fwd = reach(false);
    let bwd = reach(true);
    for s in 0..m {
        if !fwd[s] || !bwd[s] {
            return Err(CtmcError::NotIrreducible { state: s });
        }
    }
    Ok(())
}

/// Solves `pi^T Q = 0`, `sum pi = 1` as a dense linear system with the last
/// equation replaced by the normalization, then verifies the residual.
fn solve_stationary(q: &DMatrix<f64>, policy: &NumericPolicy) -> Result<DVector<f64>> {
    let m = q.nrows();
    let mut a = q.transpose();
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(m);
    b[m - 1] = 1.0;
    let lu = a.lu();
    let mut pi = lu
        .solve(&b)
        .ok_or_else(|| CtmcError::StationarySolve("singular linear system".into()))?;

    // Clip rounding-level negatives and renormalize.
    for v in pi.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    if total <= 0.0 {
        return Err(CtmcError::StationarySolve("vanishing solution mass".into()));
    }
    pi /= total;

    let residual = (q.transpose() * &pi).amax();
    let scale = 1.0 + q.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if residual > policy.stationary_residual_tol * scale {
        return Err(CtmcError::StationarySolve(format!(
            "residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(pi)
}

/// Stationary distribution of a raw generator matrix: validates the
/// generator contract and irreducibility, then solves the linear system.
pub fn stationary_distribution(q: &DMatrix<f64>, policy: &NumericPolicy) -> Result<DVector<f64>> {
    if q.nrows() != q.ncols() {
        return Err(CtmcError::NotAGenerator {
            row: 0,
            reason: "matrix is not square".into(),
        });
    }
    validate_generator(q, policy)?;
    check_irreducible(q)?;
    solve_stationary(q, policy)
}
