//! Dense bounded-variable primal simplex for homogeneous inequality systems.
//!
//! Solves `minimize c.x` subject to `A x >= 0` and box bounds
//! `l <= x <= u`. Slack variables turn the rows into equalities; the slack
//! basis with every structural variable at its lower bound is the starting
//! point, so the solver requires `A l >= 0` (for supermodular-cone rows the
//! coefficients of each row sum to zero, hence any constant vector is
//! feasible). Pricing is Dantzig's rule, switching permanently to Bland's
//! rule when degenerate pivots stall, which guarantees termination.

/// `minimize objective . x` over `{x : constraints . x >= 0, lower <= x <= upper}`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub objective: Vec<f64>,
    /// Dense constraint rows; each row `a` encodes `a . x >= 0`.
    pub constraints: Vec<Vec<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Optimal point with solver diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Largest violation of `A x >= 0` at the returned point.
    pub feasibility_residual: f64,
}

#[derive(Debug, Clone)]
pub enum SimplexError {
    /// The all-lower-bounds point violates `A x >= 0`.
    InfeasibleStart { row: usize, value: f64 },
    /// Iteration cap reached without optimality.
    IterationLimit { iterations: usize },
    /// Objective unbounded below (cannot happen with finite boxes).
    Unbounded,
    /// Malformed input dimensions.
    BadShape(String),
}

impl std::fmt::Display for SimplexError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::InfeasibleStart { row, value } => {
                write!(f, "starting point violates row {row} by {value:e}")
            }
            Self::IterationLimit { iterations } => {
                write!(f, "no optimum after {iterations} pivots")
            }
            Self::Unbounded => write!(f, "objective unbounded below"),
            Self::BadShape(s) => write!(f, "bad shape: {s}"),
        }
    }
}

impl std::error::Error for SimplexError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
const STALL_LIMIT: usize = 64;
const REFRESH_PERIOD: usize = 128;

pub fn solve(problem: &Problem) -> Result<Solution, SimplexError> {
    let n = problem.objective.len();
    let m = problem.constraints.len();
    if problem.lower.len() != n || problem.upper.len() != n {
        return Err(SimplexError::BadShape(
            "bounds length != objective length".into(),
        ));
    }
    if let Some(row) = problem.constraints.iter().position(|r| r.len() != n) {
        return Err(SimplexError::BadShape(format!(
            "constraint row {row} has wrong length"
        )));
    }
    if let Some(j) = (0..n).find(|&j| problem.lower[j] > problem.upper[j]) {
        return Err(SimplexError::BadShape(format!(
            "lower > upper at variable {j}"
        )));
    }

    let total = n + m;
    let lower = |j: usize| if j < n { problem.lower[j] } else { 0.0 };
    let upper = |j: usize| {
        if j < n {
            problem.upper[j]
        } else {
            f64::INFINITY
        }
    };
    let cost = |j: usize| if j < n { problem.objective[j] } else { 0.0 };

    // Tableau B^-1 [A | -I] for the slack basis B = -I.
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; total];
            for j in 0..n {
                row[j] = -problem.constraints[i][j];
            }
            row[n + i] = 1.0;
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();
    let mut state: Vec<VarState> = (0..total)
        .map(|j| {
            if j < n {
                VarState::AtLower
            } else {
                VarState::Basic(j - n)
            }
        })
        .collect();
    for (i, &b) in basis.iter().enumerate() {
        state[b] = VarState::Basic(i);
    }

    // Nonbasic value of a variable under the current state.
    let nb_value = |j: usize, state: &[VarState]| -> f64 {
        match state[j] {
            VarState::AtLower => lower(j),
            VarState::AtUpper => upper(j),
            VarState::Basic(_) => unreachable!("basic variable has no bound value"),
        }
    };

    // x_B = -sum_{nonbasic j} T[:,j] x_j (the right-hand side is zero).
    let recompute_xb = |t: &[Vec<f64>], state: &[VarState]| -> Vec<f64> {
        let mut xb = vec![0.0; m];
        for j in 0..total {
            if let VarState::Basic(_) = state[j] {
                continue;
            }
            let xj = nb_value(j, state);
            if xj != 0.0 {
                for i in 0..m {
                    xb[i] -= t[i][j] * xj;
                }
            }
        }
        xb
    };
    let recompute_costs = |t: &[Vec<f64>], basis: &[usize]| -> Vec<f64> {
        let mut dj: Vec<f64> = (0..total).map(cost).collect();
        for (i, &b) in basis.iter().enumerate() {
            let cb = cost(b);
            if cb != 0.0 {
                for j in 0..total {
                    dj[j] -= cb * t[i][j];
                }
            }
        }
        dj
    };

    let mut xb = recompute_xb(&t, &state);
    for (i, &v) in xb.iter().enumerate() {
        if v < -1e-9 {
            return Err(SimplexError::InfeasibleStart { row: i, value: v });
        }
    }
    let mut dj = recompute_costs(&t, &basis);

    let max_iter = 20_000 + 40 * total;
    let mut bland = false;
    let mut stall = 0usize;
    let mut iterations = 0usize;

    loop {
        if iterations >= max_iter {
            return Err(SimplexError::IterationLimit { iterations });
        }

        // Entering variable: improving nonbasic, by Dantzig or Bland pricing.
        let mut entering: Option<(usize, f64)> = None; // (var, direction)
        let mut best_score = COST_EPS;
        for j in 0..total {
            let dir = match state[j] {
                VarState::AtLower if dj[j] < -COST_EPS => 1.0,
                VarState::AtUpper if dj[j] > COST_EPS => -1.0,
                _ => continue,
            };
            if bland {
                entering = Some((j, dir));
                break;
            }
            if dj[j].abs() > best_score {
                best_score = dj[j].abs();
                entering = Some((j, dir));
            }
        }
        let Some((j, dir)) = entering else {
            break; // optimal
        };

        // Ratio test. delta_i = -dir * t[i][j] is the rate of change of the
        // i-th basic variable per unit increase of the entering step.
        let mut theta = upper(j) - lower(j); // bound flip
        let mut leaving: Option<usize> = None;
        for i in 0..m {
            let delta = -dir * t[i][j];
            let (limit, _hits_lower) = if delta < -PIVOT_EPS {
                ((xb[i] - lower(basis[i])) / -delta, true)
            } else if delta > PIVOT_EPS {
                let ub = upper(basis[i]);
                if ub.is_infinite() {
                    continue;
                }
                ((ub - xb[i]) / delta, false)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let replace = match leaving {
                None => limit < theta - 1e-13,
                Some(r) => {
                    if limit < theta - 1e-13 {
                        true
                    } else if limit <= theta + 1e-13 {
                        // Tie: Bland picks the smallest variable index,
                        // otherwise prefer the larger pivot for stability.
                        if bland {
                            basis[i] < basis[r]
                        } else {
                            t[i][j].abs() > t[r][j].abs()
                        }
                    } else {
                        false
                    }
                }
            };
            if replace {
                theta = limit.min(theta);
                leaving = Some(i);
            }
        }

        if theta.is_infinite() {
            return Err(SimplexError::Unbounded);
        }

        iterations += 1;
        if theta <= PIVOT_EPS {
            stall += 1;
            if stall > STALL_LIMIT {
                bland = true;
            }
        } else {
            stall = 0;
        }

        match leaving {
            None => {
                // Bound flip: entering variable jumps to its other bound.
                for i in 0..m {
                    xb[i] += -dir * t[i][j] * theta;
                }
                state[j] = match state[j] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    VarState::Basic(_) => unreachable!(),
                };
            }
            Some(r) => {
                let entering_value = nb_value(j, &state) + dir * theta;
                let delta_r = -dir * t[r][j];
                let leaving_var = basis[r];
                for i in 0..m {
                    if i != r {
                        xb[i] += -dir * t[i][j] * theta;
                    }
                }
                state[leaving_var] = if delta_r < 0.0 {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                basis[r] = j;
                state[j] = VarState::Basic(r);
                xb[r] = entering_value;

                // Gauss-Jordan elimination on the entering column.
                let pivot = t[r][j];
                for v in t[r].iter_mut() {
                    *v /= pivot;
                }
                let pivot_row = t[r].clone();
                for (i, row) in t.iter_mut().enumerate() {
                    if i == r {
                        continue;
                    }
                    let f = row[j];
                    if f != 0.0 {
                        for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                            *v -= f * pv;
                        }
                    }
                }
                let f = dj[j];
                if f != 0.0 {
                    for (v, &pv) in dj.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }

        // Periodic refresh against accumulated rounding.
        if iterations.is_multiple_of(REFRESH_PERIOD) {
            xb = recompute_xb(&t, &state);
            dj = recompute_costs(&t, &basis);
        }
    }

    // Assemble the structural solution.
    let mut x = vec![0.0; n];
    for j in 0..n {
        x[j] = match state[j] {
            VarState::AtLower => problem.lower[j],
            VarState::AtUpper => problem.upper[j],
            VarState::Basic(r) => xb[r].clamp(problem.lower[j], problem.upper[j]),
        };
    }
    let objective = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let mut residual = 0.0f64;
    for row in &problem.constraints {
        let value: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
        residual = residual.max(-value);
    }
    Ok(Solution {
        x,
        objective,
        iterations,
        feasibility_residual: residual.max(0.0),
    })
}
