use nalgebra::{DMatrix, DVector};

use crate::error::QueueError;
use crate::estimate::{EstimateDiagnostics, EstimateMethod, WorkloadEstimate};
use crate::service::ServiceDistribution;
use crate::spec::QueueSpec;
use crate::Result;

/// Convergence knobs for the matrix-geometric solve.
#[derive(Debug, Clone, Copy)]
pub struct QbdOptions {
    /// Entrywise change at which the `R` iteration stops.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for QbdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iterations: 1_000_000,
        }
    }
}

/// Exact mean stationary workload for exponential service.
///
/// The pair (queue length, environment state) is a level-independent
/// quasi-birth-death process with blocks
///
/// ```text
/// A0 = diag(lambda)   (arrival, level up)
/// A2 = mu I           (service completion, level down)
/// A1 = cQ - A0 - A2   (local, levels >= 1)
/// B1 = cQ - A0        (local at the empty level)
/// ```
///
/// The minimal nonnegative `R` solving `A0 + R A1 + R^2 A2 = 0` is found by
/// the fixed-point iteration `R <- (A0 + R^2 A2)(-A1)^{-1}` from zero; the
/// boundary vector solves `x0 (B1 + R A2) = 0` normalized by
/// `x0 (I-R)^{-1} 1 = 1`. Then `E[N] = x0 R (I-R)^{-2} 1`, and memoryless
/// service residuals give mean workload `E[N] / mu`.
pub fn qbd_mean_workload(spec: &QueueSpec, opts: &QbdOptions) -> Result<WorkloadEstimate> {
    let ServiceDistribution::Exponential { mu } = *spec.service() else {
        return Err(QueueError::NotExponentialService);
    };
    let stability = spec.stability_check();
    if !stability.stable {
        return Err(QueueError::Unstable { rho: stability.rho });
    }

    let chain = spec.chain().modulate(spec.c())?;
    let m = chain.state_count();
    let cq = chain.generator();
    let lambda = chain.lambda();

    let a0 = DMatrix::from_diagonal(lambda);
    // A1 = cQ - A0 - mu I; its negation is strictly diagonally dominant,
    // hence invertible.
    let mut a1 = cq.clone();
    for i in 0..m {
        a1[(i, i)] -= lambda[i] + mu;
    }
    let neg_a1_inv = (-&a1)
        .try_inverse()
        .ok_or_else(|| QueueError::Numerical("local block not invertible".into()))?;

    let mut r = DMatrix::<f64>::zeros(m, m);
    let mut iterations = 0;
    loop {
        if iterations >= opts.max_iterations {
            return Err(QueueError::NoConvergence {
                iterations: opts.max_iterations,
            });
        }
        iterations += 1;
        let next = (&a0 + &r * &r * mu) * &neg_a1_inv;
        let delta = (&next - &r).amax();
        r = next;
        if delta < opts.tol {
            break;
        }
    }

    let spectral_radius = r
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if spectral_radius >= 1.0 {
        return Err(QueueError::Numerical(format!(
            "rate matrix spectral radius {spectral_radius} not below 1"
        )));
    }

    // Boundary: x0 (B1 + R A2) = 0 with B1 = cQ - A0 and A2 = mu I. One
    // balance equation is redundant; replace it by a temporary scale.
    let boundary = cq - &a0 + &r * mu;
    let mut system = boundary.transpose();
    for j in 0..m {
        system[(m - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(m);
    rhs[m - 1] = 1.0;
    let mut x0 = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| QueueError::Numerical("singular boundary system".into()))?;
    for v in x0.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }

    let identity = DMatrix::<f64>::identity(m, m);
    let i_minus_r = &identity - &r;
    let lu = i_minus_r.lu();
    let ones = DVector::from_element(m, 1.0);
    let w = lu
        .solve(&ones)
        .ok_or_else(|| QueueError::Numerical("I - R singular".into()))?;
    let total = x0.dot(&w);
    if total.is_nan() || total <= 0.0 {
        return Err(QueueError::Numerical("degenerate boundary mass".into()));
    }
    x0 /= total;

    let v = lu
        .solve(&w)
        .ok_or_else(|| QueueError::Numerical("I - R singular".into()))?;
    let mean_queue = x0.dot(&(&r * v));

    Ok(WorkloadEstimate {
        value: mean_queue / mu,
        half_width: 0.0,
        method: EstimateMethod::QbdExact,
        diagnostics: EstimateDiagnostics::Qbd {
            iterations,
            spectral_radius,
        },
    })
}
