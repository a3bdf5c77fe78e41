use serde::Serialize;

use crate::spec::QueueSpec;

/// Workload bounds from the two extreme environment couplings.
///
/// `lower` replaces the modulated intensity by a plain Poisson stream at
/// the stationary mean rate; `upper` freezes the environment in its
/// stationary state, giving a mixture of fixed-rate queues. Both evaluate
/// the fixed-rate M/G/1 mean `lam E[S^2] / (2 (1 - lam E[S]))`, which is
/// simultaneously the mean waiting time and (by PASTA) the mean workload,
/// so the numbers bound either statistic. A frozen state at or above
/// capacity makes the upper bound infinite; neither bound depends on the
/// modulation rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RolskiBounds {
    pub lower: f64,
    pub upper: f64,
    pub lambda_bar: f64,
    pub rho: f64,
}

/// Mean waiting time / workload of the fixed-rate M/G/1 queue, infinite at
/// or above capacity.
fn mg1_mean(lambda: f64, mean_service: f64, second_moment: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let rho = lambda * mean_service;
    if rho >= 1.0 {
        f64::INFINITY
    } else {
        lambda * second_moment / (2.0 * (1.0 - rho))
    }
}

pub fn rolski_bounds(spec: &QueueSpec) -> RolskiBounds {
    let es = spec.service().mean();
    let es2 = spec.service().second_moment();
    let lambda_bar = spec.lambda_bar();
    let lower = mg1_mean(lambda_bar, es, es2);
    let chain = spec.chain();
    let mut upper = 0.0;
    for i in 0..chain.state_count() {
        let weight = chain.pi()[i];
        if weight == 0.0 {
            continue;
        }
        let term = mg1_mean(chain.lambda()[i], es, es2);
        upper += weight * term;
        if term.is_infinite() {
            upper = f64::INFINITY;
            break;
        }
    }
    RolskiBounds {
        lower,
        upper,
        lambda_bar,
        rho: lambda_bar * es,
    }
}
