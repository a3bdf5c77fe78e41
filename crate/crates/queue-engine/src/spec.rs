use ctmc_core::Ctmc;
use serde::Serialize;

use crate::error::QueueError;
use crate::service::ServiceDistribution;
use crate::Result;

/// One queueing instance: a baseline intensity chain, a modulation rate,
/// and a service distribution.
#[derive(Debug, Clone)]
pub struct QueueSpec {
    chain: Ctmc,
    c: f64,
    service: ServiceDistribution,
}

/// Stability diagnostics. The mean arrival rate is a stationary quantity,
/// so neither it nor `rho` depends on the modulation rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub rho: f64,
    pub lambda_bar: f64,
}

impl QueueSpec {
    pub fn new(chain: Ctmc, c: f64, service: ServiceDistribution) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(QueueError::InvalidSpec(format!(
                "modulation rate must be positive, got {c}"
            )));
        }
        service.validate()?;
        Ok(Self { chain, c, service })
    }

    pub fn chain(&self) -> &Ctmc {
        &self.chain
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn service(&self) -> &ServiceDistribution {
        &self.service
    }

    /// Same spec at a different modulation rate.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.chain.clone(), c, self.service.clone())
    }

    /// Stationary mean arrival rate `sum_i pi_i lambda_i`.
    pub fn lambda_bar(&self) -> f64 {
        self.chain.mean_intensity()
    }

    /// Traffic intensity `lambda_bar * E[S]`.
    pub fn rho(&self) -> f64 {
        self.lambda_bar() * self.service.mean()
    }

    /// Stable iff `rho < 1`.
    pub fn stability_check(&self) -> StabilityReport {
        let lambda_bar = self.lambda_bar();
        let rho = lambda_bar * self.service.mean();
        StabilityReport {
            stable: rho < 1.0,
            rho,
            lambda_bar,
        }
    }
}
